#ifndef REPID_TREE_HPP
#define REPID_TREE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "repid/ice.hpp"
#include "repid/report.hpp"

namespace repid {

// Recursive binary partitioning of observations that minimizes the summed
// per-grid-point L2 loss of mean-centered ICE curves. Splitting a group only
// pays off when the curves inside it differ in shape, i.e. when the feature
// of interest interacts with the split feature, so the realized risk
// reductions double as interaction-strength scores.

struct StopParams {
    std::size_t max_depth = 6;
    std::size_t min_node = 10;
    double gamma = 0.15;
    // Required relative risk reduction (fraction of root risk) of the root
    // split; the gamma rule needs a parent and cannot gate the root.
    double min_abs_improvement = 0.01;
};

struct Split {
    int feature = -1;
    bool categorical = false;
    double threshold = 0.0;           // numeric: left is value <= threshold
    std::vector<int> left_levels;     // categorical: left is level in this set

    bool send_left(double value) const {
        if (!categorical) return value <= threshold;
        const int lv = static_cast<int>(value);
        return std::find(left_levels.begin(), left_levels.end(), lv) !=
               left_levels.end();
    }

    bool operator==(const Split&) const = default;
};

struct TreeNode {
    std::size_t id = 0;
    std::size_t depth = 0;
    int parent = -1;
    std::vector<std::size_t> obs;  // sorted ascending
    double risk = 0.0;
    std::optional<Split> split;
    int left = -1, right = -1;
    double int_imp = 0.0;  // realized relative risk reduction of this node's split

    bool is_terminal() const { return !split.has_value(); }
};

struct RepidTree {
    std::vector<TreeNode> nodes;
    double root_risk = 0.0;
    int feature_s = -1;
    StopParams stop;

    std::vector<std::size_t> terminal_ids() const {
        std::vector<std::size_t> ids;
        for (const auto& n : nodes)
            if (n.is_terminal()) ids.push_back(n.id);
        return ids;
    }
    std::vector<std::size_t> parent_ids() const {
        std::vector<std::size_t> ids;
        for (const auto& n : nodes)
            if (!n.is_terminal()) ids.push_back(n.id);
        return ids;
    }
};

// Grid-wise L2 risk: sum over grid points of the within-group sum of squared
// deviations from the group mean curve. No 1/m or 1/|obs| normalization.
inline double node_risk(const IceMatrix& cice, std::span<const std::size_t> obs) {
    if (!cice.centered) throw_data("node_risk: ICE matrix must be centered");
    if (obs.empty()) throw_data("node_risk: empty observation set");
    const std::size_t m = cice.m();
    std::vector<double> col(obs.size()), risks(m);
    for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t t = 0; t < obs.size(); ++t) col[t] = cice.values(obs[t], k);
        risks[k] = sum_sq_dev(col);
    }
    return pairwise_sum(risks);
}

struct BestSplit {
    Split split;
    double objective = 0.0;  // risk(left) + risk(right)
    std::vector<std::size_t> left_obs;
    std::vector<std::size_t> right_obs;
};

namespace detail {

// Numeric candidates are midpoints between consecutive distinct sorted
// values. Nodes larger than this fall back to at most 100 quantile-spaced
// candidate positions; smaller nodes are searched exhaustively.
inline constexpr std::size_t exhaustive_split_limit = 2000;
inline constexpr std::size_t capped_candidates = 100;
inline constexpr std::size_t max_categorical_levels = 12;

struct SweepState {
    // Running left-side sums per grid column; objective of a boundary with
    // n_left rows on the left follows from sum/sum-of-squares identities.
    std::vector<double> left_s1, left_s2, tot_s1, tot_s2;

    void init(const IceMatrix& cice, std::span<const std::size_t> obs) {
        const std::size_t m = cice.m();
        left_s1.assign(m, 0.0);
        left_s2.assign(m, 0.0);
        tot_s1.assign(m, 0.0);
        tot_s2.assign(m, 0.0);
        for (std::size_t i : obs)
            for (std::size_t k = 0; k < m; ++k) {
                const double v = cice.values(i, k);
                tot_s1[k] += v;
                tot_s2[k] += v * v;
            }
    }

    void push_left(const IceMatrix& cice, std::size_t i) {
        for (std::size_t k = 0; k < left_s1.size(); ++k) {
            const double v = cice.values(i, k);
            left_s1[k] += v;
            left_s2[k] += v * v;
        }
    }

    double objective(std::size_t n_left, std::size_t n_total) const {
        const double nl = static_cast<double>(n_left);
        const double nr = static_cast<double>(n_total - n_left);
        double obj = 0.0;
        for (std::size_t k = 0; k < left_s1.size(); ++k) {
            const double r1 = tot_s1[k] - left_s1[k];
            const double r2 = tot_s2[k] - left_s2[k];
            obj += (left_s2[k] - left_s1[k] * left_s1[k] / nl) + (r2 - r1 * r1 / nr);
        }
        return obj;
    }
};

}  // namespace detail

// Exhaustive argmin over every complement feature and every admissible split
// candidate of risk(left) + risk(right). Ties break lexicographically on
// (objective, feature index, threshold / level mask) through the scan order.
// Returns nothing when no candidate leaves min_node observations on both
// sides.
inline std::optional<BestSplit> best_split(const IceMatrix& cice, const Dataset& ds,
                                           std::span<const std::size_t> obs,
                                           const StopParams& stop) {
    const std::size_t n_node = obs.size();
    if (n_node < 2 * stop.min_node) return std::nullopt;

    bool found = false;
    double best_obj = 0.0;
    Split best;

    detail::SweepState sweep;

    for (int j = 0; j < static_cast<int>(ds.p()); ++j) {
        if (j == cice.feature_s) continue;
        const auto& col = ds.columns[static_cast<std::size_t>(j)];
        const auto& meta = ds.metas[static_cast<std::size_t>(j)];

        if (meta.kind == FeatureKind::numeric) {
            std::vector<std::size_t> order(obs.begin(), obs.end());
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return col[a] != col[b] ? col[a] < col[b] : a < b;
            });

            // Boundary positions t: first t sorted rows go left. Admissible
            // when the value actually changes and both sides are large enough.
            std::vector<std::size_t> boundaries;
            for (std::size_t t = stop.min_node; t + stop.min_node <= n_node; ++t)
                if (col[order[t - 1]] < col[order[t]]) boundaries.push_back(t);
            if (boundaries.empty()) continue;
            if (n_node > detail::exhaustive_split_limit &&
                boundaries.size() > detail::capped_candidates) {
                std::vector<std::size_t> picked(detail::capped_candidates);
                for (std::size_t c = 0; c < detail::capped_candidates; ++c)
                    picked[c] = boundaries[(c * (boundaries.size() - 1)) /
                                           (detail::capped_candidates - 1)];
                picked.erase(std::unique(picked.begin(), picked.end()), picked.end());
                boundaries = std::move(picked);
            }

            sweep.init(cice, obs);
            std::size_t pushed = 0;
            for (std::size_t t : boundaries) {
                while (pushed < t) sweep.push_left(cice, order[pushed++]);
                const double obj = sweep.objective(t, n_node);
                if (!found || obj < best_obj) {
                    found = true;
                    best_obj = obj;
                    best = Split{j, false,
                                 0.5 * (col[order[t - 1]] + col[order[t]]),
                                 {}};
                }
            }
        } else {
            // Exhaustive search over all binary level partitions; the first
            // present level is pinned right so each partition appears once.
            std::vector<int> present;
            for (std::size_t i : obs) {
                const int lv = static_cast<int>(col[i]);
                if (std::find(present.begin(), present.end(), lv) == present.end())
                    present.push_back(lv);
            }
            std::sort(present.begin(), present.end());
            if (present.size() < 2) continue;
            if (present.size() > detail::max_categorical_levels)
                throw_data("best_split: categorical feature '" + meta.name +
                           "' has too many levels for exhaustive search");

            const std::size_t m = cice.m();
            const std::size_t nl_levels = present.size() - 1;
            std::vector<std::size_t> level_count(present.size(), 0);
            std::vector<std::vector<double>> level_s1(present.size(),
                                                      std::vector<double>(m, 0.0));
            std::vector<std::vector<double>> level_s2 = level_s1;
            std::vector<double> tot_s1(m, 0.0), tot_s2(m, 0.0);
            for (std::size_t i : obs) {
                const int lv = static_cast<int>(col[i]);
                const std::size_t pos = static_cast<std::size_t>(
                    std::find(present.begin(), present.end(), lv) - present.begin());
                ++level_count[pos];
                for (std::size_t k = 0; k < m; ++k) {
                    const double v = cice.values(i, k);
                    level_s1[pos][k] += v;
                    level_s2[pos][k] += v * v;
                    tot_s1[k] += v;
                    tot_s2[k] += v * v;
                }
            }

            std::vector<double> ls1(m), ls2(m);
            for (std::uint32_t mask = 1; mask < (1u << nl_levels); ++mask) {
                std::size_t n_left = 0;
                std::fill(ls1.begin(), ls1.end(), 0.0);
                std::fill(ls2.begin(), ls2.end(), 0.0);
                for (std::size_t b = 0; b < nl_levels; ++b) {
                    if (!(mask & (1u << b))) continue;
                    n_left += level_count[b + 1];
                    for (std::size_t k = 0; k < m; ++k) {
                        ls1[k] += level_s1[b + 1][k];
                        ls2[k] += level_s2[b + 1][k];
                    }
                }
                const std::size_t n_right = n_node - n_left;
                if (n_left < stop.min_node || n_right < stop.min_node) continue;
                double obj = 0.0;
                const double nl = static_cast<double>(n_left);
                const double nr = static_cast<double>(n_right);
                for (std::size_t k = 0; k < m; ++k) {
                    const double r1 = tot_s1[k] - ls1[k];
                    const double r2 = tot_s2[k] - ls2[k];
                    obj += (ls2[k] - ls1[k] * ls1[k] / nl) + (r2 - r1 * r1 / nr);
                }
                if (!found || obj < best_obj) {
                    found = true;
                    best_obj = obj;
                    best = Split{j, true, 0.0, {}};
                    for (std::size_t b = 0; b < nl_levels; ++b)
                        if (mask & (1u << b)) best.left_levels.push_back(present[b + 1]);
                }
            }
        }
    }

    if (!found) return std::nullopt;

    BestSplit result;
    result.split = best;
    const auto& col = ds.columns[static_cast<std::size_t>(best.feature)];
    for (std::size_t i : obs)
        (best.send_left(col[i]) ? result.left_obs : result.right_obs).push_back(i);
    // Canonical two-pass risks for the reported objective; the sweep value
    // only steered the argmin.
    result.objective =
        node_risk(cice, result.left_obs) + node_risk(cice, result.right_obs);
    return result;
}

// Fits the partition tree, breadth-first. A node is split only while
//   depth < max_depth, both children hold >= min_node observations,
//   its relative improvement passes the gamma rule against its parent
//   (the root instead needs intImp >= min_abs_improvement), and the
//   risk reduction is strictly positive.
inline RepidTree fit_repid(const IceMatrix& cice, const Dataset& ds,
                           const StopParams& stop) {
    if (!cice.centered) throw_data("fit_repid: ICE matrix must be centered");
    if (cice.n() != ds.n()) throw_data("fit_repid: dataset / ICE size mismatch");

    RepidTree tree;
    tree.feature_s = cice.feature_s;
    tree.stop = stop;

    TreeNode root;
    root.id = 0;
    root.obs = all_rows(cice.n());
    root.risk = node_risk(cice, root.obs);
    tree.root_risk = root.risk;
    tree.nodes.push_back(std::move(root));

    // Centered curves whose spread sits at float-cancellation level carry no
    // interaction signal; splitting them would only chase rounding noise.
    const double noise = 1e-10 * std::max(1.0, cice.value_scale);
    const double risk_floor =
        static_cast<double>(cice.n() * cice.m()) * noise * noise;
    if (tree.root_risk <= risk_floor) return tree;

    std::deque<std::size_t> queue{0};
    while (!queue.empty()) {
        const std::size_t id = queue.front();
        queue.pop_front();

        if (tree.nodes[id].depth >= stop.max_depth) continue;
        if (tree.nodes[id].obs.size() < 2 * stop.min_node) continue;

        auto cand = best_split(cice, ds, tree.nodes[id].obs, stop);
        if (!cand) continue;

        const double reduction = tree.nodes[id].risk - cand->objective;
        if (!(reduction > 0.0)) continue;
        const double int_imp = reduction / tree.root_risk;
        if (tree.nodes[id].parent < 0) {
            if (int_imp < stop.min_abs_improvement) continue;
        } else {
            const double parent_imp =
                tree.nodes[static_cast<std::size_t>(tree.nodes[id].parent)].int_imp;
            if (int_imp < stop.gamma * parent_imp) continue;
        }

        TreeNode left, right;
        left.id = tree.nodes.size();
        right.id = tree.nodes.size() + 1;
        left.parent = right.parent = static_cast<int>(id);
        left.depth = right.depth = tree.nodes[id].depth + 1;
        left.obs = std::move(cand->left_obs);
        right.obs = std::move(cand->right_obs);
        left.risk = node_risk(cice, left.obs);
        right.risk = node_risk(cice, right.obs);

        if (left.risk + right.risk > tree.nodes[id].risk + 1e-9)
            throw_data("fit_repid: split increased risk (numerical fault)");

        tree.nodes[id].split = cand->split;
        tree.nodes[id].left = static_cast<int>(left.id);
        tree.nodes[id].right = static_cast<int>(right.id);
        tree.nodes[id].int_imp = int_imp;

        queue.push_back(left.id);
        queue.push_back(right.id);
        tree.nodes.push_back(std::move(left));
        tree.nodes.push_back(std::move(right));
    }
    return tree;
}

// Relative interaction importance per feature: the summed relative risk
// reductions of all nodes split on that feature. R^2_int is the same sum
// over all parents, which telescopes to 1 - (terminal risk) / (root risk);
// both routes are computed and must agree.
inline InteractionReport interaction_report(const RepidTree& tree,
                                            const Dataset& ds) {
    InteractionReport report;
    report.method = Method::repid;
    report.feature_s = tree.feature_s;
    for (int j = 0; j < static_cast<int>(ds.p()); ++j)
        if (j != tree.feature_s) report.scores[j] = 0.0;

    if (tree.root_risk <= 0.0) {
        report.no_interaction = true;
        report.r2_int = 0.0;
        report.compute_ranks();
        return report;
    }

    double sum_parents = 0.0;
    double terminal_risk = 0.0;
    for (const auto& node : tree.nodes) {
        if (node.is_terminal()) {
            terminal_risk += node.risk;
        } else {
            report.scores[node.split->feature] += node.int_imp;
            sum_parents += node.int_imp;
        }
    }
    const double telescoped = 1.0 - terminal_risk / tree.root_risk;
    if (std::fabs(sum_parents - telescoped) > 1e-10)
        throw_data("interaction_report: R^2 telescoping identity violated");
    report.r2_int = sum_parents;
    report.no_interaction = sum_parents == 0.0;
    report.compute_ranks();
    return report;
}

struct RegionalEffect {
    std::size_t node_id = 0;
    PdCurve centered;
    PdCurve raw;
};

// Regional effect plots: the PD curve of each terminal region, on the raw
// prediction scale and the mean-centered scale the tree was fitted on.
inline std::vector<RegionalEffect> regional_peps(const RepidTree& tree,
                                                 const IceMatrix& ice_raw,
                                                 const IceMatrix& ice_centered) {
    std::vector<RegionalEffect> reps;
    for (std::size_t id : tree.terminal_ids()) {
        RegionalEffect re;
        re.node_id = id;
        re.centered = pd_curve(ice_centered, tree.nodes[id].obs, false);
        re.raw = pd_curve(ice_raw, tree.nodes[id].obs, false);
        reps.push_back(std::move(re));
    }
    return reps;
}

}  // namespace repid

#endif  // REPID_TREE_HPP
