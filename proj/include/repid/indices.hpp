#ifndef REPID_INDICES_HPP
#define REPID_INDICES_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "repid/ice.hpp"
#include "repid/report.hpp"
#include "repid/rng.hpp"

namespace repid {

struct IndexConfig {
    std::size_t h_sample = 20;   // evaluation-point subsample for the H-statistic
    bool shap_exact = true;      // exact subset enumeration vs permutation sampling
    std::size_t shap_permutations = 20;
    std::size_t shap_obs = 100;  // observations aggregated into the global index
    std::size_t grid_m = 20;
    std::uint64_t seed = 0;

    void validate() const {
        if (h_sample < 1 || shap_permutations < 1 || shap_obs < 1 || grid_m < 2)
            throw_config("index config: counts must be >= 1 (grid >= 2)");
    }
};

namespace detail {

// Seeded sample of k distinct indices from [0, n) (partial Fisher-Yates).
inline std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k,
                                               Rng& rng) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    k = std::min(k, n);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + rng.next_below(n - i);
        std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    return idx;
}

inline std::uint32_t full_mask(std::size_t p) {
    return p >= 32 ? ~0u : ((1u << p) - 1u);
}

// Mean prediction over background rows with the features in `mask` clamped
// to the explained point.
inline double pd_value(const Predictor& pred, const Dataset& ds,
                       std::span<const std::size_t> background,
                       std::span<const double> point, std::uint32_t mask) {
    const std::size_t p = ds.p();
    if ((mask & full_mask(p)) == full_mask(p)) {
        Matrix one(1, p);
        for (std::size_t j = 0; j < p; ++j) one(0, j) = point[j];
        return predict(pred, one, ds.metas)[0];
    }
    Matrix batch(background.size(), p);
    for (std::size_t t = 0; t < background.size(); ++t) {
        for (std::size_t j = 0; j < p; ++j)
            batch(t, j) = (mask & (1u << j)) ? point[j] : ds.columns[j][background[t]];
    }
    const auto preds = predict(pred, batch, ds.metas);
    return pairwise_mean(preds);
}

// Caches coalition values v(T) for a single explained point so that every
// partner feature reuses the same evaluations.
class ShapEvaluator {
public:
    ShapEvaluator(const Predictor& pred, const Dataset& ds, const IndexConfig& cfg)
        : pred_(pred), ds_(ds) {
        // Full-data background expectation up to 8 features, a seeded 200-row
        // subsample beyond that.
        if (ds.p() <= 8 || ds.n() <= 200) {
            background_ = all_rows(ds.n());
        } else {
            Rng rng(mix_key(cfg.seed, rng_tag::shap_bg));
            background_ = sample_indices(ds.n(), 200, rng);
        }
    }

    void set_point(std::span<const double> point) {
        point_.assign(point.begin(), point.end());
        memo_.clear();
    }

    double v(std::uint32_t mask) {
        auto it = memo_.find(mask);
        if (it != memo_.end()) return it->second;
        const double value = pd_value(pred_, ds_, background_, point_, mask);
        memo_.emplace(mask, value);
        return value;
    }

    double delta(int j, int l, std::uint32_t s_mask) {
        const std::uint32_t bj = 1u << j, bl = 1u << l;
        return v(s_mask | bj | bl) - v(s_mask | bj) - v(s_mask | bl) + v(s_mask);
    }

    std::size_t p() const { return ds_.p(); }

private:
    const Predictor& pred_;
    const Dataset& ds_;
    std::vector<std::size_t> background_;
    std::vector<double> point_;
    std::unordered_map<std::uint32_t, double> memo_;
};

// Exact Shapley interaction value: every coalition S of the remaining
// features, weighted by |S|! (p-|S|-2)! / (2 (p-1)!).
inline double shap_phi_exact(ShapEvaluator& ev, int j, int l) {
    const std::size_t p = ev.p();
    std::vector<int> rest;
    for (int f = 0; f < static_cast<int>(p); ++f)
        if (f != j && f != l) rest.push_back(f);
    std::vector<double> fact(p + 1, 1.0);
    for (std::size_t i = 1; i <= p; ++i) fact[i] = fact[i - 1] * static_cast<double>(i);

    double phi = 0.0;
    const std::size_t nsub = std::size_t{1} << rest.size();
    for (std::size_t sub = 0; sub < nsub; ++sub) {
        std::uint32_t mask = 0;
        std::size_t count = 0;
        for (std::size_t b = 0; b < rest.size(); ++b)
            if (sub & (std::size_t{1} << b)) {
                mask |= 1u << rest[b];
                ++count;
            }
        const double weight = fact[count] * fact[p - count - 2] / (2.0 * fact[p - 1]);
        phi += weight * ev.delta(j, l, mask);
    }
    return phi;
}

// Permutation-sampling estimator: a uniform random order of all features but
// j; the coalition is whatever precedes l, and half the average telescoping
// delta is unbiased for the exact value.
inline double shap_phi_sampled(ShapEvaluator& ev, int j, int l, std::size_t n_perm,
                               Rng& rng) {
    const std::size_t p = ev.p();
    std::vector<int> others;
    for (int f = 0; f < static_cast<int>(p); ++f)
        if (f != j) others.push_back(f);
    double sum = 0.0;
    for (std::size_t t = 0; t < n_perm; ++t) {
        for (std::size_t i = others.size(); i-- > 1;)
            std::swap(others[i], others[rng.next_below(i + 1)]);
        std::uint32_t mask = 0;
        for (int f : others) {
            if (f == l) break;
            mask |= 1u << f;
        }
        sum += ev.delta(j, l, mask);
    }
    return 0.5 * sum / static_cast<double>(n_perm);
}

inline void check_shap_feasible(std::size_t p, const IndexConfig& cfg,
                                const char* who) {
    if (p > 32) throw_data(std::string(who) + ": more than 32 features");
    if (cfg.shap_exact && p > 17)
        throw_data(std::string(who) +
                   ": exact mode refused beyond 15 complement features; "
                   "use sampled mode");
}

}  // namespace detail

// Friedman's H^2 between features j and l: the share of the centered
// two-feature PD variance not explained by the two centered one-feature PDs.
// All PD terms use the full dataset as background and are evaluated (and
// centered) at the same seeded subsample of observations. The subsample is
// keyed by (seed, j) so every partner of a feature of interest is compared
// on common evaluation points, the way a per-feature interaction screen is
// usually run.
inline double h_statistic(const Predictor& pred, const Dataset& ds, int j, int l,
                          const IndexConfig& cfg) {
    if (j == l) throw_data("h_statistic: features must differ");
    cfg.validate();
    const std::size_t n = ds.n(), p = ds.p();
    Rng rng(mix_key(cfg.seed, rng_tag::h_points, static_cast<std::uint64_t>(j)));
    const auto eval = detail::sample_indices(n, cfg.h_sample, rng);
    const std::size_t ne = eval.size();

    // One batch: [two-feature | j only | l only] blocks of ne * n rows.
    Matrix batch(3 * ne * n, p);
    std::size_t r = 0;
    for (int block = 0; block < 3; ++block)
        for (std::size_t e = 0; e < ne; ++e)
            for (std::size_t i = 0; i < n; ++i, ++r) {
                for (std::size_t c = 0; c < p; ++c) batch(r, c) = ds.columns[c][i];
                const std::size_t src = eval[e];
                if (block != 2)
                    batch(r, static_cast<std::size_t>(j)) =
                        ds.columns[static_cast<std::size_t>(j)][src];
                if (block != 1)
                    batch(r, static_cast<std::size_t>(l)) =
                        ds.columns[static_cast<std::size_t>(l)][src];
            }
    const auto preds = predict(pred, batch, ds.metas);

    auto block_means = [&](int block) {
        std::vector<double> means(ne), scratch(n);
        for (std::size_t e = 0; e < ne; ++e) {
            const std::size_t base = (static_cast<std::size_t>(block) * ne + e) * n;
            for (std::size_t i = 0; i < n; ++i) scratch[i] = preds[base + i];
            means[e] = pairwise_mean(scratch);
        }
        return means;
    };
    const std::vector<double> pd_jl = block_means(0), pd_j = block_means(1),
                              pd_l = block_means(2);

    const double m_jl = pairwise_mean(pd_jl);
    const double m_j = pairwise_mean(pd_j);
    const double m_l = pairwise_mean(pd_l);

    double num = 0.0, den = 0.0, scale = 0.0;
    for (std::size_t e = 0; e < ne; ++e) {
        const double cjl = pd_jl[e] - m_jl;
        const double diff = cjl - (pd_j[e] - m_j) - (pd_l[e] - m_l);
        num += diff * diff;
        den += cjl * cjl;
        scale = std::max(scale, std::fabs(pd_jl[e]));
    }
    const double floor =
        static_cast<double>(ne) * std::pow(1e-10 * std::max(1.0, scale), 2.0);
    if (den <= floor)
        throw_data("h_statistic: undefined index (zero two-feature PD variance)");
    return num / den;
}

// Greenwell's interaction index: the conditional importance i(x_j | x_l = t)
// is the standard deviation of the PD of x_j with x_l clamped to t; the index
// averages the sd of those importances over both conditioning directions.
inline double greenwell_index(const Predictor& pred, const Dataset& ds, int j,
                              int l, const IndexConfig& cfg) {
    if (j == l) throw_data("greenwell_index: features must differ");
    cfg.validate();
    const Grid gj = make_grid(ds, j, GridStrategy::equidistant, cfg.grid_m);
    const Grid gl = make_grid(ds, l, GridStrategy::equidistant, cfg.grid_m);
    const Pd2Surface surf = pd2_surface(pred, ds, j, l, gj, gl, false);
    const std::size_t mj = surf.values.rows(), ml = surf.values.cols();

    std::vector<double> imp_j_given_l(ml), imp_l_given_j(mj), scratch;
    scratch.resize(mj);
    for (std::size_t b = 0; b < ml; ++b) {
        for (std::size_t a = 0; a < mj; ++a) scratch[a] = surf.values(a, b);
        imp_j_given_l[b] = sample_sd(scratch);
    }
    scratch.resize(ml);
    for (std::size_t a = 0; a < mj; ++a) {
        for (std::size_t b = 0; b < ml; ++b) scratch[b] = surf.values(a, b);
        imp_l_given_j[a] = sample_sd(scratch);
    }
    return 0.5 * sample_sd(imp_j_given_l) + 0.5 * sample_sd(imp_l_given_j);
}

// SHAP interaction value of one observation for the pair (j, l).
inline double shap_interaction_value(const Predictor& pred, const Dataset& ds,
                                     std::span<const double> x_row, int j, int l,
                                     const IndexConfig& cfg) {
    if (j == l) throw_data("shap_interaction_value: features must differ");
    cfg.validate();
    detail::check_shap_feasible(ds.p(), cfg, "shap_interaction_value");
    detail::ShapEvaluator ev(pred, ds, cfg);
    ev.set_point(x_row);
    if (cfg.shap_exact) return detail::shap_phi_exact(ev, j, l);
    Rng rng(mix_key(cfg.seed, rng_tag::shap_perm, static_cast<std::uint64_t>(j),
                    static_cast<std::uint64_t>(l)));
    return detail::shap_phi_sampled(ev, j, l, cfg.shap_permutations, rng);
}

// Global SHAP interaction index for feature j: per-pair sums of absolute
// interaction values over a seeded observation sample, normalized to
// proportions across all partners of j.
inline InteractionReport shap_global_index(const Predictor& pred, const Dataset& ds,
                                           int j, const IndexConfig& cfg) {
    const std::size_t p = ds.p();
    cfg.validate();
    if (p < 3) throw_data("shap_global_index: need at least 3 features");
    detail::check_shap_feasible(p, cfg, "shap_global_index");

    Rng row_rng(mix_key(cfg.seed, rng_tag::shap_rows, static_cast<std::uint64_t>(j)));
    const auto rows = detail::sample_indices(ds.n(), cfg.shap_obs, row_rng);

    std::vector<int> partners;
    for (int l = 0; l < static_cast<int>(p); ++l)
        if (l != j) partners.push_back(l);

    std::map<int, double> abs_sums;
    for (int l : partners) abs_sums[l] = 0.0;
    double pred_scale = 0.0;

    detail::ShapEvaluator ev(pred, ds, cfg);
    std::vector<double> point(p);
    for (std::size_t ri : rows) {
        for (std::size_t c = 0; c < p; ++c) point[c] = ds.columns[c][ri];
        ev.set_point(point);
        pred_scale = std::max(pred_scale, std::fabs(ev.v(detail::full_mask(p))));
        for (int l : partners) {
            double phi;
            if (cfg.shap_exact) {
                phi = detail::shap_phi_exact(ev, j, l);
            } else {
                // Keyed by (seed, j, l, row) so results do not depend on the
                // order rows or partners are visited in.
                Rng rng(mix_key(cfg.seed, rng_tag::shap_perm,
                                static_cast<std::uint64_t>(j),
                                static_cast<std::uint64_t>(l) * 0x10001u + ri));
                phi = detail::shap_phi_sampled(ev, j, l, cfg.shap_permutations, rng);
            }
            abs_sums[l] += std::fabs(phi);
        }
    }

    InteractionReport report;
    report.method = Method::shap;
    report.feature_s = j;

    double total = 0.0;
    for (const auto& [l, s] : abs_sums) total += s;
    const double floor =
        static_cast<double>(rows.size()) * 1e-10 * std::max(1.0, pred_scale);
    if (total <= floor) {
        for (int l : partners) report.scores[l] = 0.0;
        report.no_interaction = true;
    } else {
        for (int l : partners) report.scores[l] = abs_sums[l] / total;
    }
    report.compute_ranks();
    return report;
}

// Convenience reports over every partner of the feature of interest.
inline InteractionReport h_statistic_report(const Predictor& pred, const Dataset& ds,
                                            int s, const IndexConfig& cfg) {
    InteractionReport report;
    report.method = Method::h_statistic;
    report.feature_s = s;
    for (int l = 0; l < static_cast<int>(ds.p()); ++l)
        if (l != s) report.scores[l] = h_statistic(pred, ds, s, l, cfg);
    report.compute_ranks();
    return report;
}

inline InteractionReport greenwell_report(const Predictor& pred, const Dataset& ds,
                                          int s, const IndexConfig& cfg) {
    InteractionReport report;
    report.method = Method::greenwell;
    report.feature_s = s;
    for (int l = 0; l < static_cast<int>(ds.p()); ++l)
        if (l != s) report.scores[l] = greenwell_index(pred, ds, s, l, cfg);
    report.compute_ranks();
    return report;
}

}  // namespace repid

#endif  // REPID_INDICES_HPP
