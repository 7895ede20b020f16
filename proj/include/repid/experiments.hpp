#ifndef REPID_EXPERIMENTS_HPP
#define REPID_EXPERIMENTS_HPP

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "repid/dgp.hpp"
#include "repid/indices.hpp"
#include "repid/tree.hpp"

namespace repid {

enum class PredictorRule { ols_correct, truth_noiseless };

// One fully specified benchmark setting: data-generating process, the
// predictor to explain, the feature of interest, methods, repetitions, and
// the expected interaction ranking.
struct Setting {
    std::string name;
    DgpSpec dgp;
    std::size_t n = 0;
    PredictorRule predictor_rule = PredictorRule::truth_noiseless;
    std::vector<Term> ols_terms;
    int feature_s = 1;
    std::vector<Method> methods;
    std::size_t reps = 30;
    IndexConfig cfg;
    StopParams stop;
    std::size_t grid_m = 20;
    std::map<int, int> truth_ranks;  // expected rank among interacting features
    std::vector<int> truth_zero;     // features with no interaction
};

struct ExperimentRow {
    std::size_t rep = 0;
    Method method = Method::repid;
    int feature = -1;
    double score = 0.0;
};

struct ExperimentTable {
    std::vector<ExperimentRow> rows;
    std::vector<std::pair<std::size_t, std::string>> failures;

    std::vector<double> scores(Method method, int feature) const {
        std::vector<double> out;
        for (const auto& r : rows)
            if (r.method == method && r.feature == feature) out.push_back(r.score);
        return out;
    }
};

struct RankAgreement {
    Method method = Method::repid;
    std::size_t reps_evaluated = 0;
    double agreement = 0.0;  // fraction of reps with the correct ranking
};

struct SplitSlotStat {
    std::size_t depth = 0;     // 1 = root split
    std::size_t position = 0;  // left-to-right slot at this depth, 1-based
    int feature = -1;
    std::size_t count = 0;       // trees choosing this feature at the slot
    std::size_t slot_total = 0;  // trees that split the slot at all
    double share = 0.0;
    double value_mean = 0.0;
    double value_sd = 0.0;
};

struct SplitSummary {
    std::size_t depth_limit = 3;
    std::vector<SplitSlotStat> stats;
};

namespace detail {

inline std::vector<Term> weak_ols_terms() {
    return {intercept_term(), linear_term(0),        linear_term(1),
            linear_term(2),   linear_term(3),        product_term({0, 1}),
            product_term({1, 2}), product_term({0, 2}), product_term({0, 1, 2})};
}

inline DgpSpec uniform_iid_dgp(std::size_t p, std::string truth_fn,
                               std::vector<double> params, NoiseRule rule,
                               double noise) {
    DgpSpec spec;
    spec.marginals.assign(p, UniformMarginal{-1.0, 1.0});
    spec.truth_fn = std::move(truth_fn);
    spec.truth_params = std::move(params);
    spec.noise_rule = rule;
    spec.noise_value = noise;
    return spec;
}

}  // namespace detail

// Catalog of the built-in benchmark settings. Names:
//   sim3_running    6-feature running example with two step interactions
//   weak_initial    4 uniform features, symmetric interactions with x2
//   weak_small_main weak_initial with the x1 main effect shrunk to 0.1
//   weak_tiny_mains all mains 0.1 and the x1*x2 coefficient raised to 2
//   weak_corr       weak_initial with latent correlation rho12 = 0.9
//   nonlinear10     10 features, five nonlinear interactions with x2
//   linear7         7 features, strictly ordered linear interactions with x2
inline Setting dgp_catalog(const std::string& name) {
    Setting s;
    s.name = name;
    s.feature_s = 1;  // x2 throughout

    if (name == "sim3_running") {
        s.n = 500;
        s.dgp.marginals = {UniformMarginal{-1.0, 1.0}, UniformMarginal{-1.0, 1.0},
                           BernoulliMarginal{0.5},     BernoulliMarginal{0.7},
                           BernoulliMarginal{0.5},     NormalMarginal{1.0, std::sqrt(5.0)}};
        s.dgp.truth_fn = "sim3_running";
        s.dgp.noise_rule = NoiseRule::absolute;
        s.dgp.noise_value = 1.0;
        s.predictor_rule = PredictorRule::truth_noiseless;
        s.methods = {Method::repid};
        s.reps = 10;
        // The reference tree is two levels deep; gamma must admit the
        // depth-2 splits, whose improvement is ~1/8 of the root split's.
        s.stop = StopParams{2, 10, 0.10, 0.01};
        s.truth_ranks = {{2, 1}, {0, 2}};
        s.truth_zero = {3, 4, 5};
        return s;
    }

    auto weak = [&](std::vector<double> betas) {
        s.n = 1000;
        s.dgp = detail::uniform_iid_dgp(4, "weak_linear", std::move(betas),
                                        NoiseRule::relative_to_signal, 0.1);
        s.predictor_rule = PredictorRule::ols_correct;
        s.ols_terms = detail::weak_ols_terms();
        s.methods = {Method::repid, Method::h_statistic, Method::greenwell,
                     Method::shap};
        s.reps = 30;
        s.stop = StopParams{6, 10, 0.15, 0.01};
        // 20 evaluation points leave the H-statistic with ~30% per-rep noise,
        // which drowns the rank comparisons these settings exist to make.
        s.cfg.h_sample = 100;
        s.truth_zero = {3};
    };

    if (name == "weak_initial") {
        weak({1, 1, 1, 1, 1, 1, 1, 1});
        s.truth_ranks = {{0, 1}, {2, 1}};
        return s;
    }
    if (name == "weak_small_main") {
        weak({0.1, 1, 1, 1, 1, 1, 1, 1});
        s.truth_ranks = {{0, 1}, {2, 1}};
        return s;
    }
    if (name == "weak_tiny_mains") {
        weak({0.1, 0.1, 0.1, 0.1, 2, 1, 1, 1});
        s.truth_ranks = {{0, 1}, {2, 2}};
        return s;
    }
    if (name == "weak_corr") {
        weak({1, 1, 1, 1, 1, 1, 1, 1});
        s.dgp.correlation = Matrix(4, 4, 0.0);
        for (std::size_t i = 0; i < 4; ++i) s.dgp.correlation(i, i) = 1.0;
        s.dgp.correlation(0, 1) = s.dgp.correlation(1, 0) = 0.9;
        s.truth_ranks = {{0, 1}, {2, 1}};
        return s;
    }
    if (name == "nonlinear10") {
        s.n = 2000;
        s.dgp = detail::uniform_iid_dgp(10, "nonlinear10", {}, NoiseRule::absolute,
                                        0.5);
        s.predictor_rule = PredictorRule::truth_noiseless;
        s.methods = {Method::repid, Method::h_statistic};
        s.reps = 30;
        s.stop = StopParams{7, 10, 0.15, 0.01};
        s.cfg.h_sample = 100;
        s.truth_ranks = {{0, 1}, {2, 1}, {3, 1}, {5, 1}, {7, 1}};
        s.truth_zero = {4, 6, 8, 9};
        return s;
    }
    if (name == "linear7") {
        s.n = 2000;
        s.dgp = detail::uniform_iid_dgp(7, "linear7", {},
                                        NoiseRule::relative_to_signal, 0.1);
        s.dgp.marginals[5] = NormalMarginal{0.0, 2.0};
        s.dgp.marginals[6] = NormalMarginal{2.0, 3.0};
        s.predictor_rule = PredictorRule::truth_noiseless;
        s.methods = {Method::repid, Method::h_statistic};
        s.reps = 30;
        s.stop = StopParams{6, 10, 0.15, 0.01};
        s.cfg.h_sample = 100;
        s.truth_ranks = {{4, 1}, {3, 2}, {2, 3}};
        s.truth_zero = {0, 5, 6};
        return s;
    }
    throw_config("unknown setting '" + name +
                 "'; available: sim3_running, weak_initial, weak_small_main, "
                 "weak_tiny_mains, weak_corr, nonlinear10, linear7");
}

inline std::vector<std::string> catalog_names() {
    return {"sim3_running", "weak_initial",  "weak_small_main", "weak_tiny_mains",
            "weak_corr",    "nonlinear10",   "linear7"};
}

inline Predictor setting_predictor(const Setting& setting, const Dataset& ds,
                                   std::span<const double> targets) {
    if (setting.predictor_rule == PredictorRule::truth_noiseless)
        return Predictor::truth(setting.dgp.truth_fn, setting.dgp.truth_params);
    return Predictor::linear(fit_ols(ds, targets, setting.ols_terms));
}

// ICE -> center -> partition -> report pipeline for one dataset.
inline std::pair<InteractionReport, RepidTree> repid_report(
    const Predictor& pred, const Dataset& ds, int s, std::size_t grid_m,
    const StopParams& stop) {
    const Grid grid = make_grid(ds, s, GridStrategy::equidistant, grid_m);
    const IceMatrix cice = center_ice(ice_matrix(pred, ds, s, grid));
    RepidTree tree = fit_repid(cice, ds, stop);
    InteractionReport report = interaction_report(tree, ds);
    return {std::move(report), std::move(tree)};
}

// Repeats the setting: per rep, sample data, build the predictor, and score
// every requested method. Rep r depends only on (base_seed, r), so extending
// the rep count never changes earlier rows. Failed reps are recorded, not
// dropped.
inline ExperimentTable run_experiment(const Setting& setting, std::uint64_t base_seed,
                                      std::vector<RepidTree>* trees_out = nullptr) {
    if (setting.reps == 0) throw_config("run_experiment: reps must be >= 1");
    ExperimentTable table;
    for (std::size_t rep = 0; rep < setting.reps; ++rep) {
        const std::uint64_t rep_seed = mix_key(base_seed, rng_tag::rep, rep);
        try {
            auto [ds, targets] =
                sample_dgp(setting.dgp, lookup_truth_fn(setting.dgp.truth_fn),
                           setting.n, rep_seed);
            const Predictor pred = setting_predictor(setting, ds, targets);
            IndexConfig cfg = setting.cfg;
            cfg.grid_m = setting.grid_m;
            cfg.seed = rep_seed;

            for (Method method : setting.methods) {
                InteractionReport report;
                switch (method) {
                    case Method::repid: {
                        auto [rep_report, tree] = repid_report(
                            pred, ds, setting.feature_s, setting.grid_m, setting.stop);
                        report = std::move(rep_report);
                        if (trees_out) trees_out->push_back(std::move(tree));
                        break;
                    }
                    case Method::h_statistic:
                        report = h_statistic_report(pred, ds, setting.feature_s, cfg);
                        break;
                    case Method::greenwell:
                        report = greenwell_report(pred, ds, setting.feature_s, cfg);
                        break;
                    case Method::shap:
                        report = shap_global_index(pred, ds, setting.feature_s, cfg);
                        break;
                }
                for (const auto& [feature, score] : report.scores)
                    table.rows.push_back({rep, method, feature, score});
            }
        } catch (const Error& e) {
            table.failures.emplace_back(rep, e.what());
        }
    }
    return table;
}

// Fraction of reps per method whose scores reproduce the expected ranking:
// every strictly-ordered pair of interacting features in the right order and
// every non-interacting feature flagged as zero. "Zero" means below 0.02 for
// the proportion-scaled methods and below the 10% quantile of the interacting
// features' scores for the H-statistic and Greenwell scales.
inline std::vector<RankAgreement> rank_eval(const ExperimentTable& table,
                                            const Setting& setting) {
    std::vector<RankAgreement> out;
    std::size_t max_rep = 0;
    for (const auto& r : table.rows) max_rep = std::max(max_rep, r.rep);
    for (Method method : setting.methods) {
        RankAgreement ra;
        ra.method = method;
        std::size_t correct = 0;
        for (std::size_t rep = 0; rep <= max_rep; ++rep) {
            std::map<int, double> score;
            for (const auto& r : table.rows)
                if (r.method == method && r.rep == rep) score[r.feature] = r.score;
            if (score.empty()) continue;  // failed rep, recorded separately
            ++ra.reps_evaluated;

            bool ok = true;
            std::vector<double> nonzero_scores;
            for (const auto& [fa, rank_a] : setting.truth_ranks) {
                nonzero_scores.push_back(score.at(fa));
                for (const auto& [fb, rank_b] : setting.truth_ranks)
                    if (rank_a < rank_b && !(score.at(fa) > score.at(fb))) ok = false;
            }
            double zero_threshold = 0.02;
            if (method == Method::h_statistic || method == Method::greenwell) {
                std::sort(nonzero_scores.begin(), nonzero_scores.end());
                zero_threshold = quantile_type7(nonzero_scores, 0.10);
            }
            for (int fz : setting.truth_zero)
                if (!(score.at(fz) < zero_threshold)) ok = false;
            if (ok) ++correct;
        }
        ra.agreement = ra.reps_evaluated
                           ? static_cast<double>(correct) /
                                 static_cast<double>(ra.reps_evaluated)
                           : 0.0;
        out.push_back(ra);
    }
    return out;
}

// Aggregates which feature each tree slot split on, and where, over a batch
// of fitted trees. Slots are addressed by (depth of the split, 1-based
// left-to-right position).
inline SplitSummary split_summary(const std::vector<RepidTree>& trees,
                                  std::size_t depth_limit = 3) {
    struct Observation {
        int feature;
        double value;
        bool numeric;
    };
    std::map<std::pair<std::size_t, std::size_t>, std::vector<Observation>> slots;

    for (const auto& tree : trees) {
        // Left-to-right positions via the root path: left child doubles the
        // position minus one, right child doubles it.
        std::vector<std::size_t> position(tree.nodes.size(), 1);
        for (const auto& node : tree.nodes) {
            if (node.is_terminal()) continue;
            position[static_cast<std::size_t>(node.left)] = 2 * position[node.id] - 1;
            position[static_cast<std::size_t>(node.right)] = 2 * position[node.id];
            const std::size_t split_depth = node.depth + 1;
            if (split_depth > depth_limit) continue;
            slots[{split_depth, position[node.id]}].push_back(
                {node.split->feature, node.split->threshold,
                 !node.split->categorical});
        }
    }

    SplitSummary summary;
    summary.depth_limit = depth_limit;
    for (const auto& [slot, observations] : slots) {
        std::map<int, std::vector<double>> by_feature;
        std::map<int, std::size_t> counts;
        for (const auto& o : observations) {
            ++counts[o.feature];
            if (o.numeric) by_feature[o.feature].push_back(o.value);
        }
        for (const auto& [feature, count] : counts) {
            SplitSlotStat stat;
            stat.depth = slot.first;
            stat.position = slot.second;
            stat.feature = feature;
            stat.count = count;
            stat.slot_total = observations.size();
            stat.share = static_cast<double>(count) /
                         static_cast<double>(observations.size());
            const auto& values = by_feature[feature];
            if (!values.empty()) {
                stat.value_mean = mean(values);
                stat.value_sd = sample_sd(values);
            }
            summary.stats.push_back(stat);
        }
    }
    return summary;
}

}  // namespace repid

#endif  // REPID_EXPERIMENTS_HPP
