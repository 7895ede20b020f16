// Command-line surface: simulate catalog DGPs, explain a dataset with the
// partition tree, compute interaction indices, run benchmark experiments,
// and render curve files to SVG.
//
// Exit codes: 0 ok, 2 usage, 3 data error, 4 predictor-protocol error.

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "repid/repid.hpp"

namespace {

constexpr std::uint64_t kDefaultSeed = 42;

struct PredictorSpec {
    std::string raw;
};

// Accepted predictor specs:
//   truth:<catalog name>          built-in closed-form function
//   linear:<model.json>           terms + coefficients file
//   exec:<command>                external process, CSV on stdin
//   file:<points.csv>:<preds.csv> external file handshake
repid::Predictor resolve_predictor(const std::string& spec, const repid::Dataset& ds,
                                   double timeout_seconds) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos)
        repid::throw_config("predictor spec must look like kind:value, got '" +
                            spec + "'");
    const std::string kind = spec.substr(0, colon);
    const std::string value = spec.substr(colon + 1);
    if (value.empty()) repid::throw_config("predictor spec '" + spec + "' has no value");

    if (kind == "truth") {
        for (const auto& name : repid::catalog_names())
            if (name == value) {
                const auto setting = repid::dgp_catalog(value);
                return repid::Predictor::truth(setting.dgp.truth_fn,
                                               setting.dgp.truth_params);
            }
        return repid::Predictor::truth(value);
    }
    if (kind == "linear") {
        const auto j = nlohmann::json::parse(repid::read_file(value));
        repid::LinearModel model;
        for (const auto& jt : j.at("terms")) {
            repid::Term term;
            for (const auto& jf : jt.at("factors")) {
                repid::TermFactor f;
                if (jf.at("feature").is_string()) {
                    f.feature = ds.feature_index(jf.at("feature").get<std::string>());
                    if (f.feature < 0)
                        repid::throw_data("linear model references unknown feature '" +
                                          jf.at("feature").get<std::string>() + "'");
                } else {
                    f.feature = jf.at("feature").get<int>();
                }
                const std::string tf = jf.value("transform", "identity");
                if (tf == "identity") f.transform = repid::Transform::identity;
                else if (tf == "gt") f.transform = repid::Transform::indicator_gt;
                else if (tf == "eq") f.transform = repid::Transform::indicator_eq;
                else repid::throw_config("unknown transform '" + tf + "'");
                f.value = jf.value("value", 0.0);
                term.factors.push_back(f);
            }
            model.terms.push_back(std::move(term));
        }
        model.coefficients = j.at("coefficients").get<std::vector<double>>();
        if (model.coefficients.size() != model.terms.size())
            repid::throw_data("linear model: coefficient/term count mismatch");
        return repid::Predictor::linear(std::move(model));
    }
    if (kind == "exec") {
        repid::ExternalSpec es;
        es.mode = repid::ExternalExecMode{value};
        es.timeout_seconds = timeout_seconds;
        return repid::Predictor::external(std::move(es));
    }
    if (kind == "file") {
        const auto sep = value.find(':');
        if (sep == std::string::npos)
            repid::throw_config("file predictor needs points:preds paths");
        repid::ExternalSpec es;
        es.mode = repid::ExternalFileMode{value.substr(0, sep), value.substr(sep + 1)};
        es.timeout_seconds = timeout_seconds;
        return repid::Predictor::external(std::move(es));
    }
    repid::throw_config("unknown predictor kind '" + kind + "'");
}

int resolve_feature(const repid::Dataset& ds, const std::string& name) {
    const int s = ds.feature_index(name);
    if (s < 0) repid::throw_data("feature '" + name + "' is not a dataset column");
    return s;
}

repid::GridStrategy parse_strategy(const std::string& s) {
    if (s == "equidistant") return repid::GridStrategy::equidistant;
    if (s == "quantile") return repid::GridStrategy::quantile;
    if (s == "sample") return repid::GridStrategy::sample;
    repid::throw_config("unknown grid strategy '" + s + "'");
}

std::vector<repid::Method> parse_methods(const std::string& csv) {
    std::vector<repid::Method> methods;
    std::string cur;
    for (char c : csv + ",") {
        if (c == ',') {
            if (!cur.empty()) methods.push_back(repid::method_from_name(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (methods.empty()) repid::throw_config("no methods given");
    return methods;
}

std::string out_path(const std::string& dir, const std::string& file) {
    std::filesystem::create_directories(dir);
    return (std::filesystem::path(dir) / file).string();
}

// --- subcommands -----------------------------------------------------------

struct ExplainArgs {
    std::string data, predictor, feature, out = ".";
    std::string grid_strategy = "equidistant";
    std::size_t grid_size = 20;
    std::size_t max_depth = 6, min_node = 10;
    double gamma = 0.15, min_improvement = 0.01;
    double timeout = 30.0;
    std::uint64_t seed = kDefaultSeed;
};

int cmd_explain(const ExplainArgs& args) {
    const repid::Dataset ds = repid::load_dataset(repid::read_file(args.data));
    if (ds.p() < 2)
        repid::throw_data("explain: complement set C is empty (dataset has a "
                          "single feature)");
    const int s = resolve_feature(ds, args.feature);
    const repid::Predictor pred =
        resolve_predictor(args.predictor, ds, args.timeout);

    const repid::Grid grid =
        ds.metas[static_cast<std::size_t>(s)].kind == repid::FeatureKind::categorical
            ? repid::make_categorical_grid(ds, s)
            : repid::make_grid(ds, s, parse_strategy(args.grid_strategy),
                               args.grid_size);
    const repid::IceMatrix ice = repid::ice_matrix(pred, ds, s, grid);
    const repid::IceMatrix cice = repid::center_ice(ice);
    const repid::StopParams stop{args.max_depth, args.min_node, args.gamma,
                                 args.min_improvement};
    const repid::RepidTree tree = repid::fit_repid(cice, ds, stop);
    const repid::InteractionReport report = repid::interaction_report(tree, ds);
    const auto reps = repid::regional_peps(tree, ice, cice);

    const std::string grid_name = ds.metas[static_cast<std::size_t>(s)].name;
    repid::write_file(out_path(args.out, "ice.csv"), repid::ice_to_csv(ice, grid_name));
    repid::write_file(out_path(args.out, "reps.csv"),
                      repid::reps_to_csv(tree, ds, reps, grid_name, false));
    repid::write_file(out_path(args.out, "report.csv"),
                      repid::report_to_csv(report, repid::feature_names(ds)));
    repid::write_file(out_path(args.out, "tree.json"),
                      repid::tree_to_json(tree, ds, reps).dump(2) + "\n");
    return 0;
}

struct IndicesArgs {
    std::string data, predictor, feature, out = ".";
    std::string methods = "repid,h_statistic,greenwell,shap";
    std::size_t grid_size = 20;
    std::size_t h_sample = 20, shap_obs = 100, shap_permutations = 20;
    std::string shap_mode = "exact";
    std::size_t max_depth = 6, min_node = 10;
    double gamma = 0.15, min_improvement = 0.01;
    double timeout = 30.0;
    std::uint64_t seed = kDefaultSeed;
};

int cmd_indices(const IndicesArgs& args) {
    const repid::Dataset ds = repid::load_dataset(repid::read_file(args.data));
    const int s = resolve_feature(ds, args.feature);
    const repid::Predictor pred =
        resolve_predictor(args.predictor, ds, args.timeout);

    repid::IndexConfig cfg;
    cfg.grid_m = args.grid_size;
    cfg.h_sample = args.h_sample;
    cfg.shap_obs = args.shap_obs;
    cfg.shap_permutations = args.shap_permutations;
    if (args.shap_mode == "exact") cfg.shap_exact = true;
    else if (args.shap_mode == "sampled") cfg.shap_exact = false;
    else repid::throw_config("shap mode must be exact or sampled");
    cfg.seed = args.seed;

    std::vector<repid::InteractionReport> reports;
    nlohmann::json jreports = nlohmann::json::array();
    for (repid::Method method : parse_methods(args.methods)) {
        repid::InteractionReport report;
        switch (method) {
            case repid::Method::repid:
                report = repid::repid_report(pred, ds, s, args.grid_size,
                                             repid::StopParams{args.max_depth,
                                                               args.min_node,
                                                               args.gamma,
                                                               args.min_improvement})
                             .first;
                break;
            case repid::Method::h_statistic:
                report = repid::h_statistic_report(pred, ds, s, cfg);
                break;
            case repid::Method::greenwell:
                report = repid::greenwell_report(pred, ds, s, cfg);
                break;
            case repid::Method::shap:
                report = repid::shap_global_index(pred, ds, s, cfg);
                break;
        }
        jreports.push_back(repid::report_to_json(report, repid::feature_names(ds)));
        reports.push_back(std::move(report));
    }
    repid::write_file(out_path(args.out, "report.csv"),
                      repid::reports_to_csv(reports, repid::feature_names(ds)));
    repid::write_file(out_path(args.out, "report.json"), jreports.dump(2) + "\n");
    return 0;
}

struct ExperimentArgs {
    std::string setting, out = ".";
    std::string methods;  // empty = setting default
    std::size_t reps = 0;  // 0 = setting default
    std::uint64_t seed = kDefaultSeed;
};

int cmd_experiment(const ExperimentArgs& args) {
    repid::Setting setting = repid::dgp_catalog(args.setting);
    if (args.reps > 0) setting.reps = args.reps;
    if (!args.methods.empty()) setting.methods = parse_methods(args.methods);

    std::vector<repid::RepidTree> trees;
    const repid::ExperimentTable table =
        repid::run_experiment(setting, args.seed, &trees);
    const auto summary = repid::rank_eval(table, setting);
    const auto splits = repid::split_summary(trees);

    const auto names = repid::default_feature_names(setting.dgp.p());
    repid::write_file(out_path(args.out, "table.csv"),
                      repid::experiment_table_to_csv(table, names));
    repid::write_file(out_path(args.out, "summary.csv"),
                      repid::rank_agreement_to_csv(summary));
    repid::write_file(out_path(args.out, "splits.csv"),
                      repid::split_summary_to_csv(splits, names));
    repid::write_file(out_path(args.out, "table.json"),
                      repid::experiment_table_to_json(table, names).dump(2) + "\n");
    repid::write_file(out_path(args.out, "summary.json"),
                      repid::rank_agreement_to_json(summary).dump(2) + "\n");
    repid::write_file(out_path(args.out, "splits.json"),
                      repid::split_summary_to_json(splits, names).dump(2) + "\n");
    for (const auto& [rep, msg] : table.failures)
        std::cerr << "warning: rep " << rep + 1 << " failed: " << msg << "\n";
    return 0;
}

struct SimulateArgs {
    std::string setting, out;
    std::string target_out;
    std::size_t n = 0;  // 0 = setting default
    std::uint64_t seed = kDefaultSeed;
};

int cmd_simulate(const SimulateArgs& args) {
    repid::Setting setting = repid::dgp_catalog(args.setting);
    const std::size_t n = args.n > 0 ? args.n : setting.n;
    const auto [ds, targets] = repid::sample_dgp(
        setting.dgp, repid::lookup_truth_fn(setting.dgp.truth_fn), n, args.seed);
    repid::write_file(args.out, repid::save_dataset(ds));
    if (!args.target_out.empty()) {
        std::string csv = "y\n";
        for (double y : targets) csv += repid::detail::format_double(y) + "\n";
        repid::write_file(args.target_out, csv);
    }
    return 0;
}

struct PlotArgs {
    std::string input, out;
    std::string style = "auto";  // auto | ice | reps
    std::string title;
    std::uint64_t seed = kDefaultSeed;  // accepted for interface uniformity
};

int cmd_plot(const PlotArgs& args) {
    const repid::Dataset curves = repid::load_dataset(repid::read_file(args.input));
    if (curves.p() < 2) repid::throw_data("plot: need a grid column plus curves");
    for (const auto& meta : curves.metas)
        if (meta.kind != repid::FeatureKind::numeric)
            repid::throw_data("plot: non-numeric column '" + meta.name + "'");

    bool ice_style;
    if (args.style == "ice") {
        ice_style = true;
    } else if (args.style == "reps") {
        ice_style = false;
    } else if (args.style == "auto") {
        ice_style = true;
        for (std::size_t j = 1; j < curves.p(); ++j)
            if (curves.metas[j].name.rfind("ice_", 0) != 0) ice_style = false;
    } else {
        repid::throw_config("plot style must be auto, ice, or reps");
    }

    repid::SvgChart chart;
    chart.x = curves.columns[0];
    chart.x_label = curves.metas[0].name;
    chart.title = args.title;
    if (ice_style) {
        for (std::size_t j = 1; j < curves.p(); ++j)
            chart.series.push_back(
                {"", "ice", "#555555", 0.6, 0.35, curves.columns[j]});
        // PD overlay: the pointwise mean of all curves.
        std::vector<double> pd(curves.n(), 0.0);
        std::vector<double> scratch(curves.p() - 1);
        for (std::size_t k = 0; k < curves.n(); ++k) {
            for (std::size_t j = 1; j < curves.p(); ++j)
                scratch[j - 1] = curves.columns[j][k];
            pd[k] = repid::pairwise_mean(scratch);
        }
        chart.series.push_back({"PD", "pd", "#1f78b4", 2.5, 1.0, std::move(pd)});
    } else {
        const auto& palette = repid::svg_palette();
        for (std::size_t j = 1; j < curves.p(); ++j)
            chart.series.push_back({curves.metas[j].name,
                                    "rep region-" + std::to_string(j - 1),
                                    palette[(j - 1) % palette.size()], 2.0, 1.0,
                                    curves.columns[j]});
    }
    repid::write_file(args.out, repid::render_line_chart(chart));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Regional effect plots with interaction detection"};
    app.require_subcommand(1);

    ExplainArgs ex;
    auto* explain = app.add_subcommand(
        "explain", "Fit the partition tree and write ICE/REP/report files");
    explain->add_option("--data", ex.data, "dataset CSV")->required();
    explain->add_option("--predictor", ex.predictor, "predictor spec")->required();
    explain->add_option("--feature", ex.feature, "feature of interest")->required();
    explain->add_option("--grid-strategy", ex.grid_strategy,
                        "equidistant|quantile|sample");
    explain->add_option("--grid-size", ex.grid_size)->check(CLI::PositiveNumber);
    explain->add_option("--max-depth", ex.max_depth);
    explain->add_option("--min-node", ex.min_node)->check(CLI::PositiveNumber);
    explain->add_option("--gamma", ex.gamma)->check(CLI::Range(0.0, 1.0));
    explain->add_option("--min-improvement", ex.min_improvement);
    explain->add_option("--timeout", ex.timeout);
    explain->add_option("--seed", ex.seed, "defaults to 42");
    explain->add_option("--out", ex.out, "output directory");

    IndicesArgs ix;
    auto* indices = app.add_subcommand("indices", "Compute interaction indices");
    indices->add_option("--data", ix.data)->required();
    indices->add_option("--predictor", ix.predictor)->required();
    indices->add_option("--feature", ix.feature)->required();
    indices->add_option("--methods", ix.methods, "comma list of repid,"
                        "h_statistic,greenwell,shap");
    indices->add_option("--grid-size", ix.grid_size)->check(CLI::PositiveNumber);
    indices->add_option("--h-sample", ix.h_sample)->check(CLI::PositiveNumber);
    indices->add_option("--shap-obs", ix.shap_obs)->check(CLI::PositiveNumber);
    indices->add_option("--shap-mode", ix.shap_mode, "exact|sampled");
    indices->add_option("--shap-permutations", ix.shap_permutations)
        ->check(CLI::PositiveNumber);
    indices->add_option("--max-depth", ix.max_depth);
    indices->add_option("--min-node", ix.min_node)->check(CLI::PositiveNumber);
    indices->add_option("--gamma", ix.gamma)->check(CLI::Range(0.0, 1.0));
    indices->add_option("--min-improvement", ix.min_improvement);
    indices->add_option("--timeout", ix.timeout);
    indices->add_option("--seed", ix.seed, "defaults to 42");
    indices->add_option("--out", ix.out, "output directory");

    ExperimentArgs ea;
    auto* experiment =
        app.add_subcommand("experiment", "Run a catalog benchmark setting");
    experiment->add_option("--setting", ea.setting, "catalog name")->required();
    experiment->add_option("--reps", ea.reps, "repetitions (0 = setting default)");
    experiment->add_option("--methods", ea.methods, "comma list");
    experiment->add_option("--seed", ea.seed, "defaults to 42");
    experiment->add_option("--out", ea.out, "output directory");

    SimulateArgs sa;
    auto* simulate = app.add_subcommand("simulate", "Sample a catalog DGP to CSV");
    simulate->add_option("--setting", sa.setting)->required();
    simulate->add_option("--n", sa.n, "sample size (0 = setting default)");
    simulate->add_option("--seed", sa.seed, "defaults to 42");
    simulate->add_option("--out", sa.out, "feature CSV path")->required();
    simulate->add_option("--target-out", sa.target_out, "optional target CSV path");

    PlotArgs pa;
    auto* plot = app.add_subcommand("plot", "Render a curves CSV to SVG");
    plot->add_option("--input", pa.input, "ice.csv or reps.csv")->required();
    plot->add_option("--out", pa.out, "SVG path")->required();
    plot->add_option("--style", pa.style, "auto|ice|reps");
    plot->add_option("--title", pa.title);
    plot->add_option("--seed", pa.seed, "accepted for uniformity; plot is deterministic");

    try {
        app.parse(argc, argv);
        if (explain->parsed()) return cmd_explain(ex);
        if (indices->parsed()) return cmd_indices(ix);
        if (experiment->parsed()) {
            if (experiment->count("--reps") && ea.reps == 0)
                repid::throw_config("--reps must be >= 1");
            return cmd_experiment(ea);
        }
        if (simulate->parsed()) return cmd_simulate(sa);
        if (plot->parsed()) return cmd_plot(pa);
        return 2;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << "error: usage: " << e.what() << "\n";
        return 2;
    } catch (const repid::Error& e) {
        switch (e.kind()) {
            case repid::ErrorKind::config:
                std::cerr << "error: usage: " << e.what() << "\n";
                return 2;
            case repid::ErrorKind::data:
                std::cerr << "error: data: " << e.what() << "\n";
                return 3;
            case repid::ErrorKind::predictor:
                std::cerr << "error: predictor: " << e.what() << "\n";
                return 4;
        }
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: data: " << e.what() << "\n";
        return 3;
    }
}
