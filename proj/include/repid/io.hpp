#ifndef REPID_IO_HPP
#define REPID_IO_HPP

#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "repid/experiments.hpp"
#include "repid/ice.hpp"
#include "repid/tree.hpp"

namespace repid {

namespace detail {

inline std::string sig4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

// True for numeric columns that only take the values 0 and 1; their split
// rules read better as equalities.
inline bool is_binary_column(const Dataset& ds, int feature) {
    const auto& meta = ds.metas[static_cast<std::size_t>(feature)];
    if (meta.kind != FeatureKind::numeric) return false;
    for (double v : ds.columns[static_cast<std::size_t>(feature)])
        if (v != 0.0 && v != 1.0) return false;
    return true;
}

}  // namespace detail

// Human-readable rule for one side of a split, e.g. "x3=0", "x1<=0.01",
// "color ∈ {red, blue}".
inline std::string split_side_label(const Dataset& ds, const Split& split,
                                    bool left) {
    const auto& meta = ds.metas[static_cast<std::size_t>(split.feature)];
    if (split.categorical) {
        std::string label = meta.name + (left ? " ∈ {" : " ∉ {");
        for (std::size_t i = 0; i < split.left_levels.size(); ++i) {
            if (i) label += ", ";
            label += meta.levels[static_cast<std::size_t>(split.left_levels[i])];
        }
        return label + "}";
    }
    if (detail::is_binary_column(ds, split.feature) && split.threshold >= 0.0 &&
        split.threshold < 1.0)
        return meta.name + (left ? "=0" : "=1");
    return meta.name + (left ? "<=" : ">") + detail::sig4(split.threshold);
}

// Conjunction of the rules on the path from the root to a node.
inline std::string node_path_label(const RepidTree& tree, const Dataset& ds,
                                   std::size_t node_id) {
    std::vector<std::string> parts;
    std::size_t cur = node_id;
    while (tree.nodes[cur].parent >= 0) {
        const auto& parent = tree.nodes[static_cast<std::size_t>(tree.nodes[cur].parent)];
        const bool left = parent.left == static_cast<int>(cur);
        parts.push_back(split_side_label(ds, *parent.split, left));
        cur = parent.id;
    }
    if (parts.empty()) return "all";
    std::string label;
    for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
        if (!label.empty()) label += " & ";
        label += *it;
    }
    return label;
}

// --- CSV ---------------------------------------------------------------

// Grid column followed by one column per ICE curve.
inline std::string ice_to_csv(const IceMatrix& ice, const std::string& grid_name) {
    std::string out = detail::csv_quote(grid_name);
    for (std::size_t i = 0; i < ice.n(); ++i)
        out += ",ice_" + std::to_string(i + 1);
    out.push_back('\n');
    for (std::size_t k = 0; k < ice.m(); ++k) {
        out += detail::format_double(ice.grid.values[k]);
        for (std::size_t i = 0; i < ice.n(); ++i) {
            out.push_back(',');
            out += detail::format_double(ice.values(i, k));
        }
        out.push_back('\n');
    }
    return out;
}

// Grid column followed by one column per regional effect curve, labeled with
// its split path.
inline std::string reps_to_csv(const RepidTree& tree, const Dataset& ds,
                               const std::vector<RegionalEffect>& reps,
                               const std::string& grid_name, bool centered) {
    std::string out = detail::csv_quote(grid_name);
    for (const auto& re : reps)
        out += "," + detail::csv_quote(node_path_label(tree, ds, re.node_id));
    out.push_back('\n');
    const std::size_t m = reps.empty() ? 0 : reps.front().raw.values.size();
    for (std::size_t k = 0; k < m; ++k) {
        out += detail::format_double(reps.front().raw.grid.values[k]);
        for (const auto& re : reps) {
            out.push_back(',');
            out += detail::format_double(centered ? re.centered.values[k]
                                                  : re.raw.values[k]);
        }
        out.push_back('\n');
    }
    return out;
}

inline std::string report_to_csv(const InteractionReport& report,
                                 const std::vector<std::string>& feature_names) {
    std::string out = "method,feature,score,rank\n";
    for (const auto& [feature, score] : report.scores) {
        out += method_name(report.method);
        out.push_back(',');
        out += detail::csv_quote(feature_names[static_cast<std::size_t>(feature)]);
        out.push_back(',');
        out += detail::format_double(score);
        out.push_back(',');
        out += std::to_string(report.ranks.at(feature));
        out.push_back('\n');
    }
    return out;
}

inline std::string reports_to_csv(const std::vector<InteractionReport>& reports,
                                  const std::vector<std::string>& feature_names) {
    std::string out = "method,feature,score,rank\n";
    for (const auto& report : reports)
        for (const auto& [feature, score] : report.scores) {
            out += method_name(report.method);
            out.push_back(',');
            out += detail::csv_quote(feature_names[static_cast<std::size_t>(feature)]);
            out.push_back(',');
            out += detail::format_double(score);
            out.push_back(',');
            out += std::to_string(report.ranks.at(feature));
            out.push_back('\n');
        }
    return out;
}

inline std::string experiment_table_to_csv(const ExperimentTable& table,
                                           const std::vector<std::string>& names) {
    std::string out = "rep,method,feature,score\n";
    for (const auto& r : table.rows) {
        out += std::to_string(r.rep + 1);
        out.push_back(',');
        out += method_name(r.method);
        out.push_back(',');
        out += detail::csv_quote(names[static_cast<std::size_t>(r.feature)]);
        out.push_back(',');
        out += detail::format_double(r.score);
        out.push_back('\n');
    }
    return out;
}

inline std::string rank_agreement_to_csv(const std::vector<RankAgreement>& summary) {
    std::string out = "method,reps,agreement\n";
    for (const auto& ra : summary) {
        out += method_name(ra.method);
        out.push_back(',');
        out += std::to_string(ra.reps_evaluated);
        out.push_back(',');
        out += detail::format_double(ra.agreement);
        out.push_back('\n');
    }
    return out;
}

inline std::string split_summary_to_csv(const SplitSummary& summary,
                                        const std::vector<std::string>& names) {
    std::string out = "depth,position,feature,share,count,slot_total,value_mean,value_sd\n";
    for (const auto& s : summary.stats) {
        out += std::to_string(s.depth);
        out.push_back(',');
        out += std::to_string(s.position);
        out.push_back(',');
        out += detail::csv_quote(names[static_cast<std::size_t>(s.feature)]);
        out.push_back(',');
        out += detail::format_double(s.share);
        out.push_back(',');
        out += std::to_string(s.count);
        out.push_back(',');
        out += std::to_string(s.slot_total);
        out.push_back(',');
        out += detail::format_double(s.value_mean);
        out.push_back(',');
        out += detail::format_double(s.value_sd);
        out.push_back('\n');
    }
    return out;
}

// --- JSON --------------------------------------------------------------

inline nlohmann::json grid_to_json(const Grid& grid) {
    return {{"feature", grid.feature}, {"values", grid.values}};
}

inline nlohmann::json ice_to_json(const IceMatrix& ice) {
    nlohmann::json values = nlohmann::json::array();
    for (std::size_t i = 0; i < ice.n(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t k = 0; k < ice.m(); ++k) row.push_back(ice.values(i, k));
        values.push_back(std::move(row));
    }
    return {{"grid", grid_to_json(ice.grid)},
            {"values", std::move(values)},
            {"centered", ice.centered}};
}

inline nlohmann::json pd_to_json(const PdCurve& pd) {
    return {{"grid", grid_to_json(pd.grid)},
            {"values", pd.values},
            {"centered", pd.centered},
            {"support", pd.support}};
}

inline nlohmann::json report_to_json(const InteractionReport& report,
                                     const std::vector<std::string>& names) {
    nlohmann::json scores = nlohmann::json::object();
    nlohmann::json ranks = nlohmann::json::object();
    for (const auto& [feature, score] : report.scores) {
        const auto& name = names[static_cast<std::size_t>(feature)];
        scores[name] = score;
        ranks[name] = report.ranks.at(feature);
    }
    nlohmann::json j = {{"method", method_name(report.method)},
                        {"feature_s", names[static_cast<std::size_t>(report.feature_s)]},
                        {"scores", std::move(scores)},
                        {"ranks", std::move(ranks)},
                        {"no_interaction", report.no_interaction}};
    if (report.method == Method::repid) j["r2_int"] = report.r2_int;
    return j;
}

// Long format, one record per (rep, method, feature) score.
inline nlohmann::json experiment_table_to_json(const ExperimentTable& table,
                                               const std::vector<std::string>& names) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : table.rows)
        rows.push_back({{"rep", r.rep + 1},
                        {"method", method_name(r.method)},
                        {"feature", names[static_cast<std::size_t>(r.feature)]},
                        {"score", r.score}});
    nlohmann::json failures = nlohmann::json::array();
    for (const auto& [rep, msg] : table.failures)
        failures.push_back({{"rep", rep + 1}, {"error", msg}});
    return {{"rows", std::move(rows)}, {"failures", std::move(failures)}};
}

inline nlohmann::json rank_agreement_to_json(const std::vector<RankAgreement>& summary) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& ra : summary)
        out.push_back({{"method", method_name(ra.method)},
                       {"reps", ra.reps_evaluated},
                       {"agreement", ra.agreement}});
    return out;
}

inline nlohmann::json split_summary_to_json(const SplitSummary& summary,
                                            const std::vector<std::string>& names) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& s : summary.stats)
        out.push_back({{"depth", s.depth},
                       {"position", s.position},
                       {"feature", names[static_cast<std::size_t>(s.feature)]},
                       {"share", s.share},
                       {"count", s.count},
                       {"slot_total", s.slot_total},
                       {"value_mean", s.value_mean},
                       {"value_sd", s.value_sd}});
    return out;
}

inline nlohmann::json tree_to_json(const RepidTree& tree, const Dataset& ds,
                                   const std::vector<RegionalEffect>& reps) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& node : tree.nodes) {
        nlohmann::json jn = {{"id", node.id},
                             {"depth", node.depth},
                             {"parent", node.parent},
                             {"n", node.obs.size()},
                             {"risk", node.risk}};
        if (node.split) {
            nlohmann::json js = {
                {"feature",
                 ds.metas[static_cast<std::size_t>(node.split->feature)].name}};
            if (node.split->categorical) {
                js["rule"] = "in";
                nlohmann::json levels = nlohmann::json::array();
                for (int lv : node.split->left_levels)
                    levels.push_back(
                        ds.metas[static_cast<std::size_t>(node.split->feature)]
                            .levels[static_cast<std::size_t>(lv)]);
                js["levels"] = std::move(levels);
            } else {
                js["rule"] = "le";
                js["value"] = node.split->threshold;
            }
            jn["split"] = std::move(js);
            jn["intImp"] = node.int_imp;
            jn["children"] = {node.left, node.right};
        }
        nodes.push_back(std::move(jn));
    }

    nlohmann::json jreps = nlohmann::json::array();
    for (const auto& re : reps)
        jreps.push_back({{"node", re.node_id},
                         {"label", node_path_label(tree, ds, re.node_id)},
                         {"grid", re.raw.grid.values},
                         {"raw", re.raw.values},
                         {"centered", re.centered.values}});

    return {{"feature_s", ds.metas[static_cast<std::size_t>(tree.feature_s)].name},
            {"root_risk", tree.root_risk},
            {"stop",
             {{"max_depth", tree.stop.max_depth},
              {"min_node", tree.stop.min_node},
              {"gamma", tree.stop.gamma},
              {"min_abs_improvement", tree.stop.min_abs_improvement}}},
            {"nodes", std::move(nodes)},
            {"reps", std::move(jreps)}};
}

// --- files ---------------------------------------------------------------

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw_data("cannot write file '" + path + "'");
    out << content;
    if (!out) throw_data("failed writing file '" + path + "'");
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_data("cannot read file '" + path + "'");
    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
    return content;
}

inline std::vector<std::string> feature_names(const Dataset& ds) {
    std::vector<std::string> names(ds.p());
    for (std::size_t j = 0; j < ds.p(); ++j) names[j] = ds.metas[j].name;
    return names;
}

inline std::vector<std::string> default_feature_names(std::size_t p) {
    std::vector<std::string> names(p);
    for (std::size_t j = 0; j < p; ++j) names[j] = "x" + std::to_string(j + 1);
    return names;
}

}  // namespace repid

#endif  // REPID_IO_HPP
