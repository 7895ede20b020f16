#ifndef REPID_REPORT_HPP
#define REPID_REPORT_HPP

#include <map>
#include <string>

#include "repid/common.hpp"
#include "repid/stats.hpp"

namespace repid {

enum class Method { repid, h_statistic, greenwell, shap };

inline const char* method_name(Method m) {
    switch (m) {
        case Method::repid: return "repid";
        case Method::h_statistic: return "h_statistic";
        case Method::greenwell: return "greenwell";
        case Method::shap: return "shap";
    }
    return "?";
}

inline Method method_from_name(const std::string& name) {
    if (name == "repid") return Method::repid;
    if (name == "h_statistic" || name == "h") return Method::h_statistic;
    if (name == "greenwell") return Method::greenwell;
    if (name == "shap") return Method::shap;
    throw_config("unknown method '" + name + "'");
}

// Per-feature interaction scores against one feature of interest, from any
// of the four methods. Ranks are dense, 1 = strongest, ties share a rank.
struct InteractionReport {
    Method method = Method::repid;
    int feature_s = -1;
    std::map<int, double> scores;
    std::map<int, int> ranks;
    double r2_int = 0.0;        // REPID only
    bool no_interaction = false;

    void compute_ranks() {
        std::vector<int> features;
        std::vector<double> values;
        for (const auto& [f, v] : scores) {
            features.push_back(f);
            values.push_back(v);
        }
        const auto r = dense_ranks_desc(values);
        ranks.clear();
        for (std::size_t i = 0; i < features.size(); ++i) ranks[features[i]] = r[i];
    }
};

}  // namespace repid

#endif  // REPID_REPORT_HPP
