#ifndef REPID_TRUTH_FNS_HPP
#define REPID_TRUTH_FNS_HPP

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <string_view>

#include "repid/common.hpp"

namespace repid {

using TruthFn =
    std::function<double(std::span<const double>, std::span<const double>)>;

namespace truth_fns {

inline double indicator(bool cond) { return cond ? 1.0 : 0.0; }

// 0.2*x1 - 8*x2 + 8*x2*1(x1>0) + 16*x2*1(x3=0); x3 is a 0/1 indicator.
inline double sim3_running(std::span<const double> x, std::span<const double>) {
    return 0.2 * x[0] - 8.0 * x[1] + 8.0 * x[1] * indicator(x[0] > 0.0) +
           16.0 * x[1] * indicator(x[2] == 0.0);
}

// Four main effects, three pairwise products, one three-way product;
// params = (b1, b2, b3, b4, b12, b23, b13, b123).
inline double weak_linear(std::span<const double> x, std::span<const double> b) {
    return b[0] * x[0] + b[1] * x[1] + b[2] * x[2] + b[3] * x[3] +
           b[4] * x[0] * x[1] + b[5] * x[1] * x[2] + b[6] * x[0] * x[2] +
           b[7] * x[0] * x[1] * x[2];
}

inline double nonlinear10(std::span<const double> x, std::span<const double>) {
    const double x1 = x[0], x2 = x[1], x3 = x[2], x4 = x[3], x5 = x[4],
                 x6 = x[5], x8 = x[7];
    const double xlogx = x6 == 0.0 ? 0.0 : x6 * std::log(std::fabs(x6));
    const double relu2 = x2 > 0.0 ? x2 : 0.0;
    return 6.0 * x1 + x2 * x2 - std::pow(M_PI, x3) + std::exp(-2.0 * x4 * x4) +
           1.0 / (2.0 + std::fabs(x5)) + xlogx +
           2.0 * x3 * indicator(x1 > 0.0) * indicator(x2 > 0.0) +
           2.0 * x2 * indicator(x4 > 0.0) + 4.0 * std::pow(relu2, std::fabs(x6)) +
           std::fabs(x2 + x8);
}

inline double linear7(std::span<const double> x, std::span<const double>) {
    return x[0] + 4.0 * x[1] + 3.0 * x[1] * x[2] + 5.0 * x[1] * x[3] +
           7.0 * x[1] * x[4];
}

}  // namespace truth_fns

inline TruthFn lookup_truth_fn(std::string_view name) {
    if (name == "sim3_running") return truth_fns::sim3_running;
    if (name == "weak_linear") return truth_fns::weak_linear;
    if (name == "nonlinear10") return truth_fns::nonlinear10;
    if (name == "linear7") return truth_fns::linear7;
    throw_data("unknown truth function '" + std::string(name) + "'");
}

// Highest feature index each function reads, plus one.
inline std::size_t truth_fn_arity(std::string_view name) {
    if (name == "sim3_running") return 3;
    if (name == "weak_linear") return 4;
    if (name == "nonlinear10") return 8;
    if (name == "linear7") return 5;
    throw_data("unknown truth function '" + std::string(name) + "'");
}

}  // namespace repid

#endif  // REPID_TRUTH_FNS_HPP
