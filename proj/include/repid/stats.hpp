#ifndef REPID_STATS_HPP
#define REPID_STATS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "repid/common.hpp"

namespace repid {

// Standard normal CDF via the complementary error function.
inline double normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

inline double normal_pdf(double z) {
    static const double inv_sqrt_2pi = 0.3989422804014326779399461;
    return inv_sqrt_2pi * std::exp(-0.5 * z * z);
}

// Inverse standard normal CDF. Acklam's rational approximation (relative
// error < 1.2e-9) polished with one Newton step, giving ~1e-15 absolute
// error over (0, 1).
inline double normal_quantile(double prob) {
    if (!(prob > 0.0 && prob < 1.0))
        throw_data("normal_quantile: probability must lie strictly in (0,1)");

    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;

    double x;
    if (prob < plow) {
        double q = std::sqrt(-2.0 * std::log(prob));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (prob <= 1.0 - plow) {
        double q = prob - 0.5;
        double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        double q = std::sqrt(-2.0 * std::log(1.0 - prob));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    // One Newton polish against the accurate CDF.
    double err = normal_cdf(x) - prob;
    x -= err / normal_pdf(x);
    return x;
}

inline double mean(std::span<const double> v) { return pairwise_mean(v); }

inline double sum_sq_dev(std::span<const double> v) {
    const double m = pairwise_mean(v);
    std::vector<double> sq(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double d = v[i] - m;
        sq[i] = d * d;
    }
    return pairwise_sum(sq);
}

// Sample variance / standard deviation (n-1 denominator).
inline double sample_var(std::span<const double> v) {
    if (v.size() < 2) return 0.0;
    return sum_sq_dev(v) / static_cast<double>(v.size() - 1);
}

inline double sample_sd(std::span<const double> v) { return std::sqrt(sample_var(v)); }

// Type-7 empirical quantile (linear interpolation of order statistics),
// matching the default of most statistical software.
inline double quantile_type7(std::vector<double> sorted, double p) {
    if (sorted.empty()) throw_data("quantile of empty sample");
    if (p <= 0.0) return sorted.front();
    if (p >= 1.0) return sorted.back();
    const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const double frac = h - static_cast<double>(lo);
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return quantile_type7(std::move(v), 0.5);
}

// Dense ranks, 1 = largest score; exactly equal scores share a rank.
inline std::vector<int> dense_ranks_desc(std::span<const double> scores) {
    std::vector<std::size_t> order(scores.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    std::vector<int> ranks(scores.size(), 0);
    int rank = 0;
    for (std::size_t k = 0; k < order.size(); ++k) {
        if (k == 0 || scores[order[k]] != scores[order[k - 1]]) ++rank;
        ranks[order[k]] = rank;
    }
    return ranks;
}

}  // namespace repid

#endif  // REPID_STATS_HPP
