#ifndef REPID_TEST_HELPERS_HPP
#define REPID_TEST_HELPERS_HPP

// Test-side oracles and fixtures. Everything here is deliberately
// independent of the library implementation paths it is used to check:
// plain loops, naive summation, textbook formulas.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <vector>

#include "repid/repid.hpp"

namespace testutil {

// Standard normal CDF from a Taylor series for erf; used as an oracle for
// the library quantile function.
inline double erf_series(double x) {
    // erf(x) = 2/sqrt(pi) * sum (-1)^n x^(2n+1) / (n! (2n+1))
    const double sign = x < 0 ? -1.0 : 1.0;
    x = std::fabs(x);
    double term = x, sum = x;
    for (int n = 1; n < 200; ++n) {
        term *= -x * x / n;
        const double add = term / (2 * n + 1);
        sum += add;
        if (std::fabs(add) < 1e-18 * std::fabs(sum)) break;
    }
    return sign * 2.0 / std::sqrt(M_PI) * sum;
}

inline double normal_cdf_series(double x) {
    return 0.5 * (1.0 + erf_series(x / std::sqrt(2.0)));
}

// Simpson quadrature of the standard normal density on [0, z].
inline double normal_cdf_simpson(double z) {
    const double sign = z < 0 ? -1.0 : 1.0;
    z = std::fabs(z);
    const int n = 20000;  // even
    const double h = z / n;
    auto phi = [](double t) {
        return std::exp(-0.5 * t * t) / std::sqrt(2.0 * M_PI);
    };
    double sum = phi(0.0) + phi(z);
    for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * phi(i * h);
    return 0.5 + sign * sum * h / 3.0;
}

inline double normal_quantile_bisection(double p) {
    double lo = -10.0, hi = 10.0;
    for (int iter = 0; iter < 80; ++iter) {
        const double mid = 0.5 * (lo + hi);
        (normal_cdf_simpson(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double d = 0.0;
    std::size_t ia = 0, ib = 0;
    while (ia < a.size() && ib < b.size()) {
        if (a[ia] <= b[ib]) ++ia;
        else ++ib;
        const double fa = static_cast<double>(ia) / a.size();
        const double fb = static_cast<double>(ib) / b.size();
        d = std::max(d, std::fabs(fa - fb));
    }
    return d;
}

inline std::vector<double> ranks_of(const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return v[x] < v[y]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        r[order[i]] = static_cast<double>(i + 1);
    return r;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    return pearson(ranks_of(x), ranks_of(y));
}

// Gauss-Jordan inverse for the OLS standard-error oracle.
inline std::vector<std::vector<double>> invert(std::vector<std::vector<double>> a) {
    const std::size_t n = a.size();
    std::vector<std::vector<double>> inv(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
        std::swap(a[piv], a[col]);
        std::swap(inv[piv], inv[col]);
        const double d = a[col][col];
        for (std::size_t c = 0; c < n; ++c) {
            a[col][c] /= d;
            inv[col][c] /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a[r][col];
            for (std::size_t c = 0; c < n; ++c) {
                a[r][c] -= f * a[col][c];
                inv[r][c] -= f * inv[col][c];
            }
        }
    }
    return inv;
}

// Predictor wrapper that counts evaluated rows and predict calls.
struct CountingPredictor {
    std::shared_ptr<std::size_t> rows = std::make_shared<std::size_t>(0);
    std::shared_ptr<std::size_t> calls = std::make_shared<std::size_t>(0);
    repid::Predictor wrapped;

    repid::Predictor make() const {
        auto rows_ptr = rows;
        auto calls_ptr = calls;
        auto inner = std::make_shared<repid::Predictor>(wrapped);
        return repid::Predictor::custom([rows_ptr, calls_ptr,
                                         inner](const repid::Matrix& m) {
            *rows_ptr += m.rows();
            *calls_ptr += 1;
            return repid::predict(*inner, m);
        });
    }
};

// A dataset of iid uniforms on (-1, 1), deterministic in the seed.
inline repid::Dataset uniform_dataset(std::size_t n, std::size_t p,
                                      std::uint64_t seed) {
    repid::Dataset ds;
    ds.metas.resize(p);
    ds.columns.assign(p, std::vector<double>(n));
    repid::Rng rng(seed);
    for (std::size_t j = 0; j < p; ++j) {
        ds.metas[j].name = "x" + std::to_string(j + 1);
        for (std::size_t i = 0; i < n; ++i)
            ds.columns[j][i] = 2.0 * rng.next_open01() - 1.0;
    }
    return ds;
}

// Symmetric variant: rows come in (v, -v) pairs so every column mean is 0.
inline repid::Dataset symmetric_dataset(std::size_t half_n, std::size_t p,
                                        std::uint64_t seed) {
    repid::Dataset ds;
    ds.metas.resize(p);
    ds.columns.assign(p, std::vector<double>(2 * half_n));
    repid::Rng rng(seed);
    for (std::size_t j = 0; j < p; ++j) {
        ds.metas[j].name = "x" + std::to_string(j + 1);
        for (std::size_t i = 0; i < half_n; ++i) {
            const double v = 2.0 * rng.next_open01() - 1.0;
            ds.columns[j][2 * i] = v;
            ds.columns[j][2 * i + 1] = -v;
        }
    }
    return ds;
}

inline repid::Predictor fn_predictor(double (*fn)(std::span<const double>)) {
    return repid::Predictor::custom([fn](const repid::Matrix& m) {
        std::vector<double> out(m.rows());
        for (std::size_t i = 0; i < m.rows(); ++i) out[i] = fn(m.row(i));
        return out;
    });
}

template <typename F>
repid::Predictor lambda_predictor(F fn) {
    return repid::Predictor::custom([fn](const repid::Matrix& m) {
        std::vector<double> out(m.rows());
        for (std::size_t i = 0; i < m.rows(); ++i) out[i] = fn(m.row(i));
        return out;
    });
}

}  // namespace testutil

#endif  // REPID_TEST_HELPERS_HPP
