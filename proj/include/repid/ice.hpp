#ifndef REPID_ICE_HPP
#define REPID_ICE_HPP

#include <cctype>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "repid/grid.hpp"
#include "repid/predictor.hpp"

namespace repid {

// n x m matrix of ICE evaluations: row i is the prediction curve of
// observation i as feature_s sweeps the grid. value_scale records the raw
// prediction magnitude so later stages can recognize numerically-zero
// heterogeneity after centering.
struct IceMatrix {
    int feature_s = -1;
    FeatureKind feature_kind = FeatureKind::numeric;
    Grid grid;
    Matrix values;
    bool centered = false;
    double value_scale = 0.0;

    std::size_t n() const { return values.rows(); }
    std::size_t m() const { return values.cols(); }
};

struct PdCurve {
    Grid grid;
    std::vector<double> values;
    bool centered = false;
    std::vector<std::size_t> support;  // observation indices averaged over
};

struct Pd2Surface {
    Grid grid_j;
    Grid grid_l;
    Matrix values;  // m_j x m_l
    bool centered = false;
};

namespace detail {

inline std::string ice_context(const Error& e, std::size_t m) {
    // predict() names the flat batch row; translate to (observation, grid).
    std::string msg = e.what();
    std::size_t end = msg.size();
    while (end > 0 && std::isdigit(static_cast<unsigned char>(msg[end - 1]))) --end;
    if (end < msg.size()) {
        const std::size_t flat = std::stoul(msg.substr(end));
        msg += " (observation " + std::to_string(flat / m) + ", grid point " +
               std::to_string(flat % m) + ")";
    }
    return msg;
}

}  // namespace detail

// Evaluates all n*m (observation, grid point) pairs in a single batched
// predictor call, row-major by observation.
inline IceMatrix ice_matrix(const Predictor& pred, const Dataset& ds, int s,
                            const Grid& grid) {
    if (grid.feature != s) throw_data("ice_matrix: grid was built for another feature");
    const std::size_t n = ds.n(), p = ds.p(), m = grid.size();
    Matrix batch(n * m, p);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < m; ++k) {
            const std::size_t r = i * m + k;
            for (std::size_t j = 0; j < p; ++j) batch(r, j) = ds.columns[j][i];
            batch(r, static_cast<std::size_t>(s)) = grid.values[k];
        }
    }

    std::vector<double> preds;
    try {
        preds = predict(pred, batch, ds.metas);
    } catch (const Error& e) {
        throw Error(e.kind(), detail::ice_context(e, m));
    }

    IceMatrix ice;
    ice.feature_s = s;
    ice.feature_kind = ds.metas[static_cast<std::size_t>(s)].kind;
    ice.grid = grid;
    ice.values = Matrix(n, m);
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < m; ++k) {
            const double v = preds[i * m + k];
            ice.values(i, k) = v;
            scale = std::max(scale, std::fabs(v));
        }
    ice.value_scale = scale;
    return ice;
}

// Subtracts each curve's own mean over the grid points. Idempotent: a
// centered matrix passes through unchanged.
inline IceMatrix center_ice(const IceMatrix& ice) {
    if (ice.centered) return ice;
    IceMatrix out = ice;
    for (std::size_t i = 0; i < out.n(); ++i) {
        auto row = out.values.row(i);
        const double m = pairwise_mean(row);
        for (double& v : row) v -= m;
    }
    out.centered = true;
    return out;
}

// Partial dependence over a set of observations: the per-grid-point mean of
// their ICE values, optionally re-centered over the grid.
inline PdCurve pd_curve(const IceMatrix& ice, std::vector<std::size_t> support,
                        bool want_centered) {
    if (support.empty()) throw_data("pd_curve: empty support");
    PdCurve pd;
    pd.grid = ice.grid;
    pd.support = std::move(support);
    pd.values.resize(ice.m());
    std::vector<double> scratch(pd.support.size());
    for (std::size_t k = 0; k < ice.m(); ++k) {
        for (std::size_t t = 0; t < pd.support.size(); ++t)
            scratch[t] = ice.values(pd.support[t], k);
        pd.values[k] = pairwise_mean(scratch);
    }
    if (want_centered) {
        const double grand = pairwise_mean(pd.values);
        for (double& v : pd.values) v -= grand;
    }
    // Averages of centered curves stay centered.
    pd.centered = want_centered || ice.centered;
    return pd;
}

inline std::vector<std::size_t> all_rows(std::size_t n) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    return idx;
}

inline PdCurve pd_curve_full(const IceMatrix& ice, bool want_centered) {
    return pd_curve(ice, all_rows(ice.n()), want_centered);
}

// Two-feature partial dependence surface; centering subtracts the grand mean
// over all grid cells.
inline Pd2Surface pd2_surface(const Predictor& pred, const Dataset& ds, int j,
                              int l, const Grid& grid_j, const Grid& grid_l,
                              bool want_centered) {
    if (j == l) throw_data("pd2_surface: features must differ");
    const std::size_t n = ds.n(), p = ds.p();
    const std::size_t mj = grid_j.size(), ml = grid_l.size();
    Matrix batch(n * mj * ml, p);
    std::size_t r = 0;
    for (std::size_t a = 0; a < mj; ++a)
        for (std::size_t b = 0; b < ml; ++b)
            for (std::size_t i = 0; i < n; ++i, ++r) {
                for (std::size_t c = 0; c < p; ++c) batch(r, c) = ds.columns[c][i];
                batch(r, static_cast<std::size_t>(j)) = grid_j.values[a];
                batch(r, static_cast<std::size_t>(l)) = grid_l.values[b];
            }
    const std::vector<double> preds = predict(pred, batch, ds.metas);

    Pd2Surface surf;
    surf.grid_j = grid_j;
    surf.grid_l = grid_l;
    surf.values = Matrix(mj, ml);
    std::vector<double> scratch(n);
    r = 0;
    for (std::size_t a = 0; a < mj; ++a)
        for (std::size_t b = 0; b < ml; ++b) {
            for (std::size_t i = 0; i < n; ++i) scratch[i] = preds[r++];
            surf.values(a, b) = pairwise_mean(scratch);
        }
    if (want_centered) {
        const double grand = pairwise_mean(surf.values.data());
        for (double& v : surf.values.data()) v -= grand;
        surf.centered = true;
    }
    return surf;
}

struct DiceResult {
    Matrix derivs;           // n x m
    std::vector<double> sd;  // length m
};

// Derivative-ICE curves: central differences on interior grid points,
// one-sided at the ends, plus the per-grid-point standard deviation that
// flags heterogeneous (interacting) regions.
inline DiceResult dice_curves(const IceMatrix& ice) {
    if (ice.feature_kind == FeatureKind::categorical)
        throw_data("dice_curves: derivatives are undefined for categorical features");
    const std::size_t n = ice.n(), m = ice.m();
    if (m < 3) throw_data("dice_curves: need at least 3 grid points");
    const auto& g = ice.grid.values;

    DiceResult out;
    out.derivs = Matrix(n, m);
    for (std::size_t i = 0; i < n; ++i) {
        out.derivs(i, 0) = (ice.values(i, 1) - ice.values(i, 0)) / (g[1] - g[0]);
        for (std::size_t k = 1; k + 1 < m; ++k)
            out.derivs(i, k) =
                (ice.values(i, k + 1) - ice.values(i, k - 1)) / (g[k + 1] - g[k - 1]);
        out.derivs(i, m - 1) =
            (ice.values(i, m - 1) - ice.values(i, m - 2)) / (g[m - 1] - g[m - 2]);
    }
    out.sd.resize(m);
    std::vector<double> scratch(n);
    for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t i = 0; i < n; ++i) scratch[i] = out.derivs(i, k);
        out.sd[k] = sample_sd(scratch);
    }
    return out;
}

}  // namespace repid

#endif  // REPID_ICE_HPP
