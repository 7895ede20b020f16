#ifndef REPID_GRID_HPP
#define REPID_GRID_HPP

#include <algorithm>
#include <cstddef>
#include <vector>

#include "repid/dataset.hpp"
#include "repid/stats.hpp"

namespace repid {

enum class GridStrategy { equidistant, quantile, sample };

// Evaluation grid for one feature. Numeric grids are sorted, strictly
// increasing, and stay inside the observed [min, max]; categorical grids
// enumerate every level index.
struct Grid {
    int feature = -1;
    GridStrategy strategy = GridStrategy::equidistant;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }

    bool operator==(const Grid&) const = default;
};

inline Grid make_categorical_grid(const Dataset& ds, int feature) {
    const auto& meta = ds.metas[static_cast<std::size_t>(feature)];
    Grid g;
    g.feature = feature;
    g.strategy = GridStrategy::sample;
    g.values.resize(meta.levels.size());
    for (std::size_t l = 0; l < meta.levels.size(); ++l)
        g.values[l] = static_cast<double>(l);
    return g;
}

inline Grid make_grid(const Dataset& ds, int feature, GridStrategy strategy,
                      std::size_t m) {
    if (feature < 0 || static_cast<std::size_t>(feature) >= ds.p())
        throw_data("make_grid: feature index out of range");
    const auto& meta = ds.metas[static_cast<std::size_t>(feature)];
    if (meta.kind == FeatureKind::categorical) return make_categorical_grid(ds, feature);
    if (m < 2) throw_data("make_grid: need at least 2 grid points");

    const auto& col = ds.columns[static_cast<std::size_t>(feature)];
    const auto [mn_it, mx_it] = std::minmax_element(col.begin(), col.end());
    const double lo = *mn_it, hi = *mx_it;
    if (lo == hi)
        throw_data("make_grid: feature '" + meta.name + "' is constant (degenerate grid)");

    Grid g;
    g.feature = feature;
    g.strategy = strategy;
    g.values.resize(m);

    switch (strategy) {
        case GridStrategy::equidistant: {
            const double step = (hi - lo) / static_cast<double>(m - 1);
            for (std::size_t k = 0; k < m; ++k)
                g.values[k] = lo + step * static_cast<double>(k);
            g.values.back() = hi;
            break;
        }
        case GridStrategy::quantile: {
            std::vector<double> sorted(col);
            std::sort(sorted.begin(), sorted.end());
            for (std::size_t k = 0; k < m; ++k) {
                const double p =
                    static_cast<double>(k) / static_cast<double>(m - 1);
                g.values[k] = quantile_type7(sorted, p);
            }
            break;
        }
        case GridStrategy::sample: {
            // Deterministic stratified pick over the sorted unique values:
            // evenly spaced order-statistic positions, always including the
            // extremes. No randomness, no seed.
            std::vector<double> uniq(col);
            std::sort(uniq.begin(), uniq.end());
            uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
            if (m > uniq.size())
                throw_data("make_grid: sample strategy needs m <= #unique values");
            for (std::size_t k = 0; k < m; ++k) {
                const std::size_t idx = (k * (uniq.size() - 1)) / (m - 1);
                g.values[k] = uniq[idx];
            }
            break;
        }
    }

    for (std::size_t k = 1; k < g.values.size(); ++k)
        if (!(g.values[k] > g.values[k - 1]))
            throw_data("make_grid: degenerate grid on feature '" + meta.name +
                       "' (duplicate grid values)");
    return g;
}

}  // namespace repid

#endif  // REPID_GRID_HPP
