#ifndef REPID_DGP_HPP
#define REPID_DGP_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "repid/dataset.hpp"
#include "repid/linalg.hpp"
#include "repid/rng.hpp"
#include "repid/stats.hpp"

namespace repid {

struct UniformMarginal {
    double a = -1.0, b = 1.0;
};
struct NormalMarginal {
    double mu = 0.0, sigma = 1.0;
};
struct BernoulliMarginal {
    double p = 0.5;
};
using Marginal = std::variant<UniformMarginal, NormalMarginal, BernoulliMarginal>;

enum class NoiseRule { absolute, relative_to_signal };

// Data-generating process: per-feature marginals tied together by a Gaussian
// copula, a named closed-form truth function, and a noise rule. Bernoulli
// marginals are sampled outside the copula and must have zero correlation
// entries.
struct DgpSpec {
    std::vector<std::string> feature_names;
    std::vector<Marginal> marginals;
    Matrix correlation;  // p x p latent-normal correlation, identity if empty
    std::string truth_fn;
    std::vector<double> truth_params;
    NoiseRule noise_rule = NoiseRule::relative_to_signal;
    double noise_value = 0.1;  // sigma for absolute, factor c for relative

    std::size_t p() const { return marginals.size(); }

    void validate() const {
        if (marginals.empty()) throw_data("dgp: no marginals");
        if (correlation.rows() != 0) {
            if (correlation.rows() != p() || correlation.cols() != p())
                throw_data("dgp: correlation matrix dimension mismatch");
            for (std::size_t i = 0; i < p(); ++i) {
                if (correlation(i, i) != 1.0)
                    throw_data("dgp: correlation diagonal must be 1");
                for (std::size_t j = 0; j < p(); ++j) {
                    if (correlation(i, j) != correlation(j, i))
                        throw_data("dgp: correlation matrix not symmetric");
                    if (i != j && correlation(i, j) != 0.0 &&
                        (std::holds_alternative<BernoulliMarginal>(marginals[i]) ||
                         std::holds_alternative<BernoulliMarginal>(marginals[j])))
                        throw_data("dgp: bernoulli marginals must be copula-independent");
                }
            }
        }
    }
};

namespace detail {

inline Matrix identity_correlation(std::size_t p) {
    Matrix m(p, p, 0.0);
    for (std::size_t i = 0; i < p; ++i) m(i, i) = 1.0;
    return m;
}

}  // namespace detail

// Draws n rows from the DGP. Latent standard normals are generated per
// column from independent substreams keyed by (seed, column), correlated by
// the lower Cholesky factor, mapped to uniforms by the normal CDF and then
// through the inverse marginal CDFs. Targets are truth_fn(row) plus noise
// from its own substream. Bit-reproducible in (spec, n, seed); appending a
// feature never changes earlier columns.
inline std::pair<Dataset, std::vector<double>> sample_dgp(
    const DgpSpec& spec,
    const std::function<double(std::span<const double>, std::span<const double>)>&
        truth,
    std::size_t n, std::uint64_t seed) {
    spec.validate();
    if (n == 0) throw_data("dgp: need n >= 1");
    const std::size_t p = spec.p();
    const Matrix corr =
        spec.correlation.rows() ? spec.correlation : detail::identity_correlation(p);
    const Matrix chol = cholesky_factor(corr, "dgp correlation");

    // Per-column latent draws (normals for continuous marginals, uniforms
    // for bernoulli).
    Matrix latent(n, p, 0.0);
    std::vector<bool> is_bernoulli(p, false);
    for (std::size_t j = 0; j < p; ++j) {
        Rng stream(mix_key(seed, rng_tag::column, j));
        if (std::holds_alternative<BernoulliMarginal>(spec.marginals[j])) {
            is_bernoulli[j] = true;
            for (std::size_t i = 0; i < n; ++i) latent(i, j) = stream.next_open01();
        } else {
            for (std::size_t i = 0; i < n; ++i)
                latent(i, j) = normal_quantile(stream.next_open01());
        }
    }

    Dataset ds;
    ds.metas.resize(p);
    ds.columns.assign(p, std::vector<double>(n));
    for (std::size_t j = 0; j < p; ++j) {
        ds.metas[j].name = j < spec.feature_names.size()
                               ? spec.feature_names[j]
                               : "x" + std::to_string(j + 1);
        ds.metas[j].kind = FeatureKind::numeric;
    }

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < p; ++j) {
            if (is_bernoulli[j]) {
                const auto& bm = std::get<BernoulliMarginal>(spec.marginals[j]);
                ds.columns[j][i] = latent(i, j) < bm.p ? 1.0 : 0.0;
                continue;
            }
            // Correlated latent normal; bernoulli columns have zero factor
            // entries so only continuous columns contribute.
            double z = 0.0;
            for (std::size_t k = 0; k <= j; ++k) z += chol(j, k) * latent(i, k);
            if (const auto* um = std::get_if<UniformMarginal>(&spec.marginals[j])) {
                ds.columns[j][i] = um->a + (um->b - um->a) * normal_cdf(z);
            } else {
                const auto& nm = std::get<NormalMarginal>(spec.marginals[j]);
                ds.columns[j][i] = nm.mu + nm.sigma * z;
            }
        }
    }
    ds.validate();

    std::vector<double> signal(n);
    std::vector<double> row(p);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < p; ++j) row[j] = ds.columns[j][i];
        signal[i] = truth(row, spec.truth_params);
    }

    double noise_sd = spec.noise_value;
    if (spec.noise_rule == NoiseRule::relative_to_signal)
        noise_sd = sample_sd(signal) * spec.noise_value;

    Rng noise_stream(mix_key(seed, rng_tag::noise));
    std::vector<double> targets(n);
    for (std::size_t i = 0; i < n; ++i)
        targets[i] = signal[i] + noise_sd * normal_quantile(noise_stream.next_open01());
    return {std::move(ds), std::move(targets)};
}

}  // namespace repid

#endif  // REPID_DGP_HPP
