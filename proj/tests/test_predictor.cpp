#include <doctest.h>

#include "helpers.hpp"
#include "repid/dgp.hpp"
#include "repid/predictor.hpp"

using namespace repid;

TEST_CASE("fit_ols interpolates an exact linear target") {
    const Dataset ds = testutil::uniform_dataset(50, 1, 3);
    std::vector<double> y(ds.n());
    for (std::size_t i = 0; i < ds.n(); ++i) y[i] = 2.0 + 3.0 * ds.columns[0][i];
    const LinearModel model = fit_ols(ds, y, {intercept_term(), linear_term(0)});
    CHECK(model.coefficients[0] == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(model.coefficients[1] == doctest::Approx(3.0).epsilon(1e-10));
}

TEST_CASE("fit_ols recovers the full interaction design within 5 SE") {
    // Coefficient-recovery oracle: noisy four-feature DGP with main, pairwise
    // and three-way product terms, 30 seeds, the classic SE formula computed
    // with an independent Gauss-Jordan inverse.
    DgpSpec spec;
    spec.marginals.assign(4, UniformMarginal{-1, 1});
    spec.truth_fn = "weak_linear";
    spec.truth_params = {1, 1, 1, 1, 1, 1, 1, 1};
    spec.noise_rule = NoiseRule::relative_to_signal;
    spec.noise_value = 0.1;

    const std::vector<Term> terms{intercept_term(),      linear_term(0),
                                  linear_term(1),        linear_term(2),
                                  linear_term(3),        product_term({0, 1}),
                                  product_term({1, 2}),  product_term({0, 2}),
                                  product_term({0, 1, 2})};
    const std::vector<double> truth{0, 1, 1, 1, 1, 1, 1, 1, 1};

    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        auto [ds, y] = sample_dgp(spec, lookup_truth_fn("weak_linear"), 1000, seed);
        const LinearModel model = fit_ols(ds, y, terms);

        const std::size_t n = ds.n(), k = terms.size();
        std::vector<std::vector<double>> xtx(k, std::vector<double>(k, 0.0));
        std::vector<double> fitted(n, 0.0), row;
        double rss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            row = ds.row(i);
            std::vector<double> d(k);
            for (std::size_t t = 0; t < k; ++t) d[t] = terms[t].eval(row);
            for (std::size_t a = 0; a < k; ++a)
                for (std::size_t b = 0; b < k; ++b) xtx[a][b] += d[a] * d[b];
            double f = 0.0;
            for (std::size_t t = 0; t < k; ++t) f += model.coefficients[t] * d[t];
            rss += (y[i] - f) * (y[i] - f);
        }
        const auto inv = testutil::invert(xtx);
        const double s2 = rss / static_cast<double>(n - k);
        for (std::size_t t = 0; t < k; ++t) {
            const double se = std::sqrt(s2 * inv[t][t]);
            CHECK(std::fabs(model.coefficients[t] - truth[t]) < 5.0 * se);
        }
    }
}

TEST_CASE("fit_ols detects an exactly collinear design") {
    const Dataset ds = testutil::uniform_dataset(40, 1, 5);
    std::vector<double> y(ds.n(), 1.0);
    CHECK_THROWS_AS(
        fit_ols(ds, y, {intercept_term(), linear_term(0), linear_term(0)}), Error);
}

TEST_CASE("residuals are orthogonal to every design column") {
    DgpSpec spec;
    spec.marginals.assign(4, UniformMarginal{-1, 1});
    spec.truth_fn = "weak_linear";
    spec.truth_params = {1, 0.5, -2, 1, 0.3, 1, 1, 1};
    auto [ds, y] = sample_dgp(spec, lookup_truth_fn("weak_linear"), 500, 8);

    const std::vector<Term> terms{intercept_term(), linear_term(0), linear_term(1),
                                  product_term({0, 1})};
    const LinearModel model = fit_ols(ds, y, terms);

    const Predictor pred = Predictor::linear(model);
    const auto fitted = predict(pred, ds.as_matrix(), ds.metas);
    double worst = 0.0;
    for (const auto& term : terms) {
        double dot = 0.0;
        for (std::size_t i = 0; i < ds.n(); ++i)
            dot += term.eval(ds.row(i)) * (y[i] - fitted[i]);
        worst = std::max(worst, std::fabs(dot));
    }
    CHECK(worst <= 1e-6 * static_cast<double>(ds.n()));
}

TEST_CASE("noiseless targets give coefficients to 1e-8 relative error") {
    const Dataset ds = testutil::uniform_dataset(200, 3, 17);
    const std::vector<Term> terms{intercept_term(), linear_term(0), linear_term(2),
                                  product_term({0, 1})};
    const std::vector<double> truth{0.7, -1.3, 2.9, 4.1};
    std::vector<double> y(ds.n());
    for (std::size_t i = 0; i < ds.n(); ++i) {
        const auto row = ds.row(i);
        y[i] = 0.0;
        for (std::size_t t = 0; t < terms.size(); ++t)
            y[i] += truth[t] * terms[t].eval(row);
    }
    const LinearModel model = fit_ols(ds, y, terms);
    for (std::size_t t = 0; t < terms.size(); ++t)
        CHECK(model.coefficients[t] ==
              doctest::Approx(truth[t]).epsilon(1e-8));
}

TEST_CASE("predict evaluates linear and truth variants") {
    LinearModel lm;
    lm.terms = {intercept_term(), linear_term(0)};
    lm.coefficients = {2.0, 3.0};
    Matrix one(1, 1);
    one(0, 0) = 1.0;
    CHECK(predict(Predictor::linear(lm), one)[0] == doctest::Approx(5.0));

    // Step-interaction truth function at x1=0.5, x2=1, x3=1:
    // 0.2*0.5 - 8 + 8*1 + 16*0 = 0.1.
    Matrix row(1, 6);
    row(0, 0) = 0.5;
    row(0, 1) = 1.0;
    row(0, 2) = 1.0;
    CHECK(predict(Predictor::truth("sim3_running"), row)[0] ==
          doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("predict on an empty batch returns an empty vector") {
    LinearModel lm;
    lm.terms = {intercept_term()};
    lm.coefficients = {1.0};
    CHECK(predict(Predictor::linear(lm), Matrix(0, 3)).empty());
}

TEST_CASE("predict is referentially transparent") {
    const Dataset ds = testutil::uniform_dataset(100, 4, 23);
    const Predictor pred = Predictor::truth("weak_linear", {1, 1, 1, 1, 1, 1, 1, 1});
    const auto a = predict(pred, ds.as_matrix(), ds.metas);
    const auto b = predict(pred, ds.as_matrix(), ds.metas);
    CHECK(a == b);
}

TEST_CASE("non-finite predictions are flagged with the row") {
    auto bad = Predictor::custom([](const Matrix& m) {
        std::vector<double> out(m.rows(), 1.0);
        if (m.rows() > 2) out[2] = std::numeric_limits<double>::quiet_NaN();
        return out;
    });
    try {
        predict(bad, Matrix(4, 1));
        FAIL("expected a prediction error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("row 2") != std::string::npos);
    }
}

TEST_CASE("indicator transforms reproduce step terms") {
    Term step;  // x2 * 1(x1 > 0)
    step.factors = {{1, Transform::identity, 0.0}, {0, Transform::indicator_gt, 0.0}};
    Matrix rows(2, 2);
    rows(0, 0) = 0.5;
    rows(0, 1) = 3.0;
    rows(1, 0) = -0.5;
    rows(1, 1) = 3.0;
    CHECK(step.eval(rows.row(0)) == 3.0);
    CHECK(step.eval(rows.row(1)) == 0.0);

    Term eq;  // 1(x1 = 0)
    eq.factors = {{0, Transform::indicator_eq, 0.0}};
    Matrix zrows(1, 1);
    zrows(0, 0) = 0.0;
    CHECK(eq.eval(zrows.row(0)) == 1.0);
}
