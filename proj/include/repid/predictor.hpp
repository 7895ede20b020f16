#ifndef REPID_PREDICTOR_HPP
#define REPID_PREDICTOR_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "repid/dataset.hpp"
#include "repid/external.hpp"
#include "repid/linalg.hpp"
#include "repid/truth_fns.hpp"

namespace repid {

enum class Transform { identity, indicator_gt, indicator_eq };

struct TermFactor {
    int feature = 0;
    Transform transform = Transform::identity;
    double value = 0.0;  // threshold for indicator_gt, level/value for indicator_eq

    bool operator==(const TermFactor&) const = default;
};

// One design-matrix column: a product of transformed feature values. An
// empty factor list is the intercept.
struct Term {
    std::vector<TermFactor> factors;

    bool is_intercept() const { return factors.empty(); }

    double eval(std::span<const double> row) const {
        double v = 1.0;
        for (const auto& f : factors) {
            const double x = row[static_cast<std::size_t>(f.feature)];
            switch (f.transform) {
                case Transform::identity: v *= x; break;
                case Transform::indicator_gt: v *= x > f.value ? 1.0 : 0.0; break;
                case Transform::indicator_eq: v *= x == f.value ? 1.0 : 0.0; break;
            }
        }
        return v;
    }

    bool operator==(const Term&) const = default;
};

inline Term intercept_term() { return Term{}; }

inline Term linear_term(int feature) {
    return Term{{TermFactor{feature, Transform::identity, 0.0}}};
}

inline Term product_term(std::initializer_list<int> features) {
    Term t;
    for (int f : features) t.factors.push_back({f, Transform::identity, 0.0});
    return t;
}

struct LinearModel {
    std::vector<Term> terms;
    std::vector<double> coefficients;

    double eval(std::span<const double> row) const {
        double y = 0.0;
        for (std::size_t t = 0; t < terms.size(); ++t)
            y += coefficients[t] * terms[t].eval(row);
        return y;
    }
};

struct TruthPredictor {
    std::string name;
    std::vector<double> params;
    TruthFn fn;
    std::size_t min_arity = 0;
};

// Arbitrary batch evaluator; used for wrapping and instrumenting predictors.
using CustomFn = std::function<std::vector<double>(const Matrix&)>;

// Deterministic evaluator: same rows always yield the same predictions.
struct Predictor {
    std::variant<LinearModel, TruthPredictor, ExternalSpec, CustomFn> impl;

    static Predictor linear(LinearModel m) { return {std::move(m)}; }
    static Predictor truth(std::string name, std::vector<double> params = {}) {
        TruthFn fn = lookup_truth_fn(name);
        const std::size_t arity = truth_fn_arity(name);
        return {TruthPredictor{std::move(name), std::move(params), std::move(fn), arity}};
    }
    static Predictor external(ExternalSpec spec) { return {std::move(spec)}; }
    static Predictor custom(CustomFn fn) { return {std::move(fn)}; }
};

// Ordinary least squares through the normal equations with a Cholesky solve.
// Exact and deterministic for the modest term counts used here; a rank
// deficient design fails factorization and is reported as a singular design.
inline LinearModel fit_ols(const Dataset& ds, std::span<const double> targets,
                           std::vector<Term> terms) {
    const std::size_t n = ds.n();
    const std::size_t k = terms.size();
    if (k == 0) throw_data("fit_ols: no terms");
    if (targets.size() != n) throw_data("fit_ols: target length mismatch");
    if (n < k) throw_data("fit_ols: fewer observations than terms");

    Matrix design(n, k);
    std::vector<double> row(ds.p());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < ds.p(); ++j) row[j] = ds.columns[j][i];
        for (std::size_t t = 0; t < k; ++t) design(i, t) = terms[t].eval(row);
    }

    Matrix xtx(k, k);
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = a; b < k; ++b) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += design(i, a) * design(i, b);
            xtx(a, b) = xtx(b, a) = s;
        }
    std::vector<double> xty(k, 0.0);
    for (std::size_t a = 0; a < k; ++a) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += design(i, a) * targets[i];
        xty[a] = s;
    }

    Matrix chol = cholesky_factor(xtx, "fit_ols: singular design");
    LinearModel model;
    model.terms = std::move(terms);
    model.coefficients = cholesky_solve(chol, std::move(xty));
    for (double c : model.coefficients)
        if (!std::isfinite(c)) throw_data("fit_ols: non-finite coefficient");
    return model;
}

// Evaluates the predictor on a batch of rows (dataset column order).
inline std::vector<double> predict(const Predictor& pred, const Matrix& rows,
                                   const std::vector<FeatureMeta>& metas = {}) {
    std::vector<double> out;
    if (const auto* lm = std::get_if<LinearModel>(&pred.impl)) {
        for (const auto& term : lm->terms)
            for (const auto& f : term.factors)
                if (f.feature < 0 || static_cast<std::size_t>(f.feature) >= rows.cols())
                    throw_predictor("predict: model term references feature " +
                                    std::to_string(f.feature) + " but rows have " +
                                    std::to_string(rows.cols()) + " columns");
        out.resize(rows.rows());
        for (std::size_t i = 0; i < rows.rows(); ++i) out[i] = lm->eval(rows.row(i));
    } else if (const auto* tp = std::get_if<TruthPredictor>(&pred.impl)) {
        if (rows.cols() < tp->min_arity)
            throw_predictor("predict: truth function '" + tp->name + "' needs " +
                            std::to_string(tp->min_arity) + " features, rows have " +
                            std::to_string(rows.cols()));
        out.resize(rows.rows());
        for (std::size_t i = 0; i < rows.rows(); ++i)
            out[i] = tp->fn(rows.row(i), tp->params);
    } else if (const auto* es = std::get_if<ExternalSpec>(&pred.impl)) {
        out = predict_external(*es, rows, metas);
    } else {
        out = std::get<CustomFn>(pred.impl)(rows);
        if (out.size() != rows.rows())
            throw_predictor("predict: custom predictor returned wrong count");
    }
    for (std::size_t i = 0; i < out.size(); ++i)
        if (!std::isfinite(out[i]))
            throw_predictor("predict: non-finite prediction for row " +
                            std::to_string(i));
    return out;
}

}  // namespace repid

#endif  // REPID_PREDICTOR_HPP
