#ifndef REPID_LINALG_HPP
#define REPID_LINALG_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#include "repid/common.hpp"

namespace repid {

// Cholesky factorization A = L L^T for symmetric positive-definite A
// (row-major, square). Fails loudly when a pivot is not strictly positive.
inline Matrix cholesky_factor(const Matrix& a, const char* context) {
    const std::size_t n = a.rows();
    Matrix l(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            if (i == j) {
                if (!(s > 0.0) || !std::isfinite(s))
                    throw_data(std::string(context) +
                               ": matrix is not positive definite");
                l(i, i) = std::sqrt(s);
            } else {
                l(i, j) = s / l(j, j);
            }
        }
    }
    return l;
}

// Solves A x = b given the Cholesky factor L of A.
inline std::vector<double> cholesky_solve(const Matrix& l,
                                          std::vector<double> b) {
    const std::size_t n = l.rows();
    // forward substitution L y = b
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * b[k];
        b[i] = s / l(i, i);
    }
    // back substitution L^T x = y
    for (std::size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * b[k];
        b[ii] = s / l(ii, ii);
    }
    return b;
}

}  // namespace repid

#endif  // REPID_LINALG_HPP
