#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace savch::detail {

/// In-place LU factorization with partial pivoting of a row-major n x n
/// matrix, then forward/back substitution. Throws on a (numerically)
/// singular pivot. Solution overwrites rhs.
inline void lu_solve(std::vector<double>& a, std::vector<double>& rhs, size_t n) {
    if (a.size() != n * n || rhs.size() != n)
        throw std::invalid_argument("lu_solve: dimension mismatch");
    std::vector<size_t> perm(n);
    for (size_t i = 0; i < n; ++i) perm[i] = i;

    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        double best = std::abs(a[perm[col] * n + col]);
        for (size_t r = col + 1; r < n; ++r) {
            const double v = std::abs(a[perm[r] * n + col]);
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (!(best > 0.0)) throw std::runtime_error("lu_solve: singular matrix");
        std::swap(perm[col], perm[piv]);
        const size_t pr = perm[col];
        const double d = a[pr * n + col];
        for (size_t r = col + 1; r < n; ++r) {
            const size_t rr = perm[r];
            const double m = a[rr * n + col] / d;
            a[rr * n + col] = m;
            for (size_t c = col + 1; c < n; ++c) a[rr * n + c] -= m * a[pr * n + c];
            rhs[rr] -= m * rhs[pr];
        }
    }
    std::vector<double> x(n);
    for (size_t ri = n; ri-- > 0;) {
        const size_t rr = perm[ri];
        double s = rhs[rr];
        for (size_t c = ri + 1; c < n; ++c) s -= a[rr * n + c] * x[c];
        x[ri] = s / a[rr * n + ri];
    }
    rhs = std::move(x);
}

}  // namespace savch::detail
