// Independent reference computations for the test suites: naive summations,
// dense operator assembly with LU elimination, and a cyclic Jacobi
// eigensolver. Nothing here may call back into the transform-based solve
// paths it is used to check.
#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "savch/dense_solve.hpp"
#include "savch/grid.hpp"

namespace oracles {

using savch::Grid;
using savch::ScalarField;

/// deriv-th derivative of sum c_k (v - center)^k, for checking blend
/// polynomials directly from their stored coefficients.
inline double blend_derivative(const std::array<double, 10>& c, double center, double v,
                               int deriv) {
    const double t = v - center;
    double s = 0.0;
    for (int k = 9; k >= deriv; --k) {
        double fac = 1.0;
        for (int m = 0; m < deriv; ++m) fac *= static_cast<double>(k - m);
        s = s * t + fac * c[static_cast<size_t>(k)];
    }
    return s;
}

/// Plain-loop quadrature sum hx*hy*sum(u*v), no compensation.
inline double naive_inner(const ScalarField& u, const ScalarField& v) {
    double s = 0.0;
    for (size_t k = 0; k < u.values.size(); ++k) s += u.values[k] * v.values[k];
    return u.grid.cell_area() * s;
}

/// |grad u|^2 as the explicit sum of squared forward differences over
/// interior edges (reflecting boundaries contribute nothing).
inline double naive_h1_seminorm_sq(const ScalarField& u) {
    const Grid& g = u.grid;
    double s = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i + 1 < g.nx; ++i) {
            const double d = (u(i + 1, j) - u(i, j)) / g.hx;
            s += d * d;
        }
    for (int j = 0; j + 1 < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double d = (u(i, j + 1) - u(i, j)) / g.hy;
            s += d * d;
        }
    return g.cell_area() * s;
}

/// Discrete Laplacian eigenvalue from the closed form, independent of the
/// workspace tables.
inline double mode_eigenvalue(const Grid& g, int j, int k) {
    const double sx = std::sin(0.5 * j * std::numbers::pi / g.nx);
    const double sy = std::sin(0.5 * k * std::numbers::pi / g.ny);
    return 4.0 / (g.hx * g.hx) * sx * sx + 4.0 / (g.hy * g.hy) * sy * sy;
}

/// Raw cosine mode cos(j pi (i+1/2)/nx) cos(k pi (l+1/2)/ny).
inline ScalarField cosine_mode(const Grid& g, int j, int k) {
    ScalarField u(g);
    for (int l = 0; l < g.ny; ++l)
        for (int i = 0; i < g.nx; ++i)
            u(i, l) = std::cos(j * std::numbers::pi * (i + 0.5) / g.nx) *
                      std::cos(k * std::numbers::pi * (l + 0.5) / g.ny);
    return u;
}

inline ScalarField random_field(const Grid& g, unsigned seed, double lo = -1.0, double hi = 1.0) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    ScalarField u(g);
    for (double& v : u.values) v = dist(rng);
    return u;
}

/// Dense solve of (I + tau*eps*Lap^2) x = b by assembling the operator
/// column by column through the stencil and eliminating.
inline ScalarField dense_shifted_biharmonic(const ScalarField& b, double tau, double eps) {
    const Grid& g = b.grid;
    const size_t n = static_cast<size_t>(g.cells());
    std::vector<double> mat(n * n, 0.0);
    ScalarField unit(g);
    for (size_t c = 0; c < n; ++c) {
        unit.values.assign(n, 0.0);
        unit.values[c] = 1.0;
        const ScalarField col = savch::apply_laplacian(savch::apply_laplacian(unit));
        for (size_t r = 0; r < n; ++r)
            mat[r * n + c] = tau * eps * col.values[r] + (r == c ? 1.0 : 0.0);
    }
    std::vector<double> rhs = b.values;
    savch::detail::lu_solve(mat, rhs, n);
    ScalarField x(g);
    x.values = rhs;
    return x;
}

/// Cyclic Jacobi eigensolver for a symmetric matrix (row-major). Eigenvalues
/// land in `values`; eigenvectors (columns) in `vectors` when requested.
inline void jacobi_eigensolve(std::vector<double> a, size_t n, std::vector<double>& values,
                              std::vector<double>* vectors = nullptr) {
    std::vector<double> v;
    if (vectors) {
        v.assign(n * n, 0.0);
        for (size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
    }
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (size_t p = 0; p < n; ++p)
            for (size_t q = p + 1; q < n; ++q) off += a[p * n + q] * a[p * n + q];
        if (off < 1e-26 * (n * n)) break;
        for (size_t p = 0; p < n; ++p) {
            for (size_t q = p + 1; q < n; ++q) {
                const double apq = a[p * n + q];
                if (apq == 0.0) continue;
                const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (size_t k = 0; k < n; ++k) {
                    const double akp = a[k * n + p], akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for (size_t k = 0; k < n; ++k) {
                    const double apk = a[p * n + k], aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                if (vectors)
                    for (size_t k = 0; k < n; ++k) {
                        const double vkp = v[k * n + p], vkq = v[k * n + q];
                        v[k * n + p] = c * vkp - s * vkq;
                        v[k * n + q] = s * vkp + c * vkq;
                    }
            }
        }
    }
    values.resize(n);
    for (size_t i = 0; i < n; ++i) values[i] = a[i * n + i];
    if (vectors) *vectors = std::move(v);
}

/// Smallest eigenvalue of the mean-zero pencil quotient
///   (eps |v|_1^2 + (1/eps)(curvature v, v)) / (v, InvLap v)
/// assembled densely in the normalized cosine-mode basis and reduced to a
/// standard symmetric problem with two Jacobi decompositions.
inline double dense_pencil_min_eigenvalue(const ScalarField& curvature, double eps) {
    const Grid& g = curvature.grid;
    const size_t dim = static_cast<size_t>(g.cells()) - 1;

    std::vector<ScalarField> basis;
    basis.reserve(dim);
    for (int k = 0; k < g.ny; ++k)
        for (int j = 0; j < g.nx; ++j) {
            if (j == 0 && k == 0) continue;
            ScalarField m = cosine_mode(g, j, k);
            const double nrm = savch::l2_norm(m);
            for (double& x : m.values) x /= nrm;
            basis.push_back(std::move(m));
        }

    std::vector<double> amat(dim * dim), gmat(dim * dim);
    std::vector<ScalarField> neg_lap(dim), curv_w(dim);
    for (size_t c = 0; c < dim; ++c) {
        neg_lap[c] = -1.0 * savch::apply_laplacian(basis[c]);
        curv_w[c] = basis[c];
        for (size_t p = 0; p < curv_w[c].values.size(); ++p)
            curv_w[c].values[p] *= curvature.values[p];
    }
    for (size_t r = 0; r < dim; ++r)
        for (size_t c = 0; c < dim; ++c) {
            const double grad = naive_inner(basis[r], neg_lap[c]);
            gmat[r * dim + c] = grad;
            amat[r * dim + c] = eps * grad + naive_inner(basis[r], curv_w[c]) / eps;
        }

    std::vector<double> gvals, gvecs;
    jacobi_eigensolve(gmat, dim, gvals, &gvecs);
    for (double ev : gvals)
        if (!(ev > 0.0)) throw std::runtime_error("dense pencil: gradient form not positive");

    // sqrt(G) = Q sqrt(D) Q^T
    std::vector<double> ghalf(dim * dim, 0.0);
    for (size_t r = 0; r < dim; ++r)
        for (size_t c = 0; c < dim; ++c) {
            double s = 0.0;
            for (size_t k = 0; k < dim; ++k)
                s += gvecs[r * dim + k] * std::sqrt(gvals[k]) * gvecs[c * dim + k];
            ghalf[r * dim + c] = s;
        }

    std::vector<double> tmp(dim * dim, 0.0), smat(dim * dim, 0.0);
    for (size_t r = 0; r < dim; ++r)
        for (size_t c = 0; c < dim; ++c) {
            double s = 0.0;
            for (size_t k = 0; k < dim; ++k) s += amat[r * dim + k] * ghalf[k * dim + c];
            tmp[r * dim + c] = s;
        }
    for (size_t r = 0; r < dim; ++r)
        for (size_t c = 0; c < dim; ++c) {
            double s = 0.0;
            for (size_t k = 0; k < dim; ++k) s += ghalf[r * dim + k] * tmp[k * dim + c];
            smat[r * dim + c] = s;
        }

    std::vector<double> svals;
    jacobi_eigensolve(smat, dim, svals);
    double best = svals[0];
    for (double ev : svals) best = std::min(best, ev);
    return best;
}

}  // namespace oracles
