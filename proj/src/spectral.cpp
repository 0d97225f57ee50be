#include "savch/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace savch {

namespace {

// min over the nonzero discrete spectrum of (eps*mu + curvature/eps)*mu.
double min_quotient_over_spectrum(const Grid& g, double eps, double curvature) {
    double best = 0.0;
    bool first = true;
    for (int k = 0; k < g.ny; ++k) {
        const double sy = std::sin(0.5 * k * std::numbers::pi / g.ny);
        const double mu_y = 4.0 / (g.hy * g.hy) * sy * sy;
        for (int j = 0; j < g.nx; ++j) {
            if (j == 0 && k == 0) continue;
            const double sx = std::sin(0.5 * j * std::numbers::pi / g.nx);
            const double mu = 4.0 / (g.hx * g.hx) * sx * sx + mu_y;
            const double q = (eps * mu + curvature / eps) * mu;
            if (first || q < best) {
                best = q;
                first = false;
            }
        }
    }
    return best;
}

}  // namespace

double constant_field_lambda(double c, double eps, const Grid& g, const PotentialSpec& pot) {
    if (!(eps > 0.0)) throw std::invalid_argument("constant_field_lambda: eps must be > 0");
    return min_quotient_over_spectrum(g, eps, pot.d2F(c));
}

namespace {

struct PencilOps {
    const ScalarField* curvature;  // F''(u) pointwise
    double eps;
    SolverWorkspace* ws;

    // Form-sense numerator operator restricted to mean-zero fields.
    ScalarField apply_a(const ScalarField& v) const {
        ScalarField av = -eps * apply_laplacian(v);
        for (size_t k = 0; k < av.values.size(); ++k)
            av.values[k] += curvature->values[k] * v.values[k] / eps;
        return project_mean_zero(av);
    }

    // Restriction P B P: CG iterates drift off the subspace at roundoff
    // scale, so the projection is part of the operator.
    ScalarField apply_b(const ScalarField& v) const {
        return ws->inv_neumann_laplacian(project_mean_zero(v));
    }

    ScalarField apply_shifted(const ScalarField& v, double shift) const {
        ScalarField r = apply_a(v);
        axpy(r, -shift, apply_b(v));
        return r;
    }
};

// CG on the shifted pencil operator. Returns false on nonpositive curvature
// (shift not below the smallest eigenvalue), leaving x at the best iterate.
bool cg_shifted(const PencilOps& ops, double shift, const ScalarField& rhs, ScalarField& x,
                double rel_tol, int max_iter) {
    x = ScalarField(rhs.grid);
    ScalarField r = rhs;
    ScalarField p = r;
    double rho = inner(r, r);
    const double stop = rel_tol * rel_tol * rho;
    for (int it = 0; it < max_iter && rho > stop; ++it) {
        const ScalarField kp = ops.apply_shifted(p, shift);
        const double curv = inner(p, kp);
        if (!(curv > 0.0)) return false;
        const double alpha = rho / curv;
        axpy(x, alpha, p);
        axpy(r, -alpha, kp);
        const double rho_new = inner(r, r);
        const double beta = rho_new / rho;
        rho = rho_new;
        ScalarField p_new = r;
        axpy(p_new, beta, p);
        p = std::move(p_new);
    }
    return true;
}

}  // namespace

SpectralProbeResult spectral_probe(const ScalarField& u, double eps, double tol,
                                   const PotentialSpec& pot, SolverWorkspace& ws,
                                   const ScalarField* initial_iterate) {
    if (!(eps > 0.0) || !(tol > 0.0))
        throw std::invalid_argument("spectral_probe: eps and tol must be > 0");
    const Grid& g = u.grid;

    ScalarField curvature(g);
    for (size_t k = 0; k < u.values.size(); ++k) curvature.values[k] = pot.d2F(u.values[k]);
    const PencilOps ops{&curvature, eps, &ws};

    ScalarField v(g);
    if (initial_iterate) {
        v = project_mean_zero(*initial_iterate);
    } else {
        // Deterministic full-spectrum seed: a smooth combination alone can be
        // orthogonal to the minimizing mode, which stalls inverse iteration
        // on a wrong eigenvalue.
        std::minstd_rand lcg(20240817u);
        v = ScalarField(g);
        for (double& x : v.values)
            x = static_cast<double>(lcg()) / static_cast<double>(std::minstd_rand::max()) - 0.5;
        v = project_mean_zero(v);
    }
    if (!(l2_norm(v) > 0.0)) throw std::invalid_argument("spectral_probe: zero initial iterate");
    v = (1.0 / l2_norm(v)) * v;

    // Certified lower bound: the quadratic form is monotone in the curvature,
    // so evaluating the constant-coefficient scan at min F''(u) bounds the
    // quotient from below. A shift kept under this bound makes the shifted
    // pencil positive definite, and inverse iteration can only converge to
    // the smallest eigenvalue.
    double curv_min = curvature.values[0];
    for (double cv : curvature.values) curv_min = std::min(curv_min, cv);
    const double certified = min_quotient_over_spectrum(g, eps, curv_min);
    double shift = certified - 1e-3 * (1.0 + std::abs(certified));
    double safe_shift = shift;

    const int max_outer = 500;
    const int max_inner = 2000;
    double rho = 0.0, res = 0.0;
    double prev_rho = std::numeric_limits<double>::infinity();
    int stable = 0;
    bool refined = false;

    const double inner_tol = std::min(1e-12, ws.tolerance());
    for (int it = 1; it <= max_outer; ++it) {
        const ScalarField bv = ops.apply_b(v);
        ScalarField w(g);
        if (!cg_shifted(ops, shift, bv, w, inner_tol, max_inner)) {
            // Only a refined shift can overshoot; fall back halfway.
            shift = 0.5 * (shift + safe_shift);
            continue;
        }
        const double wn = l2_norm(w);
        if (!(wn > 0.0))
            throw SpectralError("spectral_probe: inverse iteration collapsed", rho, res, v);
        v = (1.0 / wn) * w;

        const ScalarField av = ops.apply_a(v);
        const ScalarField bv2 = ops.apply_b(v);
        rho = inner(v, av) / inner(v, bv2);

        ScalarField eig_res = av;
        axpy(eig_res, -rho, bv2);
        res = l2_norm(eig_res) / std::max(l2_norm(av), std::abs(rho) * l2_norm(bv2));

        if (std::abs(rho - prev_rho) <= tol * std::max(1.0, std::abs(rho)))
            ++stable;
        else
            stable = 0;
        if (stable >= 2 && res <= std::sqrt(tol)) return {rho, it, res, eps};

        // One conservative refinement once the quotient has settled: the
        // iterate is already dominated by the bottom eigenspace, so a shift
        // just under rho stays on the correct side.
        if (!refined && std::abs(rho - prev_rho) <= 1e-3 * (1.0 + std::abs(rho))) {
            safe_shift = shift;
            shift = rho - 0.02 * (1.0 + std::abs(rho));
            refined = true;
        }
        prev_rho = rho;
    }
    throw SpectralError("spectral_probe: no convergence within iteration cap", rho, res, v);
}

}  // namespace savch
