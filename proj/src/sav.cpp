#include "savch/sav.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "savch/dense_solve.hpp"

namespace savch {

double two_circle_initial_value(double x, double y, double eps) {
    const double a = ((x - 0.65) * (x - 0.65) + (y - 0.5) * (y - 0.5) - 0.1 * 0.1) / eps;
    const double b = ((x - 0.35) * (x - 0.35) + (y - 0.5) * (y - 0.5) - 0.125 * 0.125) / eps;
    return std::tanh(a) * std::tanh(b);
}

ScalarField initial_condition(const Grid& g, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("initial_condition: eps must be > 0");
    return sample(g, [eps](double x, double y) { return two_circle_initial_value(x, y, eps); });
}

SavState init_state(const ScalarField& u0, const PotentialSpec& pot) {
    SavState s;
    s.u = u0;
    s.r = aux_value(pot, u0);
    s.n = 0;
    s.t = 0.0;
    return s;
}

double energy(const SavState& s, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("energy: eps must be > 0");
    const double grad = h1_seminorm(s.u);
    return 0.5 * eps * grad * grad + s.r * s.r / eps;
}

StepResult sav_step(const SavState& s, double tau, double eps, const PotentialSpec& pot,
                    SolverWorkspace& ws) {
    if (!(tau > 0.0) || !(eps > 0.0)) throw std::invalid_argument("sav_step: tau, eps must be > 0");

    const ScalarField g = normalized_slope(pot, s.u);
    // Lap g is analytically mean-free; project so the zero mode carries no
    // roundoff into the mass balance.
    const ScalarField lap_g = project_mean_zero(apply_laplacian(g));

    ScalarField rhs_a = s.u;
    axpy(rhs_a, tau / eps * s.r, lap_g);
    const ScalarField u_a = ws.solve_shifted_biharmonic(rhs_a, tau, eps);
    const ScalarField u_b = ws.solve_shifted_biharmonic(0.5 * tau / eps * lap_g, tau, eps);

    const double denom = 1.0 - inner(g, u_b);
    if (!(denom >= 0.5))
        throw std::logic_error("sav_step: rank-one denominator below 1/2 (operator symmetry bug)");
    const double sigma = inner(g, u_a - s.u) / denom;

    StepResult out;
    out.state.u = u_a;
    axpy(out.state.u, sigma, u_b);
    out.state.r = s.r + 0.5 * sigma;
    out.state.n = s.n + 1;
    out.state.t = s.t + tau;

    const ScalarField du = project_mean_zero(out.state.u - s.u);
    const double incr_hm1 = ws.hm1_norm(du);
    const double grad_new = h1_seminorm(out.state.u);
    const double grad_old = h1_seminorm(s.u);
    const double grad_incr = h1_seminorm(du);
    const double dr = out.state.r - s.r;

    StepReport& rep = out.report;
    rep.n = out.state.n;
    rep.t = out.state.t;
    rep.r = out.state.r;
    rep.mass = mean(out.state.u);
    rep.energy = 0.5 * eps * grad_new * grad_new + out.state.r * out.state.r / eps;
    rep.incr_hm1 = incr_hm1;
    rep.denom = denom;
    rep.energy_identity_residual =
        incr_hm1 * incr_hm1 / tau +
        0.5 * eps * (grad_new * grad_new - grad_old * grad_old + grad_incr * grad_incr) +
        (out.state.r * out.state.r - s.r * s.r + dr * dr) / eps;

    // Linear-system defect of the combined solve, relative to the right side.
    ScalarField resid = out.state.u;
    axpy(resid, tau * eps, apply_laplacian(apply_laplacian(out.state.u)));
    ScalarField full_rhs = s.u;
    axpy(full_rhs, tau / eps * out.state.r, lap_g);
    axpy(resid, -1.0, full_rhs);
    const double rhs_norm = l2_norm(full_rhs);
    rep.solver_residual = l2_norm(resid) / (rhs_norm > 0.0 ? rhs_norm : 1.0);

    return out;
}

SavState sav_step_dense(const SavState& s, double tau, double eps, const PotentialSpec& pot) {
    const Grid& g = s.u.grid;
    const int n = g.cells();
    if (n > 4096) throw std::invalid_argument("sav_step_dense: grid larger than oracle scale");

    const ScalarField slope = normalized_slope(pot, s.u);
    const ScalarField lap_slope = apply_laplacian(slope);

    // Unknown x = (u^{n+1}, r^{n+1}):
    //   u + tau*eps*Lap^2 u - (tau/eps) (Lap g) r = u^n
    //   -(1/2)(g, u) + r = r^n - (1/2)(g, u^n)
    const size_t dim = static_cast<size_t>(n) + 1;
    std::vector<double> mat(dim * dim, 0.0);
    ScalarField unit(g), col(g);
    for (int c = 0; c < n; ++c) {
        unit.values.assign(static_cast<size_t>(n), 0.0);
        unit.values[static_cast<size_t>(c)] = 1.0;
        col = apply_laplacian(apply_laplacian(unit));
        for (int r = 0; r < n; ++r)
            mat[static_cast<size_t>(r) * dim + static_cast<size_t>(c)] =
                tau * eps * col.values[static_cast<size_t>(r)] + (r == c ? 1.0 : 0.0);
    }
    const double w = g.cell_area();
    for (int r = 0; r < n; ++r)
        mat[static_cast<size_t>(r) * dim + dim - 1] =
            -tau / eps * lap_slope.values[static_cast<size_t>(r)];
    for (int c = 0; c < n; ++c)
        mat[(dim - 1) * dim + static_cast<size_t>(c)] = -0.5 * w * slope.values[static_cast<size_t>(c)];
    mat[(dim - 1) * dim + dim - 1] = 1.0;

    std::vector<double> rhs(dim);
    for (int r = 0; r < n; ++r) rhs[static_cast<size_t>(r)] = s.u.values[static_cast<size_t>(r)];
    rhs[dim - 1] = s.r - 0.5 * inner(slope, s.u);

    detail::lu_solve(mat, rhs, dim);

    SavState out;
    out.u = ScalarField(g);
    for (int r = 0; r < n; ++r) out.u.values[static_cast<size_t>(r)] = rhs[static_cast<size_t>(r)];
    out.r = rhs[dim - 1];
    out.n = s.n + 1;
    out.t = s.t + tau;
    return out;
}

SimulationResult run_simulation(const RunConfig& cfg, const SnapshotSink& sink) {
    Grid g(cfg.nx, cfg.ny, cfg.lx, cfg.ly);
    return run_simulation_from(cfg, initial_condition(g, cfg.eps), sink);
}

SimulationResult run_simulation_from(const RunConfig& cfg, const ScalarField& u0,
                                     const SnapshotSink& sink) {
    cfg.validate();
    const PotentialSpec pot = build_truncated_potential(cfg.M, cfg.c0);
    SolverWorkspace ws(u0.grid, cfg.solver_tol);

    const long steps = cfg.step_count();
    std::vector<bool> snap(static_cast<size_t>(steps) + 1, false);
    for (double ts : cfg.snapshot_times) {
        const long k = std::lround(ts / cfg.tau);
        if (k >= 0 && k <= steps) snap[static_cast<size_t>(k)] = true;
    }

    SimulationResult result;
    result.reports.reserve(static_cast<size_t>(steps));
    SavState state = init_state(u0, pot);
    const double mass0 = mean(state.u);
    if (sink && snap[0]) sink(0, 0.0, state.u);

    for (long k = 0; k < steps; ++k) {
        StepResult st = sav_step(state, cfg.tau, cfg.eps, pot, ws);
        const StepReport& rep = st.report;

        if (std::abs(rep.mass - mass0) > 1e-12 * (1.0 + std::abs(mass0))) {
            char buf[256];
            std::snprintf(buf, sizeof buf,
                          "mass drift at step %ld (t=%.6g): mean(u)=%.17g, mean(u0)=%.17g",
                          rep.n, rep.t, rep.mass, mass0);
            throw SimulationError(SimulationError::Code::mass_drift, buf);
        }
        if (std::abs(rep.energy_identity_residual) > 1e-9 * std::max(1.0, std::abs(rep.energy))) {
            char buf[256];
            std::snprintf(buf, sizeof buf,
                          "energy identity violated at step %ld (t=%.6g): residual=%.6g, E=%.17g",
                          rep.n, rep.t, rep.energy_identity_residual, rep.energy);
            throw SimulationError(SimulationError::Code::energy_identity, buf);
        }

        state = std::move(st.state);
        result.reports.push_back(rep);
        if (sink && snap[static_cast<size_t>(k + 1)]) sink(state.n, state.t, state.u);
    }
    result.final_state = std::move(state);
    return result;
}

void write_step_reports_csv(const std::vector<StepReport>& reports, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("write_step_reports_csv: cannot open " + path);
    std::fprintf(f, "n,t,energy,mass,r,incr_hm1,denom,energy_identity_residual\n");
    for (const StepReport& r : reports)
        std::fprintf(f, "%ld,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.n, r.t, r.energy,
                     r.mass, r.r, r.incr_hm1, r.denom, r.energy_identity_residual);
    if (std::fclose(f) != 0)
        throw std::runtime_error("write_step_reports_csv: write failed for " + path);
}

}  // namespace savch
