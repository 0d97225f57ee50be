#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "savch/config.hpp"
#include "savch/grid.hpp"
#include "savch/potential.hpp"

namespace savch {

/// Full state of the auxiliary-variable scheme: phase field u, auxiliary
/// scalar r, step index and time.
struct SavState {
    ScalarField u;
    double r = 0.0;
    long n = 0;
    double t = 0.0;
};

/// Per-step diagnostics. energy_identity_residual is the defect of the exact
/// discrete energy balance
///   (1/tau)|du|_{-1}^2 + (eps/2)(|u1|_1^2 - |u0|_1^2 + |du|_1^2)
///     + (1/eps)(r1^2 - r0^2 + (r1-r0)^2) = 0
/// and stays at roundoff when the linear solves are exact.
struct StepReport {
    long n = 0;
    double t = 0.0;
    double energy = 0.0;
    double mass = 0.0;
    double r = 0.0;
    double incr_hm1 = 0.0;
    double denom = 0.0;
    double energy_identity_residual = 0.0;
    double solver_residual = 0.0;
};

/// Pointwise value of the two-circle tanh initial profile.
double two_circle_initial_value(double x, double y, double eps);

/// Samples the two-circle profile at the cell centers.
ScalarField initial_condition(const Grid& g, double eps);

/// r = aux_value(u0), n = 0, t = 0.
SavState init_state(const ScalarField& u0, const PotentialSpec& pot);

/// Modified energy (eps/2)|u|_1^2 + r^2/eps.
double energy(const SavState& s, double eps);

struct StepResult {
    SavState state;
    StepReport report;
};

/// One backward-Euler step of the auxiliary-variable scheme. The implicit
/// system is decoupled by eliminating the scalar first: two constant
/// coefficient shifted-biharmonic solves plus a rank-one (Sherman-Morrison)
/// correction, all exact in the cosine basis.
StepResult sav_step(const SavState& s, double tau, double eps, const PotentialSpec& pot,
                    SolverWorkspace& ws);

/// Oracle stepper: assembles the coupled (nx*ny+1)-dimensional linear system
/// in the unknowns (u^{n+1}, r^{n+1}) and solves it by dense elimination.
/// Same contract as sav_step; intended for cross-checking on small grids
/// (nx*ny <= 4096).
SavState sav_step_dense(const SavState& s, double tau, double eps, const PotentialSpec& pot);

/// Thrown by run_simulation when a per-step physics assertion fails.
struct SimulationError : std::runtime_error {
    enum class Code { energy_identity, mass_drift };
    Code code;
    SimulationError(Code c, const std::string& msg) : std::runtime_error(msg), code(c) {}
};

struct SimulationResult {
    std::vector<StepReport> reports;
    SavState final_state;
};

/// Called at snapshot steps (including step 0 when requested).
using SnapshotSink = std::function<void(long n, double t, const ScalarField& u)>;

/// Runs step_count() steps from the two-circle initial condition, asserting
/// mass conservation and the energy identity at every step.
SimulationResult run_simulation(const RunConfig& cfg, const SnapshotSink& sink = nullptr);

/// Same trajectory from a caller-provided initial field.
SimulationResult run_simulation_from(const RunConfig& cfg, const ScalarField& u0,
                                     const SnapshotSink& sink = nullptr);

/// Per-step diagnostics CSV: n,t,energy,mass,r,incr_hm1,denom,energy_identity_residual.
void write_step_reports_csv(const std::vector<StepReport>& reports, const std::string& path);

}  // namespace savch
