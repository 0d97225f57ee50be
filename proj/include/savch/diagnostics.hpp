#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "savch/config.hpp"
#include "savch/grid.hpp"
#include "savch/potential.hpp"

namespace savch {

/// log(d_coarse/d_fine)/log 2 for a tau-halving pair of difference norms.
double order_of_convergence(double d_coarse, double d_fine);

/// A manufactured space-time function: pointwise value and exact time
/// derivative.
struct SpaceTimeFn {
    std::function<double(double x, double y, double t)> value;
    std::function<double(double x, double y, double t)> dt;
};

struct TruncationResidual {
    ScalarField field;
    double hm1 = 0.0;
};

/// Backward-Euler truncation defect of the phase-field equation at t_n:
///   R = InvLap[ (u(t_{n+1}) - u(t_n))/tau - du/dt(t_{n+1}) ]
///       + (1/eps) [ F'(u(t_{n+1})) - F'(u(t_n)) ],
/// where InvLap is the (negative-definite) inverse Neumann Laplacian applied
/// to the mean-projected argument. Returns the field and its discrete H^{-1}
/// norm after mean projection. Requires the spatial mean of u to be
/// time-independent.
TruncationResidual truncation_residual(const SpaceTimeFn& u_exact, double t_n, double tau,
                                       double eps, const Grid& g, const PotentialSpec& pot,
                                       SolverWorkspace& ws);

/// hm1_norm of the mean-projected difference of two same-grid fields whose
/// means already agree (to 1e-10).
double pairwise_diff_hm1(const ScalarField& a, const ScalarField& b, SolverWorkspace& ws);

struct ConvergenceRow {
    double tau = 0.0;
    double diff_hm1 = 0.0;
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;  // one per tau, diff vs the tau/2 run
    std::vector<double> orders;        // between consecutive rows; NaN flags a zero diff
};

/// Tau-halving study over a caller-provided runner tau -> final field.
/// Runs at tau0, tau0/2, ..., tau0/2^n_halvings (n_halvings >= 2), all on one
/// shared grid, and differences consecutive final states.
ConvergenceReport convergence_study(const std::function<ScalarField(double tau)>& run_at,
                                    double tau0, int n_halvings, SolverWorkspace& ws);

/// The same study driven by full simulations of cfg; member runs fan out
/// across up to SAVCH_THREADS threads (0 or unset runs sequentially).
ConvergenceReport sav_convergence_study(const RunConfig& cfg, int n_halvings);

/// Polylines of the zero level set, extracted by marching squares over the
/// cell-center lattice with linear edge interpolation. Saddle cells are
/// disambiguated by the sign of the four-corner average.
struct LevelSetPolylines {
    struct Polyline {
        std::vector<std::array<double, 2>> points;
        bool closed = false;
    };
    std::vector<Polyline> lines;
};

LevelSetPolylines extract_zero_level(const ScalarField& u);

double polyline_length(const LevelSetPolylines::Polyline& p);

/// CSV: tau,diff_hm1,order (order empty on the first row).
void write_convergence_csv(const ConvergenceReport& rep, const std::string& path);

/// CSV: polyline_id,vertex_id,x,y,closed.
void write_levelset_csv(const LevelSetPolylines& ls, const std::string& path);

}  // namespace savch
