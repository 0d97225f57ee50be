#pragma once

#include <stdexcept>
#include <utility>

#include "savch/grid.hpp"
#include "savch/potential.hpp"

namespace savch {

struct SpectralProbeResult {
    double lambda = 0.0;  ///< converged Rayleigh quotient
    int iterations = 0;
    double residual = 0.0;  ///< relative eigen-residual |Av - lambda Bv| / |Av|-scale
    double eps = 0.0;
};

struct SpectralError : std::runtime_error {
    double best_lambda;
    double residual;
    ScalarField best_iterate;
    SpectralError(const std::string& msg, double lambda_, double residual_, ScalarField iterate)
        : std::runtime_error(msg),
          best_lambda(lambda_),
          residual(residual_),
          best_iterate(std::move(iterate)) {}
};

/// Smallest value of the linearized phase-field Rayleigh quotient
///   R(v) = (eps |v|_1^2 + (1/eps)(F''(u) v, v)) / hm1_norm(v)^2
/// over mean-zero v != 0, computed by shifted inverse iteration on the pencil
/// (A, B) with A v = -eps Lap v + (1/eps) F''(u) v (form sense on the
/// mean-zero subspace) and B the inverse Neumann Laplacian. Inner solves use
/// conjugate gradients with a negative-curvature safeguard that retreats the
/// shift. Iteration cap 500; non-convergence throws SpectralError carrying
/// the best iterate's quotient.
SpectralProbeResult spectral_probe(const ScalarField& u, double eps, double tol,
                                   const PotentialSpec& pot, SolverWorkspace& ws,
                                   const ScalarField* initial_iterate = nullptr);

/// Closed form of the same quotient for a constant field u = c: the minimum
/// of (eps*mu + F''(c)/eps)*mu over the nonzero discrete Laplacian spectrum.
double constant_field_lambda(double c, double eps, const Grid& g, const PotentialSpec& pot);

}  // namespace savch
