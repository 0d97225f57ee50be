#pragma once

#include <array>

#include "savch/grid.hpp"

namespace savch {

/// Truncated C^4 double-well potential: the quartic (1/4)(v^2-1)^2 on
/// [-M, M], ninth-order Hermite blends on [M, 2M] and [-2M, -M], and linear
/// growth outside. Immutable after construction; evaluations are pure.
struct PotentialSpec {
    double M = 2.0;
    double c0 = 1.0;
    // Blend polynomials in the midpoint-shifted monomial basis:
    // sum_k coef[k] * (v - center)^k with centers +-1.5*M.
    std::array<double, 10> phi_plus{};
    std::array<double, 10> phi_minus{};
    // Sampled sup bound on |F'|, |F''|, |F'''|.
    double L_bound = 0.0;

    double F(double v) const;    ///< potential value, >= 0
    double dF(double v) const;   ///< F'
    double d2F(double v) const;  ///< F''
    double d3F(double v) const;  ///< F'''
};

/// Solves the two 10x10 Hermite interpolation systems (value and first four
/// derivatives matched to the quartic at +-M; linear-branch value and slope,
/// zero derivatives 2..4 at +-2M) and samples L_bound.
PotentialSpec build_truncated_potential(double M = 2.0, double c0 = 1.0);

/// Integral of F over the domain (mesh quadrature).
double bulk_energy(const PotentialSpec& pot, const ScalarField& u);

/// sqrt(bulk_energy + c0): the value the auxiliary scalar tracks. Always > 0.
double aux_value(const PotentialSpec& pot, const ScalarField& u);

/// Pointwise F'(u) / aux_value(u), the normalized potential slope that the
/// auxiliary-variable scheme treats explicitly.
ScalarField normalized_slope(const PotentialSpec& pot, const ScalarField& u);

/// First directional (Gateaux) derivative of aux_value at v in direction w:
/// (1/2) inner(normalized_slope(v), w).
double aux_dir_derivative(const PotentialSpec& pot, const ScalarField& v, const ScalarField& w);

/// Second directional derivative of aux_value at v in direction w:
/// (1/2) inner(F''(v) w, w)/A - (1/4) inner(F'(v), w)^2 / A^3.
double aux_dir_second_derivative(const PotentialSpec& pot, const ScalarField& v,
                                 const ScalarField& w);

}  // namespace savch
