#include "savch/potential.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "savch/dense_solve.hpp"

namespace savch {

namespace {

// Quartic branch and derivatives.
double quartic(double v) {
    const double q = v * v - 1.0;
    return 0.25 * q * q;
}
double quartic_d1(double v) { return v * v * v - v; }
double quartic_d2(double v) { return 3.0 * v * v - 1.0; }
double quartic_d3(double v) { return 6.0 * v; }
double quartic_d4(double) { return 6.0; }

double poly_eval(const std::array<double, 10>& c, double t, int deriv) {
    // Horner on the deriv-th derivative of sum c_k t^k.
    double s = 0.0;
    for (int k = 9; k >= deriv; --k) {
        double fac = 1.0;
        for (int m = 0; m < deriv; ++m) fac *= static_cast<double>(k - m);
        s = s * t + fac * c[static_cast<size_t>(k)];
    }
    return s;
}

// Fills row `row` of the 10x10 system with the deriv-th derivative of the
// shifted monomials (v - center)^k evaluated at v.
void hermite_row(std::vector<double>& a, size_t row, double v, double center, int deriv) {
    const double t = v - center;
    for (int k = 0; k < 10; ++k) {
        double fac = 1.0;
        for (int m = 0; m < deriv; ++m) fac *= static_cast<double>(k - m);
        a[row * 10 + static_cast<size_t>(k)] = (k >= deriv) ? fac * std::pow(t, k - deriv) : 0.0;
    }
}

std::array<double, 10> solve_blend(double a_end, double b_end, double center,
                                   const std::array<double, 5>& at_a,
                                   const std::array<double, 5>& at_b) {
    std::vector<double> mat(100);
    std::vector<double> rhs(10);
    for (int d = 0; d < 5; ++d) {
        hermite_row(mat, static_cast<size_t>(d), a_end, center, d);
        rhs[static_cast<size_t>(d)] = at_a[static_cast<size_t>(d)];
        hermite_row(mat, static_cast<size_t>(5 + d), b_end, center, d);
        rhs[static_cast<size_t>(5 + d)] = at_b[static_cast<size_t>(d)];
    }
    detail::lu_solve(mat, rhs, 10);
    std::array<double, 10> out{};
    std::copy(rhs.begin(), rhs.end(), out.begin());
    return out;
}

}  // namespace

double PotentialSpec::F(double v) const {
    const double M2 = 2.0 * M;
    const double slope = (M2 * M2 - 1.0) * M2;
    const double corner = 0.25 * (M2 * M2 - 1.0) * (M2 * M2 - 1.0);
    if (v > M2) return slope * (v - M2) + corner;
    if (v > M) return poly_eval(phi_plus, v - 1.5 * M, 0);
    if (v >= -M) return quartic(v);
    if (v >= -M2) return poly_eval(phi_minus, v + 1.5 * M, 0);
    return -slope * (v + M2) + corner;
}

double PotentialSpec::dF(double v) const {
    const double M2 = 2.0 * M;
    const double slope = (M2 * M2 - 1.0) * M2;
    if (v >= M2) return slope;
    if (v > M) return poly_eval(phi_plus, v - 1.5 * M, 1);
    if (v >= -M) return quartic_d1(v);
    if (v > -M2) return poly_eval(phi_minus, v + 1.5 * M, 1);
    return -slope;
}

double PotentialSpec::d2F(double v) const {
    const double M2 = 2.0 * M;
    if (v >= M2 || v <= -M2) return 0.0;
    if (v > M) return poly_eval(phi_plus, v - 1.5 * M, 2);
    if (v >= -M) return quartic_d2(v);
    return poly_eval(phi_minus, v + 1.5 * M, 2);
}

double PotentialSpec::d3F(double v) const {
    const double M2 = 2.0 * M;
    if (v >= M2 || v <= -M2) return 0.0;
    if (v > M) return poly_eval(phi_plus, v - 1.5 * M, 3);
    if (v >= -M) return quartic_d3(v);
    return poly_eval(phi_minus, v + 1.5 * M, 3);
}

PotentialSpec build_truncated_potential(double M, double c0) {
    if (!(M > 1.0)) throw std::invalid_argument("build_truncated_potential: M must be > 1");
    if (!(c0 > 0.0)) throw std::invalid_argument("build_truncated_potential: c0 must be > 0");

    PotentialSpec spec;
    spec.M = M;
    spec.c0 = c0;

    const double M2 = 2.0 * M;
    const double slope = (M2 * M2 - 1.0) * M2;
    const double corner = 0.25 * (M2 * M2 - 1.0) * (M2 * M2 - 1.0);

    const std::array<double, 5> at_M{quartic(M), quartic_d1(M), quartic_d2(M), quartic_d3(M),
                                     quartic_d4(M)};
    const std::array<double, 5> at_2M{corner, slope, 0.0, 0.0, 0.0};
    spec.phi_plus = solve_blend(M, M2, 1.5 * M, at_M, at_2M);

    const std::array<double, 5> at_mM{quartic(-M), quartic_d1(-M), quartic_d2(-M), quartic_d3(-M),
                                      quartic_d4(-M)};
    const std::array<double, 5> at_m2M{corner, -slope, 0.0, 0.0, 0.0};
    spec.phi_minus = solve_blend(-M, -M2, -1.5 * M, at_mM, at_m2M);

    // Sampled sup of |F'|, |F''|, |F'''| on [-3M, 3M]; outside, F' is the
    // constant +-slope and the higher derivatives vanish.
    double bound = slope;
    const int samples = 10000;
    for (int k = 0; k <= samples; ++k) {
        const double v = -3.0 * M + 6.0 * M * k / samples;
        bound = std::max({bound, std::abs(spec.dF(v)), std::abs(spec.d2F(v)),
                          std::abs(spec.d3F(v))});
    }
    spec.L_bound = bound;
    return spec;
}

double bulk_energy(const PotentialSpec& pot, const ScalarField& u) {
    double sum = 0.0, comp = 0.0;
    for (double v : u.values) {
        const double term = pot.F(v);
        const double t = sum + term;
        if (std::abs(sum) >= std::abs(term))
            comp += (sum - t) + term;
        else
            comp += (term - t) + sum;
        sum = t;
    }
    return u.grid.cell_area() * (sum + comp);
}

double aux_value(const PotentialSpec& pot, const ScalarField& u) {
    return std::sqrt(bulk_energy(pot, u) + pot.c0);
}

ScalarField normalized_slope(const PotentialSpec& pot, const ScalarField& u) {
    const double a = aux_value(pot, u);
    ScalarField out(u.grid);
    for (size_t k = 0; k < u.values.size(); ++k) out.values[k] = pot.dF(u.values[k]) / a;
    return out;
}

double aux_dir_derivative(const PotentialSpec& pot, const ScalarField& v, const ScalarField& w) {
    return 0.5 * inner(normalized_slope(pot, v), w);
}

double aux_dir_second_derivative(const PotentialSpec& pot, const ScalarField& v,
                                 const ScalarField& w) {
    const double a = aux_value(pot, v);
    ScalarField curv_w(v.grid);
    ScalarField slope(v.grid);
    for (size_t k = 0; k < v.values.size(); ++k) {
        curv_w.values[k] = pot.d2F(v.values[k]) * w.values[k];
        slope.values[k] = pot.dF(v.values[k]);
    }
    const double first = 0.5 * inner(curv_w, w) / a;
    const double proj = inner(slope, w);
    return first - 0.25 * proj * proj / (a * a * a);
}

}  // namespace savch
