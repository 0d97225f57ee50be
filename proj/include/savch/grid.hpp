#pragma once

#include <string>
#include <utility>
#include <vector>

namespace savch {

/// Uniform cell-centered rectangular grid on [0,lx] x [0,ly].
/// Cell (i,j) has its center at ((i+1/2)hx, (j+1/2)hy).
struct Grid {
    int nx = 0, ny = 0;
    double lx = 1.0, ly = 1.0;
    double hx = 0.0, hy = 0.0;

    Grid() = default;
    Grid(int nx_, int ny_, double lx_ = 1.0, double ly_ = 1.0);

    double x(int i) const { return (i + 0.5) * hx; }
    double y(int j) const { return (j + 0.5) * hy; }
    int cells() const { return nx * ny; }
    double cell_area() const { return hx * hy; }
    double area() const { return lx * ly; }

    friend bool operator==(const Grid&, const Grid&) = default;
};

/// Scalar nodal values on the cell centers of a Grid, row-major with
/// index j*nx + i (j is the y row, matching the snapshot CSV layout).
struct ScalarField {
    Grid grid;
    std::vector<double> values;

    ScalarField() = default;
    explicit ScalarField(const Grid& g, double fill = 0.0)
        : grid(g), values(static_cast<size_t>(g.cells()), fill) {}

    double& operator()(int i, int j) { return values[static_cast<size_t>(j) * grid.nx + i]; }
    double operator()(int i, int j) const { return values[static_cast<size_t>(j) * grid.nx + i]; }
    int size() const { return static_cast<int>(values.size()); }
};

/// Evaluates fn(x,y) at every cell center.
template <class F>
ScalarField sample(const Grid& g, F&& fn) {
    ScalarField u(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            u(i, j) = fn(g.x(i), g.y(j));
    return u;
}

/// Mesh-weighted L2 inner product hx*hy*sum(u_ij v_ij), compensated summation.
double inner(const ScalarField& u, const ScalarField& v);

double l2_norm(const ScalarField& u);
double max_abs(const ScalarField& u);

/// inner(u, 1) / |Omega|.
double mean(const ScalarField& u);

/// Subtracts the mean.
ScalarField project_mean_zero(const ScalarField& u);

/// Five-point Neumann Laplacian with ghost-cell reflection. Symmetric and
/// negative semidefinite with respect to inner(); constants map to zero.
ScalarField apply_laplacian(const ScalarField& u);

/// sqrt(-inner(u, apply_laplacian(u))). The operator-induced form, so that
/// discrete summation by parts is exact.
double h1_seminorm(const ScalarField& u);

ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator*(double s, const ScalarField& a);
ScalarField& axpy(ScalarField& y, double alpha, const ScalarField& x);  // y += alpha*x

/// Owns the cosine-basis diagonalization of the Neumann Laplacian on one Grid:
/// eigenvalue tables, transform tables and scratch buffers. One workspace per
/// thread of execution; methods mutate scratch and are not const.
///
/// The transforms are evaluated as dense cosine-matrix products, O(n) per
/// output coefficient. Exact solves in the eigenbasis is what makes the
/// discrete energy identity hold to roundoff.
class SolverWorkspace {
public:
    explicit SolverWorkspace(const Grid& g, double tol = 1e-12);

    const Grid& grid() const { return grid_; }
    double tolerance() const { return tol_; }

    /// Eigenvalue of -Laplacian for cosine mode (j,k):
    /// mu_jk = (4/hx^2) sin^2(j pi / (2 nx)) + (4/hy^2) sin^2(k pi / (2 ny)).
    double mu(int j, int k) const { return mu_x_[j] + mu_y_[k]; }
    double min_positive_mu() const;

    /// Forward DCT-II: coef[k*nx+j] = sum_{i,l} u(i,l) cos-basis. Unnormalized.
    void dct2(const ScalarField& u, std::vector<double>& coef);
    /// Inverse of dct2 (includes the 1/n, 2/n orthogonality weights).
    ScalarField idct2(const std::vector<double>& coef);

    /// Solves -Lap x = v for mean-zero v; x returned mean-zero (zero mode pinned).
    /// Precondition: |mean(v)| <= 1e-12 * max|v|.
    ScalarField inv_neumann_laplacian(const ScalarField& v);

    /// sqrt(inner(v, inv_neumann_laplacian(v))), the discrete H^{-1} norm.
    double hm1_norm(const ScalarField& v);

    /// Solves (I + tau*eps*Lap^2) x = b exactly in the cosine basis.
    ScalarField solve_shifted_biharmonic(const ScalarField& b, double tau, double eps);

private:
    Grid grid_;
    double tol_;
    std::vector<double> cos_x_, cos_y_;  // cos_x_[j*nx+i] = cos(j pi (i+1/2) / nx)
    std::vector<double> mu_x_, mu_y_;
    std::vector<double> pass_, coef_;
};

/// Snapshot CSV: first line "nx,ny,lx,ly", then ny rows of nx values
/// (row j = y index), 17 significant digits.
void write_field_csv(const ScalarField& u, const std::string& path);
ScalarField read_field_csv(const std::string& path);

}  // namespace savch
