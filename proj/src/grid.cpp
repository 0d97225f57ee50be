#include "savch/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace savch {

Grid::Grid(int nx_, int ny_, double lx_, double ly_) : nx(nx_), ny(ny_), lx(lx_), ly(ly_) {
    if (nx < 2 || ny < 2) throw std::invalid_argument("Grid: nx and ny must be >= 2");
    if (!(lx > 0.0) || !(ly > 0.0)) throw std::invalid_argument("Grid: lx and ly must be > 0");
    hx = lx / nx;
    hy = ly / ny;
}

static void require_same_grid(const ScalarField& u, const ScalarField& v, const char* what) {
    if (!(u.grid == v.grid)) throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

double inner(const ScalarField& u, const ScalarField& v) {
    require_same_grid(u, v, "inner");
    // Neumaier compensated summation; the energy identity differences large
    // nearly-equal sums, so the accumulator error matters.
    double sum = 0.0, comp = 0.0;
    const size_t n = u.values.size();
    for (size_t k = 0; k < n; ++k) {
        const double term = u.values[k] * v.values[k];
        const double t = sum + term;
        if (std::abs(sum) >= std::abs(term))
            comp += (sum - t) + term;
        else
            comp += (term - t) + sum;
        sum = t;
    }
    return u.grid.cell_area() * (sum + comp);
}

double l2_norm(const ScalarField& u) { return std::sqrt(std::max(0.0, inner(u, u))); }

double max_abs(const ScalarField& u) {
    double m = 0.0;
    for (double v : u.values) m = std::max(m, std::abs(v));
    return m;
}

double mean(const ScalarField& u) {
    double sum = 0.0, comp = 0.0;
    for (double term : u.values) {
        const double t = sum + term;
        if (std::abs(sum) >= std::abs(term))
            comp += (sum - t) + term;
        else
            comp += (term - t) + sum;
        sum = t;
    }
    return (sum + comp) / u.grid.cells();
}

ScalarField project_mean_zero(const ScalarField& u) {
    const double m = mean(u);
    ScalarField out = u;
    for (double& v : out.values) v -= m;
    return out;
}

ScalarField apply_laplacian(const ScalarField& u) {
    const Grid& g = u.grid;
    ScalarField out(g);
    const double ax = 1.0 / (g.hx * g.hx);
    const double ay = 1.0 / (g.hy * g.hy);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const double c = u(i, j);
            const double w = (i > 0) ? u(i - 1, j) : c;  // ghost = reflection
            const double e = (i < g.nx - 1) ? u(i + 1, j) : c;
            const double s = (j > 0) ? u(i, j - 1) : c;
            const double n = (j < g.ny - 1) ? u(i, j + 1) : c;
            out(i, j) = ax * (w - 2.0 * c + e) + ay * (s - 2.0 * c + n);
        }
    }
    return out;
}

double h1_seminorm(const ScalarField& u) {
    const double r = -inner(u, apply_laplacian(u));
    if (r < 0.0) {
        const double tol = 1e-14 * std::max(1.0, std::abs(r));
        if (r < -tol) throw std::logic_error("h1_seminorm: operator produced a negative form value");
        return 0.0;
    }
    return std::sqrt(r);
}

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a, b, "operator+");
    ScalarField out = a;
    for (size_t k = 0; k < out.values.size(); ++k) out.values[k] += b.values[k];
    return out;
}

ScalarField operator-(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a, b, "operator-");
    ScalarField out = a;
    for (size_t k = 0; k < out.values.size(); ++k) out.values[k] -= b.values[k];
    return out;
}

ScalarField operator*(double s, const ScalarField& a) {
    ScalarField out = a;
    for (double& v : out.values) v *= s;
    return out;
}

ScalarField& axpy(ScalarField& y, double alpha, const ScalarField& x) {
    require_same_grid(y, x, "axpy");
    for (size_t k = 0; k < y.values.size(); ++k) y.values[k] += alpha * x.values[k];
    return y;
}

namespace {

// cos(j*pi*(i+1/2)/n) via exact integer reduction of the angle index mod 4n,
// so symmetric table entries agree bitwise.
std::vector<double> cosine_table(int n) {
    std::vector<double> t(static_cast<size_t>(n) * n);
    const double step = std::numbers::pi / (2.0 * n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const long a = (static_cast<long>(j) * (2 * i + 1)) % (4L * n);
            t[static_cast<size_t>(j) * n + i] = std::cos(step * static_cast<double>(a));
        }
    return t;
}

std::vector<double> laplacian_eigenvalues(int n, double h) {
    std::vector<double> mu(n);
    for (int j = 0; j < n; ++j) {
        const double s = std::sin(0.5 * j * std::numbers::pi / n);
        mu[j] = 4.0 / (h * h) * s * s;
    }
    return mu;
}

}  // namespace

SolverWorkspace::SolverWorkspace(const Grid& g, double tol)
    : grid_(g),
      tol_(tol),
      cos_x_(cosine_table(g.nx)),
      cos_y_(cosine_table(g.ny)),
      mu_x_(laplacian_eigenvalues(g.nx, g.hx)),
      mu_y_(laplacian_eigenvalues(g.ny, g.hy)),
      pass_(static_cast<size_t>(g.cells())),
      coef_(static_cast<size_t>(g.cells())) {
    if (!(tol > 0.0)) throw std::invalid_argument("SolverWorkspace: tol must be > 0");
}

double SolverWorkspace::min_positive_mu() const {
    return std::min(mu_x_[1], mu_y_[1]);
}

void SolverWorkspace::dct2(const ScalarField& u, std::vector<double>& coef) {
    if (!(u.grid == grid_)) throw std::invalid_argument("dct2: grid mismatch");
    const int nx = grid_.nx, ny = grid_.ny;
    coef.resize(static_cast<size_t>(nx) * ny);
    // x pass: pass_[l*nx+j] = sum_i u(i,l) cos_x[j,i]
    for (int l = 0; l < ny; ++l) {
        const double* row = &u.values[static_cast<size_t>(l) * nx];
        for (int j = 0; j < nx; ++j) {
            const double* cj = &cos_x_[static_cast<size_t>(j) * nx];
            double s = 0.0;
            for (int i = 0; i < nx; ++i) s += row[i] * cj[i];
            pass_[static_cast<size_t>(l) * nx + j] = s;
        }
    }
    // y pass: coef[k*nx+j] = sum_l pass_[l*nx+j] cos_y[k,l]
    for (int k = 0; k < ny; ++k) {
        const double* ck = &cos_y_[static_cast<size_t>(k) * ny];
        for (int j = 0; j < nx; ++j) {
            double s = 0.0;
            for (int l = 0; l < ny; ++l) s += pass_[static_cast<size_t>(l) * nx + j] * ck[l];
            coef[static_cast<size_t>(k) * nx + j] = s;
        }
    }
}

ScalarField SolverWorkspace::idct2(const std::vector<double>& coef) {
    const int nx = grid_.nx, ny = grid_.ny;
    if (coef.size() != static_cast<size_t>(nx) * ny)
        throw std::invalid_argument("idct2: coefficient size mismatch");
    // y pass with orthogonality weights: pass_[l*nx+j] = sum_k w_k coef[k*nx+j] cos_y[k,l]
    const double wy0 = 1.0 / ny, wy = 2.0 / ny;
    for (int l = 0; l < ny; ++l) {
        for (int j = 0; j < nx; ++j) {
            double s = 0.0;
            for (int k = 0; k < ny; ++k) {
                const double w = (k == 0) ? wy0 : wy;
                s += w * coef[static_cast<size_t>(k) * nx + j] * cos_y_[static_cast<size_t>(k) * ny + l];
            }
            pass_[static_cast<size_t>(l) * nx + j] = s;
        }
    }
    const double wx0 = 1.0 / nx, wx = 2.0 / nx;
    ScalarField out(grid_);
    for (int l = 0; l < ny; ++l) {
        double* row = &out.values[static_cast<size_t>(l) * nx];
        for (int j = 0; j < nx; ++j) {
            const double w = (j == 0) ? wx0 : wx;
            const double c = w * pass_[static_cast<size_t>(l) * nx + j];
            const double* cj = &cos_x_[static_cast<size_t>(j) * nx];
            for (int i = 0; i < nx; ++i) row[i] += c * cj[i];
        }
    }
    return out;
}

ScalarField SolverWorkspace::inv_neumann_laplacian(const ScalarField& v) {
    if (!(v.grid == grid_)) throw std::invalid_argument("inv_neumann_laplacian: grid mismatch");
    const double m = mean(v);
    if (std::abs(m) > 1e-12 * max_abs(v))
        throw std::invalid_argument("inv_neumann_laplacian: input must be mean-zero");
    dct2(v, coef_);
    const int nx = grid_.nx, ny = grid_.ny;
    coef_[0] = 0.0;  // pin the kernel mode
    for (int k = 0; k < ny; ++k)
        for (int j = 0; j < nx; ++j) {
            if (j == 0 && k == 0) continue;
            coef_[static_cast<size_t>(k) * nx + j] /= mu(j, k);
        }
    return idct2(coef_);
}

double SolverWorkspace::hm1_norm(const ScalarField& v) {
    const ScalarField w = inv_neumann_laplacian(v);
    return std::sqrt(std::max(0.0, inner(v, w)));
}

ScalarField SolverWorkspace::solve_shifted_biharmonic(const ScalarField& b, double tau, double eps) {
    if (!(b.grid == grid_)) throw std::invalid_argument("solve_shifted_biharmonic: grid mismatch");
    if (!(tau > 0.0) || !(eps > 0.0))
        throw std::invalid_argument("solve_shifted_biharmonic: tau and eps must be > 0");
    dct2(b, coef_);
    const int nx = grid_.nx, ny = grid_.ny;
    const double te = tau * eps;
    for (int k = 0; k < ny; ++k)
        for (int j = 0; j < nx; ++j) {
            const double m = mu(j, k);
            coef_[static_cast<size_t>(k) * nx + j] /= 1.0 + te * m * m;
        }
    return idct2(coef_);
}

void write_field_csv(const ScalarField& u, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("write_field_csv: cannot open " + path);
    const Grid& g = u.grid;
    std::fprintf(f, "%d,%d,%.17g,%.17g\n", g.nx, g.ny, g.lx, g.ly);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i)
            std::fprintf(f, i == 0 ? "%.17g" : ",%.17g", u(i, j));
        std::fputc('\n', f);
    }
    if (std::fclose(f) != 0) throw std::runtime_error("write_field_csv: write failed for " + path);
}

ScalarField read_field_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_field_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("read_field_csv: empty file " + path);
    int nx = 0, ny = 0;
    double lx = 0.0, ly = 0.0;
    {
        std::istringstream hs(line);
        std::string tok;
        try {
            if (!std::getline(hs, tok, ',')) throw std::invalid_argument("header");
            nx = std::stoi(tok);
            if (!std::getline(hs, tok, ',')) throw std::invalid_argument("header");
            ny = std::stoi(tok);
            if (!std::getline(hs, tok, ',')) throw std::invalid_argument("header");
            lx = std::stod(tok);
            if (!std::getline(hs, tok, ',')) throw std::invalid_argument("header");
            ly = std::stod(tok);
        } catch (const std::exception&) {
            throw std::runtime_error("read_field_csv: bad header in " + path);
        }
    }
    Grid g(nx, ny, lx, ly);
    ScalarField u(g);
    for (int j = 0; j < ny; ++j) {
        if (!std::getline(in, line))
            throw std::runtime_error("read_field_csv: missing row in " + path);
        std::istringstream rs(line);
        std::string tok;
        for (int i = 0; i < nx; ++i) {
            if (!std::getline(rs, tok, ','))
                throw std::runtime_error("read_field_csv: short row in " + path);
            double v = 0.0;
            try {
                v = std::stod(tok);
            } catch (const std::exception&) {
                throw std::runtime_error("read_field_csv: bad value '" + tok + "' in " + path);
            }
            if (!std::isfinite(v))
                throw std::runtime_error("read_field_csv: non-finite value in " + path);
            u(i, j) = v;
        }
    }
    return u;
}

}  // namespace savch
