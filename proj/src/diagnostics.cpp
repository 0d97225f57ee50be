#include "savch/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <map>
#include <stdexcept>
#include <thread>

#include "savch/sav.hpp"

namespace savch {

double order_of_convergence(double d_coarse, double d_fine) {
    if (!(d_coarse > 0.0) || !(d_fine > 0.0))
        throw std::invalid_argument("order_of_convergence: difference norms must be > 0");
    return std::log(d_coarse / d_fine) / std::log(2.0);
}

TruncationResidual truncation_residual(const SpaceTimeFn& u_exact, double t_n, double tau,
                                       double eps, const Grid& g, const PotentialSpec& pot,
                                       SolverWorkspace& ws) {
    if (!(tau > 0.0) || !(eps > 0.0))
        throw std::invalid_argument("truncation_residual: tau, eps must be > 0");
    const double t_n1 = t_n + tau;
    const ScalarField u0 = sample(g, [&](double x, double y) { return u_exact.value(x, y, t_n); });
    const ScalarField u1 = sample(g, [&](double x, double y) { return u_exact.value(x, y, t_n1); });
    if (std::abs(mean(u1) - mean(u0)) > 1e-10)
        throw std::invalid_argument("truncation_residual: spatial mean of u_exact varies in time");

    ScalarField rate = u1 - u0;
    for (double& v : rate.values) v /= tau;
    const ScalarField ut = sample(g, [&](double x, double y) { return u_exact.dt(x, y, t_n1); });
    const ScalarField incr = project_mean_zero(rate - ut);

    TruncationResidual out;
    out.field = -1.0 * ws.inv_neumann_laplacian(incr);
    for (size_t k = 0; k < out.field.values.size(); ++k)
        out.field.values[k] += (pot.dF(u1.values[k]) - pot.dF(u0.values[k])) / eps;
    out.hm1 = ws.hm1_norm(project_mean_zero(out.field));
    return out;
}

double pairwise_diff_hm1(const ScalarField& a, const ScalarField& b, SolverWorkspace& ws) {
    if (!(a.grid == b.grid)) throw std::invalid_argument("pairwise_diff_hm1: grid mismatch");
    if (std::abs(mean(a) - mean(b)) > 1e-10)
        throw std::invalid_argument("pairwise_diff_hm1: field means disagree");
    return ws.hm1_norm(project_mean_zero(a - b));
}

ConvergenceReport convergence_study(const std::function<ScalarField(double tau)>& run_at,
                                    double tau0, int n_halvings, SolverWorkspace& ws) {
    if (n_halvings < 2)
        throw std::invalid_argument("convergence_study: need at least 2 halvings");
    std::vector<double> taus;
    std::vector<ScalarField> finals;
    for (int i = 0; i <= n_halvings; ++i) {
        taus.push_back(tau0 / static_cast<double>(1L << i));
        finals.push_back(run_at(taus.back()));
    }
    ConvergenceReport rep;
    for (int i = 0; i < n_halvings; ++i)
        rep.rows.push_back({taus[static_cast<size_t>(i)],
                            pairwise_diff_hm1(finals[static_cast<size_t>(i)],
                                              finals[static_cast<size_t>(i) + 1], ws)});
    for (int i = 1; i < n_halvings; ++i) {
        const double dc = rep.rows[static_cast<size_t>(i) - 1].diff_hm1;
        const double df = rep.rows[static_cast<size_t>(i)].diff_hm1;
        rep.orders.push_back((dc > 0.0 && df > 0.0)
                                 ? order_of_convergence(dc, df)
                                 : std::numeric_limits<double>::quiet_NaN());
    }
    return rep;
}

namespace {

int fanout_threads() {
    const char* env = std::getenv("SAVCH_THREADS");
    if (!env) return 0;
    const long v = std::strtol(env, nullptr, 10);
    return v > 1 ? static_cast<int>(v) : 0;
}

}  // namespace

ConvergenceReport sav_convergence_study(const RunConfig& cfg, int n_halvings) {
    if (n_halvings < 2)
        throw std::invalid_argument("sav_convergence_study: need at least 2 halvings");
    cfg.validate();
    const Grid g(cfg.nx, cfg.ny, cfg.lx, cfg.ly);
    const int runs = n_halvings + 1;

    std::vector<ScalarField> finals(static_cast<size_t>(runs));
    std::vector<std::exception_ptr> errors(static_cast<size_t>(runs));
    auto member = [&](int i) {
        try {
            RunConfig rc = cfg;
            rc.tau = cfg.tau / static_cast<double>(1L << i);
            rc.snapshot_times.clear();
            finals[static_cast<size_t>(i)] = run_simulation(rc).final_state.u;
        } catch (...) {
            errors[static_cast<size_t>(i)] = std::current_exception();
        }
    };

    const int cap = fanout_threads();
    if (cap > 1) {
        for (int begin = 0; begin < runs; begin += cap) {
            std::vector<std::thread> pool;
            for (int i = begin; i < std::min(begin + cap, runs); ++i)
                pool.emplace_back(member, i);
            for (std::thread& t : pool) t.join();
        }
    } else {
        for (int i = 0; i < runs; ++i) member(i);
    }
    for (const std::exception_ptr& e : errors)
        if (e) std::rethrow_exception(e);

    SolverWorkspace ws(g, cfg.solver_tol);
    ConvergenceReport rep;
    for (int i = 0; i < n_halvings; ++i)
        rep.rows.push_back({cfg.tau / static_cast<double>(1L << i),
                            pairwise_diff_hm1(finals[static_cast<size_t>(i)],
                                              finals[static_cast<size_t>(i) + 1], ws)});
    for (int i = 1; i < n_halvings; ++i) {
        const double dc = rep.rows[static_cast<size_t>(i) - 1].diff_hm1;
        const double df = rep.rows[static_cast<size_t>(i)].diff_hm1;
        rep.orders.push_back((dc > 0.0 && df > 0.0)
                                 ? order_of_convergence(dc, df)
                                 : std::numeric_limits<double>::quiet_NaN());
    }
    return rep;
}

namespace {

struct Segment {
    long edge_a;
    long edge_b;
    std::array<double, 2> pt_a;
    std::array<double, 2> pt_b;
};

// Edge keys over the cell-center lattice: 2*(j*nx+i) for the edge from node
// (i,j) to (i+1,j), 2*(j*nx+i)+1 for the edge to (i,j+1).
long h_edge(int i, int j, int nx) { return 2L * (static_cast<long>(j) * nx + i); }
long v_edge(int i, int j, int nx) { return 2L * (static_cast<long>(j) * nx + i) + 1; }

std::array<double, 2> lerp_point(double xa, double ya, double xb, double yb, double va, double vb) {
    const double t = va / (va - vb);
    return {xa + t * (xb - xa), ya + t * (yb - ya)};
}

}  // namespace

LevelSetPolylines extract_zero_level(const ScalarField& u) {
    const Grid& g = u.grid;
    const int nx = g.nx, ny = g.ny;
    std::vector<Segment> segs;

    for (int j = 0; j + 1 < ny; ++j) {
        for (int i = 0; i + 1 < nx; ++i) {
            const double v00 = u(i, j), v10 = u(i + 1, j);
            const double v11 = u(i + 1, j + 1), v01 = u(i, j + 1);
            const int code = (v00 >= 0.0 ? 1 : 0) | (v10 >= 0.0 ? 2 : 0) | (v11 >= 0.0 ? 4 : 0) |
                             (v01 >= 0.0 ? 8 : 0);
            if (code == 0 || code == 15) continue;

            const double x0 = g.x(i), x1 = g.x(i + 1);
            const double y0 = g.y(j), y1 = g.y(j + 1);
            const long eb = h_edge(i, j, nx), et = h_edge(i, j + 1, nx);
            const long el = v_edge(i, j, nx), er = v_edge(i + 1, j, nx);
            auto bottom = [&] { return lerp_point(x0, y0, x1, y0, v00, v10); };
            auto top = [&] { return lerp_point(x0, y1, x1, y1, v01, v11); };
            auto left = [&] { return lerp_point(x0, y0, x0, y1, v00, v01); };
            auto right = [&] { return lerp_point(x1, y0, x1, y1, v10, v11); };

            auto emit = [&](long ea, std::array<double, 2> pa, long ebk, std::array<double, 2> pb) {
                if (pa[0] == pb[0] && pa[1] == pb[1]) return;  // degenerate corner touch
                segs.push_back({ea, ebk, pa, pb});
            };

            switch (code) {
                case 1: case 14: emit(el, left(), eb, bottom()); break;
                case 2: case 13: emit(eb, bottom(), er, right()); break;
                case 3: case 12: emit(el, left(), er, right()); break;
                case 4: case 11: emit(er, right(), et, top()); break;
                case 6: case 9: emit(eb, bottom(), et, top()); break;
                case 7: case 8: emit(el, left(), et, top()); break;
                case 5: {  // saddle: corners 00 and 11 on one side
                    const bool center_pos = 0.25 * (v00 + v10 + v11 + v01) >= 0.0;
                    if (center_pos) {
                        emit(eb, bottom(), er, right());
                        emit(el, left(), et, top());
                    } else {
                        emit(el, left(), eb, bottom());
                        emit(er, right(), et, top());
                    }
                    break;
                }
                case 10: {  // saddle: corners 10 and 01 on one side
                    const bool center_pos = 0.25 * (v00 + v10 + v11 + v01) >= 0.0;
                    if (center_pos) {
                        emit(el, left(), eb, bottom());
                        emit(er, right(), et, top());
                    } else {
                        emit(eb, bottom(), er, right());
                        emit(el, left(), et, top());
                    }
                    break;
                }
                default: break;
            }
        }
    }

    // Chain segments through shared edges; open chains first, then loops.
    std::map<long, std::vector<size_t>> at_edge;
    for (size_t s = 0; s < segs.size(); ++s) {
        at_edge[segs[s].edge_a].push_back(s);
        at_edge[segs[s].edge_b].push_back(s);
    }
    std::vector<bool> used(segs.size(), false);

    LevelSetPolylines out;
    auto walk = [&](size_t start, long start_edge) {
        LevelSetPolylines::Polyline line;
        size_t s = start;
        long enter = start_edge;
        line.points.push_back(enter == segs[s].edge_a ? segs[s].pt_a : segs[s].pt_b);
        while (true) {
            used[s] = true;
            const long exit = (enter == segs[s].edge_a) ? segs[s].edge_b : segs[s].edge_a;
            const auto pt = (enter == segs[s].edge_a) ? segs[s].pt_b : segs[s].pt_a;
            if (line.points.back() != pt) line.points.push_back(pt);
            size_t next = s;
            for (size_t cand : at_edge[exit])
                if (!used[cand]) { next = cand; break; }
            if (next == s) {
                line.closed = (exit == start_edge) && line.points.size() > 2;
                if (line.closed && line.points.front() == line.points.back())
                    line.points.pop_back();
                break;
            }
            s = next;
            enter = exit;
        }
        if (line.points.size() > 1) out.lines.push_back(std::move(line));
    };

    for (const auto& [edge, ids] : at_edge) {
        if (ids.size() != 1) continue;
        if (!used[ids.front()]) walk(ids.front(), edge);
    }
    for (size_t s = 0; s < segs.size(); ++s)
        if (!used[s]) walk(s, segs[s].edge_a);
    return out;
}

double polyline_length(const LevelSetPolylines::Polyline& p) {
    double len = 0.0;
    for (size_t k = 1; k < p.points.size(); ++k)
        len += std::hypot(p.points[k][0] - p.points[k - 1][0], p.points[k][1] - p.points[k - 1][1]);
    if (p.closed && p.points.size() > 2)
        len += std::hypot(p.points.front()[0] - p.points.back()[0],
                          p.points.front()[1] - p.points.back()[1]);
    return len;
}

void write_convergence_csv(const ConvergenceReport& rep, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("write_convergence_csv: cannot open " + path);
    std::fprintf(f, "tau,diff_hm1,order\n");
    for (size_t i = 0; i < rep.rows.size(); ++i) {
        std::fprintf(f, "%.17g,%.17g,", rep.rows[i].tau, rep.rows[i].diff_hm1);
        if (i > 0 && i - 1 < rep.orders.size()) std::fprintf(f, "%.17g", rep.orders[i - 1]);
        std::fputc('\n', f);
    }
    if (std::fclose(f) != 0)
        throw std::runtime_error("write_convergence_csv: write failed for " + path);
}

void write_levelset_csv(const LevelSetPolylines& ls, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("write_levelset_csv: cannot open " + path);
    std::fprintf(f, "polyline_id,vertex_id,x,y,closed\n");
    for (size_t p = 0; p < ls.lines.size(); ++p)
        for (size_t v = 0; v < ls.lines[p].points.size(); ++v)
            std::fprintf(f, "%zu,%zu,%.17g,%.17g,%d\n", p, v, ls.lines[p].points[v][0],
                         ls.lines[p].points[v][1], ls.lines[p].closed ? 1 : 0);
    if (std::fclose(f) != 0)
        throw std::runtime_error("write_levelset_csv: write failed for " + path);
}

}  // namespace savch
