#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>

#include "savch/config.hpp"
#include "savch/diagnostics.hpp"
#include "savch/grid.hpp"
#include "savch/potential.hpp"
#include "savch/sav.hpp"
#include "savch/spectral.hpp"

namespace fs = std::filesystem;
using namespace savch;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;
constexpr int kExitEnergyIdentity = 3;
constexpr int kExitMassDrift = 4;

RunConfig load_config(const std::string& path, const std::string& out_override) {
    RunConfig cfg = parse_config(path);
    if (!out_override.empty()) cfg.output_dir = out_override;
    return cfg;
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
    fs::create_directories(cfg.output_dir);
    return (fs::path(cfg.output_dir) / name).string();
}

int cmd_run(const RunConfig& cfg) {
    SimulationResult result = run_simulation(cfg, [&](long n, double, const ScalarField& u) {
        char name[64];
        std::snprintf(name, sizeof name, "snapshot_n%06ld.csv", n);
        write_field_csv(u, out_path(cfg, name));
        std::snprintf(name, sizeof name, "levelset_n%06ld.csv", n);
        write_levelset_csv(extract_zero_level(u), out_path(cfg, name));
    });
    write_step_reports_csv(result.reports, out_path(cfg, "steps.csv"));
    write_field_csv(result.final_state.u, out_path(cfg, "u_final.csv"));
    std::printf("run: %zu steps, final energy %.17g, final r %.17g\n", result.reports.size(),
                result.reports.empty() ? 0.0 : result.reports.back().energy,
                result.final_state.r);
    return kExitOk;
}

int cmd_convergence(const RunConfig& cfg, int halvings) {
    ConvergenceReport rep = sav_convergence_study(cfg, halvings);
    write_convergence_csv(rep, out_path(cfg, "convergence.csv"));
    for (size_t i = 0; i < rep.rows.size(); ++i) {
        std::printf("tau=%.6g  diff_hm1=%.6g", rep.rows[i].tau, rep.rows[i].diff_hm1);
        if (i > 0) std::printf("  order=%.4f", rep.orders[i - 1]);
        std::printf("\n");
    }
    return kExitOk;
}

// Snapshot files produced by `run` are named ..._n<step>.csv; recover the
// sample time from that suffix when present.
double snapshot_time(const std::string& path, double tau) {
    const std::string stem = fs::path(path).stem().string();
    const auto pos = stem.rfind("_n");
    if (pos == std::string::npos) return 0.0;
    char* end = nullptr;
    const long n = std::strtol(stem.c_str() + pos + 2, &end, 10);
    if (end == stem.c_str() + pos + 2 || *end != '\0') return 0.0;
    return static_cast<double>(n) * tau;
}

int cmd_spectral(const RunConfig& cfg, const std::string& snapshot) {
    const ScalarField u = read_field_csv(snapshot);
    const PotentialSpec pot = build_truncated_potential(cfg.M, cfg.c0);
    SolverWorkspace ws(u.grid, cfg.solver_tol);
    const SpectralProbeResult probe = spectral_probe(u, cfg.eps, 1e-10, pot, ws);
    const double t = snapshot_time(snapshot, cfg.tau);

    std::FILE* f = std::fopen(out_path(cfg, "spectral.csv").c_str(), "w");
    if (!f) throw std::runtime_error("cmd_spectral: cannot open output");
    std::fprintf(f, "t,lambda,iterations,residual\n");
    std::fprintf(f, "%.17g,%.17g,%d,%.17g\n", t, probe.lambda, probe.iterations, probe.residual);
    std::fclose(f);
    std::printf("lambda=%.12g  iterations=%d  residual=%.3g\n", probe.lambda, probe.iterations,
                probe.residual);
    return kExitOk;
}

void write_coeff_rows(std::FILE* f, const char* interval, const std::array<double, 10>& shifted,
                      double center) {
    // Convert from the (v - center)^k basis to plain monomials for output.
    std::array<double, 10> plain{};
    for (int k = 0; k < 10; ++k) {
        double binom = 1.0;
        for (int j = k; j >= 0; --j) {
            plain[static_cast<size_t>(j)] +=
                shifted[static_cast<size_t>(k)] * binom * std::pow(-center, k - j);
            binom = binom * j / (k - j + 1.0);
        }
    }
    for (int d = 0; d < 10; ++d)
        std::fprintf(f, "%s,%d,%.17g\n", interval, d, plain[static_cast<size_t>(d)]);
}

int cmd_potential(const RunConfig& cfg) {
    const PotentialSpec pot = build_truncated_potential(cfg.M, cfg.c0);

    std::FILE* f = std::fopen(out_path(cfg, "potential_coeffs.csv").c_str(), "w");
    if (!f) throw std::runtime_error("cmd_potential: cannot open output");
    std::fprintf(f, "interval,degree,coefficient\n");
    write_coeff_rows(f, "plus", pot.phi_plus, 1.5 * pot.M);
    write_coeff_rows(f, "minus", pot.phi_minus, -1.5 * pot.M);
    std::fclose(f);

    f = std::fopen(out_path(cfg, "potential_samples.csv").c_str(), "w");
    if (!f) throw std::runtime_error("cmd_potential: cannot open output");
    std::fprintf(f, "v,F,f,fp,fpp\n");
    const int samples = 600;
    for (int k = 0; k <= samples; ++k) {
        const double v = -3.0 * pot.M + 6.0 * pot.M * k / samples;
        std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g\n", v, pot.F(v), pot.dF(v), pot.d2F(v),
                     pot.d3F(v));
    }
    std::fclose(f);
    std::printf("potential: M=%.17g c0=%.17g L_bound=%.17g\n", pot.M, pot.c0, pot.L_bound);
    return kExitOk;
}

template <class Fn>
int guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const SimulationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return e.code == SimulationError::Code::energy_identity ? kExitEnergyIdentity
                                                                : kExitMassDrift;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitRuntime;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Energy-stable auxiliary-variable solver for the 2D Cahn-Hilliard equation"};
    app.require_subcommand(1);

    std::string config_path, out_dir, snapshot_path;
    int halvings = 3;

    CLI::App* run = app.add_subcommand("run", "time-step one configuration and write diagnostics");
    run->add_option("--config", config_path, "key=value config file")->required();
    run->add_option("--out", out_dir, "output directory (overrides config)");

    CLI::App* conv = app.add_subcommand("convergence", "tau-halving temporal order study");
    conv->add_option("--config", config_path, "key=value config file")->required();
    conv->add_option("--halvings", halvings, "number of tau halvings (>= 2)");
    conv->add_option("--out", out_dir, "output directory (overrides config)");

    CLI::App* spectral_cmd = app.add_subcommand("spectral", "principal-eigenvalue probe of a snapshot");
    spectral_cmd->add_option("--config", config_path, "key=value config file")->required();
    spectral_cmd->add_option("--snapshot", snapshot_path, "snapshot CSV to probe")->required();
    spectral_cmd->add_option("--out", out_dir, "output directory (overrides config)");

    CLI::App* potc = app.add_subcommand("potential", "dump truncated-potential tables");
    potc->add_option("--config", config_path, "key=value config file")->required();
    potc->add_option("--out", out_dir, "output directory (overrides config)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    return guarded([&]() -> int {
        const RunConfig cfg = load_config(config_path, out_dir);
        if (run->parsed()) return cmd_run(cfg);
        if (conv->parsed()) return cmd_convergence(cfg, halvings);
        if (spectral_cmd->parsed()) return cmd_spectral(cfg, snapshot_path);
        if (potc->parsed()) return cmd_potential(cfg);
        return kExitConfig;
    });
}
