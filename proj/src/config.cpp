#include "savch/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace savch {

long RunConfig::step_count() const { return std::lround(t_end / tau); }

void RunConfig::validate() const {
    if (nx < 2) throw std::invalid_argument("config: nx must be an integer >= 2");
    if (ny < 2) throw std::invalid_argument("config: ny must be an integer >= 2");
    if (!(lx > 0.0)) throw std::invalid_argument("config: lx must be > 0");
    if (!(ly > 0.0)) throw std::invalid_argument("config: ly must be > 0");
    if (!(eps > 0.0)) throw std::invalid_argument("config: eps must be > 0");
    if (!(tau > 0.0)) throw std::invalid_argument("config: tau must be > 0");
    if (!(t_end > 0.0)) throw std::invalid_argument("config: t_end must be > 0");
    if (!(c0 > 0.0)) throw std::invalid_argument("config: c0 must be > 0");
    if (!(M > 1.0)) throw std::invalid_argument("config: M must be > 1");
    if (!(solver_tol > 0.0)) throw std::invalid_argument("config: solver_tol must be > 0");
    if (step_count() < 1) throw std::invalid_argument("config: t_end must cover at least one tau");
    for (double t : snapshot_times)
        if (t < 0.0 || !std::isfinite(t))
            throw std::invalid_argument("config: snapshot_times entries must be finite and >= 0");
}

namespace {

const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys = {
        "nx", "ny", "lx", "ly", "eps", "tau", "t_end", "c0", "M",
        "solver_tol", "snapshot_times", "output_dir", "seed"};
    return keys;
}

size_t edit_distance(const std::string& a, const std::string& b) {
    std::vector<size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (size_t j = 1; j <= b.size(); ++j) {
            const size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

// A key qualifies as a suggestion when it is within edit distance 2 or is a
// prefix of the unknown key (so "epsilon" still points at "eps").
std::string suggest_key(const std::string& unknown) {
    std::string best;
    size_t best_dist = 3;
    for (const std::string& k : known_keys()) {
        const size_t d = edit_distance(unknown, k);
        const bool prefix = unknown.size() > k.size() && unknown.compare(0, k.size(), k) == 0;
        const size_t eff = prefix ? std::min<size_t>(d, 2) : d;
        if (eff < best_dist || (eff == best_dist && !best.empty() && k.size() > best.size())) {
            if (eff <= 2) {
                best = k;
                best_dist = eff;
            }
        }
    }
    return best;
}

std::string strip(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_real(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: cannot parse value '" + value + "' for key '" + key + "'");
    }
}

long parse_int(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        const long v = std::stol(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: cannot parse integer '" + value + "' for key '" + key + "'");
    }
}

}  // namespace

RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);

    RunConfig cfg;
    std::map<std::string, bool> seen;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = strip(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(lineno) + " is not key=value");
        const std::string key = strip(line.substr(0, eq));
        const std::string value = strip(line.substr(eq + 1));
        if (std::find(known_keys().begin(), known_keys().end(), key) == known_keys().end()) {
            std::string msg = "config: unknown key '" + key + "'";
            const std::string hint = suggest_key(key);
            if (!hint.empty()) msg += " (did you mean '" + hint + "'?)";
            throw ConfigError(msg);
        }
        if (seen[key]) throw ConfigError("config: duplicate key '" + key + "'");
        seen[key] = true;

        if (key == "nx") cfg.nx = static_cast<int>(parse_int(key, value));
        else if (key == "ny") cfg.ny = static_cast<int>(parse_int(key, value));
        else if (key == "lx") cfg.lx = parse_real(key, value);
        else if (key == "ly") cfg.ly = parse_real(key, value);
        else if (key == "eps") cfg.eps = parse_real(key, value);
        else if (key == "tau") cfg.tau = parse_real(key, value);
        else if (key == "t_end") cfg.t_end = parse_real(key, value);
        else if (key == "c0") cfg.c0 = parse_real(key, value);
        else if (key == "M") cfg.M = parse_real(key, value);
        else if (key == "solver_tol") cfg.solver_tol = parse_real(key, value);
        else if (key == "output_dir") cfg.output_dir = value;
        else if (key == "seed") cfg.seed = parse_int(key, value);
        else if (key == "snapshot_times") {
            std::istringstream ls(value);
            std::string tok;
            while (std::getline(ls, tok, ',')) {
                tok = strip(tok);
                if (!tok.empty()) cfg.snapshot_times.push_back(parse_real(key, tok));
            }
        }
    }
    for (const char* req : {"nx", "ny", "eps", "tau", "t_end"})
        if (!seen[req]) throw ConfigError(std::string("config: missing required key '") + req + "'");
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

}  // namespace savch
