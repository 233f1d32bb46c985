#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "rnss/csv.hpp"
#include "rnss/domain.hpp"
#include "rnss/errors.hpp"
#include "rnss/matrix.hpp"
#include "rnss/rng.hpp"

namespace rnss {

/// One experiment setup, shared by the CLI flags and the key=value config
/// file. Every party of a networked run must load an identical configuration
/// (the output path is excluded from the hash so parties can write to
/// different files).
struct ExperimentConfig {
    int n = 11;
    int t = 5;
    std::vector<double> points;        // empty: the 0.5 + 0.15k grid
    std::vector<double> sigma2_sweep;  // empty: the 1, 21, ..., 981 grid
    double sigma2_y = 100.0;
    int trials = 100;
    std::int64_t samples = 100000;
    std::uint64_t seed = 1;
    int steps = 50;
    std::string experiment = "kalman";  // what `serve` executes
    std::vector<std::string> listen;    // host:port per party
    std::string out;
    // optional Kalman model overrides, rows separated by ';', entries by ','
    std::string kalman_a, kalman_b, kalman_h, kalman_q, kalman_r;

    DomainPtr domain() const {
        if (!points.empty()) {
            if (static_cast<int>(points.size()) != n)
                throw ConfigError("points list does not match n");
            return make_domain(points, t);
        }
        return reference_domain(n, t);
    }

    std::vector<double> sweep() const {
        if (!sigma2_sweep.empty()) return sigma2_sweep;
        std::vector<double> grid;
        for (int v = 1; v <= 981; v += 20) grid.push_back(v);
        return grid;
    }

    void validate() const {
        if (trials < 1) throw ConfigError("trials must be >= 1");
        if (steps < 1) throw ConfigError("steps must be >= 1");
        if (sigma2_y < 0) throw ConfigError("sigma2_y must be nonnegative");
        (void)domain();
        if (sweep().empty()) throw ConfigError("sweep must be nonempty");
    }
};

namespace confdetail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) out.push_back(trim(item));
    if (!out.empty() && out.back().empty()) out.pop_back();
    return out;
}

inline double parse_double(const std::string& s) {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw ConfigError("bad number '" + s + "'");
    return v;
}

}  // namespace confdetail

/// Matrix literal: rows separated by ';', entries by ','.
inline Matrix parse_matrix(const std::string& spec) {
    const auto rows = confdetail::split(spec, ';');
    if (rows.empty()) throw ConfigError("empty matrix spec");
    const auto first = confdetail::split(rows[0], ',');
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(first.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto cols = confdetail::split(rows[r], ',');
        if (cols.size() != first.size()) throw ConfigError("ragged matrix spec");
        for (std::size_t c = 0; c < cols.size(); ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                confdetail::parse_double(cols[c]);
    }
    return m;
}

/// Comma list ("1,21,41") or "start:stop:count" for a log-spaced grid.
inline std::vector<double> parse_sweep_spec(const std::string& spec) {
    if (spec.empty()) return {};
    if (spec.find(':') != std::string::npos) {
        const auto parts = confdetail::split(spec, ':');
        if (parts.size() != 3) throw ConfigError("sweep spec must be start:stop:count");
        const double start = confdetail::parse_double(parts[0]);
        const double stop = confdetail::parse_double(parts[1]);
        const int count = static_cast<int>(confdetail::parse_double(parts[2]));
        if (start <= 0 || stop <= start || count < 2)
            throw ConfigError("log-spaced sweep needs 0 < start < stop and count >= 2");
        std::vector<double> out;
        for (int i = 0; i < count; ++i)
            out.push_back(std::exp(std::log(start) +
                                   (std::log(stop) - std::log(start)) * i / (count - 1)));
        return out;
    }
    std::vector<double> out;
    for (const auto& part : confdetail::split(spec, ','))
        out.push_back(confdetail::parse_double(part));
    return out;
}

inline std::map<std::string, std::string> parse_config_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = confdetail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("config line without '=': " + line);
        kv[confdetail::trim(line.substr(0, eq))] = confdetail::trim(line.substr(eq + 1));
    }
    return kv;
}

inline ExperimentConfig config_from_map(const std::map<std::string, std::string>& kv) {
    ExperimentConfig c;
    for (const auto& [key, value] : kv) {
        if (key == "n") c.n = static_cast<int>(confdetail::parse_double(value));
        else if (key == "t") c.t = static_cast<int>(confdetail::parse_double(value));
        else if (key == "points") {
            c.points.clear();
            for (const auto& p : confdetail::split(value, ','))
                c.points.push_back(confdetail::parse_double(p));
        } else if (key == "sigma2_y") c.sigma2_y = confdetail::parse_double(value);
        else if (key == "sweep") c.sigma2_sweep = parse_sweep_spec(value);
        else if (key == "trials") c.trials = static_cast<int>(confdetail::parse_double(value));
        else if (key == "samples") c.samples = static_cast<std::int64_t>(confdetail::parse_double(value));
        else if (key == "seed") c.seed = static_cast<std::uint64_t>(std::stoull(value));
        else if (key == "steps") c.steps = static_cast<int>(confdetail::parse_double(value));
        else if (key == "experiment") c.experiment = value;
        else if (key == "listen") c.listen = confdetail::split(value, ',');
        else if (key == "out") c.out = value;
        else if (key == "kalman_a") c.kalman_a = value;
        else if (key == "kalman_b") c.kalman_b = value;
        else if (key == "kalman_h") c.kalman_h = value;
        else if (key == "kalman_q") c.kalman_q = value;
        else if (key == "kalman_r") c.kalman_r = value;
        else throw ConfigError("unknown config key '" + key + "'");
    }
    c.validate();
    return c;
}

inline ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return config_from_map(parse_config_text(buf.str()));
}

/// Canonical form used for the cross-party configuration hash. The output
/// path is deliberately left out.
inline std::string canonical_config_text(const ExperimentConfig& c) {
    std::ostringstream out;
    out << "experiment=" << c.experiment << "\n";
    out << "listen=";
    for (std::size_t i = 0; i < c.listen.size(); ++i)
        out << (i ? "," : "") << c.listen[i];
    out << "\n";
    out << "n=" << c.n << "\n";
    out << "points=";
    const auto pts = c.domain()->points();
    for (std::size_t i = 0; i < pts.size(); ++i)
        out << (i ? "," : "") << format_double(pts[i]);
    out << "\n";
    out << "samples=" << c.samples << "\n";
    out << "seed=" << c.seed << "\n";
    out << "sigma2_y=" << format_double(c.sigma2_y) << "\n";
    out << "steps=" << c.steps << "\n";
    out << "sweep=";
    const auto sw = c.sweep();
    for (std::size_t i = 0; i < sw.size(); ++i) out << (i ? "," : "") << format_double(sw[i]);
    out << "\n";
    out << "t=" << c.t << "\n";
    out << "trials=" << c.trials << "\n";
    out << "kalman_a=" << c.kalman_a << "\n";
    out << "kalman_b=" << c.kalman_b << "\n";
    out << "kalman_h=" << c.kalman_h << "\n";
    out << "kalman_q=" << c.kalman_q << "\n";
    out << "kalman_r=" << c.kalman_r << "\n";
    return out.str();
}

inline std::uint64_t config_hash(const ExperimentConfig& c) {
    const std::string text = canonical_config_text(c);
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace rnss
