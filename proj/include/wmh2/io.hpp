#pragma once

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "wmh2/field.hpp"
#include "wmh2/version.hpp"

namespace wmh2 {

// ---- WMH2 field dump ----------------------------------------------------------
// magic "WMH2", u32 version, u32 n, u32 t_samples, f64 L, f64 dt, flags byte
// (bit 0 time_periodic, bit 1 tapered), then complex samples as interleaved
// little-endian f64 in t-major, then x-major order.

inline constexpr std::uint32_t kDumpVersion = 1;

namespace detail {
template <class T> void put(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T> T get(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    return v;
}
} // namespace detail

inline void write_wmh2(const std::string& path, const SpacetimeField& f) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_wmh2: cannot open " + path);
    os.write("WMH2", 4);
    detail::put(os, kDumpVersion);
    detail::put(os, f.grid.n);
    detail::put(os, f.grid.t_samples);
    detail::put(os, f.grid.length);
    detail::put(os, f.grid.dt);
    std::uint8_t flags = (f.grid.time_periodic ? 1 : 0) | (f.tapered ? 2 : 0);
    detail::put(os, flags);
    for (const auto& v : f.data) {
        const double re = v.real(), im = v.imag();
        detail::put(os, re);
        detail::put(os, im);
    }
    if (!os) throw std::runtime_error("write_wmh2: short write to " + path);
}

inline void write_wmh2(const std::string& path, const ScalarField3& f) {
    SpacetimeField tmp(GridSpec(f.grid.n, f.grid.length, 1, f.grid.dt, f.grid.time_periodic));
    tmp.data = f.data;
    write_wmh2(path, tmp);
}

inline SpacetimeField read_wmh2(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("read_wmh2: cannot open " + path);
    char magic[4];
    is.read(magic, 4);
    if (std::memcmp(magic, "WMH2", 4) != 0)
        throw std::runtime_error("read_wmh2: bad magic in " + path);
    const auto version = detail::get<std::uint32_t>(is);
    if (version != kDumpVersion)
        throw std::runtime_error("read_wmh2: unsupported format version " +
                                 std::to_string(version));
    const auto n = detail::get<std::uint32_t>(is);
    const auto t = detail::get<std::uint32_t>(is);
    const auto L = detail::get<double>(is);
    const auto dt = detail::get<double>(is);
    const auto flags = detail::get<std::uint8_t>(is);
    GridSpec g(n, L, t, dt, (flags & 1) != 0);
    SpacetimeField f(g);
    f.tapered = (flags & 2) != 0;
    for (auto& v : f.data) {
        const double re = detail::get<double>(is);
        const double im = detail::get<double>(is);
        v = cplx(re, im);
    }
    if (!is) throw std::runtime_error("read_wmh2: truncated file " + path);
    return f;
}

// ---- formatting ------------------------------------------------------------------

inline std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct CsvWriter {
    std::ofstream os;
    explicit CsvWriter(const std::string& path) : os(path) {
        if (!os) throw std::runtime_error("CsvWriter: cannot open " + path);
    }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) os << ',';
            os << cells[i];
        }
        os << '\n';
    }
};

// ---- run configuration -------------------------------------------------------------
// Flat key = value text with # comments; no nesting.

struct RunConfig {
    std::uint32_t n = 32;
    std::uint32_t t_samples = 32;
    double L = 2.0 * kPi;
    double dt = 0.01;
    double T = 1.0;
    std::uint32_t stride = 8;
    double epsilon = 0.01;
    double bump_radius = 0.5;
    double bump_amp_x = 1.0, bump_amp_y = 0.4, bump_amp_xt = 0.7, bump_amp_yt = 0.3;
    std::uint64_t seed = 1;
    std::uint32_t seeds = 5;
    double c_cfl = 0.5;
    double sigma = 0.1;
    double mu = 0.01;
    std::uint32_t omega_samples = 64;
    std::uint32_t scan_n2 = 64;       // second resolution for stability scans
    std::uint32_t scan_t_samples = 16;
    int scan_k_hi = 3;                // decay-scan grid upper corner
    std::uint32_t scan_seeds = 2;
    int negative_control = 0;         // flips the raising signature in cmd_verify
    std::string out_dir = "out";

    std::vector<std::pair<std::string, std::string>> items() const {
        auto d = [](double v) { return fmt_g17(v); };
        return {
            {"n", std::to_string(n)},
            {"t_samples", std::to_string(t_samples)},
            {"L", d(L)},
            {"dt", d(dt)},
            {"T", d(T)},
            {"stride", std::to_string(stride)},
            {"epsilon", d(epsilon)},
            {"bump_radius", d(bump_radius)},
            {"bump_amp_x", d(bump_amp_x)},
            {"bump_amp_y", d(bump_amp_y)},
            {"bump_amp_xt", d(bump_amp_xt)},
            {"bump_amp_yt", d(bump_amp_yt)},
            {"seed", std::to_string(seed)},
            {"seeds", std::to_string(seeds)},
            {"c_cfl", d(c_cfl)},
            {"sigma", d(sigma)},
            {"mu", d(mu)},
            {"omega_samples", std::to_string(omega_samples)},
            {"scan_n2", std::to_string(scan_n2)},
            {"scan_t_samples", std::to_string(scan_t_samples)},
            {"scan_k_hi", std::to_string(scan_k_hi)},
            {"scan_seeds", std::to_string(scan_seeds)},
            {"negative_control", std::to_string(negative_control)},
            {"out_dir", out_dir},
        };
    }

    std::string serialize() const {
        std::ostringstream os;
        for (auto& [k, v] : items()) os << k << " = " << v << "\n";
        return os.str();
    }
};

namespace detail {
inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}
} // namespace detail

inline RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::map<std::string, std::string> kv;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        kv[detail::trim(line.substr(0, eq))] = detail::trim(line.substr(eq + 1));
    }
    auto take = [&](const char* key, auto& field) {
        auto it = kv.find(key);
        if (it == kv.end()) return;
        using T = std::decay_t<decltype(field)>;
        if constexpr (std::is_same_v<T, std::string>) field = it->second;
        else if constexpr (std::is_floating_point_v<T>) field = std::stod(it->second);
        else field = T(std::stoull(it->second));
        kv.erase(it);
    };
    take("n", cfg.n);
    take("t_samples", cfg.t_samples);
    take("L", cfg.L);
    take("dt", cfg.dt);
    take("T", cfg.T);
    take("stride", cfg.stride);
    take("epsilon", cfg.epsilon);
    take("bump_radius", cfg.bump_radius);
    take("bump_amp_x", cfg.bump_amp_x);
    take("bump_amp_y", cfg.bump_amp_y);
    take("bump_amp_xt", cfg.bump_amp_xt);
    take("bump_amp_yt", cfg.bump_amp_yt);
    take("seed", cfg.seed);
    take("seeds", cfg.seeds);
    take("c_cfl", cfg.c_cfl);
    take("sigma", cfg.sigma);
    take("mu", cfg.mu);
    take("omega_samples", cfg.omega_samples);
    take("scan_n2", cfg.scan_n2);
    take("scan_t_samples", cfg.scan_t_samples);
    take("scan_k_hi", cfg.scan_k_hi);
    take("scan_seeds", cfg.scan_seeds);
    take("negative_control", cfg.negative_control);
    take("out_dir", cfg.out_dir);
    if (!kv.empty())
        throw std::invalid_argument("config: unknown key '" + kv.begin()->first + "'");
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("config: cannot open " + path);
    std::ostringstream os;
    os << is.rdbuf();
    return parse_config_text(os.str());
}

// ---- manifest -------------------------------------------------------------------------

/// Every invocation writes a manifest echoing all resolved values plus the
/// code version and convention identifiers; check lines are appended.
struct Manifest {
    std::string path;

    explicit Manifest(const std::string& out_dir, const RunConfig& cfg,
                      const std::string& command) {
        std::filesystem::create_directories(out_dir);
        path = out_dir + "/manifest.txt";
        std::ofstream os(path, std::ios::app);
        os << "[invocation]\n";
        os << "command = " << command << "\n";
        os << "code_version = " << kVersion << "\n";
        os << "bump = " << kBumpId << "\n";
        os << "signature = " << kSignatureId << "\n";
        os << "zero_mode = " << kZeroModeId << "\n";
        for (auto& [k, v] : cfg.items()) os << k << " = " << v << "\n";
    }

    void check(const std::string& name, bool pass, double value, double threshold) {
        std::ofstream os(path, std::ios::app);
        os << "check " << name << " = " << (pass ? "pass" : "FAIL") << " (value "
           << fmt_g17(value) << ", threshold " << fmt_g17(threshold) << ")\n";
    }

    void note(const std::string& text) {
        std::ofstream os(path, std::ios::app);
        os << text << "\n";
    }
};

} // namespace wmh2
