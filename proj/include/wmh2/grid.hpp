#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace wmh2 {

inline constexpr double kPi = 3.14159265358979323846;

inline bool is_power_of_two(std::uint32_t v) { return v >= 1 && (v & (v - 1)) == 0; }

/// Discretization of the periodic space-time box. Spatial lattice is
/// {2*pi*m/L : m in [-n/2, n/2)}^3; time lattice (when periodic) is
/// {2*pi*m/(t_samples*dt) : m in [-t/2, t/2)}.
struct GridSpec {
    std::uint32_t n = 32;       // samples per spatial axis, power of two
    double length = 2.0 * kPi;  // box side L
    std::uint32_t t_samples = 1;
    double dt = 1.0;
    bool time_periodic = false; // synthetic trigonometric polynomials in time

    GridSpec() = default;
    GridSpec(std::uint32_t n_, double length_, std::uint32_t t_, double dt_, bool periodic = false)
        : n(n_), length(length_), t_samples(t_), dt(dt_), time_periodic(periodic) {
        validate();
    }

    void validate() const {
        if (n < 8 || !is_power_of_two(n))
            throw std::invalid_argument("GridSpec: n must be a power of two >= 8, got " + std::to_string(n));
        if (!(length > 0.0)) throw std::invalid_argument("GridSpec: length must be > 0");
        if (!(dt > 0.0)) throw std::invalid_argument("GridSpec: dt must be > 0");
        if (t_samples < 1) throw std::invalid_argument("GridSpec: t_samples must be >= 1");
    }

    std::size_t spatial_size() const { return std::size_t(n) * n * n; }
    std::size_t total_size() const { return std::size_t(t_samples) * spatial_size(); }

    double dx() const { return length / n; }
    double cell_volume() const { return dx() * dx() * dx(); }
    double time_window() const { return t_samples * dt; }

    // signed lattice index in [-n/2, n/2)
    static std::int32_t signed_index(std::uint32_t m, std::uint32_t size) {
        return (m < size / 2) ? std::int32_t(m) : std::int32_t(m) - std::int32_t(size);
    }

    double xi(std::uint32_t m) const { return 2.0 * kPi * signed_index(m, n) / length; }
    double tau(std::uint32_t mt) const {
        return 2.0 * kPi * signed_index(mt, t_samples) / time_window();
    }

    bool same_box(const GridSpec& o) const {
        return n == o.n && length == o.length && t_samples == o.t_samples && dt == o.dt;
    }

    // Dyadic band the lattice resolves; [2-log2 n, log2 n - 2] on the
    // canonical L = 2*pi box, shifted with the lattice for other L.
    int band_shift() const { return int(std::lround(std::log2(2.0 * kPi / length))); }
    int k_min() const { return 2 - int(std::log2(double(n))) + band_shift(); }
    int k_max() const { return int(std::log2(double(n))) - 2 + band_shift(); }

    int l_max() const { return int(std::log2(double(n))) / 2; }

    void require_k_in_band(int k, const char* who) const {
        if (k < k_min() || k > k_max())
            throw std::out_of_range(std::string(who) + ": k=" + std::to_string(k) +
                                    " outside resolvable band [" + std::to_string(k_min()) + ", " +
                                    std::to_string(k_max()) + "]");
    }
};

} // namespace wmh2
