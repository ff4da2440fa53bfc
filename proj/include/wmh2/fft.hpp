#pragma once

#include <fftw3.h>

#include <array>
#include <map>
#include <mutex>
#include <vector>

#include "wmh2/field.hpp"

namespace wmh2 {
namespace fft {

// Plan cache. FFTW_ESTIMATE|FFTW_UNALIGNED keeps plan selection independent
// of input addresses and timing, so repeated runs are bit-identical.
namespace detail {

struct PlanKey {
    std::array<int, 4> dims;
    int rank;
    int sign;
    bool operator<(const PlanKey& o) const {
        if (rank != o.rank) return rank < o.rank;
        if (sign != o.sign) return sign < o.sign;
        return dims < o.dims;
    }
};

inline fftw_plan get_plan(const PlanKey& key, cplx* buf) {
    static std::map<PlanKey, fftw_plan> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    fftw_plan p = fftw_plan_dft(key.rank, key.dims.data(), reinterpret_cast<fftw_complex*>(buf),
                                reinterpret_cast<fftw_complex*>(buf), key.sign,
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
    cache.emplace(key, p);
    return p;
}

inline void exec(int rank, const std::array<int, 4>& dims, int sign, cplx* buf) {
    fftw_plan p = get_plan({dims, rank, sign}, buf);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(buf),
                     reinterpret_cast<fftw_complex*>(buf));
}

} // namespace detail

/// In-place 3D DFT of one spatial block. FFTW_FORWARD puts the plane wave
/// e^{i xi_m . x} into bin m, unnormalized; inverse divides by n^3.
inline void spatial_forward(const GridSpec& g, cplx* block) {
    detail::exec(3, {int(g.n), int(g.n), int(g.n), 0}, FFTW_FORWARD, block);
}
inline void spatial_inverse(const GridSpec& g, cplx* block) {
    detail::exec(3, {int(g.n), int(g.n), int(g.n), 0}, FFTW_BACKWARD, block);
    const double s = 1.0 / double(g.spatial_size());
    for (std::size_t i = 0; i < g.spatial_size(); ++i) block[i] *= s;
}

inline void forward(ScalarField3& f) { spatial_forward(f.grid, f.data.data()); }
inline void inverse(ScalarField3& f) { spatial_inverse(f.grid, f.data.data()); }

/// Spatial transform of every time slice (symbols depending on xi only).
inline void forward_slices(SpacetimeField& f) {
    for (std::uint32_t t = 0; t < f.grid.t_samples; ++t)
        spatial_forward(f.grid, f.data.data() + std::size_t(t) * f.grid.spatial_size());
}
inline void inverse_slices(SpacetimeField& f) {
    for (std::uint32_t t = 0; t < f.grid.t_samples; ++t)
        spatial_inverse(f.grid, f.data.data() + std::size_t(t) * f.grid.spatial_size());
}

/// Full space-time transform (symbols depending on (tau, xi)).
inline void forward4(SpacetimeField& f) {
    detail::exec(4, {int(f.grid.t_samples), int(f.grid.n), int(f.grid.n), int(f.grid.n)},
                 FFTW_FORWARD, f.data.data());
}
inline void inverse4(SpacetimeField& f) {
    detail::exec(4, {int(f.grid.t_samples), int(f.grid.n), int(f.grid.n), int(f.grid.n)},
                 FFTW_BACKWARD, f.data.data());
    const double s = 1.0 / double(f.grid.total_size());
    for (auto& v : f.data) v *= s;
}

} // namespace fft
} // namespace wmh2
