#pragma once

#include <complex>
#include <vector>

#include <Eigen/Core>

namespace zz {

using cplx = std::complex<double>;
using Vec2 = Eigen::Vector2d;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr double kGapClosingTol = 1e-10;

struct LatticeFrame {
    Vec2 v1, v2;  // period lattice
    Vec2 K1, K2;  // dual lattice, K_l . v_m = 2 pi delta_lm
    Vec2 vA, vB;  // sublattice offsets
    Vec2 e;       // vB - vA, nearest-neighbour bond
};

/// Fixed honeycomb frame with |v1| = |v2| = 1 and |e| = 1/sqrt(3).
LatticeFrame make_frame();

/// Per-fiber scalars. zeta = 1 + exp(i kpar).
struct SpectralWindow {
    double kpar = 0.0;
    cplx zeta{2.0, 0.0};
    double dgap = 1.0;  // | 1 - |zeta| |
    double dmax = 3.0;  // 1 + |zeta|

    /// |zeta| < 1 with a margin, so the gap-closing fibers 2pi/3 and 4pi/3 are excluded
    /// regardless of rounding.
    bool has_flat_band() const { return std::abs(zeta) < 1.0 - kGapClosingTol; }
};

SpectralWindow spectral_window(double kpar);

enum class Sublattice { A, B };

struct SiteIndex {
    Sublattice sub = Sublattice::A;
    int n1 = 0;
    int n2 = 0;
    bool operator==(const SiteIndex&) const = default;
};

Vec2 site_position(const LatticeFrame& frame, const SiteIndex& s);

/// Sites of the half-structure with 0 <= n1 <= n1_max and n2 in [n2_lo, n2_hi].
/// Ordered by n1, then n2, then A before B. An empty window (n2_lo > n2_hi) gives no sites.
std::vector<SiteIndex> enumerate_sharp_sites(const LatticeFrame& frame, int n1_max, int n2_lo,
                                             int n2_hi);

}  // namespace zz
