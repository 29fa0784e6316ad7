#include "zigzag/lattice.hpp"

#include <cmath>

#include "zigzag/error.hpp"

namespace zz {

LatticeFrame make_frame() {
    const double s3 = std::sqrt(3.0);
    LatticeFrame f;
    f.v1 = Vec2(s3 / 2.0, 0.5);
    f.v2 = Vec2(0.0, 1.0);
    f.K1 = kTwoPi * Vec2(2.0 / s3, 0.0);
    f.K2 = kTwoPi * Vec2(-1.0 / s3, 1.0);
    f.vA = Vec2(0.0, 0.0);
    // Centroid of the unit cell triangle (0, v1, v2); keeps A-B distance 1/sqrt(3).
    f.vB = (f.v1 + f.v2) / 3.0;
    f.e = f.vB - f.vA;
    return f;
}

SpectralWindow spectral_window(double kpar) {
    SpectralWindow w;
    w.kpar = kpar;
    w.zeta = 1.0 + std::polar(1.0, kpar);
    // |1 + e^{ik}| = 2|cos(k/2)| has no cancellation near k = pi, unlike abs(zeta).
    const double mod = 2.0 * std::abs(std::cos(0.5 * kpar));
    w.dgap = std::abs(1.0 - mod);
    w.dmax = 1.0 + mod;
    return w;
}

Vec2 site_position(const LatticeFrame& frame, const SiteIndex& s) {
    const Vec2& off = s.sub == Sublattice::A ? frame.vA : frame.vB;
    return off + double(s.n1) * frame.v1 + double(s.n2) * frame.v2;
}

std::vector<SiteIndex> enumerate_sharp_sites(const LatticeFrame&, int n1_max, int n2_lo,
                                             int n2_hi) {
    if (n1_max < 0) throw Error(ErrorKind::Validation, "n1_max must be nonnegative");
    std::vector<SiteIndex> out;
    if (n2_lo > n2_hi) return out;
    out.reserve(std::size_t(2) * (n1_max + 1) * (n2_hi - n2_lo + 1));
    for (int n1 = 0; n1 <= n1_max; ++n1)
        for (int n2 = n2_lo; n2 <= n2_hi; ++n2) {
            out.push_back({Sublattice::A, n1, n2});
            out.push_back({Sublattice::B, n1, n2});
        }
    return out;
}

}  // namespace zz
