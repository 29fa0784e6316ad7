#include "zigzag/zak.hpp"

#include <cmath>

#include "zigzag/error.hpp"

namespace zz {

namespace {
constexpr double kDiracTol = 1e-12;
constexpr double kMinGap = 1e-6;

cplx loop_point(double kperp, const SpectralWindow& w) { return w.zeta + std::polar(1.0, kperp); }
}  // namespace

Eigen::Matrix2cd bulk_symbol(double kperp, const SpectralWindow& w) {
    const cplx h = loop_point(kperp, w);
    Eigen::Matrix2cd m;
    m << 0.0, std::conj(h), h, 0.0;
    return m;
}

std::pair<double, Spinor> bloch_eigenpair(double kperp, const SpectralWindow& w, Branch b) {
    const cplx h = loop_point(kperp, w);
    const double r = std::abs(h);
    if (r < kDiracTol) throw Error(ErrorKind::DiracDegeneracy, "zeta + exp(i kperp) = 0");
    const double s = b == Branch::Plus ? 1.0 : -1.0;
    Spinor xi(1.0, s * h / r);
    return {s * r, xi / std::sqrt(2.0)};
}

int winding_from_spinors(const std::vector<Spinor>& samples) {
    double total = 0.0;
    const std::size_t n = samples.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Spinor& a = samples[i];
        const Spinor& c = samples[(i + 1) % n];
        const cplx ja = a(1) / a(0), jc = c(1) / c(0);
        total += std::arg(jc * std::conj(ja));
    }
    return int(std::lround(total / kTwoPi));
}

ZakResult zak_phase(const SpectralWindow& w, int npoints) {
    if (npoints < 64) throw Error(ErrorKind::Validation, "npoints must be >= 64");
    if (w.dgap <= kMinGap) throw Error(ErrorKind::NearDiracPoint, "dgap too small for a Zak phase");
    ZakResult r;
    r.kpar = w.kpar;
    double total = 0.0, raw = 0.0;
    const double dk = kTwoPi / npoints;
    for (int i = 0; i < npoints; ++i) {
        const double k = i * dk;
        const cplx h = loop_point(k, w);
        total += std::arg(loop_point(k + dk, w) * std::conj(h));
        // -i conj(j) dj/dk with j = h/|h| equals d(arg h)/dk = Re(e^{ik} / h).
        raw += std::real(std::polar(1.0, k) / h) * dk;
    }
    r.winding = int(std::lround(total / kTwoPi));
    r.phase = kTwoPi * r.winding;
    r.raw_phase = raw;
    return r;
}

}  // namespace zz
