#include "zigzag/atomic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/interpolators/makima.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/roots.hpp>

#include "zigzag/error.hpp"
#include "zigzag/lattice.hpp"
#include "zigzag/numerics.hpp"

namespace zz {

struct GroundState::Interp {
    boost::math::interpolators::makima<std::vector<double>> f;
    double rmax;
};

namespace {

constexpr double kBesselJ01 = 2.404825557695773;

struct Tridiag {
    std::vector<double> d, e;  // symmetric: diagonal and first off-diagonal
    std::vector<double> w;     // cell weights, y = sqrt(w) u
    std::vector<double> centers;
    double norm_inf = 0.0;
};

std::vector<double> make_faces(const AtomicWell& well, double lambda, const RadialOptions& opt) {
    const int nin = std::max(8, int(std::lround(opt.inner_cells * opt.refine)));
    const double hin = well.r0 / nin;
    const double R = 8.0 * std::max(1.0, 10.0 / lambda);
    const double q = std::pow(opt.growth, 1.0 / opt.refine);
    const double cap = opt.max_step / opt.refine;
    std::vector<double> f;
    f.reserve(nin + 1 + std::size_t(R / cap) + 1000);
    for (int i = 0; i <= nin; ++i) f.push_back(i * hin);
    f.back() = well.r0;
    double h = hin;
    while (f.back() < R) {
        h = std::min(h * q, cap);
        f.push_back(f.back() + h);
    }
    // Pin the outer face at R; fold a sliver cell into its neighbour.
    if (f.back() - R > 0.5 * h && f.size() > 2) f.pop_back();
    f.back() = R;
    return f;
}

Tridiag build_radial(const AtomicWell& well, double lambda, int m, const RadialOptions& opt) {
    const std::vector<double> f = make_faces(well, lambda, opt);
    const std::size_t n = f.size() - 1;
    Tridiag t;
    t.centers.resize(n);
    t.w.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        t.centers[i] = 0.5 * (f[i] + f[i + 1]);
        t.w[i] = 0.5 * (f[i + 1] * f[i + 1] - f[i] * f[i]);
    }
    // Face transmissibilities r_{i+1/2} / (c_{i+1} - c_i); Dirichlet at the outer face.
    std::vector<double> tr(n);
    for (std::size_t i = 0; i + 1 < n; ++i) tr[i] = f[i + 1] / (t.centers[i + 1] - t.centers[i]);
    tr[n - 1] = f[n] / (f[n] - t.centers[n - 1]);
    t.d.resize(n);
    t.e.resize(n > 0 ? n - 1 : 0);
    const double l2 = lambda * lambda;
    for (std::size_t i = 0; i < n; ++i) {
        const double left = i > 0 ? tr[i - 1] : 0.0;
        const double c = t.centers[i];
        t.d[i] = (left + tr[i]) / t.w[i] + double(m * m) / (c * c) + l2 * well.V(c);
        if (i + 1 < n) t.e[i] = -tr[i] / std::sqrt(t.w[i] * t.w[i + 1]);
    }
    for (std::size_t i = 0; i < n; ++i) {
        double s = std::abs(t.d[i]);
        if (i > 0) s += std::abs(t.e[i - 1]);
        if (i + 1 < n) s += std::abs(t.e[i]);
        t.norm_inf = std::max(t.norm_inf, s);
    }
    return t;
}

// Number of eigenvalues strictly below x (Sturm count via LDL^T pivots).
int sturm_count(const Tridiag& t, double x) {
    int cnt = 0;
    double q = t.d[0] - x;
    const double tiny = std::numeric_limits<double>::min() * 1e4;
    for (std::size_t i = 0;; ++i) {
        if (q == 0.0) q = -tiny;
        if (q < 0) ++cnt;
        if (i + 1 >= t.d.size()) break;
        q = t.d[i + 1] - x - t.e[i] * t.e[i] / q;
    }
    return cnt;
}

double kth_eigenvalue(const Tridiag& t, int k) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = 0; i < t.d.size(); ++i) {
        double r = 0;
        if (i > 0) r += std::abs(t.e[i - 1]);
        if (i + 1 < t.d.size()) r += std::abs(t.e[i]);
        lo = std::min(lo, t.d[i] - r);
        hi = std::max(hi, t.d[i] + r);
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (sturm_count(t, mid) > k) hi = mid;
        else lo = mid;
    }
    return 0.5 * (lo + hi);
}

// Inverse iteration at a converged eigenvalue; returns the unit eigenvector.
std::vector<double> eigenvector(const Tridiag& t, double E) {
    const std::size_t n = t.d.size();
    const double sigma = E - 1e-12 * std::max(1.0, std::abs(E));
    std::vector<double> y(n, 1.0), c(n), piv(n);
    for (int it = 0; it < 4; ++it) {
        // Thomas algorithm on (S - sigma).
        piv[0] = t.d[0] - sigma;
        c[0] = y[0];
        for (std::size_t i = 1; i < n; ++i) {
            const double l = t.e[i - 1] / piv[i - 1];
            piv[i] = t.d[i] - sigma - l * t.e[i - 1];
            c[i] = y[i] - l * c[i - 1];
        }
        y[n - 1] = c[n - 1] / piv[n - 1];
        for (std::size_t i = n - 1; i-- > 0;) y[i] = (c[i] - t.e[i] * y[i + 1]) / piv[i];
        double nrm = 0;
        for (double v : y) nrm += v * v;
        nrm = std::sqrt(nrm);
        for (double& v : y) v /= nrm;
    }
    return y;
}

double eigen_residual(const Tridiag& t, const std::vector<double>& y, double E) {
    const std::size_t n = y.size();
    double r2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double s = (t.d[i] - E) * y[i];
        if (i > 0) s += t.e[i - 1] * y[i - 1];
        if (i + 1 < n) s += t.e[i] * y[i + 1];
        r2 += s * s;
    }
    return std::sqrt(r2) / t.norm_inf;
}

// Composite Gauss-Legendre in r times trapezoid in theta over the disc |y| < r0.
template <class F>
double disc_quadrature(double r0, int panels, int ntheta, F&& f) {
    double total = 0.0;
    const double dth = kTwoPi / ntheta;
    for (int p = 0; p < panels; ++p) {
        const double a = r0 * p / panels, b = r0 * (p + 1) / panels;
        total += boost::math::quadrature::gauss<double, 20>::integrate(
            [&](double r) {
                double s = 0.0;
                for (int j = 0; j < ntheta; ++j) {
                    const double th = j * dth;
                    s += f(r * std::cos(th), r * std::sin(th));
                }
                return s * dth * r;
            },
            a, b);
    }
    return total;
}

struct OverlapValue {
    double value, error;
};

OverlapValue overlap_at(const GroundState& gs, const AtomicWell& well, const Vec2& a, const Vec2& b) {
    const double l2 = gs.lambda * gs.lambda;
    auto f = [&](double x, double y) {
        const double r = std::hypot(x, y);
        return gs(std::hypot(x - a.x(), y - a.y())) * l2 * std::abs(well.V(r)) *
               gs(std::hypot(x - b.x(), y - b.y()));
    };
    const double coarse = disc_quadrature(well.r0, 8, 128, f);
    const double fine = disc_quadrature(well.r0, 16, 256, f);
    return {fine, std::abs(fine - coarse)};
}

}  // namespace

const char* to_string(WellShape s) { return s == WellShape::Disc ? "disc" : "bump"; }

WellShape parse_well_shape(const std::string& s) {
    if (s == "disc" || s == "DiscWell") return WellShape::Disc;
    if (s == "bump" || s == "SmoothBump") return WellShape::SmoothBump;
    throw Error(ErrorKind::Validation, "unknown well shape '" + s + "'");
}

double AtomicWell::V(double r) const {
    if (r >= r0) return 0.0;
    if (shape == WellShape::Disc) return -1.0;
    return -std::exp(1.0 - r0 * r0 / (r0 * r0 - r * r));
}

AtomicWell make_well(WellShape shape, double r0) {
    const double rmax = 0.33 / std::sqrt(3.0);
    if (!(r0 > 0.0) || !(r0 < rmax))
        throw Error(ErrorKind::Validation, "r0 must lie in (0, 0.33|e|)");
    return {shape, r0};
}

double GroundState::operator()(double rr) const {
    rr = std::abs(rr);
    if (!interp || rr >= interp->rmax) return 0.0;
    return interp->f(rr);
}

GroundState ground_state(const AtomicWell& well, double lambda, const RadialOptions& opt) {
    if (!(lambda > 0.0)) throw Error(ErrorKind::Validation, "lambda must be positive");
    const Tridiag t = build_radial(well, lambda, 0, opt);
    const double E = kth_eigenvalue(t, 0);
    if (!(E < 0.0)) throw Error(ErrorKind::NoBoundState, "no negative radial level");
    std::vector<double> y = eigenvector(t, E);
    GroundState gs;
    gs.lambda = lambda;
    gs.E0 = E;
    gs.residual = eigen_residual(t, y, E);
    gs.r = t.centers;
    gs.w = t.w;
    const std::size_t n = y.size();
    gs.p0.resize(n);
    double sgn = 0;
    for (double v : y) sgn += v;
    double nrm = 0;
    for (std::size_t i = 0; i < n; ++i) {
        gs.p0[i] = (sgn < 0 ? -y[i] : y[i]) / std::sqrt(t.w[i]);
        nrm += kTwoPi * t.w[i] * gs.p0[i] * gs.p0[i];
    }
    for (double& v : gs.p0) v /= std::sqrt(nrm);
    gs.outer_radius = t.centers.back() + (t.centers.back() - t.centers[n - 2]);

    // Mirror the first centre through r = 0 so the interpolant is even.
    std::vector<double> xs, ys;
    xs.reserve(n + 1);
    ys.reserve(n + 1);
    xs.push_back(-gs.r[0]);
    ys.push_back(gs.p0[0]);
    xs.insert(xs.end(), gs.r.begin(), gs.r.end());
    ys.insert(ys.end(), gs.p0.begin(), gs.p0.end());
    auto ip = std::make_shared<GroundState::Interp>(
        GroundState::Interp{boost::math::interpolators::makima<std::vector<double>>(std::move(xs),
                                                                                    std::move(ys)),
                            gs.r.back()});
    gs.interp = ip;

    const double kappa = std::sqrt(-E);
    std::vector<double> fx, fy;
    const double ra = 2.0 * well.r0, rb = std::min(0.5 * gs.r.back(), ra + 8.0 / kappa);
    for (std::size_t i = 0; i < n; ++i)
        if (gs.r[i] >= ra && gs.r[i] <= rb && gs.p0[i] > 0) {
            fx.push_back(gs.r[i]);
            fy.push_back(std::log(gs.p0[i]));
        }
    if (fx.size() >= 2) gs.decay_rate = -fit_line(fx, fy).slope;
    return gs;
}

double radial_eigenvalue(const AtomicWell& well, double lambda, int m, int k,
                         const RadialOptions& opt) {
    return kth_eigenvalue(build_radial(well, lambda, m, opt), k);
}

double spectral_gap(const AtomicWell& well, double lambda, const RadialOptions& opt) {
    const Tridiag t0 = build_radial(well, lambda, 0, opt);
    const double E0 = kth_eigenvalue(t0, 0);
    if (!(E0 < 0.0)) throw Error(ErrorKind::NoBoundState, "no negative radial level");
    const double e1 = kth_eigenvalue(t0, 1);
    const double e1m = radial_eigenvalue(well, lambda, 1, 0, opt);
    return std::min({e1, e1m, 0.0}) - E0;
}

double bessel_ground_energy(double r0, double lambda) {
    const double l2 = lambda * lambda;
    auto f = [&](double E) {
        const double k = std::sqrt(l2 + E), kap = std::sqrt(-E);
        return k * std::cyl_bessel_j(1.0, k * r0) / std::cyl_bessel_j(0.0, k * r0) -
               kap * std::cyl_bessel_k(1.0, kap * r0) / std::cyl_bessel_k(0.0, kap * r0);
    };
    const double lo = -l2 * (1.0 - 1e-14);
    double hi = std::min(-1e-14 * l2, (kBesselJ01 / r0) * (kBesselJ01 / r0) - l2);
    hi -= 1e-12 * l2;
    std::uintmax_t iters = 200;
    auto r = boost::math::tools::toms748_solve(f, lo, hi, boost::math::tools::eps_tolerance<double>(52),
                                               iters);
    return 0.5 * (r.first + r.second);
}

HoppingCoefficient hopping_rho(const GroundState& gs, const AtomicWell& well) {
    const LatticeFrame fr = make_frame();
    const OverlapValue v = overlap_at(gs, well, Vec2::Zero(), fr.e);
    return {gs.lambda, v.value, v.error};
}

double overlap_integral(const GroundState& gs, const AtomicWell& well, int sigma,
                        std::array<int, 2> r, int sigma2, std::array<int, 2> r2) {
    const LatticeFrame fr = make_frame();
    const Vec2 a = double(sigma) * fr.e + r[0] * fr.v1 + r[1] * fr.v2;
    const Vec2 b = double(sigma2) * fr.e + r2[0] * fr.v1 + r2[1] * fr.v2;
    return overlap_at(gs, well, a, b).value;
}

}  // namespace zz
