#include "zigzag/tightbinding.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <thread>

#include <Eigen/Eigenvalues>

#include "zigzag/error.hpp"

namespace zz {

namespace {

constexpr double kZetaZero = 1e-12;
constexpr double kBandInflation = 1e-9;

int site_index(Sublattice s, int n) { return 2 * n + (s == Sublattice::B ? 1 : 0); }

// Eigenvector of M for eigenvalue lam; of the two row-derived forms the larger one is used,
// since (z, zeta + lam) vanishes at z = 0.
Spinor eigvec(const Eigen::Matrix2cd& M, cplx lam) {
    Spinor a(M(0, 1), lam - M(0, 0));
    Spinor b(lam - M(1, 1), M(1, 0));
    Spinor v = a.norm() >= b.norm() ? a : b;
    return v / v.norm();
}

CellSequence resolve_at_pi(const CellSequence& f, cplx z, int ncells) {
    if (std::abs(std::abs(z.real()) - 1.0) <= kBandInflation)
        throw Error(ErrorKind::OnEssentialSpectrum, "z lies on the band {-1, +1}");
    if (z == cplx(0.0)) throw Error(ErrorKind::PoleAtZero, "z = 0 is an eigenvalue at kpar = pi");
    CellSequence psi{0, std::vector<Spinor>(ncells, Spinor::Zero())};
    psi.cells[0](0) = -f.at(0)(0) / z;
    const cplx det = z * z - 1.0;
    for (int n = 0; n < ncells; ++n) {
        const cplx fb = f.at(n)(1), fa = f.at(n + 1)(0);
        psi.cells[n](1) = (-z * fb - fa) / det;
        if (n + 1 < ncells) psi.cells[n + 1](0) = (-fb - z * fa) / det;
    }
    return psi;
}

}  // namespace

Spinor CellSequence::at(int n) const {
    const int i = n - first;
    if (i < 0 || i >= int(cells.size())) return Spinor::Zero();
    return cells[i];
}

Closure resolve_closure(Closure c, const SpectralWindow& w) {
    if (c != Closure::Auto) return c;
    return w.has_flat_band() ? Closure::Bearded : Closure::Zigzag;
}

const char* to_string(Closure c) {
    switch (c) {
        case Closure::Auto: return "auto";
        case Closure::Zigzag: return "zigzag";
        case Closure::Bearded: return "bearded";
    }
    return "?";
}

Closure parse_closure(const std::string& s) {
    if (s == "auto") return Closure::Auto;
    if (s == "zigzag") return Closure::Zigzag;
    if (s == "bearded") return Closure::Bearded;
    throw Error(ErrorKind::Validation, "unknown closure '" + s + "'");
}

const char* to_string(Regime r) {
    switch (r) {
        case Regime::InsideGap: return "inside-gap";
        case Regime::AboveBands: return "above-bands";
        case Regime::OnBands: return "on-bands";
    }
    return "?";
}

Eigen::VectorXcd EdgeState::flatten(int dim) const {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
    for (int n = 0; n < int(amplitudes.size()); ++n)
        for (int s = 0; s < 2; ++s)
            if (2 * n + s < dim) v(2 * n + s) = amplitudes[n](s);
    return v;
}

CellSequence apply_bulk_fiber(const CellSequence& psi, const SpectralWindow& w) {
    CellSequence out;
    out.first = psi.first - 1;
    out.cells.assign(psi.cells.size() + 2, Spinor::Zero());
    const cplx zc = std::conj(w.zeta);
    for (int n = out.first; n <= out.last(); ++n) {
        Spinor& o = out.cells[n - out.first];
        o(0) = psi.at(n - 1)(1) + zc * psi.at(n)(1);
        o(1) = psi.at(n + 1)(0) + w.zeta * psi.at(n)(0);
    }
    return out;
}

FiberOperator build_fiber(const SpectralWindow& w, int ncells, Closure closure) {
    if (ncells < 2) throw Error(ErrorKind::Validation, "ncells must be >= 2");
    FiberOperator op;
    op.window = w;
    op.ncells = ncells;
    op.closure = resolve_closure(closure, w);
    const int dim = 2 * ncells - (op.closure == Closure::Bearded ? 1 : 0);
    op.matrix = Eigen::MatrixXcd::Zero(dim, dim);
    auto set = [&](int r, int c, cplx v) {
        if (r < dim && c < dim) {
            op.matrix(r, c) = v;
            op.matrix(c, r) = std::conj(v);
        }
    };
    for (int n = 0; n < ncells; ++n) {
        set(site_index(Sublattice::B, n), site_index(Sublattice::A, n), w.zeta);
        if (n + 1 < ncells) set(site_index(Sublattice::B, n), site_index(Sublattice::A, n + 1), 1.0);
    }
    return op;
}

Spectrum spectrum(const FiberOperator& op) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(op.matrix);
    if (es.info() != Eigen::Success)
        throw Error(ErrorKind::NonConvergence, "dense Hermitian eigensolver failed");
    Spectrum s{es.eigenvalues(), es.eigenvectors(), 0.0};
    const double hn = std::max(1.0, op.matrix.cwiseAbs().rowwise().sum().maxCoeff());
    Eigen::MatrixXcd r = op.matrix * s.vectors - s.vectors * s.values.asDiagonal();
    s.max_residual = r.colwise().norm().maxCoeff();
    if (s.max_residual > 1e-10 * hn)
        throw Error(ErrorKind::NonConvergence, "eigen residual above 1e-10 ||H||");
    return s;
}

EdgeState flat_band_state(const SpectralWindow& w, int ncells) {
    if (!w.has_flat_band())
        throw Error(ErrorKind::NoEdgeState, "|zeta| >= 1, no zero-energy edge state");
    EdgeState st;
    st.window = w;
    const double a0 = std::sqrt(1.0 - std::norm(w.zeta));
    cplx amp = a0;
    double nrm2 = 0.0;
    for (int n = 0; n < ncells; ++n) {
        st.amplitudes.emplace_back(amp, 0.0);
        nrm2 += std::norm(amp);
        amp *= -w.zeta;
    }
    st.norm = std::sqrt(nrm2);
    return st;
}

Regime classify(cplx z, const SpectralWindow& w) {
    const double x = std::abs(z.real());
    if (x < w.dgap) return Regime::InsideGap;
    if (x > w.dmax) return Regime::AboveBands;
    return Regime::OnBands;
}

TransferSystem transfer_system(cplx z, const SpectralWindow& w) {
    if (std::abs(w.zeta) < kZetaZero)
        throw Error(ErrorKind::DegenerateFiber, "transfer matrix undefined at zeta = 0");
    TransferSystem t;
    t.z = z;
    t.window = w;
    const cplx zeta = w.zeta, zc = std::conj(zeta);
    t.M << -zeta, z, -(zeta / zc) * z, (z * z - 1.0) / zc;
    const cplx b = 1.0 + std::norm(zeta) - z * z;
    const cplx disc = std::sqrt(b * b - 4.0 * std::norm(zeta));
    // Branch assignment follows the +/- formulas; the root that suffers cancellation is
    // recovered from lam1 lam2 = zeta / conj(zeta).
    const cplx plus = -b + disc, minus = -b - disc;
    if (std::abs(plus) >= std::abs(minus)) {
        t.lam1 = plus / (2.0 * zc);
        t.lam2 = (zeta / zc) / t.lam1;
    } else {
        t.lam2 = minus / (2.0 * zc);
        t.lam1 = (zeta / zc) / t.lam2;
    }
    t.xi1 = Spinor(z, zeta + t.lam1);
    t.xi2 = Spinor(z, zeta + t.lam2);
    t.regime = classify(z, w);
    return t;
}

namespace {

cplx f_component(const CellSequence& f, int n, int s) { return f.at(n)(s); }

// F_n = (f^B_n, (z f^B_n + f^A_{n+1}) / conj(zeta)).
Spinor forcing(const CellSequence& f, int n, cplx z, cplx zc) {
    const cplx fb = f_component(f, n, 1);
    return Spinor(fb, (z * fb + f_component(f, n + 1, 0)) / zc);
}

}  // namespace

cplx mu_coefficient(const CellSequence& f, cplx z, const SpectralWindow& w) {
    const TransferSystem t = transfer_system(z, w);
    if (t.regime != Regime::InsideGap)
        throw Error(ErrorKind::Validation, "mu formula is stated for the inside-gap regime");
    const cplx zeta = w.zeta, zc = std::conj(zeta);
    Eigen::Matrix2cd V;
    V.col(0) = t.xi1;
    V.col(1) = t.xi2;
    const Eigen::Matrix2cd Vi = V.inverse();
    cplx sum = 0.0;
    const int nmax = std::max(f.last() + 1, 0);
    cplx pw = 1.0 / t.lam2;
    for (int j = 0; j <= nmax; ++j) {
        sum += pw * (Vi * forcing(f, j, z, zc))(1);
        pw /= t.lam2;
    }
    return -(z * t.lam1 / (zeta + t.lam1)) *
           (f_component(f, 0, 0) - ((zeta + t.lam2) / t.lam2) * sum);
}

CellSequence resolve(const CellSequence& f, cplx z, const SpectralWindow& w, int ncells) {
    if (ncells < 1) throw Error(ErrorKind::Validation, "ncells must be >= 1");
    if (f.first < 0 || f.last() >= ncells)
        throw Error(ErrorKind::Validation, "f must be supported on cells 0..ncells-1");
    const double x = std::abs(z.real());
    if (x >= w.dgap - kBandInflation && x <= w.dmax + kBandInflation)
        throw Error(ErrorKind::OnEssentialSpectrum, "|Re z| lies in [dgap, dmax]");
    if (std::abs(w.zeta) < kZetaZero) return resolve_at_pi(f, z, ncells);
    if (w.has_flat_band() && z == cplx(0.0))
        throw Error(ErrorKind::PoleAtZero, "z = 0 is the flat-band eigenvalue");

    const TransferSystem t = transfer_system(z, w);
    const cplx zc = std::conj(w.zeta);
    const bool first_decays = std::abs(t.lam1) < std::abs(t.lam2);
    const cplx ld = first_decays ? t.lam1 : t.lam2;
    const cplx lg = first_decays ? t.lam2 : t.lam1;
    Eigen::Matrix2cd V;
    V.col(0) = eigvec(t.M, ld);
    V.col(1) = eigvec(t.M, lg);
    const Eigen::Matrix2cd Vi = V.inverse();

    std::vector<Spinor> coef(ncells);
    for (int n = 0; n < ncells; ++n) coef[n] = Vi * forcing(f, n, z, zc);

    // Growing component: the unique bounded choice is summed backward from infinity.
    std::vector<cplx> b(ncells + 1, 0.0);
    for (int n = ncells - 1; n >= 0; --n) b[n] = (b[n + 1] - coef[n](1)) / lg;

    // Boundary row -z psi_0^A + conj(zeta) psi_0^B = f_0^A fixes the decaying amplitude.
    auto bc = [&](const Spinor& v) { return -z * v(0) + zc * v(1); };
    const cplx ad = bc(V.col(0));
    if (std::abs(ad) < 1e-300) throw Error(ErrorKind::PoleAtZero, "boundary row is singular");
    cplx a = (f_component(f, 0, 0) - b[0] * bc(V.col(1))) / ad;

    CellSequence psi{0, std::vector<Spinor>(ncells)};
    for (int n = 0; n < ncells; ++n) {
        psi.cells[n] = a * V.col(0) + b[n] * V.col(1);
        a = ld * a + coef[n](0);
    }
    return psi;
}

cplx solvability_defect(const CellSequence& f, const SpectralWindow& w) {
    if (!w.has_flat_band())
        throw Error(ErrorKind::NoEdgeState, "|zeta| >= 1, no zero-energy edge state");
    const double a0 = std::sqrt(1.0 - std::norm(w.zeta));
    cplx acc = 0.0;
    for (int n = std::max(f.first, 0); n <= f.last(); ++n)
        acc += std::conj(a0 * std::pow(-w.zeta, n)) * f.at(n)(0);
    return acc;
}

double left_mass_fraction(const Eigen::VectorXcd& v, int ncells) {
    const int q = (ncells + 3) / 4;
    const int m = std::min<int>(2 * q, int(v.size()));
    const double tot = v.squaredNorm();
    return tot > 0.0 ? v.head(m).squaredNorm() / tot : 0.0;
}

bool is_edge_state(double energy, double left_mass, const SpectralWindow& w) {
    return left_mass >= kEdgeMassThreshold && std::abs(energy) < w.dgap - kBandInflation;
}

std::vector<BandRow> band_sweep(const std::vector<double>& kpars, int ncells, Closure closure) {
    if (kpars.empty()) throw Error(ErrorKind::Validation, "empty kpar grid");
    auto one = [&](double k) {
        const FiberOperator op = build_fiber(spectral_window(k), ncells, closure);
        const Spectrum s = spectrum(op);
        std::vector<BandRow> rows;
        for (int i = 0; i < op.dim(); ++i) {
            const double lm = left_mass_fraction(s.vectors.col(i), ncells);
            rows.push_back({k, i, s.values(i), is_edge_state(s.values(i), lm, op.window), lm});
        }
        return rows;
    };
    const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::vector<BandRow>> parts(kpars.size());
    for (std::size_t lo = 0; lo < kpars.size(); lo += workers) {
        std::vector<std::future<std::vector<BandRow>>> jobs;
        for (std::size_t i = lo; i < std::min(kpars.size(), lo + workers); ++i)
            jobs.push_back(std::async(workers > 1 ? std::launch::async : std::launch::deferred, one,
                                      kpars[i]));
        for (std::size_t i = 0; i < jobs.size(); ++i) parts[lo + i] = jobs[i].get();
    }
    std::vector<BandRow> out;
    for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

}  // namespace zz
