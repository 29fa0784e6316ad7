#include "zigzag/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "zigzag/atomic.hpp"
#include "zigzag/continuum.hpp"
#include "zigzag/error.hpp"
#include "zigzag/numerics.hpp"
#include "zigzag/tightbinding.hpp"
#include "zigzag/zak.hpp"

namespace zz {

namespace {

// Pinned tolerances.
constexpr double kC1ZeroTol = 1e-10;
constexpr double kC1VecTol = 1e-8;
constexpr double kC2SetTol = 1e-12;
constexpr double kC3EdgeSlack = 5.0;  // in units of 1/N
constexpr double kC4ProdTol = 1e-12;
constexpr double kC4QuadTol = 1e-10;
constexpr double kC4UnitTol = 1e-10;
constexpr double kC5RelTol = 1e-8;
constexpr double kC5SlopeLo = 0.9, kC5SlopeHi = 1.1;
constexpr double kC7RelTol = 1e-6;
constexpr double kC7GsRatio = -0.1;
constexpr double kC8R2 = 0.999;
constexpr double kC8Exceptional = 1e-3;  // relative; the quadrature accuracy contract of rho
constexpr double kC10Overlap = 0.9;

const double kFlatLo = 2.0 * kPi / 3.0, kFlatHi = 4.0 * kPi / 3.0;

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string seq(const std::vector<double>& v, const char* f = "%.4g") {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(f, v[i]);
    return s + "]";
}

CriterionResult make_result(int id, std::string name) {
    CriterionResult r;
    r.id = id;
    r.name = std::move(name);
    return r;
}

// Distance from the eigenvector direction v to psi, relative to |psi|.
double direction_error(const Eigen::VectorXcd& v, const Eigen::VectorXcd& psi) {
    const cplx c = v.dot(psi) / v.squaredNorm();
    return (psi - c * v).norm() / psi.norm();
}

CriterionResult c1_flat_band() {
    CriterionResult r = make_result(1, "flat-band existence (20 kpar, N=200)");
    r.budget_seconds = 30;
    const int N = 200, K = 20;
    const double a = kFlatLo + 0.05, b = kFlatHi - 0.05;
    bool ok = true;
    double worst_vec = 0, worst_e = 0;
    int bad = 0;
    for (int i = 0; i < K; ++i) {
        const double k = a + (b - a) * i / (K - 1);
        const SpectralWindow w = spectral_window(k);
        const FiberOperator op = build_fiber(w, N);
        const Spectrum s = spectrum(op);
        int flagged_zero = 0, idx = -1;
        for (int j = 0; j < op.dim(); ++j)
            if (std::abs(s.values(j)) <= kC1ZeroTol &&
                left_mass_fraction(s.vectors.col(j), N) >= kEdgeMassThreshold) {
                ++flagged_zero;
                idx = j;
            }
        if (flagged_zero != 1) {
            ok = false;
            ++bad;
            continue;
        }
        worst_e = std::max(worst_e, std::abs(s.values(idx)));
        const double err = direction_error(s.vectors.col(idx), flat_band_state(w, N).flatten(op.dim()));
        worst_vec = std::max(worst_vec, err);
        if (err > kC1VecTol) ok = false;
    }
    r.passed = ok;
    r.metrics = {{"max_abs_E", worst_e}, {"max_vec_rel_err", worst_vec}, {"bad_kpar", double(bad)}};
    r.detail = "max|E|=" + fmt("%.2e", worst_e) + " max vec err=" + fmt("%.2e", worst_vec) +
               " kpar without unique edge zero=" + std::to_string(bad);
    return r;
}

CriterionResult c2_pi() {
    CriterionResult r = make_result(2, "kpar = pi exact spectrum");
    r.budget_seconds = 1;
    bool ok = true;
    double worst = 0;
    std::string zeros;
    for (int N : {3, 50, 200}) {
        const Spectrum s = spectrum(build_fiber(spectral_window(kPi), N));
        int nz = 0;
        for (int j = 0; j < s.values.size(); ++j) {
            const double e = s.values(j);
            const double d = std::min({std::abs(e + 1), std::abs(e), std::abs(e - 1)});
            worst = std::max(worst, d);
            if (std::abs(e) < 0.5) ++nz;
        }
        if (nz != 1) ok = false;
        zeros += (zeros.empty() ? "" : ",") + std::to_string(nz);
    }
    if (worst > kC2SetTol) ok = false;
    r.passed = ok;
    r.metrics = {{"max_dist_to_set", worst}};
    r.detail = "N in {3,50,200}: max dist to {-1,0,1}=" + fmt("%.2e", worst) + " zero counts=" + zeros;
    return r;
}

CriterionResult c3_band_edges() {
    CriterionResult r = make_result(3, "essential-band edges (N=400)");
    r.budget_seconds = 60;
    const int N = 400;
    bool ok = true;
    std::string d;
    for (double k : {0.3, 1.0, 5.0 * kPi / 6.0, 2.6}) {
        const SpectralWindow w = spectral_window(k);
        const FiberOperator op = build_fiber(w, N);
        const Spectrum s = spectrum(op);
        double mn = 1e300, mx = 0;
        for (int j = 0; j < op.dim(); ++j) {
            if (left_mass_fraction(s.vectors.col(j), N) >= kEdgeMassThreshold) continue;
            mn = std::min(mn, std::abs(s.values(j)));
            mx = std::max(mx, std::abs(s.values(j)));
        }
        const double e1 = std::abs(mn - w.dgap), e2 = std::abs(mx - w.dmax);
        if (e1 > kC3EdgeSlack / N || e2 > kC3EdgeSlack / N) ok = false;
        r.metrics["gap_err_" + fmt("%.4f", k)] = e1;
        r.metrics["max_err_" + fmt("%.4f", k)] = e2;
        d += fmt("k=%.3f", k) + ":" + fmt("%.1e", e1) + "/" + fmt("%.1e", e2) + " ";
    }
    r.passed = ok;
    r.detail = d + "(limit " + fmt("%.4f", kC3EdgeSlack / N) + ")";
    return r;
}

CriterionResult c4_transfer() {
    CriterionResult r = make_result(4, "transfer-matrix laws (200 samples)");
    r.budget_seconds = 1;
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double wprod = 0, wquad = 0, wunit = 0;
    int mism = 0, n = 0;
    while (n < 200) {
        const double k = kTwoPi * U(rng);
        const SpectralWindow w = spectral_window(k);
        if (std::abs(w.zeta) < 1e-3) continue;
        const double x = (w.dmax + 1.0) * (2.0 * U(rng) - 1.0);
        const double ax = std::abs(x);
        if (std::abs(ax - w.dgap) < 1e-6 || std::abs(ax - w.dmax) < 1e-6) continue;
        ++n;
        const TransferSystem t = transfer_system(x, w);
        wprod = std::max(wprod, std::abs(std::abs(t.lam1 * t.lam2) - 1.0));
        const cplx zc = std::conj(w.zeta), b = 1.0 + std::norm(w.zeta) - t.z * t.z;
        for (cplx l : {t.lam1, t.lam2}) {
            const double scale = std::abs(zc) * std::norm(l) + std::abs(b * l) + std::abs(w.zeta);
            wquad = std::max(wquad, std::abs(zc * l * l + b * l + w.zeta) / scale);
        }
        const double m1 = std::abs(t.lam1), m2 = std::abs(t.lam2);
        bool match = false;
        switch (t.regime) {
            case Regime::InsideGap: match = m1 < 1.0 && 1.0 < m2; break;
            case Regime::AboveBands: match = m2 < 1.0 && 1.0 < m1; break;
            case Regime::OnBands:
                wunit = std::max({wunit, std::abs(m1 - 1.0), std::abs(m2 - 1.0)});
                match = std::abs(m1 - 1.0) <= kC4UnitTol && std::abs(m2 - 1.0) <= kC4UnitTol;
                break;
        }
        if (!match) ++mism;
    }
    r.passed = wprod <= kC4ProdTol && wquad <= kC4QuadTol && mism == 0;
    r.metrics = {{"max_prod_dev", wprod}, {"max_quad_residual", wquad}, {"regime_mismatches", double(mism)}};
    r.detail = "||l1 l2|-1|<=" + fmt("%.1e", wprod) + " quad res<=" + fmt("%.1e", wquad) +
               " unit dev<=" + fmt("%.1e", wunit) + " regime mismatches=" + std::to_string(mism);
    return r;
}

CellSequence random_f(std::mt19937_64& rng, int ncells) {
    std::normal_distribution<double> nd;
    CellSequence f{0, std::vector<Spinor>(ncells)};
    for (auto& c : f.cells) c = Spinor(cplx(nd(rng), nd(rng)), cplx(nd(rng), nd(rng)));
    return f;
}

CriterionResult c5_resolvent() {
    CriterionResult r = make_result(5, "resolvent oracle and pole (N=100)");
    r.budget_seconds = 10;
    const int N = 100;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double worst = 0;
    int n = 0, tries = 0;
    while (n < 20 && tries < 10000) {
        ++tries;
        const double k = kTwoPi * U(rng);
        const SpectralWindow w = spectral_window(k);
        const bool gap = (n % 2 == 0);
        double x;
        if (gap) {
            if (w.dgap < 0.15) continue;
            x = 0.05 + (w.dgap - 0.1) * U(rng);
        } else {
            x = w.dmax + 0.05 + 2.0 * U(rng);
        }
        if (U(rng) < 0.5) x = -x;
        const cplx z(x, 0.2 * (2.0 * U(rng) - 1.0));
        if (std::abs(w.zeta) > 1e-12) {
            // The truncated matrix only represents the half line while the decaying mode dies
            // out well before the artificial end.
            const TransferSystem t = transfer_system(z, w);
            if (std::min(std::abs(t.lam1), std::abs(t.lam2)) > 0.8) continue;
        }
        // Forcing on the first quarter; comparison on the first half.
        CellSequence f = random_f(rng, N / 4);
        const CellSequence psi = resolve(f, z, w, N);
        const FiberOperator op = build_fiber(w, N);
        Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(op.dim());
        for (int c = 0; c < N / 4; ++c) rhs.segment(2 * c, 2) = f.cells[c];
        Eigen::MatrixXcd A = op.matrix;
        A.diagonal().array() -= z;
        const Eigen::VectorXcd dense = A.partialPivLu().solve(rhs);
        Eigen::VectorXcd tm(N);
        for (int c = 0; c < N / 2; ++c) tm.segment(2 * c, 2) = psi.cells[c];
        const double err = (tm - dense.head(N)).norm() / dense.head(N).norm();
        worst = std::max(worst, err);
        ++n;
    }
    // Pole: (H - z)^{-1} has residue -P at the simple eigenvalue 0, so z psi(z) tends to
    // -<psi_bd, e1> psi_bd. The +sign form is reported alongside for reference.
    const SpectralWindow w = spectral_window(5.0 * kPi / 6.0);
    CellSequence e1{0, {Spinor(1.0, 0.0)}};
    const Eigen::VectorXcd bd = flat_band_state(w, N).flatten(2 * N);
    const Eigen::VectorXcd pole = -solvability_defect(e1, w) * bd;
    std::vector<double> lz, le, errs;
    double plus_sign_err = 0;
    for (double z : {0.1, 0.01, 0.001}) {
        const CellSequence psi = resolve(e1, z, w, N);
        Eigen::VectorXcd v(2 * N);
        for (int c = 0; c < N; ++c) v.segment(2 * c, 2) = z * psi.cells[c];
        const double e = (v - pole).norm() / pole.norm();
        plus_sign_err = (v + pole).norm() / pole.norm();
        errs.push_back(e);
        lz.push_back(std::log(z));
        le.push_back(std::log(e));
    }
    const double slope = fit_line(lz, le).slope;
    r.passed = n == 20 && worst <= kC5RelTol && slope >= kC5SlopeLo && slope <= kC5SlopeHi;
    r.metrics = {{"max_rel_err", worst}, {"pole_order", slope}, {"instances", double(n)}};
    r.detail = std::to_string(n) + " instances, max rel err=" + fmt("%.2e", worst) +
               "; pole errors " + seq(errs, "%.2e") + " order=" + fmt("%.3f", slope) +
               " (vs +sign residue: " + fmt("%.2f", plus_sign_err) + ")";
    return r;
}

CriterionResult c6_zak() {
    CriterionResult r = make_result(6, "Zak quantization and bulk-edge correspondence");
    r.budget_seconds = 5;
    const int K = 1001, npts = 512;
    int checked = 0, wrong = 0, disagree = 0;
    double raw_dev = 0;
    for (int i = 0; i < K; ++i) {
        const double k = kTwoPi * i / (K - 1);
        if (std::abs(k - kFlatLo) < 0.05 || std::abs(k - kFlatHi) < 0.05) continue;
        ++checked;
        const SpectralWindow w = spectral_window(k);
        const ZakResult z = zak_phase(w, npts);
        const int expect = (k > kFlatLo && k < kFlatHi) ? 1 : 0;
        if (z.winding != expect) ++wrong;
        bool edge = true;
        try {
            (void)flat_band_state(w, 50);
        } catch (const Error&) {
            edge = false;
        }
        if (edge != (z.winding == 1)) ++disagree;
        raw_dev = std::max(raw_dev, std::abs(z.raw_phase - z.phase));
    }
    r.passed = wrong == 0 && disagree == 0 && raw_dev <= kTwoPi / npts;
    r.metrics = {{"checked", double(checked)}, {"wrong", double(wrong)},
                 {"disagree", double(disagree)}, {"raw_phase_dev", raw_dev}};
    r.detail = std::to_string(checked) + " kpar, wrong windings=" + std::to_string(wrong) +
               ", edge-state disagreements=" + std::to_string(disagree) +
               ", max |raw - quantized|=" + fmt("%.1e", raw_dev);
    return r;
}

CriterionResult c7_atomic() {
    CriterionResult r = make_result(7, "atomic oracle (disc r0=0.18)");
    r.budget_seconds = 30;
    const AtomicWell well = make_well(WellShape::Disc, 0.18);
    bool ok = true;
    std::string d;
    for (double lam : {10.0, 20.0}) {
        const GroundState gs = ground_state(well, lam);
        const double eb = bessel_ground_energy(well.r0, lam);
        const double rel = std::abs(gs.E0 - eb) / std::abs(eb);
        const double ratio = gs.E0 / (lam * lam);
        const double gap = spectral_gap(well, lam);
        if (rel > kC7RelTol || ratio > kC7GsRatio || !(gap > 0)) ok = false;
        r.metrics[fmt("rel_err_%g", lam)] = rel;
        r.metrics[fmt("E0_over_lam2_%g", lam)] = ratio;
        r.metrics[fmt("gap_%g", lam)] = gap;
        d += fmt("lam=%g", lam) + ": rel=" + fmt("%.1e", rel) + " E0/lam^2=" + fmt("%.3f", ratio) +
             " gap=" + fmt("%.2f", gap) + "; ";
    }
    r.passed = ok;
    r.detail = d;
    return r;
}

CriterionResult c8_hopping() {
    CriterionResult r = make_result(8, "hopping decay and overlap integrals");
    r.budget_seconds = 120;
    const AtomicWell well = make_well(WellShape::Disc, 0.18);
    const std::vector<double> lams = {10, 15, 20, 25};
    std::vector<double> logr, ratio;
    double worst_exc = 0;
    const std::array<int, 2> zero{0, 0};
    for (double lam : lams) {
        const GroundState gs = ground_state(well, lam);
        const HoppingCoefficient h = hopping_rho(gs, well);
        logr.push_back(std::log(h.rho));
        for (std::array<int, 2> rr : {std::array<int, 2>{0, 0}, {-1, 0}, {0, -1}}) {
            const double a = overlap_integral(gs, well, 1, rr, 0, zero);
            const double b = overlap_integral(gs, well, 0, zero, 1, rr);
            worst_exc = std::max({worst_exc, std::abs(a - h.rho) / h.rho, std::abs(b - h.rho) / h.rho});
        }
        ratio.push_back(overlap_integral(gs, well, 0, {1, 0}, 0, zero) / h.rho);
    }
    const LineFit fit = fit_line(lams, logr);
    const bool affine = fit.r2 >= kC8R2 && fit.slope < 0;
    const bool exc = worst_exc <= kC8Exceptional;
    const bool mono = strictly_decreasing(ratio);
    r.passed = affine && exc && mono;
    r.metrics = {{"slope", fit.slope}, {"r2", fit.r2}, {"max_exceptional_rel_dev", worst_exc}};
    r.detail = "log rho=" + seq(logr) + " slope=" + fmt("%.4f", fit.slope) + " R2=" + fmt("%.5f", fit.r2) +
               (affine ? "" : " [R2 < 0.999]") + "; exceptional dev=" + fmt("%.1e", worst_exc) +
               "; non-exceptional ratio=" + seq(ratio) + (mono ? "" : " [not decreasing]");
    return r;
}

struct ContinuumSweep {
    ContinuumConfig cfg;
    std::vector<double> lams = {8, 12, 16};
    std::map<std::pair<int, int>, ContinuumRun> runs;  // (lambda index, kpar tag)
    bool done = false;
};

ContinuumSweep& sweep() {
    static ContinuumSweep s;
    if (!s.done) {
        s.cfg.well = make_well(WellShape::Disc, 0.18);
        const double ks[3] = {5.0 * kPi / 6.0, kPi, 0.3};
        for (int i = 0; i < int(s.lams.size()); ++i) {
            const LambdaContext ctx = make_lambda_context(s.cfg, s.lams[i]);
            for (int t = 0; t < 3; ++t) s.runs[{i, t}] = run_continuum(s.cfg, ctx, ks[t]);
        }
        s.done = true;
    }
    return s;
}

CriterionResult c9_orbitals() {
    CriterionResult r = make_result(9, "orbital basis (lambda 8,12,16)");
    r.budget_seconds = 600;
    ContinuumSweep& s = sweep();
    std::vector<double> g, hp;
    for (int i = 0; i < 3; ++i) {
        g.push_back(s.runs[{i, 0}].gram_max_offdiag);
        hp.push_back(s.runs[{i, 0}].max_orbital_residual);
    }
    r.passed = strictly_decreasing(g) && strictly_decreasing(hp);
    r.detail = "gram max offdiag=" + seq(g) + " max ||Hp||/||p||=" + seq(hp);
    return r;
}

CriterionResult c10_edge() {
    CriterionResult r = make_result(10, "continuum edge state (kpar=5pi/6, 0.3)");
    r.budget_seconds = 1800;
    ContinuumSweep& s = sweep();
    std::vector<double> om, counts;
    bool one_each = true;
    for (int i = 0; i < 3; ++i) {
        const ContinuumRun& run = s.runs[{i, 0}];
        counts.push_back(run.edge_count);
        if (run.edge_count != 1) one_each = false;
        om.push_back(run.edge_index >= 0 ? std::abs(run.states[run.edge_index].energy.omega_tilde) : NAN);
    }
    const bool mono = one_each && strictly_decreasing(om);
    const double overlap = s.runs[{2, 0}].ansatz_overlap;
    const double half_gap = 0.5 * spectral_window(0.3).dgap;
    int spurious = 0;
    for (int i = 0; i < 3; ++i)
        for (const auto& st : s.runs[{i, 2}].states)
            if (st.edge && std::abs(st.energy.omega_tilde) < half_gap) ++spurious;
    r.passed = one_each && mono && overlap > kC10Overlap && spurious == 0;
    r.metrics = {{"overlap_16", overlap}, {"spurious_kpar_0.3", double(spurious)}};
    r.detail = "edge counts=" + seq(counts, "%.0f") + " |omega|=" + seq(om) +
               (mono ? "" : " [not strictly decreasing]") + " overlap(16)=" + fmt("%.4f", overlap) +
               " kpar=0.3 edge states below dgap/2=" + std::to_string(spurious);
    return r;
}

CriterionResult c11_scaled() {
    CriterionResult r = make_result(11, "scaled-spectrum convergence (5pi/6, pi)");
    r.budget_seconds = 1800;
    ContinuumSweep& s = sweep();
    std::vector<double> a, b;
    for (int i = 0; i < 3; ++i) {
        a.push_back(s.runs[{i, 0}].tb_distance);
        b.push_back(s.runs[{i, 1}].tb_distance);
    }
    r.passed = strictly_decreasing(a) && strictly_decreasing(b);
    r.detail = "distance at 5pi/6=" + seq(a) + " at pi=" + seq(b);
    return r;
}

}  // namespace

Suite parse_suite(const std::string& s) {
    if (s == "tb") return Suite::Tb;
    if (s == "zak") return Suite::Zak;
    if (s == "atomic") return Suite::Atomic;
    if (s == "continuum") return Suite::Continuum;
    if (s == "all") return Suite::All;
    throw Error(ErrorKind::Validation, "unknown suite '" + s + "'");
}

std::string format_line(const CriterionResult& r) {
    char head[160];
    std::snprintf(head, sizeof head, "[%s] %2d %-48s %8.2fs (budget %gs) ", r.passed ? "PASS" : "FAIL",
                  r.id, r.name.c_str(), r.seconds, r.budget_seconds);
    return head + r.detail;
}

std::vector<CriterionResult> run_acceptance(Suite suite,
                                            const std::function<void(const CriterionResult&)>& report) {
    using Fn = CriterionResult (*)();
    struct Entry {
        Suite suite;
        int id;
        const char* name;
        Fn fn;
    };
    const Entry all[] = {
        {Suite::Tb, 1, "flat-band existence", c1_flat_band},
        {Suite::Tb, 2, "kpar = pi exact spectrum", c2_pi},
        {Suite::Tb, 3, "essential-band edges", c3_band_edges},
        {Suite::Tb, 4, "transfer-matrix laws", c4_transfer},
        {Suite::Tb, 5, "resolvent oracle and pole", c5_resolvent},
        {Suite::Zak, 6, "Zak quantization", c6_zak},
        {Suite::Atomic, 7, "atomic oracle", c7_atomic},
        {Suite::Atomic, 8, "hopping decay", c8_hopping},
        {Suite::Continuum, 9, "orbital basis", c9_orbitals},
        {Suite::Continuum, 10, "continuum edge state", c10_edge},
        {Suite::Continuum, 11, "scaled-spectrum convergence", c11_scaled},
    };
    std::vector<CriterionResult> out;
    for (const Entry& e : all) {
        if (suite != Suite::All && suite != e.suite) continue;
        const auto t0 = std::chrono::steady_clock::now();
        CriterionResult r;
        try {
            r = e.fn();
        } catch (const std::exception& ex) {
            r = make_result(e.id, e.name);
            r.passed = false;
            r.detail = std::string("exception: ") + ex.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (r.budget_seconds > 0 && r.seconds > r.budget_seconds) {
            r.passed = false;
            r.detail += " [over runtime budget]";
        }
        out.push_back(r);
        if (report) report(r);
    }
    return out;
}

}  // namespace zz
