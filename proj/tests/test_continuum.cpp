#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "zigzag/continuum.hpp"
#include "zigzag/error.hpp"
#include "zigzag/numerics.hpp"

using namespace zz;

namespace {

const AtomicWell kDisc = make_well(WellShape::Disc, 0.18);

ContinuumConfig small_config() {
    ContinuumConfig c;
    c.well = kDisc;
    c.ncells = 12;
    c.resolution = 24;
    return c;
}

/// Shared runs on the small configuration, keyed by (lambda, kpar).
const ContinuumRun& small_run(double lambda, double kpar) {
    static std::map<double, LambdaContext> ctx;
    static std::map<std::pair<double, double>, ContinuumRun> runs;
    const auto key = std::make_pair(lambda, kpar);
    if (auto it = runs.find(key); it != runs.end()) return it->second;
    if (!ctx.count(lambda)) ctx.emplace(lambda, make_lambda_context(small_config(), lambda));
    return runs.emplace(key, run_continuum(small_config(), ctx.at(lambda), kpar)).first->second;
}

Eigen::VectorXd dense_spectrum(const SparseC& H) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es{Eigen::MatrixXcd(H), Eigen::EigenvaluesOnly};
    return es.eigenvalues();
}

}  // namespace

TEST_CASE("grid counting and geometry") {
    const auto g = build_grid(4, {16, 16}, 1, 0);
    CHECK(g.size() == std::size_t(5 * 16 * 16));
    CHECK(g.index(0, 16) == g.index(0, 0));
    CHECK(g.index(0, -1) == g.index(0, 15));
    CHECK_THROWS_AS(build_grid(4, {16, 24}, 1), Error);
    CHECK_THROWS_AS(build_grid(1, {16, 16}, 1), Error);
    CHECK_THROWS_AS(build_grid(4, {16, 16}, -1), Error);
    CHECK_THROWS_AS(build_grid(100000, {48, 48}, 2), Error);
    const auto f = make_frame();
    const auto g2 = build_grid(4, {24, 24}, 2);
    for (int n = 0; n < 4; ++n) {
        const Vec2 a = n * f.v1;
        double best = 1e9;
        for (std::size_t k = 0; k < g2.size(); ++k) best = std::min(best, (g2.coord(k) - a).norm());
        CHECK(best <= g2.h());
    }
    CHECK(build_grid(4, {48, 48}, 2).h() == doctest::Approx(g2.h() / 2));
}

TEST_CASE("smoothed well conserves the disc area") {
    for (int p : {24, 48}) {
        const double h = 1.0 / p;
        const double area = std::sqrt(3.0) / 2.0 * h * h;
        double sum = 0.0;
        for (int i = -p; i <= p; ++i)
            for (int j = -p; j <= p; ++j) {
                const Vec2 x = i * h * make_frame().v1 + j * h * make_frame().v2;
                sum += -smoothed_well(kDisc, x.norm(), h) * area;
            }
        CHECK(std::abs(sum / (kPi * 0.18 * 0.18) - 1.0) < 0.02);
    }
}

TEST_CASE("assembled operator is Hermitian and real at kpar = 0") {
    const auto g = build_grid(3, {12, 12}, 1, 1);
    for (double k : {0.0, 0.7, 2.6, kPi, 4.4}) {
        const auto prob = assemble_fiber(g, kDisc, 8.0, k);
        const SparseC D = prob.H - SparseC(prob.H.adjoint());
        CHECK(D.norm() <= 1e-12 * prob.H.norm());
        if (k == 0.0) {
            double im = 0.0;
            for (int c = 0; c < prob.H.outerSize(); ++c)
                for (SparseC::InnerIterator it(prob.H, c); it; ++it) im = std::max(im, std::abs(it.value().imag()));
            CHECK(im == 0.0);
        }
    }
}

TEST_CASE("without wells the spectrum lies above -E0") {
    const auto g = build_grid(3, {12, 12}, 1, 1);
    for (double k : {0.0, 1.5, kPi}) {
        const auto prob = assemble_fiber(g, kDisc, 8.0, k, Closure::Auto, nullptr, false);
        CHECK(prob.sites.empty());
        const auto ev = dense_spectrum(prob.H);
        CHECK(ev.minCoeff() >= -prob.atom.E0 - 1e-9);
    }
}

TEST_CASE("kpar and kpar + 2 pi give the same spectrum; 2 pi - kpar mirrors it") {
    const auto g = build_grid(3, {12, 12}, 1, 1);
    for (double k : {0.4, 2.6}) {
        const auto a = dense_spectrum(assemble_fiber(g, kDisc, 8.0, k).H);
        const auto b = dense_spectrum(assemble_fiber(g, kDisc, 8.0, k + kTwoPi).H);
        const auto c = dense_spectrum(assemble_fiber(g, kDisc, 8.0, kTwoPi - k).H);
        CHECK((a - b).cwiseAbs().maxCoeff() < 1e-8);
        CHECK((a - c).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("shift-invert eigensolver matches a dense solve") {
    const int n = 1500;
    SparseC H(n, n);
    std::vector<Eigen::Triplet<cplx>> t;
    for (int i = 0; i < n; ++i) {
        t.emplace_back(i, i, 2.0 + 0.5 * std::sin(0.1 * i));
        if (i + 1 < n) {
            t.emplace_back(i, i + 1, cplx(-1.0, 0.3));
            t.emplace_back(i + 1, i, cplx(-1.0, -0.3));
        }
    }
    H.setFromTriplets(t.begin(), t.end());
    const auto ref = dense_spectrum(H);
    const double sigma = 1.3;
    const auto r = shift_invert_eigs(H, sigma, 8);
    std::vector<double> near(ref.data(), ref.data() + n);
    std::sort(near.begin(), near.end(),
              [&](double x, double y) { return std::abs(x - sigma) < std::abs(y - sigma); });
    near.resize(8);
    std::sort(near.begin(), near.end());
    for (int i = 0; i < 8; ++i) CHECK(std::abs(r.values(i) - near[i]) < 1e-8);
    CHECK(r.residuals.maxCoeff() < 1e-7);
    CHECK_THROWS_AS(shift_invert_eigs(H, sigma, 0), Error);
}

TEST_CASE("discrete atom approaches the radial ground state") {
    const double ref = ground_state(kDisc, 10.0).E0;
    const double e24 = discrete_atom(kDisc, 10.0, 24).E0;
    const double e48 = discrete_atom(kDisc, 10.0, 48).E0;
    CHECK(std::abs(e48 - ref) < std::abs(e24 - ref));
    CHECK(std::abs(e48 - ref) < 0.05 * std::abs(ref));
}

TEST_CASE("orbital basis becomes orthonormal and nearly exact as lambda grows") {
    const auto& a = small_run(8.0, 5 * kPi / 6);
    const auto& b = small_run(12.0, 5 * kPi / 6);
    CHECK(b.gram_max_diag_defect < a.gram_max_diag_defect);
    CHECK(b.gram_max_offdiag < a.gram_max_offdiag);
    CHECK(b.max_orbital_residual < a.max_orbital_residual);
    const cplx zeta = spectral_window(5 * kPi / 6).zeta;
    CHECK(std::abs(b.nn_element_ratio - zeta) < std::abs(a.nn_element_ratio - zeta));
    CHECK(std::abs(b.nn_element_ratio - zeta) < 0.3 * std::abs(zeta));
}

TEST_CASE("edge state inside the flat-band interval") {
    const auto& r = small_run(12.0, 5 * kPi / 6);
    REQUIRE(r.edge_index >= 0);
    CHECK(r.edge_count == 1);
    const double edge = std::abs(r.states[r.edge_index].energy.omega_tilde);
    for (int k = 0; k < int(r.states.size()); ++k)
        if (k != r.edge_index) CHECK(std::abs(r.states[k].energy.omega_tilde) > edge);
    CHECK(r.ansatz_overlap > 0.9);
    CHECK(std::abs(r.ansatz_rq_gap) <= 10.0 * r.rho);
    CHECK(small_run(12.0, 5 * kPi / 6).ansatz_overlap > small_run(8.0, 5 * kPi / 6).ansatz_overlap);
}

TEST_CASE("no low edge state outside the flat-band interval") {
    const auto w = spectral_window(0.3);
    for (double lam : {8.0, 12.0}) {
        const auto& r = small_run(lam, 0.3);
        for (const auto& s : r.states)
            if (s.edge) CHECK(std::abs(s.energy.omega_tilde) >= w.dgap / 2);
    }
}

TEST_CASE("scaled spectrum approaches the tight-binding spectrum") {
    CHECK(small_run(12.0, 5 * kPi / 6).tb_distance < small_run(8.0, 5 * kPi / 6).tb_distance);
    // at kpar = pi the scaled spectrum clusters near {-1, 0, 1}
    const auto& r = small_run(12.0, kPi);
    for (double o : r.omegas()) {
        const double d = std::min({std::abs(o), std::abs(o - 1.0), std::abs(o + 1.0)});
        CHECK(d < 0.25);
    }
}

TEST_CASE("edge energy varies little across the flat-band interval") {
    std::vector<double> lam, lr;
    for (double l : {8.0, 12.0}) {
        lam.push_back(l);
        lr.push_back(std::log(small_run(l, kPi).rho));
    }
    const double c = -fit_line(lam, lr).slope;
    double lo = 1e300, hi = -1e300, rho = 0;
    for (double k : {0.8 * kPi, 0.9 * kPi, kPi}) {
        const auto& r = small_run(12.0, k);
        REQUIRE(r.edge_index >= 0);
        const double E = r.states[r.edge_index].energy.E;
        lo = std::min(lo, E);
        hi = std::max(hi, E);
        rho = r.rho;
    }
    CHECK(hi - lo <= 10.0 * rho * std::exp(-c * 12.0));
}

TEST_CASE("edge eigenvalue converges at second order under mesh doubling") {
    auto cfg = small_config();
    cfg.ncells = 8;
    double E[3];
    int i = 0;
    for (int p : {24, 48, 96}) {
        cfg.resolution = p;
        const auto ctx = make_lambda_context(cfg, 12.0);
        const auto r = run_continuum(cfg, ctx, 5 * kPi / 6);
        REQUIRE(r.edge_index >= 0);
        E[i++] = r.states[r.edge_index].energy.E;
    }
    const double ratio = std::abs(E[2] - E[1]) / std::abs(E[1] - E[0]);
    CHECK(ratio <= 0.35);
}

TEST_CASE("continuum input validation") {
    const auto g = build_grid(3, {16, 16}, 1, 1);
    const auto prob = assemble_fiber(g, kDisc, 8.0, 1.0);
    CHECK_THROWS_AS(orbital_basis(prob), Error);
    CHECK_THROWS_AS(edge_eigensolve(prob, 1.0, 0), Error);
}
