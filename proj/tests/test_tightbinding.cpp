#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "zigzag/error.hpp"
#include "zigzag/numerics.hpp"
#include "zigzag/tightbinding.hpp"

using namespace zz;

namespace {

CellSequence random_sequence(std::mt19937_64& rng, int first, int cells) {
    std::normal_distribution<double> nd;
    CellSequence s{first, std::vector<Spinor>(cells)};
    for (auto& c : s.cells) c = Spinor(cplx(nd(rng), nd(rng)), cplx(nd(rng), nd(rng)));
    return s;
}

Eigen::VectorXcd to_vector(const CellSequence& s, int dim) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
    for (int i = 0; i < dim; ++i) v(i) = s.at(i / 2)(i % 2);
    return v;
}

}  // namespace

TEST_CASE("bulk fiber on a delta") {
    CellSequence d{0, {Spinor(1.0, 0.0)}};
    auto out = apply_bulk_fiber(d, spectral_window(kPi));
    CHECK(std::abs(out.at(-1)(1) - 1.0) < 1e-15);
    CHECK(std::abs(out.at(0)(1)) < 1e-15);
    CHECK(std::abs(out.at(-1)(0)) + std::abs(out.at(0)(0)) + std::abs(out.at(1)(0)) + std::abs(out.at(1)(1)) ==
          0.0);
    out = apply_bulk_fiber(d, spectral_window(0.0));
    CHECK(std::abs(out.at(-1)(1) - 1.0) < 1e-15);
    CHECK(std::abs(out.at(0)(1) - 2.0) < 1e-15);
}

TEST_CASE("bulk fiber is linear") {
    std::mt19937_64 rng(7);
    const auto w = spectral_window(1.1);
    const auto f = random_sequence(rng, -2, 6), g = random_sequence(rng, -2, 6);
    const cplx a(0.3, -1.2), b(-0.7, 0.4);
    CellSequence h{-2, std::vector<Spinor>(6)};
    for (int i = 0; i < 6; ++i) h.cells[i] = a * f.cells[i] + b * g.cells[i];
    const auto Af = apply_bulk_fiber(f, w), Ag = apply_bulk_fiber(g, w), Ah = apply_bulk_fiber(h, w);
    for (int n = Ah.first; n <= Ah.last(); ++n) CHECK((Ah.at(n) - a * Af.at(n) - b * Ag.at(n)).norm() < 1e-13);
}

TEST_CASE("truncated matrix equals the bulk operator compressed to the half-structure") {
    for (double k : {0.0, 0.7, 2.3, kPi, 4.0})
        for (Closure c : {Closure::Zigzag, Closure::Bearded}) {
            const auto w = spectral_window(k);
            const auto op = build_fiber(w, 5, c);
            const int dim = op.dim();
            CHECK((op.matrix - op.matrix.adjoint()).norm() < 1e-14);
            for (int col = 0; col < dim; ++col) {
                CellSequence e{0, std::vector<Spinor>(5, Spinor::Zero())};
                e.cells[col / 2](col % 2) = 1.0;
                const auto He = apply_bulk_fiber(e, w);
                CHECK((to_vector(He, dim) - op.matrix.col(col)).norm() < 1e-14);
            }
        }
}

TEST_CASE("closure selection") {
    CHECK(build_fiber(spectral_window(0.3), 4).dim() == 8);
    CHECK(build_fiber(spectral_window(kPi), 4).dim() == 7);
    CHECK(build_fiber(spectral_window(kPi), 4, Closure::Zigzag).dim() == 8);
    CHECK(parse_closure("bearded") == Closure::Bearded);
    CHECK_THROWS_AS(parse_closure("armchair"), Error);
    CHECK_THROWS_AS(build_fiber(spectral_window(0.3), 1), Error);
}

TEST_CASE("kpar = 0, N = 2 off-diagonal magnitudes") {
    const auto op = build_fiber(spectral_window(0.0), 2, Closure::Zigzag);
    REQUIRE(op.dim() == 4);
    std::vector<double> mags;
    for (int r = 0; r < 4; ++r)
        for (int c = r + 1; c < 4; ++c)
            if (std::abs(op.matrix(r, c)) > 0) mags.push_back(std::abs(op.matrix(r, c)));
    std::sort(mags.begin(), mags.end());
    REQUIRE(mags.size() == 3);
    CHECK(mags[0] == doctest::Approx(1.0));
    CHECK(mags[1] == doctest::Approx(2.0));
    CHECK(mags[2] == doctest::Approx(2.0));
}

TEST_CASE("chiral symmetry pairs the spectrum") {
    for (double k : {0.2, 1.9, 2.6, kPi, 5.5}) {
        const auto op = build_fiber(spectral_window(k), 30, Closure::Zigzag);
        Eigen::VectorXd d(op.dim());
        for (int i = 0; i < op.dim(); ++i) d(i) = i % 2 ? -1.0 : 1.0;
        CHECK((d.asDiagonal() * op.matrix * d.asDiagonal() + op.matrix).norm() == 0.0);
        const auto s = spectrum(op);
        for (int i = 0; i < op.dim(); ++i) CHECK(std::abs(s.values(i) + s.values(op.dim() - 1 - i)) < 1e-10);
    }
}

TEST_CASE("kpar = pi spectrum and eigenspaces") {
    for (int N : {3, 10, 50}) {
        const auto op = build_fiber(spectral_window(kPi), N);
        const auto s = spectrum(op);
        int zeros = 0;
        for (int i = 0; i < op.dim(); ++i) {
            const double e = s.values(i);
            const bool ok = std::abs(e) < 1e-10 || std::abs(std::abs(e) - 1.0) < 1e-10;
            CHECK(ok);
            zeros += std::abs(e) < 1e-10;
        }
        CHECK(zeros == 1);
        // The +-1 eigenspaces are spanned by (e_{2j+1} +- e_{2j+2}) / sqrt 2.
        for (double sign : {1.0, -1.0}) {
            Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(op.dim(), op.dim());
            for (int j = 0; 2 * j + 2 < op.dim(); ++j) {
                Eigen::VectorXcd u = Eigen::VectorXcd::Zero(op.dim());
                u(2 * j + 1) = 1.0 / std::sqrt(2.0);
                u(2 * j + 2) = sign / std::sqrt(2.0);
                P += u * u.adjoint();
            }
            for (int i = 0; i < op.dim(); ++i)
                if (std::abs(s.values(i) - sign) < 1e-10) {
                    const Eigen::VectorXcd v = s.vectors.col(i);
                    CHECK((v - P * v).norm() < 1e-10);
                }
        }
    }
}

TEST_CASE("flat band at 5pi/6 and the bulk gap at 0 for N = 200") {
    auto s = spectrum(build_fiber(spectral_window(5 * kPi / 6), 200));
    CHECK(s.values.cwiseAbs().minCoeff() < 1e-12);
    const auto w0 = spectral_window(0.0);
    s = spectrum(build_fiber(w0, 200));
    CHECK(s.values.cwiseAbs().minCoeff() >= w0.dgap - 0.05);
}

TEST_CASE("right-end splitting of the 2N chain decays like |zeta|^N") {
    const auto w = spectral_window(5 * kPi / 6);
    std::vector<double> n, logE;
    for (int N : {10, 20, 30}) {
        const auto s = spectrum(build_fiber(w, N, Closure::Zigzag));
        n.push_back(N);
        logE.push_back(std::log(s.values.cwiseAbs().minCoeff()));
    }
    const auto fit = fit_line(n, logE);
    CHECK(std::abs(fit.slope / std::log(std::abs(w.zeta)) - 1.0) < 0.1);
}

TEST_CASE("closed-form edge state") {
    auto st = flat_band_state(spectral_window(kPi), 6);
    CHECK(std::abs(st.amplitudes[0](0) - 1.0) < 1e-15);
    for (int n = 1; n < 6; ++n) CHECK(st.amplitudes[n].norm() < 1e-15);
    st = flat_band_state(spectral_window(5 * kPi / 6), 200);
    CHECK(std::abs(st.amplitudes[0](0) - std::sqrt(std::sqrt(3.0) - 1.0)) < 1e-12);
    CHECK(std::abs(st.norm - 1.0) < 1e-12);
    for (const auto& a : st.amplitudes) CHECK(a(1) == cplx(0.0));
    const auto w = spectral_window(2.4);
    const auto op = build_fiber(w, 40);
    st = flat_band_state(w, 40);
    CHECK((op.matrix * st.flatten(op.dim())).norm() < 1e-14);
    CHECK_THROWS_AS(flat_band_state(spectral_window(0.0), 10), Error);
}

TEST_CASE("transfer matrix determinant and quadratic") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ku(0.0, kTwoPi), zu(-3.0, 3.0);
    int checked = 0;
    while (checked < 100) {
        const double k = ku(rng);
        if (std::abs(k - kPi) < 1e-3) continue;
        const auto w = spectral_window(k);
        const cplx z(zu(rng), zu(rng) * 0.3);
        const auto t = transfer_system(z, w);
        const cplx zeta = w.zeta, zc = std::conj(zeta);
        CHECK(std::abs(t.M.determinant() - zeta / zc) < 1e-12 * std::max(1.0, t.M.norm()));
        for (cplx l : {t.lam1, t.lam2}) {
            const cplx b = 1.0 + std::norm(zeta) - z * z;
            const double scale = std::abs(zc) * std::norm(l) + std::abs(b) * std::abs(l) + std::abs(zeta);
            CHECK(std::abs(zc * l * l + b * l + zeta) / scale < 1e-10);
        }
        CHECK(std::abs(std::abs(t.lam1 * t.lam2) - 1.0) < 1e-12);
        ++checked;
    }
}

TEST_CASE("transfer roots at z = 0 and root location by regime") {
    const auto w = spectral_window(5 * kPi / 6);
    auto t = transfer_system(0.0, w);
    const cplx a = -w.zeta, b = -1.0 / std::conj(w.zeta);
    const bool match = (std::abs(t.lam1 - a) < 1e-12 && std::abs(t.lam2 - b) < 1e-12) ||
                       (std::abs(t.lam1 - b) < 1e-12 && std::abs(t.lam2 - a) < 1e-12);
    CHECK(match);
    t = transfer_system(0.3, w);
    CHECK(t.regime == Regime::InsideGap);
    CHECK(std::abs(t.lam1) < 1.0);
    CHECK(std::abs(t.lam2) > 1.0);
    t = transfer_system(1.0, w);
    CHECK(t.regime == Regime::OnBands);
    CHECK(std::abs(std::abs(t.lam1) - 1.0) < 1e-10);
    CHECK(std::abs(std::abs(t.lam2) - 1.0) < 1e-10);
    t = transfer_system(2.0, w);
    CHECK(t.regime == Regime::AboveBands);
    CHECK(std::abs(t.lam2) < 1.0);
    CHECK(std::abs(t.lam1) > 1.0);
    CHECK_THROWS_AS(transfer_system(0.3, spectral_window(kPi)), Error);
}

TEST_CASE("resolvent agrees with a dense solve away from the artificial end") {
    std::mt19937_64 rng(3);
    const int N = 100;
    for (double k : {5 * kPi / 6, 0.4, kPi})
        for (cplx z : {cplx(0.2, 0.0), cplx(0.1, 0.05), cplx(3.5, -0.1)}) {
            const auto w = spectral_window(k);
            if (classify(z, w) == Regime::OnBands) continue;
            const auto t = std::abs(w.zeta) > 1e-12 ? transfer_system(z, w) : TransferSystem{};
            if (std::abs(w.zeta) > 1e-12 && std::min(std::abs(t.lam1), std::abs(t.lam2)) > 0.8) continue;
            const auto f = random_sequence(rng, 0, N / 4);
            const auto psi = resolve(f, z, w, N);
            const auto op = build_fiber(w, N, Closure::Zigzag);
            const Eigen::MatrixXcd A = op.matrix - z * Eigen::MatrixXcd::Identity(op.dim(), op.dim());
            const Eigen::VectorXcd ref = A.partialPivLu().solve(to_vector(f, op.dim()));
            const Eigen::VectorXcd got = to_vector(psi, op.dim());
            CHECK((got - ref).head(N).norm() <= 1e-8 * ref.head(N).norm());
        }
    CellSequence zero{0, std::vector<Spinor>(5, Spinor::Zero())};
    CHECK(to_vector(resolve(zero, 0.2, spectral_window(2.6), 10), 20).norm() == 0.0);
}

TEST_CASE("resolvent error cases") {
    CellSequence e0{0, {Spinor(1.0, 0.0)}};
    CHECK_THROWS_AS(resolve(e0, 1.0, spectral_window(5 * kPi / 6), 20), Error);
    CHECK_THROWS_AS(resolve(e0, 0.0, spectral_window(5 * kPi / 6), 20), Error);
    CHECK_THROWS_AS(resolve(e0, 0.0, spectral_window(kPi), 20), Error);
    CellSequence far{30, {Spinor(1.0, 0.0)}};
    CHECK_THROWS_AS(resolve(far, 0.2, spectral_window(5 * kPi / 6), 20), Error);
}

TEST_CASE("boundary coefficient reproduces the decaying amplitude of psi_0") {
    std::mt19937_64 rng(5);
    const auto w = spectral_window(2.4);
    for (cplx z : {cplx(0.15, 0.0), cplx(-0.1, 0.02)}) {
        const auto f = random_sequence(rng, 0, 8);
        const auto t = transfer_system(z, w);
        const auto psi = resolve(f, z, w, 60);
        Eigen::Matrix2cd V;
        V.col(0) = t.xi1;
        V.col(1) = t.xi2;
        const Eigen::Vector2cd c = V.partialPivLu().solve(psi.at(0));
        const cplx mu = mu_coefficient(f, z, w);
        CHECK(std::abs(c(0) - mu / z) < 1e-9 * std::max(1.0, std::abs(mu / z)));
    }
    CHECK_THROWS_AS(mu_coefficient(CellSequence{0, {Spinor(1.0, 0.0)}}, 2.5, w), Error);
}

TEST_CASE("solvability defect") {
    const auto w = spectral_window(5 * kPi / 6);
    const auto st = flat_band_state(w, 80);
    CellSequence f{0, {}};
    for (const auto& a : st.amplitudes) f.cells.push_back(a);
    CHECK(std::abs(solvability_defect(f, w) - 1.0) < 1e-12);
    CellSequence b{0, {Spinor(0.0, 1.0), Spinor(0.0, cplx(0.5, 2.0))}};
    CHECK(std::abs(solvability_defect(b, w)) == 0.0);
    CellSequence e1{0, {Spinor(1.0, 0.0)}};
    CHECK(std::abs(solvability_defect(e1, spectral_window(kPi)) - 1.0) < 1e-15);
    CHECK_THROWS_AS(solvability_defect(e1, spectral_window(0.0)), Error);
}

TEST_CASE("band sweep: one left edge state per interior fiber") {
    std::vector<double> ks;
    for (int i = 0; i <= 10; ++i) ks.push_back(kTwoPi / 3 + 0.1 + (kTwoPi / 3 - 0.2) * i / 10);
    const auto rows = band_sweep(ks, 200);
    for (double k : ks) {
        int edge = 0;
        for (const auto& r : rows)
            if (r.kpar == k && r.edge) {
                ++edge;
                CHECK(std::abs(r.eigenvalue) < 1e-8);
            }
        CHECK(edge == 1);
    }
}

TEST_CASE("band sweep: bulk fills [dgap, dmax] densely at kpar = 0.3") {
    const auto w = spectral_window(0.3);
    const auto rows = band_sweep({0.3}, 200);
    std::vector<double> mags;
    for (const auto& r : rows) {
        CHECK_FALSE(r.edge);
        mags.push_back(std::abs(r.eigenvalue));
    }
    std::sort(mags.begin(), mags.end());
    CHECK(mags.front() >= w.dgap - 1e-9);
    CHECK(mags.back() <= w.dmax + 1e-9);
    CHECK(mags.front() - w.dgap < 10.0 / 200);
    CHECK(w.dmax - mags.back() < 10.0 / 200);
    for (std::size_t i = 1; i < mags.size(); ++i) CHECK(mags[i] - mags[i - 1] < 10.0 / 200);
}

TEST_CASE("spectrum at kpar equals spectrum at 2 pi - kpar") {
    for (double k : {0.4, 1.7, 2.5, 2.9}) {
        const auto a = spectrum(build_fiber(spectral_window(k), 60));
        const auto b = spectrum(build_fiber(spectral_window(kTwoPi - k), 60));
        REQUIRE(a.values.size() == b.values.size());
        CHECK((a.values - b.values).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("left mass fraction") {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(16);
    v(0) = 1.0;
    CHECK(left_mass_fraction(v, 8) == doctest::Approx(1.0));
    v(15) = 1.0;
    CHECK(left_mass_fraction(v, 8) == doctest::Approx(0.5));
}
