#include "doctest.h"

#include <cmath>

#include "zigzag/error.hpp"
#include "zigzag/lattice.hpp"
#include "zigzag/numerics.hpp"

using namespace zz;

TEST_CASE("frame duality and bond length") {
    const auto f = make_frame();
    const Vec2 v[2] = {f.v1, f.v2};
    const Vec2 K[2] = {f.K1, f.K2};
    for (int l = 0; l < 2; ++l)
        for (int m = 0; m < 2; ++m) CHECK(std::abs(K[l].dot(v[m]) - (l == m ? kTwoPi : 0.0)) < 1e-12);
    CHECK(std::abs(f.v1.norm() - 1.0) < 1e-12);
    CHECK(std::abs(f.v2.norm() - 1.0) < 1e-12);
    CHECK(std::abs(f.e.norm() - 1.0 / std::sqrt(3.0)) < 1e-12);
    CHECK(std::abs(f.v1.x() - std::sqrt(3.0) / 2) < 1e-15);
    CHECK(std::abs(f.v1.y() - 0.5) < 1e-15);
    CHECK(std::abs(f.K1.dot(f.v2)) < 1e-12);
}

TEST_CASE("B offset is the honeycomb point (v1 + v2) / 3") {
    const auto f = make_frame();
    const Vec2 b = site_position(f, {Sublattice::B, 0, 0});
    CHECK(std::abs(b.x() - 1.0 / (2.0 * std::sqrt(3.0))) < 1e-15);
    CHECK(std::abs(b.y() - 0.5) < 1e-15);
    // the three B neighbours of A(0,0) sit at distance |e|
    for (auto [n1, n2] : {std::pair{0, 0}, std::pair{-1, 0}, std::pair{0, -1}}) {
        const Vec2 d = site_position(f, {Sublattice::B, n1, n2});
        CHECK(std::abs(d.norm() - f.e.norm()) < 1e-12);
    }
}

TEST_CASE("site positions") {
    const auto f = make_frame();
    CHECK(site_position(f, {Sublattice::A, 0, 0}).norm() == 0.0);
    const Vec2 p = site_position(f, {Sublattice::A, 2, -1});
    CHECK((p - (2 * f.v1 - f.v2)).norm() < 1e-14);
}

TEST_CASE("spectral window examples") {
    auto w = spectral_window(kPi);
    CHECK(std::abs(w.zeta) < 1e-15);
    CHECK(std::abs(w.dgap - 1.0) < 1e-15);
    CHECK(std::abs(w.dmax - 1.0) < 1e-15);
    w = spectral_window(0.0);
    CHECK(std::abs(w.zeta - cplx(2.0, 0.0)) < 1e-15);
    CHECK(w.dgap == doctest::Approx(1.0));
    CHECK(w.dmax == doctest::Approx(3.0));
    for (double k : {kTwoPi / 3, 2 * kTwoPi / 3}) {
        w = spectral_window(k);
        CHECK(std::abs(std::abs(w.zeta) - 1.0) < 1e-10);
        CHECK(w.dgap < 1e-10);
    }
}

TEST_CASE("dgap and the flat-band interval on a 1000-point grid") {
    const int n = 1000;
    double prev_gap = spectral_window(0.0).dgap, prev_max = spectral_window(0.0).dmax;
    for (int i = 1; i < n; ++i) {
        const double k = kTwoPi * i / n;
        const auto w = spectral_window(k);
        CHECK(std::abs(w.dgap - prev_gap) < 0.02);
        CHECK(std::abs(w.dmax - prev_max) < 0.02);
        prev_gap = w.dgap;
        prev_max = w.dmax;
        const double dist = std::min(std::abs(k - kTwoPi / 3), std::abs(k - 2 * kTwoPi / 3));
        if (dist > 0.02) CHECK(w.dgap > 0.01);
        const bool inside = k > kTwoPi / 3 && k < 2 * kTwoPi / 3;
        if (dist > 1e-9) CHECK(w.has_flat_band() == inside);
        CHECK(w.dmax == doctest::Approx(1.0 + std::abs(w.zeta)));
    }
}

TEST_CASE("enumerate sharp sites") {
    const auto f = make_frame();
    const auto s = enumerate_sharp_sites(f, 0, 0, 0);
    REQUIRE(s.size() == 2);
    CHECK(s[0] == SiteIndex{Sublattice::A, 0, 0});
    CHECK(s[1] == SiteIndex{Sublattice::B, 0, 0});
    CHECK(enumerate_sharp_sites(f, 1, 0, 0).size() == 4);
    CHECK(enumerate_sharp_sites(f, 2, -1, 1).size() == 18);
    CHECK(enumerate_sharp_sites(f, 3, 1, 0).empty());
    CHECK_THROWS_AS(enumerate_sharp_sites(f, -1, 0, 0), Error);
}

TEST_CASE("angle parsing") {
    CHECK(parse_angle("2.6") == 2.6);
    CHECK(parse_angle("pi") == doctest::Approx(kPi));
    CHECK(parse_angle("5pi/6") == doctest::Approx(5 * kPi / 6));
    CHECK(parse_angle("-pi/3") == doctest::Approx(-kPi / 3));
    CHECK(parse_angle("2*pi/3") == doctest::Approx(kTwoPi / 3));
    CHECK(parse_angle("2pi") == doctest::Approx(kTwoPi));
    CHECK_THROWS_AS(parse_angle("abc"), Error);
    CHECK_THROWS_AS(parse_angle(""), Error);
}

TEST_CASE("line fit, Hausdorff distance and monotonicity helpers") {
    const auto fit = fit_line({0, 1, 2, 3}, {1, 3, 5, 7});
    CHECK(fit.slope == doctest::Approx(2.0));
    CHECK(fit.intercept == doctest::Approx(1.0));
    CHECK(fit.r2 == doctest::Approx(1.0));
    CHECK(hausdorff({0.0, 1.0}, {0.0, 1.0, 1.5}) == doctest::Approx(0.5));
    CHECK(hausdorff({0.0}, {0.0}) == 0.0);
    CHECK(strictly_decreasing({3, 2, 1}));
    CHECK_FALSE(strictly_decreasing({3, 3, 1}));
    CHECK(strictly_increasing({1, 2, 3}));
    CHECK_FALSE(strictly_increasing({1, 0}));
}
