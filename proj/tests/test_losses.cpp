#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lndf/losses.hpp"
#include "lndf/rng.hpp"
#include "support.hpp"

using namespace lndf;
using namespace lndf::testing;

TEST_CASE("kr_loss examples") {
    VectorXd f(2), y(2);
    f << 0.3, -0.2;
    y << 1, -1;
    VectorXd d;
    CHECK(kr_loss(f, y, &d) == doctest::Approx(-0.25).epsilon(1e-15));
    CHECK(d(0) == doctest::Approx(-0.5));
    CHECK(d(1) == doctest::Approx(0.5));

    CHECK(kr_loss(VectorXd::Zero(4), VectorXd::Ones(4)) == 0.0);

    CHECK_THROWS_AS(kr_loss(VectorXd(), VectorXd()), std::invalid_argument);
    VectorXd bad_y(2);
    bad_y << 1, 0.5;
    CHECK_THROWS_AS(kr_loss(f, bad_y), std::invalid_argument);
}

TEST_CASE("hinge_loss examples") {
    VectorXd f(1), y(1);
    y << 1;

    f << 0.5;
    CHECK(hinge_loss(f, y, 0.01) == 0.0);

    f << -0.02;
    VectorXd d;
    CHECK(hinge_loss(f, y, 0.01, &d) == doctest::Approx(0.03).epsilon(1e-12));
    CHECK(d(0) == doctest::Approx(-1.0));

    y << -1;
    f << -0.02;
    CHECK(hinge_loss(f, y, 0.01, &d) == 0.0);
    CHECK(d(0) == 0.0);

    CHECK_THROWS_AS(hinge_loss(f, y, 0.0), std::invalid_argument);
}

TEST_CASE("hkr_loss combines terms; hand-computed mixed case") {
    HkrConfig cfg{0.01, 100.0};
    VectorXd f(2), y(2);
    y << 1, -1;

    f << 0.3, -0.2;
    LossReport r = hkr_loss(f, y, cfg);
    CHECK(r.kr == doctest::Approx(-0.25).epsilon(1e-15));
    CHECK(r.hinge == 0.0);
    CHECK(r.total == doctest::Approx(-0.25).epsilon(1e-15));

    f << -0.02, -0.2;
    r = hkr_loss(f, y, cfg);
    CHECK(r.kr == doctest::Approx(-0.09).epsilon(1e-12));
    CHECK(r.hinge == doctest::Approx(0.015).epsilon(1e-12));
    CHECK(r.total == doctest::Approx(1.41).epsilon(1e-12));
    CHECK(r.total == r.kr + cfg.lambda * r.hinge); // exact decomposition
}

TEST_CASE("hkr gradient matches finite differences") {
    HkrConfig cfg{0.05, 7.0};
    Rng rng(17);
    VectorXd f(32), y(32);
    for (int i = 0; i < 32; ++i) {
        f(i) = rng.uniform(-0.2, 0.2);
        y(i) = i % 2 ? 1.0 : -1.0;
    }
    LossReport r = hkr_loss(f, y, cfg);
    for (int i = 0; i < 32; ++i) {
        auto J = [&] { return hkr_loss(f, y, cfg).total; };
        double fd = central_diff(J, f(i), 1e-7);
        CHECK(std::abs(r.dLdf(i) - fd) < 1e-8);
    }
}

TEST_CASE("kr_loss constant-shift invariance on balanced batches") {
    Rng rng(23);
    VectorXd f(64), y(64);
    for (int i = 0; i < 64; ++i) {
        f(i) = rng.uniform(-1, 1);
        y(i) = i < 32 ? 1.0 : -1.0;
    }
    double base = kr_loss(f, y);
    for (double c : {-2.0, 0.37, 10.0}) {
        VectorXd shifted = f.array() + c;
        CHECK(kr_loss(shifted, y) == doctest::Approx(base).epsilon(1e-12));
    }
}

TEST_CASE("hinge is zero iff every sample clears the margin") {
    VectorXd f(3), y(3);
    y << 1, -1, 1;
    f << 0.02, -0.02, 0.011;
    CHECK(hinge_loss(f, y, 0.01) == 0.0);
    f(2) = 0.009; // just inside the margin
    CHECK(hinge_loss(f, y, 0.01) > 0.0);
}

TEST_CASE("fit_loss examples and gradient") {
    VectorXd f(2), s(2);
    f << 1, 0;
    s << 0, 0;
    VectorXd d;
    CHECK(fit_loss(f, s, &d) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(d(0) == doctest::Approx(1.0));

    CHECK(fit_loss(s, s) == 0.0);

    Rng rng(4);
    VectorXd fr(16), sr(16);
    for (int i = 0; i < 16; ++i) {
        fr(i) = rng.uniform(-1, 1);
        sr(i) = rng.uniform(-1, 1);
    }
    fit_loss(fr, sr, &d);
    for (int i = 0; i < 16; ++i) {
        auto J = [&] { return fit_loss(fr, sr); };
        CHECK(std::abs(d(i) - central_diff(J, fr(i), 1e-7)) < 1e-8);
    }

    VectorXd wrong(3);
    CHECK_THROWS_AS(fit_loss(f, wrong), std::invalid_argument);
}
