#include <catch2/catch_amalgamated.hpp>

#include "petreg/numerics.hpp"
#include "petreg/plant.hpp"

#include <cmath>
#include <random>

using namespace petreg;
using Catch::Approx;

TEST_CASE("lorenz equilibrium at the origin", "[plant]") {
    auto d = lorenz_rhs(ColVec{0, 0}, ColVec{0, 0}, 0.0, LorenzParams{});
    CHECK(d.z_dot(0) == 0.0);
    CHECK(d.z_dot(1) == 0.0);
    CHECK(d.x_dot(0) == 0.0);
    CHECK(d.x_dot(1) == 0.0);
}

TEST_CASE("lorenz rhs by substitution", "[plant]") {
    // z=(1,1), x=(1,0), u=0, benchmark parameters with g7=1
    auto d = lorenz_rhs(ColVec{1, 1}, ColVec{1, 0}, 0.0, LorenzParams{});
    CHECK(d.z_dot(0) == Approx(0.0));            // -10 + 10
    CHECK(d.z_dot(1) == Approx(-8.0 / 3.0 + 1));
    CHECK(d.x_dot(0) == Approx(0.0));            // 1 + 0 - 1 + 0
    CHECK(d.x_dot(1) == Approx(1.2));            // 0.2 + 1
}

TEST_CASE("control enters only the last channel with unit slope", "[plant]") {
    std::mt19937 rng(3);
    auto u = [&] { return static_cast<Real>(rng()) / 4294967296.0 * 4.0 - 2.0; };
    for (int trial = 0; trial < 20; ++trial) {
        ColVec z{u(), u()}, x{u(), u()};
        const Real u0 = u(), du = 0.37;
        auto d0 = lorenz_rhs(z, x, u0, LorenzParams{});
        auto d1 = lorenz_rhs(z, x, u0 + du, LorenzParams{});
        CHECK(std::abs((d1.x_dot(1) - d0.x_dot(1)) / du - 1.0) < 1e-12);
        CHECK(d1.z_dot(0) == d0.z_dot(0));
        CHECK(d1.z_dot(1) == d0.z_dot(1));
        CHECK(d1.x_dot(0) == d0.x_dot(0));
    }
}

TEST_CASE("z-subsystem stays bounded with pinned output", "[plant]") {
    // x1 follows a bounded signal; the z dynamics must not blow up over 30 s
    ColVec z{0.3, -0.4};
    const Real h = 1e-3;
    Real worst = 0;
    for (int s = 0; s < 30000; ++s) {
        const Real t = s * h;
        auto f = [&](Real tt, const ColVec& zz) {
            const Real x1 = std::cos(tt);
            return ColVec{-10.0 * zz(0) + 10.0 * x1, -8.0 / 3.0 * zz(1) + zz(0) * x1};
        };
        z = rk4_step(f, z, t, h);
        worst = std::max(worst, z.norm());
    }
    CHECK(worst < 5.0);
}

TEST_CASE("validate_plant passes the lorenz agent", "[plant]") {
    auto report = validate_plant(make_lorenz_plant(LorenzParams{}));
    CHECK(report.all_passed());
}

TEST_CASE("validate_plant flags a shifted equilibrium", "[plant]") {
    StrictFeedbackPlant bad = make_lorenz_plant(LorenzParams{});
    bad.rhs = [](const ColVec& z, const ColVec& x, const ColVec& nu, Real u) {
        auto d = lorenz_rhs(z, x, u, LorenzParams{});
        d.x_dot(0) += 1.0;
        (void)nu;
        return d;
    };
    auto report = validate_plant(bad);
    CHECK_FALSE(report.all_passed());
    CHECK_FALSE(report.probes[0].passed);
}

TEST_CASE("validate_plant detects quadratic control entry", "[plant]") {
    StrictFeedbackPlant bad = make_lorenz_plant(LorenzParams{});
    bad.rhs = [](const ColVec& z, const ColVec& x, const ColVec& nu, Real u) {
        auto d = lorenz_rhs(z, x, u + 0.2 * u * u, LorenzParams{});
        (void)nu;
        return d;
    };
    auto report = validate_plant(bad);
    bool affinity_failed = false;
    for (const auto& p : report.probes)
        if (p.name == "affine_in_u" && !p.passed) affinity_failed = true;
    CHECK(affinity_failed);
}
