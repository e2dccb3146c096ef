#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dwfloquet/classical.hpp"
#include "dwfloquet/errors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

using namespace dwf;

namespace {

const SystemParams undriven = SystemParams::from_rescaled(4.0, 0.0, 0.982);
const SystemParams driven = SystemParams::from_rescaled(4.0, 0.015, 0.982);

// plain RK4 on the same equations, used as an independent reference
PhasePoint rk4(PhasePoint s, double duration, const SystemParams& p, int steps) {
    const double h = duration / steps;
    auto f = [&](double x, double v, double t, double& dx, double& dv) {
        dx = v;
        dv = -potential_gradient(x, p.D) - p.S * std::cos(p.omega * t);
    };
    double t = 0.0;
    for (int i = 0; i < steps; ++i) {
        double k1x, k1v, k2x, k2v, k3x, k3v, k4x, k4v;
        f(s.x, s.p, t, k1x, k1v);
        f(s.x + 0.5 * h * k1x, s.p + 0.5 * h * k1v, t + 0.5 * h, k2x, k2v);
        f(s.x + 0.5 * h * k2x, s.p + 0.5 * h * k2v, t + 0.5 * h, k3x, k3v);
        f(s.x + h * k3x, s.p + h * k3v, t + h, k4x, k4v);
        s.x += h / 6 * (k1x + 2 * k2x + 2 * k3x + k4x);
        s.p += h / 6 * (k1v + 2 * k2v + 2 * k3v + k4v);
        t += h;
    }
    return s;
}

} // namespace

TEST_CASE("undriven flow conserves energy") {
    const PhasePoint s{1.0, 0.3, 0.0};
    const double e0 = classical_energy(s, 4.0);
    PhasePoint cur = s;
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        cur = flow(cur, undriven.period(), undriven);
        worst = std::max(worst, std::abs(classical_energy(cur, 4.0) - e0));
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("well bottoms and the barrier top are fixed points without driving") {
    for (double x : {std::sqrt(32.0), -std::sqrt(32.0), 0.0}) {
        const PhasePoint e = flow({x, 0.0, 0.0}, 10 * undriven.period(), undriven);
        CHECK(e.x == doctest::Approx(x).scale(1.0).epsilon(1e-12));
        CHECK(std::abs(e.p) < 1e-12);
    }
}

TEST_CASE("flow agrees with an independent integrator") {
    const PhasePoint s{-3.0, 0.4, 0.0};
    const PhasePoint a = flow(s, 3 * driven.period(), driven);
    const PhasePoint b = rk4(s, 3 * driven.period(), driven, 20000);
    CHECK(a.x == doctest::Approx(b.x).epsilon(1e-9));
    CHECK(a.p == doctest::Approx(b.p).epsilon(1e-9));
    CHECK(a.t == doctest::Approx(0.0).scale(driven.period()));
}

TEST_CASE("one-period map is area preserving") {
    for (const PhasePoint& s : {PhasePoint{5.0, 0.1, 0.0}, PhasePoint{0.5, 0.6, 0.0}, PhasePoint{-6.5, -0.3, 0.0}}) {
        const Eigen::Matrix2d J = period_map_jacobian(s, driven);
        CHECK(std::abs(J.determinant() - 1.0) < 1e-8);
    }
}

TEST_CASE("backward flow undoes forward flow") {
    const PhasePoint s{2.0, -0.5, 0.0};
    // short run: errors grow exponentially near the separatrix
    const PhasePoint f = flow(s, 2.3 * driven.period(), driven);
    const PhasePoint b = flow(f, -2.3 * driven.period(), driven);
    CHECK(b.x == doctest::Approx(s.x).epsilon(1e-11));
    CHECK(b.p == doctest::Approx(s.p).scale(1.0).epsilon(1e-11));
}

TEST_CASE("generalized parity maps orbits onto orbits half a period later") {
    const PhasePoint s{3.0, 0.2, 0.0};
    const double T = driven.period();
    const PhasePoint a = flow(s, 2 * T, driven);
    const PhasePoint b = flow({-s.x, -s.p, 0.5 * T}, 2 * T, driven);
    CHECK(b.x == doctest::Approx(-a.x).epsilon(1e-10));
    CHECK(b.p == doctest::Approx(-a.p).epsilon(1e-10));
}

TEST_CASE("step refinement changes one period by little") {
    ClassicalOptions coarse, fine;
    fine.steps_per_period = 512;
    const PhasePoint s{4.0, 0.2, 0.0};
    const PhasePoint a = flow(s, driven.period(), driven, coarse);
    const PhasePoint b = flow(s, driven.period(), driven, fine);
    CHECK(std::hypot(a.x - b.x, a.p - b.p) < 1e-10);
}

TEST_CASE("stroboscopic orbits: confinement and well hopping") {
    const auto bottom = stroboscopic_orbit({std::sqrt(32.0), 0.0, 0.0}, 2000, driven);
    CHECK(bottom.size() == 2001);
    CHECK_FALSE(visits_both_wells(bottom));
    const auto sep = stroboscopic_orbit({0.1, 0.0, 0.0}, 2000, driven);
    CHECK(visits_both_wells(sep));
    CHECK_THROWS_AS(stroboscopic_orbit({0.1, 0.0, 1.0}, 10, driven), InvalidArgument);
}

TEST_CASE("undriven portrait points stay on their energy contour") {
    const auto seeds = seed_grid(-7.0, 7.0, 5, -0.5, 0.5, 3);
    CHECK(seeds.size() == 15);
    const auto pts = portrait(seeds, 50, undriven, 2);
    CHECK(pts.size() == 15 * 51);
    for (const PortraitPoint& p : pts) {
        const double e0 = classical_energy(seeds[p.seed], 4.0);
        CHECK(std::abs(classical_energy({p.x, p.p, 0.0}, 4.0) - e0) < 1e-8);
    }
    std::ostringstream os;
    write_portrait_csv(os, pts);
    CHECK(os.str().rfind("seed_id,n,x,p\n0,0,", 0) == 0);
}

TEST_CASE("portraits do not depend on the worker count") {
    const auto seeds = seed_grid(-6.0, 6.0, 4, -0.4, 0.4, 2);
    const auto a = portrait(seeds, 30, driven, 1);
    const auto b = portrait(seeds, 30, driven, 3);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].x == b[i].x);
        CHECK(a[i].p == b[i].p);
    }
}

TEST_CASE("escaping orbits raise") {
    ClassicalOptions o;
    o.escape_bound = 10.0;
    CHECK_THROWS_AS(flow({0.0, 8.0, 0.0}, 10 * driven.period(), driven, o), NumericalError);
}
