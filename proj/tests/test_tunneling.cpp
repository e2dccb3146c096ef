#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dwfloquet/basis.hpp"
#include "dwfloquet/dissipation.hpp"
#include "dwfloquet/errors.hpp"
#include "dwfloquet/floquet.hpp"
#include "dwfloquet/signal.hpp"
#include "dwfloquet/tunneling.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

using namespace dwf;

namespace {

const double omega = 0.982;

const H0Spectrum& h0() {
    static const H0Spectrum s = solve_h0(SystemParams{});
    return s;
}

const FloquetSpectrum& driven(double F) {
    static std::map<double, FloquetSpectrum> cache;
    auto it = cache.find(F);
    if (it == cache.end())
        it = cache.emplace(F, solve_floquet(h0(), SystemParams::from_rescaled(4.0, F, omega), 16)).first;
    return it->second;
}

std::vector<double> linspace(double t1, int n) {
    std::vector<double> t(n);
    for (int i = 0; i < n; ++i) t[i] = t1 * i / (n - 1);
    return t;
}

} // namespace

TEST_CASE("off the crossing the chaotic partner barely mixes") {
    const CrossingTriple t = find_crossing_triple(driven(0.0145), h0().x);
    CHECK(t.spectator == 0);
    CHECK(driven(0.0145).states[t.lower].parity != driven(0.0145).states[0].parity);
    CHECK(driven(0.0145).states[t.upper].parity != driven(0.0145).states[0].parity);
    CHECK(t.e1 < t.e2);
    CHECK(std::pow(std::sin(t.mixing_angle), 2) < 0.1);
    CHECK(std::abs(t.x_right - std::sqrt(32.0)) < 0.15 * std::sqrt(32.0));
    // reference states are orthonormal
    CHECK(t.right.dot(t.left) == doctest::Approx(0.0).scale(1.0));
    CHECK(t.right.dot(t.chaotic) == doctest::Approx(0.0).scale(1.0));
    CHECK(t.left.dot(t.chaotic) == doctest::Approx(0.0).scale(1.0));
    CHECK(t.right.norm() == doctest::Approx(1.0));
}

TEST_CASE("near F = 0.015029 the pair is strongly mixed") {
    const CrossingTriple t = find_crossing_triple(driven(0.015029), h0().x);
    const double s2 = std::pow(std::sin(t.mixing_angle), 2);
    MESSAGE("sin^2 beta " << s2 << ", e1 " << t.e1 << ", e2 " << t.e2);
    CHECK(s2 > 0.3);
    CHECK(s2 < 0.7);
    CHECK(t.e1 < 0.0);
    CHECK(t.e2 > 0.0);
    const ThreeStateParams p = t.params();
    // model parameters reproduce the numerical branches
    const ThreeStateSpectrum s = eigensystem(p);
    CHECK(s.eps1 == doctest::Approx(t.e1).epsilon(1e-9));
    CHECK(s.eps2 == doctest::Approx(t.e2).epsilon(1e-9));
    CHECK(s.mixing_angle == doctest::Approx(t.mixing_angle).epsilon(1e-9));
    CHECK(p.delta > 0.0);
    CHECK(p.delta < p.b);
}

TEST_CASE("coherent tunneling agrees with the closed form") {
    const CrossingTriple t = find_crossing_triple(driven(0.015029), h0().x);
    const std::vector<double> times = linspace(2e5, 101);
    const auto num = coherent_tunneling(t, times);
    for (std::size_t i = 0; i < times.size(); ++i) {
        const TunnelProbabilities cf = tunneling_probabilities(t.e1, t.e2, t.mixing_angle, times[i]);
        CHECK(num[i].right == doctest::Approx(cf.right).scale(1.0).epsilon(1e-12));
        CHECK(num[i].left == doctest::Approx(cf.left).scale(1.0).epsilon(1e-12));
        CHECK(num[i].chaotic == doctest::Approx(cf.chaotic).scale(1.0).epsilon(1e-12));
    }
    CHECK_THROWS_AS(coherent_tunneling(t, {-1.0}), InvalidArgument);
}

TEST_CASE("undamped master equation reproduces coherent tunneling") {
    const CrossingTriple t = find_crossing_triple(driven(0.015029), h0().x);
    const int M = 12;
    const std::vector<FloquetState> st(driven(0.015029).states.begin(), driven(0.015029).states.begin() + M);
    BathParams b;
    b.gamma = 0.0;
    const DissipativeKernel k = assemble_rwa_kernel(st, x_fourier_coefficients(st, h0().x), b, omega);
    const std::vector<double> times = linspace(1e5, 21);
    const Trajectory tr = propagate_rwa(k, localized_density_matrix(t, M), times);
    const auto proj = project_trajectory(t, tr);
    const auto coh = coherent_tunneling(t, times);
    for (std::size_t i = 0; i < times.size(); ++i) {
        CHECK(std::abs(proj[i].right - coh[i].right) < 1e-9);
        CHECK(std::abs(proj[i].chaotic - coh[i].chaotic) < 1e-9);
        CHECK(proj[i].purity == doctest::Approx(1.0).epsilon(1e-10));
    }
    CHECK_THROWS_AS(localized_density_matrix(t, 2), InvalidArgument);

    std::ostringstream os;
    write_trajectory_csv(os, proj);
    CHECK(os.str().rfind("t,P_R,P_L,P_c,purity\n0,", 0) == 0);
}

TEST_CASE("spectral peaks recover frequencies and amplitudes of a cosine sum") {
    const double w1 = 1.3e-4, w2 = 2.9e-4;
    const double dt = 200.0;
    std::vector<double> y(4096);
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double t = dt * i;
        y[i] = 0.3 + 0.5 * std::cos(w1 * t) + 0.125 * std::cos(w2 * t + 0.4);
    }
    const auto peaks = spectral_peaks(y, dt);
    REQUIRE(peaks.size() == 2);
    CHECK(peaks[0].frequency == doctest::Approx(w1).epsilon(1e-4));
    CHECK(peaks[1].frequency == doctest::Approx(w2).epsilon(1e-4));
    CHECK(peaks[0].amplitude == doctest::Approx(0.5).epsilon(2e-2));
    CHECK(peaks[1].amplitude == doctest::Approx(0.125).epsilon(2e-2));

    std::vector<double> flat(256, 1.0);
    CHECK(spectral_peaks(flat, 1.0).empty());
}
