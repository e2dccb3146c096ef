#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dwfloquet/basis.hpp"
#include "dwfloquet/errors.hpp"
#include "dwfloquet/sweep.hpp"

#include <cmath>
#include <sstream>

using namespace dwf;

namespace {

const H0Spectrum& h0() {
    static const H0Spectrum s = solve_h0(SystemParams{});
    return s;
}

const SystemParams base = SystemParams::from_rescaled(4.0, 0.0, 0.982);

} // namespace

TEST_CASE("a single undriven point labels states in mean-energy order") {
    SweepOptions o;
    o.track = 10;
    const SweepResult r = sweep_amplitude(h0(), base, {0.0}, o);
    REQUIRE(r.points.size() == 1);
    CHECK(r.labels == 10);
    for (int l = 0; l < 10; ++l) {
        CHECK(r.points[0].state_of_label[l] == l);
        CHECK(r.points[0].labeled(l).mean_energy == doctest::Approx(h0().energies(l)));
    }
}

TEST_CASE("link_states maps a spectrum onto itself") {
    SystemParams p = base;
    p.set_F(0.012);
    const FloquetSpectrum f = solve_floquet(h0(), p, 16);
    std::vector<const FloquetState*> prev;
    for (int i = 9; i >= 0; --i) prev.push_back(&f.states[i]);
    std::vector<int> assigned;
    std::vector<double> ov;
    link_states(prev, f, 2, assigned, ov);
    for (int l = 0; l < 10; ++l) {
        CHECK(assigned[l] == 9 - l);
        CHECK(ov[l] == doctest::Approx(1.0));
    }
}

TEST_CASE("labels follow states through a short sweep") {
    SweepOptions o;
    o.track = 12;
    const SweepResult r = sweep_amplitude(h0(), base, {0.0120, 0.0122, 0.0124}, o);
    REQUIRE(r.points.size() >= 3);
    for (std::size_t i = 1; i < r.points.size(); ++i) {
        CHECK_FALSE(r.points[i].continuity_gap);
        for (int l = 0; l < r.labels; ++l) {
            CHECK(r.points[i].link_overlap[l] >= o.min_overlap);
            // parity is conserved along a label
            CHECK(r.points[i].labeled(l).parity == r.points[0].labeled(l).parity);
        }
    }
    // the ground doublet keeps labels 0 and 1 away from crossings
    CHECK(r.points.back().labeled(0).parity != r.points.back().labeled(1).parity);

    std::ostringstream os;
    write_sweep_csv(os, r);
    CHECK(os.str().rfind("F,label,parity,quasienergy,mean_energy\n", 0) == 0);
}

TEST_CASE("grid validation") {
    CHECK_THROWS_AS(sweep_amplitude(h0(), base, {}), InvalidArgument);
    CHECK_THROWS_AS(sweep_amplitude(h0(), base, {0.02, 0.01}), InvalidArgument);
    CHECK_THROWS_AS(sweep_amplitude(h0(), base, {-0.01, 0.01}), InvalidArgument);
    SweepOptions o;
    o.track = 0;
    CHECK_THROWS_AS(sweep_amplitude(h0(), base, {0.01}, o), InvalidArgument);
}

TEST_CASE("crossings json is well formed for an empty list") {
    CHECK(crossings_to_json({}).find('[') != std::string::npos);
}
