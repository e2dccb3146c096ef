#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dwfloquet/basis.hpp"
#include "dwfloquet/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace dwf;

namespace {

// Sinc-function grid on [-L, L] with n points (n odd, x = 0 on the grid), split
// by parity. The splitting follows from the flux through x = 0,
// E_odd - E_even = psi_e(0) psi_o'(0) / (2 int_0^inf psi_e psi_o dx),
// which avoids subtracting two nearly equal eigenvalues.
struct GridOracle {
    double splitting = 0.0;
    double e_even = 0.0;
    double x01 = 0.0; // <psi_e|x|psi_o>
};

GridOracle grid_oracle(double D, int n, double L) {
    const int m = n / 2;
    const double dx = 2.0 * L / (n - 1);
    auto T = [&](int i, int j) {
        const int d = i - j;
        if (d == 0) return std::numbers::pi * std::numbers::pi / 3.0 / (2.0 * dx * dx);
        return 2.0 * (d % 2 == 0 ? 1.0 : -1.0) / (static_cast<double>(d) * d) / (2.0 * dx * dx);
    };
    auto V = [&](int i) {
        const double x = -L + i * dx;
        return -0.25 * x * x + x * x * x * x / (64.0 * D);
    };
    auto H = [&](int i, int j) { return T(i, j) + (i == j ? V(i) : 0.0); };

    // even block: e_m and (e_{m+j} + e_{m-j})/sqrt2; odd block: (e_{m+j} - e_{m-j})/sqrt2
    Eigen::MatrixXd He(m + 1, m + 1), Ho(m, m);
    He(0, 0) = H(m, m);
    for (int j = 1; j <= m; ++j) He(0, j) = He(j, 0) = std::sqrt(2.0) * H(m, m + j);
    for (int a = 1; a <= m; ++a)
        for (int b = 1; b <= m; ++b) {
            He(a, b) = H(m + a, m + b) + H(m + a, m - b);
            Ho(a - 1, b - 1) = H(m + a, m + b) - H(m + a, m - b);
        }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> se(He), so(Ho);
    const Eigen::VectorXd ce = se.eigenvectors().col(0);
    const Eigen::VectorXd co = so.eigenvectors().col(0);

    const double psi_e0 = ce(0) / std::sqrt(dx);
    double dpo = 0.0, overlap = 0.0, x01 = 0.0;
    for (int j = 1; j <= m; ++j) {
        const double cr = co(j - 1) / std::sqrt(2.0); // odd coefficient at m + j, minus that at m - j
        const double sgn = j % 2 == 0 ? 1.0 : -1.0;
        dpo += 2.0 * cr * sgn / j;
        overlap += ce(j) / std::sqrt(2.0) * cr;
        x01 += 2.0 * (j * dx) * ce(j) / std::sqrt(2.0) * cr;
    }
    dpo = -dpo / (dx * std::sqrt(dx));
    GridOracle g;
    g.splitting = psi_e0 * dpo / (2.0 * overlap);
    g.e_even = se.eigenvalues()(0);
    g.x01 = x01;
    return g;
}

const H0Spectrum& default_spectrum() {
    static const H0Spectrum s = solve_h0(SystemParams{});
    return s;
}

} // namespace

TEST_CASE("potential minima sit at +-sqrt(8D), depth D below the barrier top") {
    const double D = 4.0;
    const double xm = SystemParams{}.well_minimum();
    CHECK(xm == doctest::Approx(std::sqrt(32.0)));
    CHECK(std::abs(potential_gradient(xm, D)) < 1e-14);
    CHECK(std::abs(potential_gradient(-xm, D)) < 1e-14);
    CHECK(potential(xm, D) == doctest::Approx(-D));
    CHECK(potential(0.0, D) == 0.0);
}

TEST_CASE("about four doublets below the barrier top for D = 4") {
    const H0Spectrum& s = default_spectrum();
    int below = 0;
    for (int k = 0; k < s.size(); ++k) below += s.energies(k) < 0.0;
    CHECK(below >= 8);
    CHECK(below <= 10);
    // four tunnel doublets; the pair just under the top is already strongly split
    for (int k = 0; k < 8; k += 2) {
        CHECK(s.energies(k + 1) - s.energies(k) < 0.1 * (s.energies(k + 2) - s.energies(k + 1)));
    }
    CHECK(s.energies(9) - s.energies(8) > 0.1 * (s.energies(10) - s.energies(9)));
}

TEST_CASE("ground splitting agrees with an independent grid discretization") {
    const H0Spectrum& s = default_spectrum();
    const GridOracle g = grid_oracle(4.0, 2001, 12.0);
    const double split = s.energies(1) - s.energies(0);
    MESSAGE("basis splitting " << split << ", grid " << g.splitting);
    CHECK(std::abs(split - g.splitting) < 5e-7 * g.splitting);
    CHECK(s.energies(0) == doctest::Approx(g.e_even).epsilon(1e-10));
    // |x01| is close to the well distance and matches the grid eigenfunctions
    CHECK(std::abs(std::abs(s.x(0, 1)) - std::sqrt(32.0)) < 0.05 * std::sqrt(32.0));
    CHECK(std::abs(s.x(0, 1)) == doctest::Approx(std::abs(g.x01)).epsilon(1e-6));
}

TEST_CASE("parities alternate and x obeys the selection rule and symmetry") {
    const H0Spectrum& s = default_spectrum();
    const Eigen::MatrixXd x = position_matrix(s);
    for (int k = 0; k < s.size(); ++k) CHECK(s.parities(k) == (k % 2 == 0 ? 1 : -1));
    double asym = 0.0, forbidden = 0.0;
    for (int i = 0; i < s.size(); ++i)
        for (int j = 0; j < s.size(); ++j) {
            asym = std::max(asym, std::abs(x(i, j) - x(j, i)));
            if (s.parities(i) == s.parities(j)) forbidden = std::max(forbidden, std::abs(x(i, j)));
        }
    CHECK(asym < 1e-12);
    CHECK(forbidden == 0.0);
    for (int k = 0; k + 1 < s.size(); ++k) CHECK(s.energies(k + 1) > s.energies(k));
}

TEST_CASE("completeness of x within the retained states for k <= K/2") {
    const H0Spectrum& s = default_spectrum();
    for (int k = 0; k <= s.size() / 2; ++k) {
        const double sum = s.x.row(k).squaredNorm();
        CHECK(std::abs(sum - s.x2_diag(k)) < 1e-6 * s.x2_diag(k));
    }
}

TEST_CASE("energies converge under a 50 percent larger computational basis") {
    CHECK(h0_convergence(SystemParams{}, 300, 60) < 1e-10);
}

TEST_CASE("truncation errors are explicit") {
    CHECK_THROWS_AS(solve_h0(SystemParams{}, 100, 60), InvalidArgument);
    CHECK_THROWS_AS(solve_h0(SystemParams{}, 50, 60), InvalidArgument);
    CHECK_THROWS_AS(solve_h0(SystemParams{}, 300, 6), InvalidArgument);
    SystemParams bad;
    bad.D = -1.0;
    CHECK_THROWS_AS(solve_h0(bad), InvalidArgument);
}

TEST_CASE("F and S stay consistent") {
    SystemParams p = SystemParams::from_rescaled(4.0, 0.015029, 0.982);
    CHECK(p.S == doctest::Approx(0.015029 * std::sqrt(32.0)));
    CHECK(p.F() == doctest::Approx(0.015029));
    p.set_F(0.01);
    CHECK(p.S == doctest::Approx(0.01 * std::sqrt(32.0)));
}

TEST_CASE("h0 csv columns") {
    std::ostringstream os;
    write_h0_csv(os, default_spectrum());
    CHECK(os.str().rfind("k,energy,parity\n0,", 0) == 0);
}
