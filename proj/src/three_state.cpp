#include "dwfloquet/three_state.hpp"

#include "dwfloquet/errors.hpp"
#include "io_internal.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/LevenbergMarquardt>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

namespace dwf {

void ThreeStateParams::validate() const {
    if (!(delta > 0.0)) throw InvalidArgument("three-state: Delta must be > 0");
    if (!(b > 0.0)) throw InvalidArgument("three-state: b must be > 0");
    if (!std::isfinite(delta_c) || !std::isfinite(eps_r)) throw InvalidArgument("three-state: non-finite parameters");
}

std::vector<std::string> ThreeStateParams::hierarchy_warnings(double omega) const {
    std::vector<std::string> w;
    if (!(delta < b)) w.push_back("Delta is not small compared to b");
    if (!(b < omega)) w.push_back("b is not small compared to omega");
    const double dr = std::abs(E_r_odd - E_r_even);
    const double dc = std::min(std::abs(E_c - E_r_even), std::abs(E_c - E_r_odd));
    if (!(dr < dc)) w.push_back("chaotic mean energy is not well separated from the doublet");
    return w;
}

ThreeStateSpectrum eigensystem(const ThreeStateParams& p) {
    p.validate();
    ThreeStateSpectrum s;
    const double r = std::hypot(p.delta_c, 2.0 * p.b);
    s.eps0 = p.eps_r;
    s.eps1 = p.eps_r + p.delta + 0.5 * p.delta_c - 0.5 * r;
    s.eps2 = p.eps_r + p.delta + 0.5 * p.delta_c + 0.5 * r;
    s.mixing_angle = 0.5 * std::atan2(2.0 * p.b, p.delta_c);
    return s;
}

std::array<double, 3> mean_energies(const ThreeStateParams& p, double mixing_angle) {
    const double c2 = std::cos(mixing_angle) * std::cos(mixing_angle);
    const double s2 = std::sin(mixing_angle) * std::sin(mixing_angle);
    return {p.E_r_even, p.E_r_odd * c2 + p.E_c * s2, p.E_r_odd * s2 + p.E_c * c2};
}

TunnelProbabilities tunneling_probabilities(const ThreeStateParams& p, double t) {
    if (t < 0.0) throw InvalidArgument("three-state: t must be >= 0");
    const ThreeStateSpectrum s = eigensystem(p);
    return tunneling_probabilities(s.eps1 - s.eps0, s.eps2 - s.eps0, s.mixing_angle, t);
}

TunnelProbabilities tunneling_probabilities(double e1, double e2, double mixing_angle, double t) {
    if (t < 0.0) throw InvalidArgument("three-state: t must be >= 0");
    const double c2 = std::cos(mixing_angle) * std::cos(mixing_angle);
    const double s2 = std::sin(mixing_angle) * std::sin(mixing_angle);
    const double beat = (std::cos((e1 - e2) * t) - 1.0) * c2 * s2;
    const double osc = std::cos(e1 * t) * c2 + std::cos(e2 * t) * s2;
    TunnelProbabilities out;
    out.right = 0.5 * (1.0 + osc + beat);
    out.left = 0.5 * (1.0 - osc + beat);
    out.chaotic = -beat;
    return out;
}

TunnelProbabilities propagate_numerically(const ThreeStateParams& p, double t) {
    p.validate();
    if (t < 0.0) throw InvalidArgument("three-state: t must be >= 0");
    // basis: regular even, regular odd, chaotic odd; energies relative to eps_r
    Eigen::Matrix3cd H = Eigen::Matrix3cd::Zero();
    H(1, 1) = p.delta;
    H(1, 2) = H(2, 1) = p.b;
    H(2, 2) = p.delta + p.delta_c;
    const Eigen::Matrix3cd U = (std::complex<double>(0.0, -t) * H).exp();
    const Eigen::Vector3cd psi0 = Eigen::Vector3cd(1.0, 1.0, 0.0) / std::sqrt(2.0);
    const Eigen::Vector3cd psi = U * psi0;
    const Eigen::Vector3cd right = Eigen::Vector3cd(1.0, 1.0, 0.0) / std::sqrt(2.0);
    const Eigen::Vector3cd left = Eigen::Vector3cd(1.0, -1.0, 0.0) / std::sqrt(2.0);
    TunnelProbabilities out;
    out.right = std::norm(right.dot(psi));
    out.left = std::norm(left.dot(psi));
    out.chaotic = std::norm(psi(2));
    return out;
}

std::array<double, 3> beat_frequencies(const ThreeStateParams& p) {
    const ThreeStateSpectrum s = eigensystem(p);
    return {std::abs(s.eps1 - s.eps0), std::abs(s.eps2 - s.eps0), std::abs(s.eps2 - s.eps1)};
}

int count_distinct(std::vector<double> freqs, double rel_tol) {
    std::sort(freqs.begin(), freqs.end());
    int n = 0;
    double last = 0.0;
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        if (i == 0 || std::abs(freqs[i] - last) > rel_tol * std::max(std::abs(freqs[i]), std::abs(last))) {
            ++n;
            last = freqs[i];
        }
    }
    return n;
}

CrossingCenter crossing_center(double delta, double b, double scan_width, int scan_points) {
    if (scan_points < 3) throw InvalidArgument("crossing_center: need at least 3 scan points");
    ThreeStateParams p;
    p.delta = delta;
    p.b = b;
    // eps1 + eps2 (relative to eps0) changes sign where |eps1| = |eps2|
    auto g = [&](double dc) {
        p.delta_c = dc;
        const ThreeStateSpectrum s = eigensystem(p);
        return (s.eps1 - s.eps0) + (s.eps2 - s.eps0);
    };
    double lo = 0.0, hi = 0.0;
    bool found = false;
    double prev_x = -scan_width * b, prev_g = g(prev_x);
    for (int i = 1; i < scan_points && !found; ++i) {
        const double x = -scan_width * b + 2.0 * scan_width * b * i / (scan_points - 1);
        const double gx = g(x);
        if ((gx > 0) != (prev_g > 0)) {
            lo = prev_x;
            hi = x;
            found = true;
        }
        prev_x = x;
        prev_g = gx;
    }
    if (!found) throw NumericalError("crossing_center: no two-frequency point inside the scan");
    double glo = g(lo);
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if ((gm > 0) == (glo > 0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    CrossingCenter c;
    c.numerical = 0.5 * (lo + hi);
    c.stated = -0.5 * delta;
    p.delta_c = c.numerical;
    auto f = beat_frequencies(p);
    c.count_at_center = count_distinct({f.begin(), f.end()}, 1e-6);
    p.delta_c = c.stated;
    f = beat_frequencies(p);
    c.count_off_center = count_distinct({f.begin(), f.end()}, 1e-6);
    return c;
}

namespace {

struct BranchFit : Eigen::DenseFunctor<double> {
    const std::vector<double>& u;
    const std::vector<double>& e1;
    const std::vector<double>& e2;

    BranchFit(const std::vector<double>& u_, const std::vector<double>& e1_, const std::vector<double>& e2_)
        : Eigen::DenseFunctor<double>(4, static_cast<int>(2 * u_.size())), u(u_), e1(e1_), e2(e2_) {}

    // x = (Delta, b, dc0, slope), all in scaled units
    int operator()(const InputType& x, ValueType& f) const {
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double dc = x(2) + x(3) * u[i];
            const double r = std::hypot(dc, 2.0 * x(1));
            f(2 * i) = x(0) + 0.5 * dc - 0.5 * r - e1[i];
            f(2 * i + 1) = x(0) + 0.5 * dc + 0.5 * r - e2[i];
        }
        return 0;
    }

    int df(const InputType& x, JacobianType& J) const {
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double dc = x(2) + x(3) * u[i];
            const double r = std::max(std::hypot(dc, 2.0 * x(1)), 1e-300);
            const double d1 = 0.5 - 0.5 * dc / r;
            const double d2 = 0.5 + 0.5 * dc / r;
            J(2 * i, 0) = 1.0;
            J(2 * i, 1) = -2.0 * x(1) / r;
            J(2 * i, 2) = d1;
            J(2 * i, 3) = d1 * u[i];
            J(2 * i + 1, 0) = 1.0;
            J(2 * i + 1, 1) = 2.0 * x(1) / r;
            J(2 * i + 1, 2) = d2;
            J(2 * i + 1, 3) = d2 * u[i];
        }
        return 0;
    }
};

} // namespace

ThreeStateFit fit_from_spectrum(const std::vector<double>& F, const std::vector<double>& eps1,
                                const std::vector<double>& eps2) {
    const std::size_t n = F.size();
    if (n < 5 || eps1.size() != n || eps2.size() != n) {
        throw InvalidArgument("fit_from_spectrum: need at least 5 samples of both branches");
    }
    const auto [fmin_it, fmax_it] = std::minmax_element(F.begin(), F.end());
    const double F_ref = 0.5 * (*fmin_it + *fmax_it);
    const double width = 0.5 * (*fmax_it - *fmin_it);
    if (!(width > 0.0)) throw InvalidArgument("fit_from_spectrum: F window has zero width");

    double escale = 0.0;
    double min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        escale = std::max({escale, std::abs(eps1[i]), std::abs(eps2[i])});
        min_gap = std::min(min_gap, eps2[i] - eps1[i]);
    }
    if (!(min_gap > 0.0)) throw InvalidArgument("fit_from_spectrum: branches must satisfy eps2 > eps1");

    std::vector<double> u(n), y1(n), y2(n);
    for (std::size_t i = 0; i < n; ++i) {
        u[i] = (F[i] - F_ref) / width;
        y1[i] = eps1[i] / escale;
        y2[i] = eps2[i] / escale;
    }

    // initial guess: gap^2 is quadratic in u, the branch mean is linear
    Eigen::MatrixXd A(n, 3);
    Eigen::VectorXd g2(n), mean(n);
    for (std::size_t i = 0; i < n; ++i) {
        A(i, 0) = u[i] * u[i];
        A(i, 1) = u[i];
        A(i, 2) = 1.0;
        g2(i) = (y2[i] - y1[i]) * (y2[i] - y1[i]);
        mean(i) = 0.5 * (y1[i] + y2[i]);
    }
    const Eigen::Vector3d q = A.colPivHouseholderQr().solve(g2);
    const double umin = (*fmin_it - F_ref) / width, umax = (*fmax_it - F_ref) / width;
    if (!(q(0) > 0.0)) throw NumericalError("fit_from_spectrum: no avoided crossing in window");
    const double uc = -q(1) / (2.0 * q(0));
    if (uc <= umin || uc >= umax) throw NumericalError("fit_from_spectrum: no avoided crossing in window");
    const Eigen::Vector2d m = A.rightCols(2).colPivHouseholderQr().solve(mean);

    double slope = std::sqrt(q(0));
    if (m(0) < 0.0) slope = -slope;
    const double b4 = q(2) - q(1) * q(1) / (4.0 * q(0));
    Eigen::VectorXd x(4);
    x(1) = b4 > 0.0 ? 0.5 * std::sqrt(b4) : 0.5 * min_gap / escale;
    x(2) = -slope * uc;
    x(3) = slope;
    x(0) = m(1) - 0.5 * x(2);

    BranchFit functor(u, y1, y2);
    Eigen::LevenbergMarquardt<BranchFit> lm(functor);
    lm.setXtol(1e-15);
    lm.setFtol(1e-15);
    lm.setMaxfev(2000);
    lm.minimize(x);

    Eigen::VectorXd res(2 * n);
    functor(x, res);

    ThreeStateFit fit;
    fit.delta = x(0) * escale;
    fit.b = std::abs(x(1)) * escale;
    fit.dc0 = x(2) * escale;
    fit.dc_slope = x(3) * escale / width;
    fit.F_ref = F_ref;
    fit.min_gap = min_gap;
    fit.rms_residual = std::sqrt(res.squaredNorm() / static_cast<double>(2 * n)) * escale;
    if (fit.rms_residual > 0.1 * min_gap) {
        std::ostringstream os;
        os << "window not described by three-state model (rms residual " << fit.rms_residual << ", gap " << min_gap
           << ")";
        throw NumericalError(os.str());
    }
    return fit;
}

void write_tunnel_csv(std::ostream& os, const std::vector<double>& t, const std::vector<TunnelProbabilities>& p) {
    os << "t,P_R,P_L,P_c\n";
    for (std::size_t i = 0; i < t.size() && i < p.size(); ++i) {
        os << detail::fmt(t[i]) << ',' << detail::fmt(p[i].right) << ',' << detail::fmt(p[i].left) << ','
           << detail::fmt(p[i].chaotic) << '\n';
    }
}

} // namespace dwf
