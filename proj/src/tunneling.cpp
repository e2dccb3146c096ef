#include "dwfloquet/tunneling.hpp"

#include "dwfloquet/errors.hpp"
#include "io_internal.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <ostream>

namespace dwf {

ThreeStateParams CrossingTriple::params() const {
    ThreeStateParams p;
    p.eps_r = 0.0;
    const double r = e2 - e1;
    p.delta_c = r * std::cos(2.0 * mixing_angle);
    p.b = 0.5 * r * std::sin(2.0 * mixing_angle);
    p.delta = 0.5 * (e1 + e2) - 0.5 * p.delta_c;
    p.E_r_even = E_r;
    p.E_r_odd = E_r;
    p.E_c = E_c;
    return p;
}

CrossingTriple find_crossing_triple(const FloquetSpectrum& spectrum, const Eigen::MatrixXd& x) {
    if (spectrum.size() < 3) throw InvalidArgument("find_crossing_triple: need at least three states");
    const double omega = spectrum.params.omega;
    CrossingTriple t;
    t.spectator = 0;
    const FloquetState& s = spectrum.states[0];

    std::vector<std::pair<double, int>> cand;
    for (int i = 1; i < spectrum.size(); ++i) {
        const FloquetState& st = spectrum.states[i];
        if (st.parity == s.parity) continue;
        cand.push_back({std::abs(reduce_quasienergy(st.quasienergy - s.quasienergy, omega)), i});
    }
    if (cand.size() < 2) throw NumericalError("find_crossing_triple: fewer than two opposite-parity states");
    std::partial_sort(cand.begin(), cand.begin() + 2, cand.end());
    int i1 = cand[0].second, i2 = cand[1].second;
    double e1 = reduce_quasienergy(spectrum.states[i1].quasienergy - s.quasienergy, omega);
    double e2 = reduce_quasienergy(spectrum.states[i2].quasienergy - s.quasienergy, omega);
    if (e1 > e2) {
        std::swap(i1, i2);
        std::swap(e1, e2);
    }
    t.lower = i1;
    t.upper = i2;
    t.e1 = e1;
    t.e2 = e2;
    t.E_r = s.mean_energy;
    const double E1 = spectrum.states[i1].mean_energy;
    const double E2 = spectrum.states[i2].mean_energy;
    t.E_c = E1 + E2 - t.E_r;
    const double denom = t.E_c - t.E_r;
    if (std::abs(denom) < 1e-12) throw NumericalError("find_crossing_triple: mean energies do not separate the pair");
    const double s2 = std::clamp((E1 - t.E_r) / denom, 0.0, 1.0);
    t.mixing_angle = std::asin(std::sqrt(s2));

    Eigen::Matrix3d X0;
    const std::array<int, 3> idx = t.indices();
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) X0(a, b) = position_at_zero(spectrum.states[idx[a]], spectrum.states[idx[b]], x);

    const double c = std::cos(t.mixing_angle), sn = std::sin(t.mixing_angle);
    double best = -std::numeric_limits<double>::infinity();
    for (double sg : {1.0, -1.0}) {
        for (double sr : {1.0, -1.0}) {
            const Eigen::Vector3d vr(0.0, c, sg * sn);
            const Eigen::Vector3d v = (Eigen::Vector3d(1.0, 0.0, 0.0) + sr * vr) / std::sqrt(2.0);
            const double xv = v.dot(X0 * v);
            if (xv > best + 1e-12) {
                best = xv;
                t.right = v;
                t.left = (Eigen::Vector3d(1.0, 0.0, 0.0) - sr * vr) / std::sqrt(2.0);
                t.chaotic = Eigen::Vector3d(0.0, -sg * sn, c);
            }
        }
    }
    t.x_right = best;
    if (!(best > 1e-8)) throw NumericalError("states not well localized");
    return t;
}

std::vector<TunnelProbabilities> coherent_tunneling(const CrossingTriple& triple, const std::vector<double>& times) {
    std::vector<TunnelProbabilities> out;
    out.reserve(times.size());
    const Eigen::Vector3d e(0.0, triple.e1, triple.e2);
    for (double t : times) {
        if (t < 0.0) throw InvalidArgument("coherent_tunneling: t must be >= 0");
        Eigen::Vector3cd a;
        for (int k = 0; k < 3; ++k) a(k) = triple.right(k) * std::polar(1.0, -e(k) * t);
        TunnelProbabilities p;
        p.right = std::norm(triple.right.cast<std::complex<double>>().dot(a));
        p.left = std::norm(triple.left.cast<std::complex<double>>().dot(a));
        p.chaotic = std::norm(triple.chaotic.cast<std::complex<double>>().dot(a));
        out.push_back(p);
    }
    return out;
}

namespace {

Eigen::VectorXcd embed(const CrossingTriple& triple, const Eigen::Vector3d& v, int M) {
    const std::array<int, 3> idx = triple.indices();
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(M);
    for (int k = 0; k < 3; ++k) {
        if (idx[k] < 0 || idx[k] >= M) throw InvalidArgument("crossing state lies outside the retained states");
        out(idx[k]) = v(k);
    }
    return out;
}

} // namespace

Eigen::MatrixXcd localized_density_matrix(const CrossingTriple& triple, int M) {
    const Eigen::VectorXcd r = embed(triple, triple.right, M);
    return r * r.adjoint();
}

std::vector<TunnelSample> project_trajectory(const CrossingTriple& triple, const Trajectory& tr) {
    std::vector<TunnelSample> out;
    if (tr.states.empty()) return out;
    const int M = static_cast<int>(tr.states.front().rows());
    const Eigen::VectorXcd r = embed(triple, triple.right, M);
    const Eigen::VectorXcd l = embed(triple, triple.left, M);
    const Eigen::VectorXcd c = embed(triple, triple.chaotic, M);
    for (std::size_t i = 0; i < tr.states.size(); ++i) {
        const Eigen::MatrixXcd& s = tr.states[i];
        TunnelSample ts;
        ts.t = tr.times[i];
        ts.right = r.dot(s * r).real();
        ts.left = l.dot(s * l).real();
        ts.chaotic = c.dot(s * c).real();
        ts.purity = purity(s);
        out.push_back(ts);
    }
    return out;
}

void write_trajectory_csv(std::ostream& os, const std::vector<TunnelSample>& samples) {
    os << "t,P_R,P_L,P_c,purity\n";
    for (const TunnelSample& s : samples) {
        os << detail::fmt(s.t) << ',' << detail::fmt(s.right) << ',' << detail::fmt(s.left) << ','
           << detail::fmt(s.chaotic) << ',' << detail::fmt(s.purity) << '\n';
    }
}

} // namespace dwf
