#include "dwfloquet/dissipation.hpp"

#include "dwfloquet/errors.hpp"
#include "io_internal.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <complex>
#include <ostream>
#include <sstream>

namespace dwf {

using cd = std::complex<double>;

namespace {

Eigen::VectorXcd vec(const Eigen::MatrixXcd& s) {
    Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = s;
    return Eigen::Map<const Eigen::VectorXcd>(rm.data(), rm.size());
}

Eigen::MatrixXcd unvec(const Eigen::VectorXcd& v, int M) {
    return Eigen::Map<const Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(v.data(), M, M);
}

// L += kron(A, B) for square M x M blocks, row-major vec convention
template <class MA, class MB>
void add_kron(Eigen::MatrixXcd& L, const MA& A, const MB& B, int M, cd scale = 1.0) {
    for (int a = 0; a < M; ++a)
        for (int a2 = 0; a2 < M; ++a2) {
            const cd s = scale * cd(A(a, a2));
            if (s == cd(0.0)) continue;
            L.block(a * M, a2 * M, M, M) += s * B.template cast<cd>();
        }
}

Eigen::MatrixXcd parity_part(const Eigen::MatrixXcd& s, const Eigen::VectorXi& p, int want) {
    Eigen::MatrixXcd out = s;
    for (int a = 0; a < s.rows(); ++a)
        for (int b = 0; b < s.cols(); ++b)
            if (p(a) * p(b) != want) out(a, b) = 0.0;
    return out;
}

void check_sigma(const Eigen::MatrixXcd& s, int M) {
    if (s.rows() != M || s.cols() != M) throw InvalidArgument("density matrix has wrong dimension");
    if ((s - s.adjoint()).cwiseAbs().maxCoeff() > 1e-9) throw InvalidArgument("density matrix is not Hermitian");
    if (std::abs(s.trace() - cd(1.0)) > 1e-9) throw InvalidArgument("density matrix trace differs from 1");
}

} // namespace

void BathParams::validate() const {
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw InvalidArgument("gamma must be >= 0");
    if (!(kT >= 0.0) || !std::isfinite(kT)) throw InvalidArgument("kT must be >= 0");
}

double bath_weight(double e, const BathParams& bath) {
    if (bath.kT == 0.0) return e < 0.0 ? -bath.gamma * e : 0.0;
    if (e == 0.0) return bath.gamma * bath.kT;
    const double z = e / bath.kT;
    if (z > 700.0) return 0.0;
    return bath.gamma * e / std::expm1(z);
}

Eigen::MatrixXcd XCoefficients::at_time(double t, double omega) const {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(M, M);
    for (int n = -nmax; n <= nmax; ++n) out += std::polar(1.0, n * omega * t) * (*this)(n).cast<cd>();
    return out;
}

Eigen::MatrixXd XCoefficients::at_zero() const {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(M, M);
    for (const auto& b : blocks) out += b;
    return out;
}

XCoefficients x_fourier_coefficients(const std::vector<FloquetState>& states, const Eigen::MatrixXd& x) {
    if (states.empty()) throw InvalidArgument("x_fourier_coefficients: no states");
    const Eigen::Index K = x.rows();
    int lo = states.front().first_sideband, hi = states.front().last_sideband();
    for (const FloquetState& s : states) {
        if (s.components.cols() != K) throw InvalidArgument("x_fourier_coefficients: truncation mismatch");
        if (s.sidebands() != states.front().sidebands()) {
            throw InvalidArgument("x_fourier_coefficients: states use different sideband truncations");
        }
        lo = std::min(lo, s.first_sideband);
        hi = std::max(hi, s.last_sideband());
    }
    XCoefficients X;
    X.M = static_cast<int>(states.size());
    X.nmax = hi - lo;
    X.blocks.assign(static_cast<std::size_t>(2 * X.nmax + 1), Eigen::MatrixXd::Zero(X.M, X.M));

    std::vector<Eigen::MatrixXd> cx(states.size());
    for (std::size_t a = 0; a < states.size(); ++a) cx[a] = states[a].components * x;
    for (int a = 0; a < X.M; ++a) {
        for (int b = 0; b < X.M; ++b) {
            // G(ra, rb) = <c^a_{ra} x | c^b_{rb}>, contributes to n = n_a - n_b
            const Eigen::MatrixXd G = cx[a] * states[b].components.transpose();
            for (Eigen::Index ra = 0; ra < G.rows(); ++ra) {
                const int na = states[a].first_sideband + static_cast<int>(ra);
                for (Eigen::Index rb = 0; rb < G.cols(); ++rb) {
                    const int n = na - (states[b].first_sideband + static_cast<int>(rb));
                    X.blocks[static_cast<std::size_t>(n + X.nmax)](a, b) += G(ra, rb);
                }
            }
        }
    }
    double total = 0.0, tail = 0.0;
    for (int n = -X.nmax; n <= X.nmax; ++n) {
        const double w = X(n).squaredNorm();
        total += w;
        if (std::abs(n) >= X.nmax - 1) tail += w;
    }
    X.tail_weight = total > 0.0 ? tail / total : 0.0;
    return X;
}

Eigen::MatrixXcd DissipativeKernel::apply(const Eigen::MatrixXcd& sigma) const {
    return unvec(L * vec(sigma), M);
}

double DissipativeKernel::rate(int to, int from) const {
    return L(to * M + to, from * M + from).real();
}

DissipativeKernel assemble_rwa_kernel(const std::vector<FloquetState>& states, const XCoefficients& X,
                                      const BathParams& bath, double omega, const KernelOptions& opts) {
    bath.validate();
    const int M = static_cast<int>(states.size());
    if (X.M != M) throw InvalidArgument("assemble_rwa_kernel: X does not match the state list");
    DissipativeKernel k;
    k.M = M;
    k.bath = bath;
    k.omega = omega;
    k.quasienergies.resize(M);
    k.mean_energies.resize(M);
    k.parities.resize(M);
    for (int a = 0; a < M; ++a) {
        k.quasienergies(a) = states[a].quasienergy;
        k.mean_energies(a) = states[a].mean_energy;
        k.parities(a) = states[a].parity;
    }
    const int D = M * M;
    k.L = Eigen::MatrixXcd::Zero(D, D);

    // L s = sum_n [A_n s, X_{-n}] + [X_n, s A_n^T], A_n = N_n o X_n
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(M, M);
    for (int n = -X.nmax; n <= X.nmax; ++n) {
        const Eigen::MatrixXd& Xn = X(n);
        Eigen::MatrixXd An(M, M);
        for (int a = 0; a < M; ++a)
            for (int b = 0; b < M; ++b) {
                const double xv = Xn(a, b);
                An(a, b) = xv == 0.0 ? 0.0 : bath_weight(k.quasienergies(a) - k.quasienergies(b) + n * omega, bath) * xv;
            }
        if (An.cwiseAbs().maxCoeff() == 0.0) continue;
        add_kron(k.L, An, Xn, M);
        add_kron(k.L, Xn, An, M);
        B += X(-n) * An;
    }
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(M, M);
    add_kron(k.L, B, I, M, -1.0);
    add_kron(k.L, I, B, M, -1.0);

    if (opts.crude_rwa) {
        for (int r = 0; r < D; ++r) {
            const bool rpop = r / M == r % M;
            for (int c = 0; c < D; ++c) {
                const bool cpop = c / M == c % M;
                if (r != c && !(rpop && cpop)) k.L(r, c) = 0.0;
            }
        }
    }
    for (int a = 0; a < M; ++a)
        for (int b = 0; b < M; ++b) k.L(a * M + b, a * M + b) += cd(0.0, -(k.quasienergies(a) - k.quasienergies(b)));
    return k;
}

PeriodicGenerator::PeriodicGenerator(const std::vector<FloquetState>& states, const XCoefficients& X,
                                     const BathParams& bath, double omega)
    : M_(static_cast<int>(states.size())), nmax_(X.nmax), omega_(omega) {
    bath.validate();
    if (X.M != M_) throw InvalidArgument("PeriodicGenerator: X does not match the state list");
    eps_.resize(M_);
    for (int a = 0; a < M_; ++a) eps_(a) = states[a].quasienergy;
    for (int n = -nmax_; n <= nmax_; ++n) {
        const Eigen::MatrixXd& Xn = X(n);
        Eigen::MatrixXd An(M_, M_);
        for (int a = 0; a < M_; ++a)
            for (int b = 0; b < M_; ++b)
                An(a, b) = Xn(a, b) == 0.0 ? 0.0 : bath_weight(eps_(a) - eps_(b) + n * omega, bath) * Xn(a, b);
        A_.push_back(An);
        X_.push_back(Xn);
    }
}

void PeriodicGenerator::fields(double t, Eigen::MatrixXcd& A, Eigen::MatrixXcd& X) const {
    A = Eigen::MatrixXcd::Zero(M_, M_);
    X = Eigen::MatrixXcd::Zero(M_, M_);
    const cd step = std::polar(1.0, omega_ * t);
    cd ph = std::polar(1.0, -nmax_ * omega_ * t);
    for (int i = 0; i <= 2 * nmax_; ++i) {
        A += ph * A_[i].cast<cd>();
        X += ph * X_[i].cast<cd>();
        ph *= step;
    }
}

Eigen::MatrixXcd PeriodicGenerator::apply(const Eigen::MatrixXcd& s, double t) const {
    Eigen::MatrixXcd A, X;
    fields(t, A, X);
    const Eigen::MatrixXcd As = A * s;
    const Eigen::MatrixXcd sAd = s * A.adjoint();
    Eigen::MatrixXcd out = As * X - X * As + X * sAd - sAd * X;
    for (int a = 0; a < M_; ++a)
        for (int b = 0; b < M_; ++b) out(a, b) += cd(0.0, -(eps_(a) - eps_(b))) * s(a, b);
    return out;
}

Eigen::MatrixXcd PeriodicGenerator::superoperator(double t) const {
    Eigen::MatrixXcd A, X;
    fields(t, A, X);
    const int D = M_ * M_;
    Eigen::MatrixXcd L = Eigen::MatrixXcd::Zero(D, D);
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(M_, M_);
    add_kron(L, A, X.transpose(), M_);
    add_kron(L, X * A, I, M_, -1.0);
    add_kron(L, X, A.conjugate(), M_);
    add_kron(L, I, (A.adjoint() * X).transpose(), M_, -1.0);
    for (int a = 0; a < M_; ++a)
        for (int b = 0; b < M_; ++b) L(a * M_ + b, a * M_ + b) += cd(0.0, -(eps_(a) - eps_(b)));
    return L;
}

Eigen::MatrixXcd assemble_periodic_generator(const std::vector<FloquetState>& states, const XCoefficients& X,
                                             const BathParams& bath, double omega, double t) {
    return PeriodicGenerator(states, X, bath, omega).superoperator(t);
}

double purity(const Eigen::MatrixXcd& sigma) {
    return (sigma * sigma).trace().real();
}

namespace {

void record(Trajectory& tr, double t, const Eigen::MatrixXcd& s, const Eigen::MatrixXcd& even_part,
            const Eigen::MatrixXcd& odd_part, const Eigen::VectorXi& p, cd trace0) {
    tr.times.push_back(t);
    tr.states.push_back(s);
    tr.max_trace_drift = std::max(tr.max_trace_drift, std::abs(s.trace() - trace0));
    tr.max_hermiticity_drift = std::max(tr.max_hermiticity_drift, (s - s.adjoint()).cwiseAbs().maxCoeff());
    const double leak = std::max(parity_part(even_part, p, -1).cwiseAbs().maxCoeff(),
                                 parity_part(odd_part, p, 1).cwiseAbs().maxCoeff());
    tr.max_parity_leak = std::max(tr.max_parity_leak, leak);
    const Eigen::MatrixXcd h = 0.5 * (s + s.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
    const double mn = es.eigenvalues().minCoeff();
    if (tr.states.size() == 1 || mn < tr.min_eigenvalue) tr.min_eigenvalue = mn;
    if (mn < -1e-6 && tr.warnings.empty()) {
        std::ostringstream os;
        os << "density matrix lost positivity at t=" << t << " (eigenvalue " << mn << ")";
        tr.warnings.push_back(os.str());
    }
}

void check_times(const std::vector<double>& times) {
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] >= 0.0) || (i > 0 && !(times[i] >= times[i - 1]))) {
            throw InvalidArgument("propagation times must be non-negative and ascending");
        }
    }
}

} // namespace

Trajectory propagate_rwa(const DissipativeKernel& kernel, const Eigen::MatrixXcd& sigma0,
                         const std::vector<double>& times) {
    const int M = kernel.M;
    check_sigma(sigma0, M);
    check_times(times);
    Trajectory tr;
    Eigen::VectorXcd v = vec(sigma0);
    Eigen::VectorXcd ve = vec(parity_part(sigma0, kernel.parities, 1));
    Eigen::VectorXcd vo = vec(parity_part(sigma0, kernel.parities, -1));
    const cd trace0 = sigma0.trace();
    Eigen::MatrixXcd U;
    double last_dt = -1.0;
    double t_prev = 0.0;
    for (double t : times) {
        const double dt = t - t_prev;
        if (dt > 0.0) {
            if (std::abs(dt - last_dt) > 1e-12 * dt) {
                U = (kernel.L * dt).exp();
                last_dt = dt;
            }
            v = U * v;
            ve = U * ve;
            vo = U * vo;
        }
        t_prev = t;
        record(tr, t, unvec(v, M), unvec(ve, M), unvec(vo, M), kernel.parities, trace0);
    }
    return tr;
}

Trajectory propagate_periodic(const PeriodicGenerator& gen, const Eigen::MatrixXcd& sigma0,
                              const std::vector<double>& times, int steps_per_period) {
    const int M = gen.M();
    check_sigma(sigma0, M);
    check_times(times);
    if (steps_per_period < 1) throw InvalidArgument("steps_per_period must be >= 1");
    const double hmax = 2.0 * M_PI / gen.omega() / steps_per_period;
    Trajectory tr;
    Eigen::MatrixXcd s = sigma0;
    const cd trace0 = sigma0.trace();
    double t = 0.0;
    for (double target : times) {
        const double span = target - t;
        if (span > 0.0) {
            const long nsteps = static_cast<long>(std::ceil(span / hmax - 1e-9));
            const double h = span / static_cast<double>(nsteps);
            for (long i = 0; i < nsteps; ++i) {
                const double t0 = t + i * h;
                const Eigen::MatrixXcd k1 = gen.apply(s, t0);
                const Eigen::MatrixXcd k2 = gen.apply(s + 0.5 * h * k1, t0 + 0.5 * h);
                const Eigen::MatrixXcd k3 = gen.apply(s + 0.5 * h * k2, t0 + 0.5 * h);
                const Eigen::MatrixXcd k4 = gen.apply(s + h * k3, t0 + h);
                s += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                if (!s.allFinite()) throw NumericalError("periodic propagation diverged; step too large");
            }
            t = target;
        }
        // the blocks are not propagated apart here; leakage is read off s itself
        record(tr, target, s, s, Eigen::MatrixXcd::Zero(M, M), Eigen::VectorXi::Ones(M), trace0);
    }
    tr.max_parity_leak = 0.0;
    return tr;
}

DecoherenceResult decoherence_time(const DissipativeKernel& kernel, const Eigen::MatrixXcd& sigma0,
                                   double beat_period, int max_beats, double threshold) {
    check_sigma(sigma0, kernel.M);
    if (!(beat_period > 0.0)) throw InvalidArgument("decoherence_time: beat period must be positive");
    DecoherenceResult r;
    const double p0 = purity(sigma0);
    if (kernel.bath.gamma == 0.0) return r;
    if (p0 <= threshold) throw InvalidArgument("decoherence_time: initial purity already below threshold");
    const Eigen::MatrixXcd U = (kernel.L * beat_period).exp();
    Eigen::VectorXcd v = vec(sigma0);
    for (int n = 1; n <= max_beats; ++n) {
        v = U * v;
        const double p = purity(unvec(v, kernel.M));
        if (p <= threshold) {
            r.present = true;
            r.beats = n;
            r.purity_at = p;
            r.t_decoh = n * beat_period / (p0 - p);
            return r;
        }
    }
    throw NumericalError("decoherence_time: insufficient propagation time (purity stayed above threshold)");
}

double relaxation_time(const DissipativeKernel& kernel, double cutoff_factor) {
    const double cutoff = cutoff_factor * kernel.bath.gamma;
    if (!(cutoff > 0.0)) throw NumericalError("no relaxation detected (gamma = 0)");
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(kernel.L, false);
    if (es.info() != Eigen::Success) throw NumericalError("relaxation_time: eigensolver failed");
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const double re = std::abs(es.eigenvalues()(i).real());
        if (re > cutoff) best = std::min(best, re);
    }
    if (!std::isfinite(best)) throw NumericalError("no relaxation detected");
    return 1.0 / best;
}

AttractorResult asymptotic_state(const DissipativeKernel& kernel, bool count_null_space, double cutoff_factor) {
    if (!(kernel.bath.gamma > 0.0)) throw InvalidArgument("asymptotic_state: gamma must be > 0");
    const int M = kernel.M;
    const int D = M * M;
    Eigen::MatrixXcd A = kernel.L;
    A.row(0).setZero();
    for (int a = 0; a < M; ++a) A(0, a * M + a) = 1.0;
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(D);
    rhs(0) = 1.0;
    const Eigen::VectorXcd v = A.partialPivLu().solve(rhs);
    AttractorResult r;
    Eigen::MatrixXcd s = unvec(v, M);
    r.sigma = 0.5 * (s + s.adjoint());
    r.residual = (kernel.L * vec(r.sigma)).cwiseAbs().maxCoeff();
    r.purity = purity(r.sigma);
    if (count_null_space) {
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(kernel.L, false);
        const double cutoff = cutoff_factor * kernel.bath.gamma;
        r.null_dimension = 0;
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
            if (std::abs(es.eigenvalues()(i)) < cutoff) ++r.null_dimension;
    }
    return r;
}

DissipativeKernel restrict_to_states(const std::vector<FloquetState>& states, const Eigen::MatrixXd& x,
                                     const std::vector<int>& keep, const BathParams& bath, double omega,
                                     const KernelOptions& opts) {
    std::vector<FloquetState> sub;
    for (int i : keep) {
        if (i < 0 || i >= static_cast<int>(states.size())) {
            std::ostringstream os;
            os << "restrict_to_states: state " << i << " not found";
            throw InvalidArgument(os.str());
        }
        sub.push_back(states[i]);
    }
    return assemble_rwa_kernel(sub, x_fourier_coefficients(sub, x), bath, omega, opts);
}

std::vector<std::string> weak_coupling_warnings(const BathParams& bath, const Eigen::VectorXd& quasienergies,
                                                double omega) {
    std::vector<std::string> w;
    if (bath.kT > 0.0 && !(bath.gamma < bath.kT)) {
        std::ostringstream os;
        os << "weak coupling: gamma=" << bath.gamma << " is not below kT=" << bath.kT;
        w.push_back(os.str());
    }
    double gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index a = 0; a < quasienergies.size(); ++a)
        for (Eigen::Index b = a + 1; b < quasienergies.size(); ++b)
            gap = std::min(gap, std::abs(reduce_quasienergy(quasienergies(a) - quasienergies(b), omega)));
    if (std::isfinite(gap) && !(bath.gamma < gap)) {
        std::ostringstream os;
        os << "weak coupling: gamma=" << bath.gamma << " is not below the smallest quasienergy gap " << gap;
        w.push_back(os.str());
    }
    return w;
}

void write_attractor_csv(std::ostream& os, const DissipativeKernel& kernel, const AttractorResult& att) {
    os << "label,parity,mean_energy,population\n";
    for (int a = 0; a < kernel.M; ++a) {
        os << a << ',' << kernel.parities(a) << ',' << detail::fmt(kernel.mean_energies(a)) << ','
           << detail::fmt(att.sigma(a, a).real()) << '\n';
    }
}

} // namespace dwf
