#pragma once

#include "dwfloquet/floquet.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace dwf {

// Ohmic bath J(w) = m gamma w with m = 1.
struct BathParams {
    double gamma = 1e-6;
    double kT = 1e-4;

    void validate() const; // gamma >= 0, kT >= 0
};

// N(e) = gamma e n_th(e); N(0) = gamma kT.
double bath_weight(double e, const BathParams& bath);

// X_{ab,n} = sum_m sum_{kk'} c^a_{m,k} x_{kk'} c^b_{m-n,k'}, real for real
// components. blocks[n + nmax] holds the M x M matrix X_n.
struct XCoefficients {
    int M = 0;
    int nmax = 0;
    std::vector<Eigen::MatrixXd> blocks;
    double tail_weight = 0.0; // share of sum |X_n|^2 in the two outermost sidebands on each side

    const Eigen::MatrixXd& operator()(int n) const { return blocks[static_cast<std::size_t>(n + nmax)]; }
    // X(t) = sum_n X_n e^{i n omega t}
    Eigen::MatrixXcd at_time(double t, double omega) const;
    // X(0), the position matrix at t = 0
    Eigen::MatrixXd at_zero() const;
};

XCoefficients x_fourier_coefficients(const std::vector<FloquetState>& states, const Eigen::MatrixXd& x);

// Superoperators act on row-major vec(sigma): index a * M + b.
struct DissipativeKernel {
    int M = 0;
    Eigen::MatrixXcd L;          // full generator: coherent part plus dissipator
    Eigen::VectorXd quasienergies;
    Eigen::VectorXd mean_energies;
    Eigen::VectorXi parities;
    BathParams bath;
    double omega = 0.0;

    Eigen::MatrixXcd apply(const Eigen::MatrixXcd& sigma) const;
    // transition rate from state `from` into state `to`
    double rate(int to, int from) const;
};

struct KernelOptions {
    bool crude_rwa = false; // keep only population rates and coherence decay
};

DissipativeKernel assemble_rwa_kernel(const std::vector<FloquetState>& states, const XCoefficients& X,
                                      const BathParams& bath, double omega, const KernelOptions& opts = {});

// Time-periodic generator before averaging over the driving period.
class PeriodicGenerator {
public:
    PeriodicGenerator(const std::vector<FloquetState>& states, const XCoefficients& X, const BathParams& bath,
                      double omega);

    Eigen::MatrixXcd apply(const Eigen::MatrixXcd& sigma, double t) const;
    Eigen::MatrixXcd superoperator(double t) const;
    int M() const { return M_; }
    double omega() const { return omega_; }

private:
    int M_;
    int nmax_;
    double omega_;
    Eigen::VectorXd eps_;
    std::vector<Eigen::MatrixXd> A_; // A_n = N_n o X_n
    std::vector<Eigen::MatrixXd> X_;
    void fields(double t, Eigen::MatrixXcd& A, Eigen::MatrixXcd& X) const;
};

Eigen::MatrixXcd assemble_periodic_generator(const std::vector<FloquetState>& states, const XCoefficients& X,
                                             const BathParams& bath, double omega, double t);

struct Trajectory {
    std::vector<double> times;
    std::vector<Eigen::MatrixXcd> states;
    double max_trace_drift = 0.0;
    double max_hermiticity_drift = 0.0;
    double max_parity_leak = 0.0; // even/odd operator-parity blocks propagated apart
    double min_eigenvalue = 0.0;
    std::vector<std::string> warnings;
};

// Matrix exponential of the time-independent generator between samples.
Trajectory propagate_rwa(const DissipativeKernel& kernel, const Eigen::MatrixXcd& sigma0,
                         const std::vector<double>& times);

// Fixed-step RK4 on the periodic generator, step period / steps_per_period.
Trajectory propagate_periodic(const PeriodicGenerator& gen, const Eigen::MatrixXcd& sigma0,
                              const std::vector<double>& times, int steps_per_period = 64);

double purity(const Eigen::MatrixXcd& sigma);

struct DecoherenceResult {
    bool present = false; // false when the purity never moves (gamma = 0)
    double t_decoh = std::numeric_limits<double>::infinity();
    int beats = 0;
    double purity_at = 1.0;
};

// 1/t_decoh = (P(0) - P(t)) / t at t = n beat periods, n the first beat count with
// P(t) <= threshold.
DecoherenceResult decoherence_time(const DissipativeKernel& kernel, const Eigen::MatrixXcd& sigma0,
                                   double beat_period, int max_beats = 200000, double threshold = 0.9);

// 1 / min |Re lambda| over generator eigenvalues above cutoff_factor * gamma.
double relaxation_time(const DissipativeKernel& kernel, double cutoff_factor = 1e-3);

struct AttractorResult {
    Eigen::MatrixXcd sigma;
    double residual = 0.0;  // max |L sigma|
    int null_dimension = -1; // -1 when not counted
    double purity = 0.0;
};

AttractorResult asymptotic_state(const DissipativeKernel& kernel, bool count_null_space = true,
                                 double cutoff_factor = 1e-3);

// Kernel over the given states only (indices into `states`).
DissipativeKernel restrict_to_states(const std::vector<FloquetState>& states, const Eigen::MatrixXd& x,
                                     const std::vector<int>& keep, const BathParams& bath, double omega,
                                     const KernelOptions& opts = {});

// Weak-coupling checks: gamma < kT (kT > 0) and gamma below the smallest
// quasienergy gap.
std::vector<std::string> weak_coupling_warnings(const BathParams& bath, const Eigen::VectorXd& quasienergies,
                                                double omega);

// Columns label, parity, mean_energy, population.
void write_attractor_csv(std::ostream& os, const DissipativeKernel& kernel, const AttractorResult& att);

} // namespace dwf
