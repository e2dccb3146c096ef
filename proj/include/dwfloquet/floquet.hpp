#pragma once

#include "dwfloquet/basis.hpp"
#include "dwfloquet/params.hpp"

#include <Eigen/Dense>

#include <string>
#include <utility>
#include <vector>

namespace dwf {

// One Floquet class representative, stored in the frame where its quasienergy
// lies in [-omega/2, omega/2). Row r of `components` is sideband
// first_sideband + r; columns run over H0 states. Components are real because
// the sector matrices are real symmetric.
struct FloquetState {
    double quasienergy = 0.0;
    int parity = 1; // generalized parity, +1 even, -1 odd
    int first_sideband = 0;
    Eigen::MatrixXd components;
    double mean_energy = 0.0;
    double central_weight = 0.0; // weight in sideband 0 of the solved frame
    bool ambiguous = false;      // class representative was a near tie

    int sidebands() const { return static_cast<int>(components.rows()); }
    int last_sideband() const { return first_sideband + sidebands() - 1; }
    double sideband_weight(int n) const;
    double norm2() const { return components.squaredNorm(); }

    // Same class, components moved by +m sidebands; quasienergy shifts by
    // -m*omega and is NOT re-reduced.
    FloquetState shifted(int m, double omega) const;
};

struct FloquetSpectrum {
    std::vector<FloquetState> states; // sorted by mean energy
    SystemParams params;
    int K = 0;
    int NF = 0;
    std::vector<std::string> warnings;

    int size() const { return static_cast<int>(states.size()); }
};

// Map into [-omega/2, omega/2).
double reduce_quasienergy(double e, double omega);

// Index of the (n, k) pairs that belong to a sector (+1 even, -1 odd), in the
// row order of the sector matrix.
std::vector<std::pair<int, int>> sector_indices(const H0Spectrum& spectrum, int NF, int sector);

Eigen::MatrixXd assemble_floquet_matrix(const H0Spectrum& spectrum, const SystemParams& params, int NF,
                                        int sector);

// Unsectored matrix over all (n, k), row index (n + NF) * K + k.
Eigen::MatrixXd assemble_full_floquet_matrix(const H0Spectrum& spectrum, const SystemParams& params,
                                             int NF);

struct SectorSolution {
    int sector = 1;
    int NF = 0;
    int K = 0;
    std::vector<std::pair<int, int>> index;
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors; // columns
};

// Diagonalizes one sector. `matrix` is consumed.
SectorSolution solve_sector(Eigen::MatrixXd matrix, const H0Spectrum& spectrum, int NF, int sector);

struct DedupOptions {
    double quasienergy_tol = 1e-6; // in units of omega
    double min_overlap = 0.5;
    double tie_tol = 1e-10; // central weights closer than this count as a tie
};

// Pools both sectors, removes sideband-shifted copies and returns K class
// representatives reduced to the first zone, sorted by mean energy.
FloquetSpectrum merge_sectors(const SectorSolution& even, const SectorSolution& odd,
                              const SystemParams& params, const DedupOptions& opts = {});

FloquetSpectrum solve_floquet(const H0Spectrum& spectrum, const SystemParams& params, int NF,
                              const DedupOptions& opts = {});

// E = sum_n (eps + n omega) <c_n|c_n>. Throws if the state is not normalized.
double mean_energy(const FloquetState& state, double omega);

// max over sideband shifts |s| <= max_shift of |sum c_a(n) c_b(n + s)|.
double state_overlap(const FloquetState& a, const FloquetState& b, int max_shift = 2,
                     int* best_shift = nullptr);

// sum_n X_{ab,n}: the position matrix element at t = 0.
double position_at_zero(const FloquetState& a, const FloquetState& b, const Eigen::MatrixXd& x);

// (|even> +- |odd>)/sqrt(2) with the relative sign chosen so that the right
// state has the larger <x> at t = 0. Coefficients are over (even, odd).
struct LocalizedPair {
    Eigen::Vector2d right;
    Eigen::Vector2d left;
    double x_right = 0.0;
    double x_left = 0.0;
};

LocalizedPair localized_superpositions(const FloquetState& even, const FloquetState& odd,
                                       const Eigen::MatrixXd& x);

// Generalized parity acting on coefficients over (even, odd).
inline Eigen::Vector2d apply_generalized_parity(const Eigen::Vector2d& c) { return {c(0), -c(1)}; }

} // namespace dwf
