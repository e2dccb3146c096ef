#pragma once

#include "dwfloquet/params.hpp"

#include <Eigen/Dense>

#include <iosfwd>

namespace dwf {

// Lowest K eigenpairs of the undriven double well.
struct H0Spectrum {
    Eigen::VectorXd energies;  // ascending
    Eigen::VectorXi parities;  // +1 / -1 under x -> -x
    Eigen::MatrixXd x;         // <k|x|k'>, exactly zero between equal parities
    Eigen::VectorXd x2_diag;   // <k|x^2|k> evaluated in the computational basis
    Eigen::MatrixXd vectors;   // oscillator-basis coefficients, one column per state
    Eigen::VectorXd residuals; // |H v - E v| per state
    double ho_frequency = 1.0;
    int computational_size = 0;

    int size() const { return static_cast<int>(energies.size()); }
};

// Diagonalizes H0 in an oscillator ladder basis centred at x = 0. The even and
// odd oscillator blocks are solved separately so parities come out exact.
H0Spectrum solve_h0(const SystemParams& params, int computational_size = 300, int K = 60,
                    double ho_frequency = 1.0);

// x_{kk'} with the parity selection rule and symmetry imposed exactly.
Eigen::MatrixXd position_matrix(const H0Spectrum& spectrum);

// Largest relative change of the retained energies when the computational basis
// grows by 50 %.
double h0_convergence(const SystemParams& params, int computational_size, int K,
                      double ho_frequency = 1.0);

// Columns k, E_k, p_k.
void write_h0_csv(std::ostream& os, const H0Spectrum& spectrum);

} // namespace dwf
