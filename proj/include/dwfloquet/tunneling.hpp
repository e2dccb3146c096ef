#pragma once

#include "dwfloquet/dissipation.hpp"
#include "dwfloquet/floquet.hpp"
#include "dwfloquet/three_state.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <vector>

namespace dwf {

// The regular doublet partner of the lowest state plus the state it mixes
// with, read off a Floquet spectrum. Indices point into spectrum.states.
struct CrossingTriple {
    int spectator = -1; // lowest mean energy
    int lower = -1;     // opposite parity, smaller quasienergy relative to the spectator
    int upper = -1;
    double e1 = 0.0;    // reduced quasienergies relative to the spectator
    double e2 = 0.0;
    double mixing_angle = 0.0;
    double E_r = 0.0;   // mean energy of the regular reference (the spectator)
    double E_c = 0.0;   // reconstructed mean energy of the unmixed chaotic state
    // localized and chaotic reference states over (spectator, lower, upper)
    Eigen::Vector3d right = Eigen::Vector3d::Zero();
    Eigen::Vector3d left = Eigen::Vector3d::Zero();
    Eigen::Vector3d chaotic = Eigen::Vector3d::Zero();
    double x_right = 0.0; // <x> of the right state at t = 0

    std::array<int, 3> indices() const { return {spectator, lower, upper}; }
    // Model parameters with Delta, delta_c, b reconstructed from e1, e2 and the
    // mixing angle. Delta may come out non-positive far from a crossing; then
    // validate() on the result throws.
    ThreeStateParams params() const;
};

// The mixing angle follows from the mean energies, sin^2 beta = (E1 - E_r) / (E_c - E_r)
// with E_c = E1 + E2 - E_r.
CrossingTriple find_crossing_triple(const FloquetSpectrum& spectrum, const Eigen::MatrixXd& x);

// Coherent evolution of the right state inside the triple, using the numerical
// quasienergies. P_c is the population of the chaotic reference state.
std::vector<TunnelProbabilities> coherent_tunneling(const CrossingTriple& triple, const std::vector<double>& times);

// sigma0 = |R><R| over the first M states of the spectrum.
Eigen::MatrixXcd localized_density_matrix(const CrossingTriple& triple, int M);

struct TunnelSample {
    double t = 0.0;
    double right = 0.0;
    double left = 0.0;
    double chaotic = 0.0;
    double purity = 0.0;
};

// Projections of a trajectory over the first M states onto the triple's reference states.
std::vector<TunnelSample> project_trajectory(const CrossingTriple& triple, const Trajectory& tr);

// Columns t, P_R, P_L, P_c, purity.
void write_trajectory_csv(std::ostream& os, const std::vector<TunnelSample>& samples);

} // namespace dwf
