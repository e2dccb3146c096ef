#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace dwf {

// Regular doublet (even, odd) plus a chaotic odd singlet coupled to the odd
// member by b. Quasienergies are relative to eps_r (the even state).
struct ThreeStateParams {
    double eps_r = 0.0;
    double delta = 0.0;   // eps_r^- - eps_r^+ > 0
    double delta_c = 0.0; // detuning of the singlet from the odd regular state
    double b = 0.0;       // coupling > 0
    double E_r_even = 0.0;
    double E_r_odd = 0.0;
    double E_c = 0.0;

    void validate() const;                                    // throws InvalidArgument
    std::vector<std::string> hierarchy_warnings(double omega) const; // Delta << b << omega etc.
};

struct ThreeStateSpectrum {
    double eps0 = 0.0; // even
    double eps1 = 0.0; // lower odd branch
    double eps2 = 0.0; // upper odd branch
    double mixing_angle = 0.0;
};

ThreeStateSpectrum eigensystem(const ThreeStateParams& p);

// (E0, E1, E2) for a given mixing angle.
std::array<double, 3> mean_energies(const ThreeStateParams& p, double mixing_angle);

struct TunnelProbabilities {
    double right = 0.0;
    double left = 0.0;
    double chaotic = 0.0;
};

// Closed form for the state initially localized in the right well.
TunnelProbabilities tunneling_probabilities(const ThreeStateParams& p, double t);

// Same closed form in terms of eps1, eps2 (relative to eps0) and the mixing angle.
TunnelProbabilities tunneling_probabilities(double e1, double e2, double mixing_angle, double t);

// Same quantity by exponentiating the 3x3 Hamiltonian.
TunnelProbabilities propagate_numerically(const ThreeStateParams& p, double t);

// |eps1 - eps0|, |eps2 - eps0|, |eps2 - eps1|.
std::array<double, 3> beat_frequencies(const ThreeStateParams& p);

// Number of distinct values after merging those within rel_tol of each other.
int count_distinct(std::vector<double> freqs, double rel_tol);

struct CrossingCenter {
    double numerical = 0.0; // detuning where the beat count drops to two
    double stated = 0.0;    // -Delta/2
    int count_at_center = 0;
    int count_off_center = 0;
};

// Scans delta_c over [-scan_width, scan_width] * b and locates the detuning
// with only two distinct beat frequencies.
CrossingCenter crossing_center(double delta, double b, double scan_width = 10.0, int scan_points = 2001);

struct ThreeStateFit {
    double delta = 0.0;
    double b = 0.0;
    double dc0 = 0.0;      // delta_c at F = F_ref
    double dc_slope = 0.0; // d delta_c / dF
    double F_ref = 0.0;
    double rms_residual = 0.0;
    double min_gap = 0.0;  // smallest eps2 - eps1 in the data
    double F_center() const { return F_ref - dc0 / dc_slope; }
    double delta_c(double F) const { return dc0 + dc_slope * (F - F_ref); }
};

// Least squares fit of (Delta, b, delta_c(F) linear) to the two odd branches,
// both relative to the even spectator. Throws NumericalError when the window
// holds no avoided crossing or the residual exceeds 10 % of the gap.
ThreeStateFit fit_from_spectrum(const std::vector<double>& F, const std::vector<double>& eps1,
                                const std::vector<double>& eps2);

// Columns t, P_R, P_L, P_c.
void write_tunnel_csv(std::ostream& os, const std::vector<double>& t, const std::vector<TunnelProbabilities>& p);

} // namespace dwf
