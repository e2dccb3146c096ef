#pragma once

#include "dwfloquet/basis.hpp"
#include "dwfloquet/floquet.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace dwf {

struct SweepOptions {
    int NF = 16;
    int track = 30;          // number of continuity labels
    double min_overlap = 0.5;
    int max_refine_depth = 6;
    int max_shift = 2;       // sideband shifts tried when matching states
    int workers = 0;         // 0 = hardware concurrency
};

struct SweepPoint {
    double F = 0.0;
    FloquetSpectrum spectrum;
    std::vector<int> state_of_label; // label -> index into spectrum.states
    std::vector<double> link_overlap; // overlap with the previous point, per label
    bool refined = false;             // inserted by local refinement
    bool continuity_gap = false;      // link to previous point stayed below min_overlap

    const FloquetState& labeled(int label) const { return spectrum.states[state_of_label[label]]; }
};

struct SweepResult {
    std::vector<SweepPoint> points; // ascending F
    int labels = 0;
    SweepOptions options;
    std::vector<std::string> warnings;
};

// Floquet spectra along a monotone F grid, labelled by continuity. Labels at the
// first grid point follow mean-energy order.
SweepResult sweep_amplitude(const H0Spectrum& spectrum, const SystemParams& base, const std::vector<double>& F_grid,
                            const SweepOptions& opts = {});

// Greedy maximal-overlap assignment of `prev` states to `next` states.
// Returns per-label state indices and overlaps.
void link_states(const std::vector<const FloquetState*>& prev, const FloquetSpectrum& next, int max_shift,
                 std::vector<int>& assigned, std::vector<double>& overlap);

// Columns F, label, parity, quasienergy, mean_energy.
void write_sweep_csv(std::ostream& os, const SweepResult& sweep);

enum class CrossingKind { exact, avoided };

struct CrossingReport {
    CrossingKind kind = CrossingKind::exact;
    double F = 0.0;
    int label_a = 0;
    int label_b = 0;
    int parity_a = 1;
    int parity_b = 1;
    double gap = 0.0;         // minimal gap (avoided); zero for exact
    double bracket_lo = 0.0;  // sign-change bracket (exact) or search window (avoided)
    double bracket_hi = 0.0;
    // avoided only: "restored" if a doublet exact crossing accompanies it,
    // "reversed" otherwise
    std::string configuration;
    bool mean_energy_exchange = false;
    double mean_energy_a_left = 0.0, mean_energy_a_right = 0.0;
    double mean_energy_b_left = 0.0, mean_energy_b_right = 0.0;
};

struct CrossingOptions {
    std::vector<int> focus{0, 1};
    double relative_width = 1e-6; // bisection stop, relative to F
    double prominence = 4.0;      // gap maxima on both sides must exceed prominence * minimum
    double max_difference = 0.25; // in units of omega; larger jumps are zone wraps
    int max_iterations = 80;
};

// Exact crossings: sign changes of opposite-parity quasienergy differences,
// bisected on F. Avoided crossings: prominent local minima of same-parity gaps,
// refined by golden-section search. Only pairs with at least one focus label.
std::vector<CrossingReport> detect_crossings(const SweepResult& sweep, const H0Spectrum& spectrum,
                                             const SystemParams& base, const CrossingOptions& opts = {});

std::string crossings_to_json(const std::vector<CrossingReport>& reports, int indent = 2);

} // namespace dwf
