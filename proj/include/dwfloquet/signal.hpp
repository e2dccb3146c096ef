#pragma once

#include <vector>

namespace dwf {

struct SpectralPeak {
    double frequency = 0.0; // angular
    double amplitude = 0.0; // cosine amplitude estimate
};

// Spectral lines of a uniformly sampled real signal: Hann-windowed DFT,
// zero-padded by `zoom`, local maxima above rel_threshold * largest, each
// refined by golden-section search on the windowed transform. Sorted by
// decreasing amplitude.
std::vector<SpectralPeak> spectral_peaks(const std::vector<double>& samples, double dt, double rel_threshold = 0.1,
                                         int zoom = 8);

} // namespace dwf
