#include "dwfloquet/signal.hpp"

#include "dwfloquet/errors.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

namespace dwf {

namespace {

double windowed_amplitude(const std::vector<double>& y, const std::vector<double>& w, double wsum, double dt,
                          double f) {
    std::complex<double> acc = 0.0;
    const std::complex<double> step = std::polar(1.0, -f * dt);
    std::complex<double> ph = 1.0;
    for (std::size_t j = 0; j < y.size(); ++j) {
        acc += w[j] * y[j] * ph;
        ph *= step;
        if ((j & 1023) == 1023) ph /= std::abs(ph); // keep the recurrence on the unit circle
    }
    return 2.0 * std::abs(acc) / wsum;
}

} // namespace

std::vector<SpectralPeak> spectral_peaks(const std::vector<double>& samples, double dt, double rel_threshold,
                                         int zoom) {
    const std::size_t n = samples.size();
    if (n < 8) throw InvalidArgument("spectral_peaks: need at least 8 samples");
    if (!(dt > 0.0)) throw InvalidArgument("spectral_peaks: dt must be positive");
    if (zoom < 1) throw InvalidArgument("spectral_peaks: zoom must be >= 1");

    double mean = 0.0;
    for (double v : samples) mean += v;
    mean /= static_cast<double>(n);
    std::vector<double> y(n), w(n);
    double wsum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        w[j] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n - 1));
        y[j] = samples[j] - mean;
        wsum += w[j];
    }

    const std::size_t L = n * static_cast<std::size_t>(zoom);
    std::vector<double> padded(L, 0.0);
    for (std::size_t j = 0; j < n; ++j) padded[j] = w[j] * y[j];
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> spec;
    fft.fwd(spec, padded);
    const std::size_t half = L / 2;
    std::vector<double> mag(half + 1);
    for (std::size_t k = 0; k <= half; ++k) mag[k] = 2.0 * std::abs(spec[k]) / wsum;
    const double df = 2.0 * std::numbers::pi / (static_cast<double>(L) * dt);

    const double top = *std::max_element(mag.begin() + 1, mag.end());
    std::vector<SpectralPeak> out;
    if (!(top > 0.0)) return out;
    for (std::size_t k = 1; k < half; ++k) {
        if (!(mag[k] > mag[k - 1] && mag[k] >= mag[k + 1])) continue;
        if (mag[k] < rel_threshold * top) continue;
        double lo = (static_cast<double>(k) - 1.0) * df, hi = (static_cast<double>(k) + 1.0) * df;
        const double g = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
        double f1 = windowed_amplitude(y, w, wsum, dt, x1), f2 = windowed_amplitude(y, w, wsum, dt, x2);
        for (int it = 0; it < 60 && hi - lo > 1e-10 * hi; ++it) {
            if (f1 > f2) {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - g * (hi - lo);
                f1 = windowed_amplitude(y, w, wsum, dt, x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + g * (hi - lo);
                f2 = windowed_amplitude(y, w, wsum, dt, x2);
            }
        }
        out.push_back({f1 > f2 ? x1 : x2, std::max(f1, f2)});
    }
    std::sort(out.begin(), out.end(), [](const SpectralPeak& a, const SpectralPeak& b) { return a.amplitude > b.amplitude; });
    return out;
}

} // namespace dwf
