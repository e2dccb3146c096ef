#pragma once

#include <cmath>
#include <numbers>

namespace dwf {

// H(t) = p^2/2 - x^2/4 + x^4/(64 D) + S x cos(omega t), hbar = m = 1.
// S is stored; the rescaled amplitude F = S / sqrt(8D) is derived so the two
// can never disagree.
struct SystemParams {
    double D = 4.0;
    double S = 0.0;
    double omega = 0.982;

    static SystemParams from_rescaled(double D, double F, double omega) {
        SystemParams p;
        p.D = D;
        p.omega = omega;
        p.set_F(F);
        return p;
    }

    double F() const { return S / std::sqrt(8.0 * D); }
    void set_F(double F) { S = F * std::sqrt(8.0 * D); }
    double period() const { return 2.0 * std::numbers::pi / omega; }
    double well_minimum() const { return std::sqrt(8.0 * D); }

    // throws InvalidArgument
    void validate() const;
};

inline double potential(double x, double D) {
    const double x2 = x * x;
    return -0.25 * x2 + x2 * x2 / (64.0 * D);
}

inline double potential_gradient(double x, double D) {
    return -0.5 * x + x * x * x / (16.0 * D);
}

} // namespace dwf
