#pragma once

#include "dwfloquet/params.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <vector>

namespace dwf {

// t is the driving phase time, kept in [0, 2 pi / omega).
struct PhasePoint {
    double x = 0.0;
    double p = 0.0;
    double t = 0.0;
};

struct ClassicalOptions {
    int steps_per_period = 256;
    double escape_bound = 1e3; // |x| beyond this means the integrator failed
};

// x' = p, p' = x/2 - x^3/(16 D) - S cos(omega t). Sixth-order Yoshida
// composition of a drift-kick-drift step in extended phase space. Negative
// durations integrate backwards. Throws NumericalError on escape.
PhasePoint flow(const PhasePoint& start, double duration, const SystemParams& params,
                const ClassicalOptions& opts = {});

// Undriven energy p^2/2 + V(x).
double classical_energy(const PhasePoint& pt, double D);

// Points at omega t = 2 pi n, n = 0..n_periods; the seed must sit at t = 0.
std::vector<PhasePoint> stroboscopic_orbit(const PhasePoint& seed, int n_periods, const SystemParams& params,
                                           const ClassicalOptions& opts = {});

// true if the orbit has points with x > 0 and with x < 0
bool visits_both_wells(const std::vector<PhasePoint>& orbit);

struct PortraitPoint {
    int seed = 0;
    int n = 0;
    double x = 0.0;
    double p = 0.0;
};

// Orbits of all seeds, in seed order; seeds run in parallel.
std::vector<PortraitPoint> portrait(const std::vector<PhasePoint>& seeds, int n_periods, const SystemParams& params,
                                    int workers = 0, const ClassicalOptions& opts = {});

// Regular nx x np grid of seeds on [x0, x1] x [p0, p1] at t = 0.
std::vector<PhasePoint> seed_grid(double x0, double x1, int nx, double p0, double p1, int np);

// Jacobian of the one-period map by five-point central differences.
Eigen::Matrix2d period_map_jacobian(const PhasePoint& pt, const SystemParams& params, double delta = 1e-5,
                                    const ClassicalOptions& opts = {});

// Columns seed_id, n, x, p.
void write_portrait_csv(std::ostream& os, const std::vector<PortraitPoint>& points);

} // namespace dwf
