#include "dwfloquet/classical.hpp"

#include "dwfloquet/errors.hpp"
#include "io_internal.hpp"
#include "linalg.hpp"

#include <array>
#include <cmath>
#include <ostream>
#include <sstream>

namespace dwf {

namespace {

// Yoshida's sixth-order solution A
constexpr double w1 = -1.17767998417887;
constexpr double w2 = 0.235573213359357;
constexpr double w3 = 0.784513610477560;
constexpr double w0 = 1.0 - 2.0 * (w1 + w2 + w3);
constexpr std::array<double, 7> weights{w3, w2, w1, w0, w1, w2, w3};

struct State {
    double x, p, t;
};

inline void leapfrog(State& s, double h, const SystemParams& sp) {
    s.x += 0.5 * h * s.p;
    s.t += 0.5 * h;
    s.p += h * (-potential_gradient(s.x, sp.D) - sp.S * std::cos(sp.omega * s.t));
    s.x += 0.5 * h * s.p;
    s.t += 0.5 * h;
}

double wrap_phase(double t, double T) {
    double r = std::fmod(t, T);
    if (r < 0.0) r += T;
    if (r >= T) r = 0.0;
    return r;
}

} // namespace

PhasePoint flow(const PhasePoint& start, double duration, const SystemParams& params, const ClassicalOptions& opts) {
    params.validate();
    if (!std::isfinite(duration)) throw InvalidArgument("flow: duration must be finite");
    if (!std::isfinite(start.x) || !std::isfinite(start.p) || !std::isfinite(start.t)) {
        throw InvalidArgument("flow: non-finite phase point");
    }
    if (opts.steps_per_period < 1) throw InvalidArgument("flow: steps_per_period must be >= 1");
    const double T = params.period();
    const double hmax = T / opts.steps_per_period;
    const long n = static_cast<long>(std::ceil(std::abs(duration) / hmax - 1e-9));
    State s{start.x, start.p, start.t};
    if (n > 0) {
        const double h = duration / static_cast<double>(n);
        for (long i = 0; i < n; ++i) {
            for (double w : weights) leapfrog(s, w * h, params);
            if (!(std::abs(s.x) < opts.escape_bound)) {
                std::ostringstream os;
                os << "classical orbit escaped (|x| > " << opts.escape_bound << ") at t = " << s.t;
                throw NumericalError(os.str());
            }
        }
        // re-anchor the clock: the composition only shifts t by multiples of h
        s.t = start.t + duration;
    }
    return {s.x, s.p, wrap_phase(s.t, T)};
}

double classical_energy(const PhasePoint& pt, double D) {
    return 0.5 * pt.p * pt.p + potential(pt.x, D);
}

std::vector<PhasePoint> stroboscopic_orbit(const PhasePoint& seed, int n_periods, const SystemParams& params,
                                           const ClassicalOptions& opts) {
    if (n_periods < 1) throw InvalidArgument("stroboscopic_orbit: n_periods must be >= 1");
    if (seed.t != 0.0) throw InvalidArgument("stroboscopic_orbit: seed must be at driving phase zero");
    std::vector<PhasePoint> out;
    out.reserve(static_cast<std::size_t>(n_periods) + 1);
    out.push_back(seed);
    PhasePoint cur = seed;
    const double T = params.period();
    for (int k = 0; k < n_periods; ++k) {
        cur = flow(cur, T, params, opts);
        cur.t = 0.0;
        out.push_back(cur);
    }
    return out;
}

bool visits_both_wells(const std::vector<PhasePoint>& orbit) {
    bool right = false, left = false;
    for (const PhasePoint& pt : orbit) {
        right = right || pt.x > 0.0;
        left = left || pt.x < 0.0;
    }
    return right && left;
}

std::vector<PortraitPoint> portrait(const std::vector<PhasePoint>& seeds, int n_periods, const SystemParams& params,
                                    int workers, const ClassicalOptions& opts) {
    if (seeds.empty()) throw InvalidArgument("portrait: empty seed grid");
    std::vector<std::vector<PhasePoint>> orbits(seeds.size());
    detail::parallel_for(seeds.size(), workers,
                         [&](std::size_t i) { orbits[i] = stroboscopic_orbit(seeds[i], n_periods, params, opts); });
    std::vector<PortraitPoint> out;
    out.reserve(seeds.size() * (static_cast<std::size_t>(n_periods) + 1));
    for (std::size_t i = 0; i < orbits.size(); ++i)
        for (std::size_t n = 0; n < orbits[i].size(); ++n)
            out.push_back({static_cast<int>(i), static_cast<int>(n), orbits[i][n].x, orbits[i][n].p});
    return out;
}

std::vector<PhasePoint> seed_grid(double x0, double x1, int nx, double p0, double p1, int np) {
    if (nx < 1 || np < 1) throw InvalidArgument("seed_grid: empty grid");
    std::vector<PhasePoint> out;
    for (int i = 0; i < nx; ++i) {
        const double x = nx == 1 ? 0.5 * (x0 + x1) : x0 + (x1 - x0) * i / (nx - 1);
        for (int j = 0; j < np; ++j) {
            const double p = np == 1 ? 0.5 * (p0 + p1) : p0 + (p1 - p0) * j / (np - 1);
            out.push_back({x, p, 0.0});
        }
    }
    return out;
}

Eigen::Matrix2d period_map_jacobian(const PhasePoint& pt, const SystemParams& params, double delta,
                                    const ClassicalOptions& opts) {
    if (!(delta > 0.0)) throw InvalidArgument("period_map_jacobian: delta must be positive");
    const double T = params.period();
    auto map = [&](double x, double p) {
        const PhasePoint q = flow({x, p, pt.t}, T, params, opts);
        return Eigen::Vector2d(q.x, q.p);
    };
    Eigen::Matrix2d J;
    for (int c = 0; c < 2; ++c) {
        const double ex = c == 0 ? delta : 0.0, ep = c == 1 ? delta : 0.0;
        const Eigen::Vector2d d = -map(pt.x + 2 * ex, pt.p + 2 * ep) + 8.0 * map(pt.x + ex, pt.p + ep) -
                                  8.0 * map(pt.x - ex, pt.p - ep) + map(pt.x - 2 * ex, pt.p - 2 * ep);
        J.col(c) = d / (12.0 * delta);
    }
    return J;
}

void write_portrait_csv(std::ostream& os, const std::vector<PortraitPoint>& points) {
    os << "seed_id,n,x,p\n";
    for (const PortraitPoint& q : points) os << q.seed << ',' << q.n << ',' << detail::fmt(q.x) << ',' << detail::fmt(q.p) << '\n';
}

} // namespace dwf
