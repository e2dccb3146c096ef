#include "dwfloquet/errors.hpp"
#include "dwfloquet/sweep.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <set>

namespace dwf {

namespace {

struct Tracker {
    const H0Spectrum& spectrum;
    const SystemParams& base;
    int NF;
    int max_shift;

    FloquetSpectrum solve(double F) const {
        SystemParams sp = base;
        sp.set_F(F);
        return solve_floquet(spectrum, sp, NF);
    }

    // Follows two states into `next`; returns their indices there.
    std::pair<int, int> follow(const FloquetState& a, const FloquetState& b, const FloquetSpectrum& next) const {
        std::vector<int> assigned;
        std::vector<double> ov;
        link_states({&a, &b}, next, max_shift, assigned, ov);
        return {assigned[0], assigned[1]};
    }
};

double difference(const FloquetState& a, const FloquetState& b, double omega) {
    return reduce_quasienergy(a.quasienergy - b.quasienergy, omega);
}

bool in_focus(const std::vector<int>& focus, int l) {
    return std::find(focus.begin(), focus.end(), l) != focus.end();
}

CrossingReport refine_exact(const Tracker& tr, const SweepPoint& p0, const SweepPoint& p1, int a, int b,
                            const CrossingOptions& opts) {
    const double omega = tr.base.omega;
    double lo = p0.F, hi = p1.F;
    FloquetState sa = p0.labeled(a), sb = p0.labeled(b);
    double dlo = difference(sa, sb, omega);
    for (int it = 0; it < opts.max_iterations; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (hi - lo <= opts.relative_width * std::abs(mid)) break;
        const FloquetSpectrum spec = tr.solve(mid);
        const auto [ia, ib] = tr.follow(sa, sb, spec);
        const double dm = difference(spec.states[ia], spec.states[ib], omega);
        if (dm == 0.0) {
            lo = hi = mid;
            break;
        }
        if ((dm > 0) == (dlo > 0)) {
            lo = mid;
            dlo = dm;
            sa = spec.states[ia];
            sb = spec.states[ib];
        } else {
            hi = mid;
        }
    }
    CrossingReport r;
    r.kind = CrossingKind::exact;
    r.F = 0.5 * (lo + hi);
    r.label_a = a;
    r.label_b = b;
    r.parity_a = p0.labeled(a).parity;
    r.parity_b = p0.labeled(b).parity;
    r.gap = 0.0;
    r.bracket_lo = lo;
    r.bracket_hi = hi;
    return r;
}

CrossingReport refine_avoided(const Tracker& tr, const SweepResult& sw, std::size_t i, int a, int b,
                              const CrossingOptions& opts) {
    const double omega = tr.base.omega;
    const SweepPoint& pm = sw.points[i];
    double lo = sw.points[i - 1].F, hi = sw.points[i + 1].F;

    auto gap_at = [&](double F) {
        // seed from the nearest of the three bracketing sweep points
        const SweepPoint* seed = &pm;
        for (std::size_t j : {i - 1, i + 1})
            if (std::abs(sw.points[j].F - F) < std::abs(seed->F - F)) seed = &sw.points[j];
        const FloquetSpectrum spec = tr.solve(F);
        const auto [ia, ib] = tr.follow(seed->labeled(a), seed->labeled(b), spec);
        return std::abs(difference(spec.states[ia], spec.states[ib], omega));
    };

    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    double f1 = gap_at(x1), f2 = gap_at(x2);
    for (int it = 0; it < opts.max_iterations; ++it) {
        if (hi - lo <= opts.relative_width * std::abs(0.5 * (lo + hi))) break;
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = gap_at(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = gap_at(x2);
        }
    }
    CrossingReport r;
    r.kind = CrossingKind::avoided;
    r.F = f1 < f2 ? x1 : x2;
    r.gap = std::min(f1, f2);
    const double grid_gap = std::abs(difference(pm.labeled(a), pm.labeled(b), omega));
    if (grid_gap < r.gap) { // refinement should never do worse than the grid
        r.gap = grid_gap;
        r.F = pm.F;
    }
    r.label_a = a;
    r.label_b = b;
    r.parity_a = pm.labeled(a).parity;
    r.parity_b = pm.labeled(b).parity;
    r.bracket_lo = sw.points[i - 1].F;
    r.bracket_hi = sw.points[i + 1].F;
    return r;
}

} // namespace

std::vector<CrossingReport> detect_crossings(const SweepResult& sweep, const H0Spectrum& spectrum,
                                             const SystemParams& base, const CrossingOptions& opts) {
    std::vector<CrossingReport> out;
    const auto& pts = sweep.points;
    if (pts.size() < 2) return out;
    const double omega = base.omega;
    const Tracker tr{spectrum, base, sweep.options.NF, sweep.options.max_shift};
    const int L = sweep.labels;

    std::set<std::pair<int, int>> pairs;
    for (int f : opts.focus) {
        if (f < 0 || f >= L) continue;
        for (int b = 0; b < L; ++b) {
            if (b == f) continue;
            pairs.insert({std::min(f, b), std::max(f, b)});
        }
    }

    const double jump = opts.max_difference * omega;
    for (const auto& [a, b] : pairs) {
        std::vector<double> d(pts.size());
        std::vector<int> same(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) {
            d[i] = difference(pts[i].labeled(a), pts[i].labeled(b), omega);
            same[i] = pts[i].labeled(a).parity == pts[i].labeled(b).parity;
        }
        // exact crossings
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            if (same[i] || same[i + 1]) continue;
            if (std::abs(d[i]) > jump || std::abs(d[i + 1]) > jump) continue;
            if (d[i] == 0.0 || (d[i] > 0) == (d[i + 1] > 0)) continue;
            out.push_back(refine_exact(tr, pts[i], pts[i + 1], a, b, opts));
        }
        // avoided crossings
        for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
            if (!same[i - 1] || !same[i] || !same[i + 1]) continue;
            const double gi = std::abs(d[i]);
            if (!(gi < std::abs(d[i - 1]) && gi <= std::abs(d[i + 1]))) continue;
            // prominence: walk outwards while the gap stays same-parity and below the zone-wrap bound
            double left_max = gi, right_max = gi;
            std::size_t il = i, ir = i;
            for (std::size_t j = i; j-- > 0;) {
                if (!same[j] || std::abs(d[j]) > jump) break;
                if (std::abs(d[j]) > left_max) {
                    left_max = std::abs(d[j]);
                    il = j;
                }
            }
            for (std::size_t j = i + 1; j < pts.size(); ++j) {
                if (!same[j] || std::abs(d[j]) > jump) break;
                if (std::abs(d[j]) > right_max) {
                    right_max = std::abs(d[j]);
                    ir = j;
                }
            }
            if (left_max < opts.prominence * gi || right_max < opts.prominence * gi) continue;
            CrossingReport r = refine_avoided(tr, sweep, i, a, b, opts);
            r.mean_energy_a_left = pts[il].labeled(a).mean_energy;
            r.mean_energy_b_left = pts[il].labeled(b).mean_energy;
            r.mean_energy_a_right = pts[ir].labeled(a).mean_energy;
            r.mean_energy_b_right = pts[ir].labeled(b).mean_energy;
            r.mean_energy_exchange = (r.mean_energy_a_left - r.mean_energy_b_left) *
                                         (r.mean_energy_a_right - r.mean_energy_b_right) <
                                     0.0;
            out.push_back(r);
        }
    }

    // configuration of each avoided crossing relative to the focus doublet
    for (CrossingReport& r : out) {
        if (r.kind != CrossingKind::avoided) continue;
        const int a = in_focus(opts.focus, r.label_a) ? r.label_a : r.label_b;
        const int other = a == r.label_a ? r.label_b : r.label_a;
        for (int f : opts.focus) {
            if (f == a || f < 0 || f >= L) continue;
            if (pts.front().labeled(f).parity == r.parity_a) continue;
            bool exact = false;
            for (const CrossingReport& e : out) {
                if (e.kind != CrossingKind::exact) continue;
                const bool hit = (e.label_a == f || e.label_b == f) &&
                                 (e.label_a == a || e.label_b == a || e.label_a == other || e.label_b == other);
                exact = exact || hit;
            }
            r.configuration = exact ? "restored" : "reversed";
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const CrossingReport& x, const CrossingReport& y) { return x.F < y.F; });
    return out;
}

std::string crossings_to_json(const std::vector<CrossingReport>& reports, int indent) {
    nlohmann::json arr = nlohmann::json::array();
    for (const CrossingReport& r : reports) {
        nlohmann::json j;
        j["kind"] = r.kind == CrossingKind::exact ? "exact" : "avoided";
        j["F"] = r.F;
        j["labels"] = {r.label_a, r.label_b};
        j["parities"] = {r.parity_a, r.parity_b};
        if (r.kind == CrossingKind::exact) {
            j["bracket"] = {r.bracket_lo, r.bracket_hi};
        } else {
            j["gap"] = r.gap;
            j["window"] = {r.bracket_lo, r.bracket_hi};
            j["configuration"] = r.configuration;
            j["mean_energy_exchange"] = r.mean_energy_exchange;
            j["mean_energies_left"] = {r.mean_energy_a_left, r.mean_energy_b_left};
            j["mean_energies_right"] = {r.mean_energy_a_right, r.mean_energy_b_right};
        }
        arr.push_back(j);
    }
    return arr.dump(indent);
}

} // namespace dwf
