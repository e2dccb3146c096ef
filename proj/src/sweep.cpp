#include "dwfloquet/sweep.hpp"

#include "dwfloquet/errors.hpp"
#include "io_internal.hpp"
#include "linalg.hpp"

#include <algorithm>
#include <functional>
#include <ostream>
#include <sstream>
#include <tuple>

namespace dwf {

void link_states(const std::vector<const FloquetState*>& prev, const FloquetSpectrum& next, int max_shift,
                 std::vector<int>& assigned, std::vector<double>& overlap) {
    const std::size_t L = prev.size();
    const int ns = next.size();
    std::vector<std::tuple<double, std::size_t, int>> pairs;
    pairs.reserve(L * static_cast<std::size_t>(ns));
    for (std::size_t l = 0; l < L; ++l) {
        for (int j = 0; j < ns; ++j) {
            pairs.emplace_back(state_overlap(*prev[l], next.states[j], max_shift), l, j);
        }
    }
    std::stable_sort(pairs.begin(), pairs.end(),
                     [](const auto& a, const auto& b) { return std::get<0>(a) > std::get<0>(b); });
    assigned.assign(L, -1);
    overlap.assign(L, 0.0);
    std::vector<char> taken(static_cast<std::size_t>(ns), 0);
    std::size_t done = 0;
    for (const auto& [ov, l, j] : pairs) {
        if (assigned[l] >= 0 || taken[j]) continue;
        assigned[l] = j;
        overlap[l] = ov;
        taken[j] = 1;
        if (++done == L) break;
    }
}

namespace {

SweepPoint make_point(const H0Spectrum& spectrum, const SystemParams& base, double F, int NF) {
    SweepPoint p;
    p.F = F;
    SystemParams sp = base;
    sp.set_F(F);
    p.spectrum = solve_floquet(spectrum, sp, NF);
    return p;
}

} // namespace

SweepResult sweep_amplitude(const H0Spectrum& spectrum, const SystemParams& base, const std::vector<double>& F_grid,
                            const SweepOptions& opts) {
    if (F_grid.empty()) throw InvalidArgument("sweep: F grid is empty");
    for (std::size_t i = 1; i < F_grid.size(); ++i) {
        if (!(F_grid[i] > F_grid[i - 1])) throw InvalidArgument("sweep: F grid must be strictly increasing");
    }
    if (F_grid.front() < 0.0) throw InvalidArgument("sweep: F must be >= 0");
    if (opts.track < 1) throw InvalidArgument("sweep: track must be >= 1");

    SweepResult res;
    res.options = opts;
    res.labels = std::min(opts.track, spectrum.size());

    std::vector<SweepPoint> grid(F_grid.size());
    detail::parallel_for(F_grid.size(), opts.workers, [&](std::size_t i) {
        grid[i] = make_point(spectrum, base, F_grid[i], opts.NF);
    });

    const int L = res.labels;
    grid[0].state_of_label.resize(L);
    for (int l = 0; l < L; ++l) grid[0].state_of_label[l] = l;
    grid[0].link_overlap.assign(L, 1.0);
    res.points.push_back(std::move(grid[0]));

    std::function<void(SweepPoint, int)> extend = [&](SweepPoint next, int depth) {
        const SweepPoint& prev = res.points.back();
        std::vector<const FloquetState*> prev_states(L);
        for (int l = 0; l < L; ++l) prev_states[l] = &prev.labeled(l);
        std::vector<int> assigned;
        std::vector<double> ov;
        link_states(prev_states, next.spectrum, opts.max_shift, assigned, ov);
        const double worst = *std::min_element(ov.begin(), ov.end());
        if (worst >= opts.min_overlap || depth >= opts.max_refine_depth) {
            if (worst < opts.min_overlap) {
                next.continuity_gap = true;
                std::ostringstream os;
                os << "continuity gap between F=" << prev.F << " and F=" << next.F << " (overlap " << worst << ")";
                res.warnings.push_back(os.str());
            }
            next.state_of_label = std::move(assigned);
            next.link_overlap = std::move(ov);
            res.points.push_back(std::move(next));
            return;
        }
        SweepPoint mid = make_point(spectrum, base, 0.5 * (prev.F + next.F), opts.NF);
        mid.refined = true;
        extend(std::move(mid), depth + 1);
        extend(std::move(next), depth + 1);
    };
    for (std::size_t i = 1; i < grid.size(); ++i) extend(std::move(grid[i]), 0);

    for (const SweepPoint& p : res.points)
        for (const std::string& w : p.spectrum.warnings) res.warnings.push_back("F=" + detail::fmt(p.F) + ": " + w);
    return res;
}

void write_sweep_csv(std::ostream& os, const SweepResult& sweep) {
    os << "F,label,parity,quasienergy,mean_energy\n";
    for (const SweepPoint& p : sweep.points) {
        for (int l = 0; l < sweep.labels; ++l) {
            const FloquetState& s = p.labeled(l);
            os << detail::fmt(p.F) << ',' << l << ',' << s.parity << ',' << detail::fmt(s.quasienergy) << ','
               << detail::fmt(s.mean_energy) << '\n';
        }
    }
}

} // namespace dwf
