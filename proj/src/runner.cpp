#include "dwfloquet/runner.hpp"

#include "dwfloquet/basis.hpp"
#include "dwfloquet/classical.hpp"
#include "dwfloquet/dissipation.hpp"
#include "dwfloquet/errors.hpp"
#include "dwfloquet/floquet.hpp"
#include "dwfloquet/signal.hpp"
#include "dwfloquet/sweep.hpp"
#include "dwfloquet/three_state.hpp"
#include "dwfloquet/tunneling.hpp"
#include "io_internal.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

namespace dwf {

namespace fs = std::filesystem;
using json = nlohmann::json;

Task parse_task(const std::string& name) {
    for (Task t : {Task::spectrum, Task::sweep, Task::tunnel, Task::dissipate, Task::attractor, Task::classical,
                   Task::validate}) {
        if (name == task_name(t)) return t;
    }
    throw ConfigError("task", "unknown task '" + name + "'");
}

const char* task_name(Task t) {
    switch (t) {
    case Task::spectrum: return "spectrum";
    case Task::sweep: return "sweep";
    case Task::tunnel: return "tunnel";
    case Task::dissipate: return "dissipate";
    case Task::attractor: return "attractor";
    case Task::classical: return "classical";
    case Task::validate: return "validate";
    }
    return "?";
}

namespace {

H0Spectrum h0_of(const Config& cfg) {
    return solve_h0(cfg.system(), cfg.integer("truncation.basis_size"), cfg.integer("truncation.K"),
                    cfg.real("truncation.ho_frequency"));
}

// smallest spacing among the lowest M undriven levels, tunnel doublets below
// the barrier top excluded
double min_level_spacing(const H0Spectrum& h0, int M) {
    double gap = std::numeric_limits<double>::infinity();
    for (int k = 0; k + 1 < std::min(M, h0.size()); ++k) {
        const bool doublet = k % 2 == 0 && h0.energies(k + 1) < 0.0;
        if (!doublet) gap = std::min(gap, h0.energies(k + 1) - h0.energies(k));
    }
    return gap;
}

std::vector<double> temperatures(const Config& cfg, const char* key) {
    std::vector<double> T = cfg.real_list(key);
    if (T.empty()) T.push_back(cfg.real("bath.kT"));
    return T;
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
    return out;
}

json num(double v) {
    return std::isfinite(v) ? json(v) : json(nullptr);
}

class Writer {
public:
    Writer(fs::path dir, std::string hash, RunReport& rep) : dir_(std::move(dir)), hash_(std::move(hash)), rep_(rep) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw IoError("cannot create output directory " + dir_.string() + ": " + ec.message());
    }

    void csv(const std::string& name, const std::function<void(std::ostream&)>& body) {
        write(name, [&](std::ostream& os) {
            os << csv_schema_line << hash_ << '\n';
            body(os);
        });
    }

    void json_file(const std::string& name, json j) {
        j["config_hash"] = hash_;
        write(name, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
    }

    const fs::path& dir() const { return dir_; }

private:
    fs::path dir_;
    std::string hash_;
    RunReport& rep_;

    void write(const std::string& name, const std::function<void(std::ostream&)>& body) {
        const fs::path p = dir_ / name;
        {
            std::ofstream out(p, std::ios::binary | std::ios::trunc);
            if (!out) throw IoError("cannot write " + p.string());
            body(out);
            if (!out) throw IoError("write failed for " + p.string());
        }
        rep_.artifacts.push_back({name, detail::sha256_file(p)});
    }
};

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void warn_all(RunReport& rep, const std::vector<std::string>& w) {
    for (const std::string& s : w) rep.messages.push_back("warning: " + s);
}

FloquetSpectrum floquet_at(const Config& cfg, const H0Spectrum& h0, RunReport& rep) {
    FloquetSpectrum spec = solve_floquet(h0, cfg.system(), cfg.integer("truncation.NF"));
    warn_all(rep, spec.warnings);
    return spec;
}

std::vector<FloquetState> retained(const FloquetSpectrum& spec, int M) {
    if (M > spec.size()) throw ConfigError("truncation.M", "exceeds the number of available Floquet states");
    return {spec.states.begin(), spec.states.begin() + M};
}

json task_spectrum(const Config& cfg, Writer& out, RunReport& rep) {
    const H0Spectrum h0 = h0_of(cfg);
    const FloquetSpectrum spec = floquet_at(cfg, h0, rep);
    out.csv("h0.csv", [&](std::ostream& os) { write_h0_csv(os, h0); });
    out.csv("floquet.csv", [&](std::ostream& os) {
        os << "index,parity,quasienergy,mean_energy,central_weight\n";
        for (int i = 0; i < spec.size(); ++i) {
            const FloquetState& s = spec.states[i];
            os << i << ',' << s.parity << ',' << detail::fmt(s.quasienergy) << ',' << detail::fmt(s.mean_energy) << ','
               << detail::fmt(s.central_weight) << '\n';
        }
    });
    json j;
    j["F"] = cfg.real("system.F");
    j["ground_splitting_h0"] = h0.energies(1) - h0.energies(0);
    j["h0_convergence"] = h0_convergence(cfg.system(), cfg.integer("truncation.basis_size"),
                                         cfg.integer("truncation.K"), cfg.real("truncation.ho_frequency"));
    j["states"] = spec.size();
    return j;
}

json task_sweep(const Config& cfg, Writer& out, RunReport& rep) {
    const H0Spectrum h0 = h0_of(cfg);
    SweepOptions so;
    so.NF = cfg.integer("truncation.NF");
    so.track = cfg.integer("sweep.track");
    so.min_overlap = cfg.real("sweep.min_overlap");
    so.max_refine_depth = cfg.integer("sweep.max_refine_depth");
    so.workers = cfg.integer("run.workers");
    const std::vector<double> grid =
        linspace(cfg.real("sweep.F_min"), cfg.real("sweep.F_max"), cfg.integer("sweep.F_steps"));
    const SweepResult sw = sweep_amplitude(h0, cfg.system(), grid, so);
    warn_all(rep, sw.warnings);
    const std::vector<CrossingReport> cr = detect_crossings(sw, h0, cfg.system());
    out.csv("sweep.csv", [&](std::ostream& os) { write_sweep_csv(os, sw); });
    json cj;
    cj["crossings"] = json::parse(crossings_to_json(cr));
    out.json_file("crossings.json", cj);
    json j;
    j["points"] = sw.points.size();
    j["labels"] = sw.labels;
    j["crossings"] = cr.size();
    return j;
}

double slowest_period(const CrossingTriple& t) {
    double f = std::numeric_limits<double>::infinity();
    for (double v : {std::abs(t.e1), std::abs(t.e2), std::abs(t.e2 - t.e1)})
        if (v > 0.0) f = std::min(f, v);
    if (!std::isfinite(f)) throw NumericalError("crossing triple is fully degenerate");
    return 2.0 * std::numbers::pi / f;
}

json triple_json(const CrossingTriple& t) {
    json j;
    j["indices"] = {t.spectator, t.lower, t.upper};
    j["e1"] = t.e1;
    j["e2"] = t.e2;
    j["mixing_angle"] = t.mixing_angle;
    j["sin2_mixing_angle"] = std::pow(std::sin(t.mixing_angle), 2);
    j["E_r"] = t.E_r;
    j["E_c"] = t.E_c;
    j["x_right"] = t.x_right;
    const ThreeStateParams p = t.params();
    j["model"] = {{"delta", p.delta}, {"delta_c", p.delta_c}, {"b", p.b}};
    return j;
}

json task_tunnel(const Config& cfg, Writer& out, RunReport& rep) {
    const H0Spectrum h0 = h0_of(cfg);
    const FloquetSpectrum spec = floquet_at(cfg, h0, rep);
    const CrossingTriple tri = find_crossing_triple(spec, h0.x);
    double t_max = cfg.real("tunnel.t_max");
    if (t_max == 0.0) t_max = 10.0 * slowest_period(tri);
    const int n = cfg.integer("tunnel.samples");
    const std::vector<double> times = linspace(0.0, t_max, n);
    const std::vector<TunnelProbabilities> P = coherent_tunneling(tri, times);
    out.csv("tunnel.csv", [&](std::ostream& os) { write_tunnel_csv(os, times, P); });

    std::vector<double> pr;
    double pc_max = 0.0;
    for (const TunnelProbabilities& p : P) {
        pr.push_back(p.right);
        pc_max = std::max(pc_max, p.chaotic);
    }
    json j = triple_json(tri);
    j["t_max"] = t_max;
    j["max_P_c"] = pc_max;
    j["frequencies"] = {std::abs(tri.e1), std::abs(tri.e2), std::abs(tri.e2 - tri.e1)};
    json peaks = json::array();
    for (const SpectralPeak& pk : spectral_peaks(pr, times[1] - times[0])) {
        peaks.push_back({{"frequency", pk.frequency}, {"amplitude", pk.amplitude}});
    }
    j["P_R_peaks"] = peaks;
    const ThreeStateParams mp = tri.params();
    if (mp.delta > 0.0 && mp.b > 0.0) warn_all(rep, mp.hierarchy_warnings(cfg.real("system.omega")));
    out.json_file("tunnel.json", j);
    return j;
}

json task_dissipate(const Config& cfg, Writer& out, RunReport& rep) {
    const H0Spectrum h0 = h0_of(cfg);
    const FloquetSpectrum spec = floquet_at(cfg, h0, rep);
    const int M = cfg.integer("truncation.M");
    const std::vector<FloquetState> states = retained(spec, M);
    const CrossingTriple tri = find_crossing_triple(spec, h0.x);
    const XCoefficients X = x_fourier_coefficients(states, h0.x);
    if (X.tail_weight > 1e-10) {
        rep.messages.push_back("warning: position Fourier coefficients not converged in the sideband range (tail " +
                               detail::fmt(X.tail_weight) + ")");
    }
    const double omega = cfg.real("system.omega");
    const BathParams bath = cfg.bath();
    KernelOptions ko;
    ko.crude_rwa = cfg.boolean("bath.crude_rwa");
    Eigen::VectorXd eps(M);
    for (int a = 0; a < M; ++a) eps(a) = states[a].quasienergy;
    warn_all(rep, weak_coupling_warnings(bath, eps, omega));

    double t_max = cfg.real("dissipate.t_max");
    if (t_max == 0.0) t_max = 5.0 * slowest_period(tri);
    const std::vector<double> times = linspace(0.0, t_max, cfg.integer("dissipate.samples"));
    const Eigen::MatrixXcd sigma0 = localized_density_matrix(tri, M);
    Trajectory tr;
    if (cfg.get("dissipate.generator") == "periodic") {
        tr = propagate_periodic(PeriodicGenerator(states, X, bath, omega), sigma0, times);
    } else {
        tr = propagate_rwa(assemble_rwa_kernel(states, X, bath, omega, ko), sigma0, times);
    }
    warn_all(rep, tr.warnings);
    out.csv("trajectory.csv", [&](std::ostream& os) { write_trajectory_csv(os, project_trajectory(tri, tr)); });

    const double beat = 2.0 * std::numbers::pi / std::abs(tri.e2 - tri.e1);
    json scales = json::array();
    for (double kT : temperatures(cfg, "dissipate.temperatures")) {
        BathParams b = bath;
        b.kT = kT;
        const DissipativeKernel k = assemble_rwa_kernel(states, X, b, omega, ko);
        json e;
        e["F"] = cfg.real("system.F");
        e["kT"] = kT;
        e["gamma"] = b.gamma;
        const DecoherenceResult d = decoherence_time(k, sigma0, beat, cfg.integer("dissipate.max_beats"));
        e["t_decoh"] = d.present ? num(d.t_decoh) : json(nullptr);
        e["beats"] = d.beats;
        if (b.gamma > 0.0) {
            e["t_relax"] = relaxation_time(k);
        } else {
            e["t_relax"] = nullptr;
            rep.messages.push_back("note: gamma = 0, no relaxation");
        }
        scales.push_back(e);
    }
    json j;
    j["triple"] = triple_json(tri);
    j["beat_period"] = beat;
    j["t_max"] = t_max;
    j["generator"] = cfg.get("dissipate.generator");
    j["max_trace_drift"] = tr.max_trace_drift;
    j["max_hermiticity_drift"] = tr.max_hermiticity_drift;
    j["max_parity_leak"] = tr.max_parity_leak;
    j["min_eigenvalue"] = tr.min_eigenvalue;
    j["timescales"] = scales;
    out.json_file("timescales.json", j);
    return j;
}

json task_attractor(const Config& cfg, Writer& out, RunReport& rep) {
    const H0Spectrum h0 = h0_of(cfg);
    const FloquetSpectrum spec = floquet_at(cfg, h0, rep);
    const int M = cfg.integer("truncation.M");
    const std::vector<FloquetState> states = retained(spec, M);
    const XCoefficients X = x_fourier_coefficients(states, h0.x);
    const double omega = cfg.real("system.omega");
    KernelOptions ko;
    ko.crude_rwa = cfg.boolean("bath.crude_rwa");
    const bool three = cfg.boolean("attractor.three_level");
    CrossingTriple tri;
    if (three) tri = find_crossing_triple(spec, h0.x);

    json list = json::array();
    const std::vector<double> T = temperatures(cfg, "attractor.temperatures");
    for (std::size_t i = 0; i < T.size(); ++i) {
        BathParams b = cfg.bath();
        b.kT = T[i];
        const DissipativeKernel k = assemble_rwa_kernel(states, X, b, omega, ko);
        const AttractorResult a = asymptotic_state(k);
        if (a.null_dimension != 1) {
            rep.messages.push_back("warning: attractor at kT=" + detail::fmt(T[i]) + " has a " +
                                   std::to_string(a.null_dimension) + "-dimensional stationary space");
        }
        char name[32];
        std::snprintf(name, sizeof name, "attractor_%02zu.csv", i);
        out.csv(name, [&](std::ostream& os) { write_attractor_csv(os, k, a); });
        json e;
        e["kT"] = T[i];
        e["file"] = name;
        e["purity"] = a.purity;
        e["residual"] = a.residual;
        e["null_dimension"] = a.null_dimension;
        if (three) {
            const std::array<int, 3> idx = tri.indices();
            const DissipativeKernel k3 = restrict_to_states(spec.states, h0.x, {idx[0], idx[1], idx[2]}, b, omega, ko);
            e["purity_three_level"] = asymptotic_state(k3, false).purity;
        }
        list.push_back(e);
    }
    json j;
    j["F"] = cfg.real("system.F");
    j["gamma"] = cfg.real("bath.gamma");
    j["M"] = M;
    j["attractors"] = list;
    out.json_file("attractor.json", j);
    return j;
}

json task_classical(const Config& cfg, Writer& out, RunReport&) {
    const std::vector<PhasePoint> seeds =
        seed_grid(cfg.real("classical.x_min"), cfg.real("classical.x_max"), cfg.integer("classical.nx"),
                  cfg.real("classical.p_min"), cfg.real("classical.p_max"), cfg.integer("classical.np"));
    const std::vector<PortraitPoint> pts = portrait(seeds, cfg.integer("classical.periods"), cfg.system(),
                                                    cfg.integer("run.workers"), cfg.classical_options());
    out.csv("portrait.csv", [&](std::ostream& os) { write_portrait_csv(os, pts); });
    std::vector<char> right(seeds.size(), 0), left(seeds.size(), 0);
    for (const PortraitPoint& q : pts) {
        if (q.x > 0.0) right[q.seed] = 1;
        if (q.x < 0.0) left[q.seed] = 1;
    }
    int both = 0;
    for (std::size_t i = 0; i < seeds.size(); ++i) both += right[i] && left[i];
    json j;
    j["seeds"] = seeds.size();
    j["seeds_visiting_both_wells"] = both;
    return j;
}

} // namespace

ValidationReport validate_config(const Config& cfg) {
    ValidationReport r;
    r.errors = cfg.problems();
    if (!r.valid()) return r;
    const BathParams bath = cfg.bath();
    if (bath.kT > 0.0 && !(bath.gamma < bath.kT)) {
        r.warnings.push_back("weak coupling: gamma = " + detail::fmt(bath.gamma) + " is not below kT = " +
                             detail::fmt(bath.kT));
    }
    for (double kT : cfg.real_list("dissipate.temperatures")) {
        if (kT > 0.0 && !(bath.gamma < kT)) {
            r.warnings.push_back("weak coupling: gamma is not below dissipate temperature " + detail::fmt(kT));
        }
    }
    const H0Spectrum h0 = h0_of(cfg);
    const double gap = min_level_spacing(h0, cfg.integer("truncation.M"));
    if (!(bath.gamma < gap)) {
        r.warnings.push_back("weak coupling: gamma = " + detail::fmt(bath.gamma) +
                             " is not below the smallest level spacing " + detail::fmt(gap) +
                             " of the retained states");
    }
    const std::vector<double> T = temperatures(cfg, "attractor.temperatures");
    if (std::find(T.begin(), T.end(), 0.0) != T.end()) {
        r.notes.push_back("kT = 0 in the attractor temperatures: upward rates vanish");
    }
    return r;
}

RunReport run(const Config& cfg, Task task, const fs::path& out_dir) {
    RunReport rep;
    rep.task = task;
    if (task == Task::validate) {
        const ValidationReport v = validate_config(cfg);
        rep.valid = v.valid();
        json j;
        j["valid"] = v.valid();
        json errs = json::array();
        for (const auto& [field, msg] : v.errors) {
            rep.messages.push_back("error: " + field + ": " + msg);
            errs.push_back({{"field", field}, {"message", msg}});
        }
        for (const std::string& w : v.warnings) rep.messages.push_back("warning: " + w);
        for (const std::string& n : v.notes) rep.messages.push_back("note: " + n);
        j["errors"] = errs;
        j["warnings"] = v.warnings;
        j["notes"] = v.notes;
        rep.summary_json = j.dump(2);
        return rep;
    }
    cfg.validate();
    const std::string hash = cfg.hash();
    Writer out(out_dir.empty() ? fs::path(cfg.get("run.output_dir")) : out_dir, hash, rep);
    json summary;
    switch (task) {
    case Task::spectrum: summary = task_spectrum(cfg, out, rep); break;
    case Task::sweep: summary = task_sweep(cfg, out, rep); break;
    case Task::tunnel: summary = task_tunnel(cfg, out, rep); break;
    case Task::dissipate: summary = task_dissipate(cfg, out, rep); break;
    case Task::attractor: summary = task_attractor(cfg, out, rep); break;
    case Task::classical: summary = task_classical(cfg, out, rep); break;
    case Task::validate: break;
    }

    json manifest;
    manifest["tool"] = "dwfloquet";
    manifest["version"] = DWF_VERSION_STRING;
    manifest["task"] = task_name(task);
    manifest["config_hash"] = hash;
    manifest["created"] = utc_timestamp();
    json cfgj;
    for (const auto& [k, v] : cfg.values()) cfgj[k] = v;
    manifest["config"] = cfgj;
    json arts = json::array();
    for (const Artifact& a : rep.artifacts) arts.push_back({{"path", a.path}, {"sha256", a.sha256}});
    manifest["artifacts"] = arts;
    manifest["messages"] = rep.messages;
    {
        const fs::path p = out.dir() / "manifest.json";
        std::ofstream os(p, std::ios::binary | std::ios::trunc);
        if (!os) throw IoError("cannot write " + p.string());
        os << manifest.dump(2) << '\n';
    }
    summary["task"] = task_name(task);
    summary["output_dir"] = out.dir().string();
    rep.summary_json = summary.dump(2);
    return rep;
}

} // namespace dwf
