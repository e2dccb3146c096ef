#include "dwfloquet/config.hpp"

#include "dwfloquet/errors.hpp"
#include "io_internal.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace dwf {

namespace {

const char* type_name(ValueType t) {
    switch (t) {
    case ValueType::real: return "real";
    case ValueType::integer: return "integer";
    case ValueType::boolean: return "boolean";
    case ValueType::text: return "text";
    case ValueType::real_list: return "list of reals";
    case ValueType::choice: return "choice";
    }
    return "?";
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool parse_real(const std::string& s, double& out) {
    const std::string t = trim(s);
    if (t.empty()) return false;
    const char* first = t.data();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), out);
    return ec == std::errc() && ptr == t.data() + t.size() && std::isfinite(out);
}

bool parse_int(const std::string& s, int& out) {
    const std::string t = trim(s);
    if (t.empty()) return false;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
    return ec == std::errc() && ptr == t.data() + t.size();
}

bool parse_bool(const std::string& s, bool& out) {
    const std::string t = trim(s);
    if (t == "true" || t == "1" || t == "yes" || t == "on") {
        out = true;
        return true;
    }
    if (t == "false" || t == "0" || t == "no" || t == "off") {
        out = false;
        return true;
    }
    return false;
}

bool parse_list(const std::string& s, std::vector<double>& out) {
    out.clear();
    const std::string t = trim(s);
    if (t.empty()) return true;
    std::stringstream ss(t);
    std::string item;
    while (std::getline(ss, item, ',')) {
        double v;
        if (!parse_real(item, v)) return false;
        out.push_back(v);
    }
    return true;
}

const ConfigKey* find_key(const std::string& name) {
    for (const ConfigKey& k : config_registry())
        if (k.name == name) return &k;
    return nullptr;
}

std::string check_value(const ConfigKey& k, const std::string& value) {
    double d;
    int i;
    bool b;
    std::vector<double> l;
    switch (k.type) {
    case ValueType::real:
        if (!parse_real(value, d)) return "expected a finite real number, got '" + value + "'";
        break;
    case ValueType::integer:
        if (!parse_int(value, i)) return "expected an integer, got '" + value + "'";
        break;
    case ValueType::boolean:
        if (!parse_bool(value, b)) return "expected true or false, got '" + value + "'";
        break;
    case ValueType::real_list:
        if (!parse_list(value, l)) return "expected a comma-separated list of reals, got '" + value + "'";
        break;
    case ValueType::choice:
        if (std::find(k.choices.begin(), k.choices.end(), trim(value)) == k.choices.end()) {
            std::string allowed;
            for (const std::string& c : k.choices) allowed += (allowed.empty() ? "" : ", ") + c;
            return "expected one of " + allowed + ", got '" + value + "'";
        }
        break;
    case ValueType::text:
        break;
    }
    return "";
}

// line numbers of "key = value" entries, for diagnostics only
std::map<std::string, int> key_lines(const std::string& text) {
    std::map<std::string, int> out;
    std::istringstream is(text);
    std::string line, section;
    int n = 0;
    while (std::getline(is, line)) {
        ++n;
        const std::string t = trim(line);
        if (t.empty() || t[0] == ';' || t[0] == '#') continue;
        if (t.front() == '[' && t.back() == ']') {
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = section.empty() ? trim(t.substr(0, eq)) : section + "." + trim(t.substr(0, eq));
        out.emplace(key, n);
    }
    return out;
}

} // namespace

const std::vector<ConfigKey>& config_registry() {
    using V = ValueType;
    static const std::vector<ConfigKey> reg = {
        {"system.D", V::real, "4", "barrier height D (hbar = m = 1)", {}},
        {"system.omega", V::real, "0.982", "driving frequency", {}},
        {"system.F", V::real, "0.015029", "rescaled driving amplitude F = S / sqrt(8 D)", {}},
        {"truncation.basis_size", V::integer, "300", "oscillator basis size used to diagonalize H0", {}},
        {"truncation.K", V::integer, "60", "number of H0 eigenstates kept in the Floquet problem", {}},
        {"truncation.NF", V::integer, "16", "sidebands n in [-NF, NF]", {}},
        {"truncation.M", V::integer, "20", "Floquet states (lowest mean energy) kept in the master equation", {}},
        {"truncation.ho_frequency", V::real, "1", "frequency of the oscillator basis", {}},
        {"bath.gamma", V::real, "1e-6", "damping constant of the Ohmic bath; 0 gives coherent dynamics", {}},
        {"bath.kT", V::real, "1e-4", "bath temperature k_B T", {}},
        {"bath.crude_rwa", V::boolean, "false", "keep only population rates and coherence decay in the kernel", {}},
        {"sweep.F_min", V::real, "0.010", "first amplitude of the sweep", {}},
        {"sweep.F_max", V::real, "0.018", "last amplitude of the sweep", {}},
        {"sweep.F_steps", V::integer, "81", "grid points between F_min and F_max inclusive", {}},
        {"sweep.track", V::integer, "30", "number of states followed by continuity", {}},
        {"sweep.min_overlap", V::real, "0.5", "overlap below which the grid is refined locally", {}},
        {"sweep.max_refine_depth", V::integer, "6", "bisection depth of the local refinement", {}},
        {"tunnel.t_max", V::real, "0", "end time; 0 picks ten periods of the slowest beat", {}},
        {"tunnel.samples", V::integer, "4096", "uniform time samples including t = 0", {}},
        {"dissipate.t_max", V::real, "0", "end time; 0 picks five periods of the slowest beat", {}},
        {"dissipate.samples", V::integer, "1000", "uniform time samples including t = 0", {}},
        {"dissipate.generator", V::choice, "rwa", "rwa (time-averaged kernel) or periodic (full generator, RK4)",
         {"rwa", "periodic"}},
        {"dissipate.temperatures", V::real_list, "1e-5,1e-4,1e-3",
         "temperatures for the decoherence and relaxation times; empty uses bath.kT", {}},
        {"dissipate.max_beats", V::integer, "200000", "beat periods allowed before the purity must reach 0.9", {}},
        {"attractor.temperatures", V::real_list, "1e-6,1e-5,1e-4,1e-3,1e-2",
         "temperatures for the asymptotic state; empty uses bath.kT", {}},
        {"attractor.three_level", V::boolean, "true", "also solve the kernel restricted to the crossing triple", {}},
        {"classical.x_min", V::real, "-8", "seed grid, position range", {}},
        {"classical.x_max", V::real, "8", "", {}},
        {"classical.nx", V::integer, "17", "seed grid points in x", {}},
        {"classical.p_min", V::real, "-1", "seed grid, momentum range", {}},
        {"classical.p_max", V::real, "1", "", {}},
        {"classical.np", V::integer, "5", "seed grid points in p", {}},
        {"classical.periods", V::integer, "300", "driving periods per seed", {}},
        {"classical.steps_per_period", V::integer, "256", "integrator steps per driving period", {}},
        {"run.output_dir", V::text, "dwf_output", "artifact directory; default taken from DWF_OUTPUT_ROOT if set", {}},
        {"run.workers", V::integer, "0", "worker threads for sweeps and portraits; 0 uses all cores", {}},
    };
    return reg;
}

std::string config_reference_page() {
    std::ostringstream os;
    os << "# dwfloquet configuration reference\n\n"
          "Generated by `dwfloquet defaults`. Configuration files are INI files; every key below\n"
          "can also be given on the command line as `--set section.key=value`, which wins over the\n"
          "file. `run.output_dir` defaults to `$DWF_OUTPUT_ROOT` when that variable is set.\n";
    std::string section;
    for (const ConfigKey& k : config_registry()) {
        const std::string sec = k.name.substr(0, k.name.find('.'));
        if (sec != section) {
            section = sec;
            os << "\n## [" << section << "]\n\n| key | type | default | meaning |\n|---|---|---|---|\n";
        }
        os << "| `" << k.name.substr(k.name.find('.') + 1) << "` | " << type_name(k.type) << " | `"
           << k.default_value << "` | " << k.doc << " |\n";
    }
    return os.str();
}

Config::Config() {
    for (const ConfigKey& k : config_registry()) values_[k.name] = k.default_value;
    if (const char* root = std::getenv("DWF_OUTPUT_ROOT"); root != nullptr && *root != '\0') {
        values_["run.output_dir"] = root;
    }
}

void Config::load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    load_string(ss.str(), path.string());
}

void Config::load_string(const std::string& text, const std::string& source) {
    boost::property_tree::ptree tree;
    std::istringstream is(text);
    try {
        boost::property_tree::ini_parser::read_ini(is, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        std::ostringstream os;
        os << source << ":" << e.line() << ": " << e.message();
        throw ConfigError("", os.str());
    }
    const std::map<std::string, int> lines = key_lines(text);
    auto where = [&](const std::string& key) {
        const auto it = lines.find(key);
        return it == lines.end() ? source : source + ":" + std::to_string(it->second);
    };
    for (const auto& [section, sub] : tree) {
        if (sub.empty()) throw ConfigError(section, where(section) + ": key outside a section");
        for (const auto& [key, node] : sub) {
            const std::string name = section + "." + key;
            const ConfigKey* k = find_key(name);
            if (k == nullptr) throw ConfigError(name, where(name) + ": unknown key");
            const std::string value = trim(node.get_value<std::string>());
            const std::string err = check_value(*k, value);
            if (!err.empty()) throw ConfigError(name, where(name) + ": " + err);
            values_[name] = value;
        }
    }
}

void Config::set(const std::string& key, const std::string& value) {
    const ConfigKey* k = find_key(key);
    if (k == nullptr) throw ConfigError(key, "unknown key");
    const std::string err = check_value(*k, value);
    if (!err.empty()) throw ConfigError(key, err);
    values_[key] = trim(value);
}

void Config::set_assignment(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("", "expected section.key=value, got '" + assignment + "'");
    set(trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

const std::string& Config::get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError(key, "unknown key");
    return it->second;
}

double Config::real(const std::string& key) const {
    double v;
    if (!parse_real(get(key), v)) throw ConfigError(key, "not a real number");
    return v;
}

int Config::integer(const std::string& key) const {
    int v;
    if (!parse_int(get(key), v)) throw ConfigError(key, "not an integer");
    return v;
}

bool Config::boolean(const std::string& key) const {
    bool v;
    if (!parse_bool(get(key), v)) throw ConfigError(key, "not a boolean");
    return v;
}

std::vector<double> Config::real_list(const std::string& key) const {
    std::vector<double> v;
    if (!parse_list(get(key), v)) throw ConfigError(key, "not a list of reals");
    return v;
}

std::vector<std::pair<std::string, std::string>> Config::problems() const {
    std::vector<std::pair<std::string, std::string>> out;
    auto need = [&](bool ok, const char* key, const char* msg) {
        if (!ok) out.emplace_back(key, msg);
    };
    const double D = real("system.D");
    need(D > 0.0, "system.D", "must be > 0");
    need(real("system.omega") > 0.0, "system.omega", "must be > 0");
    need(real("system.F") >= 0.0, "system.F", "must be >= 0");

    const int N = integer("truncation.basis_size"), K = integer("truncation.K");
    const int NF = integer("truncation.NF"), M = integer("truncation.M");
    need(K >= 2, "truncation.K", "must be >= 2");
    if (D > 0.0) need(K >= 2 * static_cast<int>(std::ceil(D)), "truncation.K", "must be >= 2 ceil(D)");
    need(N >= 2 * K, "truncation.basis_size", "must be >= 2 K");
    need(NF >= 1, "truncation.NF", "must be >= 1");
    need(M >= 3, "truncation.M", "must be >= 3");
    need(M <= K, "truncation.M", "must not exceed truncation.K");
    need(real("truncation.ho_frequency") > 0.0, "truncation.ho_frequency", "must be > 0");

    need(real("bath.gamma") >= 0.0, "bath.gamma", "must be >= 0");
    need(real("bath.kT") >= 0.0, "bath.kT", "must be >= 0");

    const double f0 = real("sweep.F_min"), f1 = real("sweep.F_max");
    const int fs = integer("sweep.F_steps");
    need(f0 >= 0.0, "sweep.F_min", "must be >= 0");
    need(fs >= 1, "sweep.F_steps", "must be >= 1");
    need(fs == 1 ? f1 >= f0 : f1 > f0, "sweep.F_max", "must exceed sweep.F_min");
    need(integer("sweep.track") >= 2, "sweep.track", "must be >= 2");
    need(integer("sweep.track") <= K, "sweep.track", "must not exceed truncation.K");
    const double mo = real("sweep.min_overlap");
    need(mo > 0.0 && mo < 1.0, "sweep.min_overlap", "must lie in (0, 1)");
    need(integer("sweep.max_refine_depth") >= 0, "sweep.max_refine_depth", "must be >= 0");

    need(real("tunnel.t_max") >= 0.0, "tunnel.t_max", "must be >= 0");
    need(integer("tunnel.samples") >= 8, "tunnel.samples", "must be >= 8");
    need(real("dissipate.t_max") >= 0.0, "dissipate.t_max", "must be >= 0");
    need(integer("dissipate.samples") >= 2, "dissipate.samples", "must be >= 2");
    need(integer("dissipate.max_beats") >= 1, "dissipate.max_beats", "must be >= 1");

    for (const char* key : {"dissipate.temperatures", "attractor.temperatures"}) {
        const std::vector<double> T = real_list(key);
        bool ok = true;
        for (std::size_t i = 0; i < T.size(); ++i) ok = ok && T[i] >= 0.0 && (i == 0 || T[i] > T[i - 1]);
        need(ok, key, "temperatures must be >= 0 and strictly increasing");
    }

    need(real("classical.x_max") >= real("classical.x_min"), "classical.x_max", "must be >= classical.x_min");
    need(real("classical.p_max") >= real("classical.p_min"), "classical.p_max", "must be >= classical.p_min");
    need(integer("classical.nx") >= 1, "classical.nx", "must be >= 1");
    need(integer("classical.np") >= 1, "classical.np", "must be >= 1");
    need(integer("classical.periods") >= 1, "classical.periods", "must be >= 1");
    need(integer("classical.steps_per_period") >= 16, "classical.steps_per_period", "must be >= 16");

    need(!get("run.output_dir").empty(), "run.output_dir", "must not be empty");
    need(integer("run.workers") >= 0, "run.workers", "must be >= 0");
    return out;
}

void Config::validate() const {
    const auto p = problems();
    if (!p.empty()) throw ConfigError(p.front().first, p.front().second);
}

std::string Config::canonical() const {
    std::ostringstream os;
    for (const auto& [k, v] : values_) {
        if (k == "run.output_dir" || k == "run.workers") continue;
        const ConfigKey* key = find_key(k);
        std::string norm = v;
        // numeric values hash by value, not spelling
        if (key != nullptr && key->type == ValueType::real) {
            double d;
            if (parse_real(v, d)) norm = detail::fmt(d);
        } else if (key != nullptr && key->type == ValueType::real_list) {
            std::vector<double> l;
            if (parse_list(v, l)) {
                norm.clear();
                for (std::size_t i = 0; i < l.size(); ++i) norm += (i ? "," : "") + detail::fmt(l[i]);
            }
        } else if (key != nullptr && key->type == ValueType::boolean) {
            bool b;
            if (parse_bool(v, b)) norm = b ? "true" : "false";
        }
        os << k << '=' << norm << '\n';
    }
    return os.str();
}

std::string Config::hash() const {
    return detail::sha256_hex(canonical());
}

SystemParams Config::system() const {
    return SystemParams::from_rescaled(real("system.D"), real("system.F"), real("system.omega"));
}

BathParams Config::bath() const {
    BathParams b;
    b.gamma = real("bath.gamma");
    b.kT = real("bath.kT");
    return b;
}

ClassicalOptions Config::classical_options() const {
    ClassicalOptions o;
    o.steps_per_period = integer("classical.steps_per_period");
    return o;
}

} // namespace dwf
