#include "dwfloquet/dwfloquet.h"

#include "dwfloquet/basis.hpp"
#include "dwfloquet/classical.hpp"
#include "dwfloquet/config.hpp"
#include "dwfloquet/dissipation.hpp"
#include "dwfloquet/errors.hpp"
#include "dwfloquet/floquet.hpp"
#include "dwfloquet/runner.hpp"
#include "dwfloquet/three_state.hpp"

#include <algorithm>
#include <exception>
#include <memory>
#include <new>
#include <string>
#include <vector>

struct dwf_config {
    dwf::Config cfg;
    std::string scratch;
};

struct dwf_report {
    dwf::RunReport rep;
};

struct dwf_spectrum {
    dwf::H0Spectrum h0;
    dwf::FloquetSpectrum spec;
};

namespace {

thread_local std::string last_error;
thread_local std::string last_field;

dwf_status fail(dwf_status s, const std::string& msg, const std::string& field = "") {
    last_error = msg;
    last_field = field;
    return s;
}

template <class F>
dwf_status guard(F&& body) {
    try {
        last_error.clear();
        last_field.clear();
        body();
        return DWF_OK;
    } catch (const dwf::ConfigError& e) {
        return fail(DWF_ERR_CONFIG, e.what(), e.field());
    } catch (const dwf::Error& e) {
        switch (e.code()) {
        case dwf::ErrorCode::invalid_argument: return fail(DWF_ERR_INVALID_ARGUMENT, e.what());
        case dwf::ErrorCode::config: return fail(DWF_ERR_CONFIG, e.what());
        case dwf::ErrorCode::numerical: return fail(DWF_ERR_NUMERICAL, e.what());
        case dwf::ErrorCode::io: return fail(DWF_ERR_IO, e.what());
        case dwf::ErrorCode::internal: return fail(DWF_ERR_INTERNAL, e.what());
        }
        return fail(DWF_ERR_INTERNAL, e.what());
    } catch (const std::bad_alloc&) {
        return fail(DWF_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(DWF_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(DWF_ERR_INTERNAL, "unknown exception");
    }
}

#define DWF_REQUIRE(cond, msg)                                                                                         \
    do {                                                                                                               \
        if (!(cond)) return fail(DWF_ERR_INVALID_ARGUMENT, msg);                                                       \
    } while (0)

} // namespace

extern "C" {

const char* dwf_version(void) {
    return DWF_VERSION_STRING;
}

const char* dwf_last_error(void) {
    return last_error.c_str();
}

const char* dwf_last_error_field(void) {
    return last_field.c_str();
}

const char* dwf_reference_page(void) {
    static const std::string page = dwf::config_reference_page();
    return page.c_str();
}

dwf_status dwf_config_create(dwf_config** out) {
    DWF_REQUIRE(out != nullptr, "dwf_config_create: out is NULL");
    return guard([&] { *out = new dwf_config(); });
}

void dwf_config_destroy(dwf_config* cfg) {
    delete cfg;
}

dwf_status dwf_config_load(dwf_config* cfg, const char* path) {
    DWF_REQUIRE(cfg != nullptr && path != nullptr, "dwf_config_load: NULL argument");
    return guard([&] { cfg->cfg.load_file(path); });
}

dwf_status dwf_config_set(dwf_config* cfg, const char* key, const char* value) {
    DWF_REQUIRE(cfg != nullptr && key != nullptr && value != nullptr, "dwf_config_set: NULL argument");
    return guard([&] { cfg->cfg.set(key, value); });
}

dwf_status dwf_config_get(dwf_config* cfg, const char* key, const char** value) {
    DWF_REQUIRE(cfg != nullptr && key != nullptr && value != nullptr, "dwf_config_get: NULL argument");
    return guard([&] {
        cfg->scratch = cfg->cfg.get(key);
        *value = cfg->scratch.c_str();
    });
}

dwf_status dwf_config_hash(dwf_config* cfg, const char** value) {
    DWF_REQUIRE(cfg != nullptr && value != nullptr, "dwf_config_hash: NULL argument");
    return guard([&] {
        cfg->scratch = cfg->cfg.hash();
        *value = cfg->scratch.c_str();
    });
}

dwf_status dwf_config_validate(const dwf_config* cfg) {
    DWF_REQUIRE(cfg != nullptr, "dwf_config_validate: NULL argument");
    return guard([&] { cfg->cfg.validate(); });
}

dwf_status dwf_run(const dwf_config* cfg, const char* task, const char* out_dir, dwf_report** report) {
    DWF_REQUIRE(cfg != nullptr && task != nullptr && report != nullptr, "dwf_run: NULL argument");
    *report = nullptr;
    return guard([&] {
        const dwf::Task t = dwf::parse_task(task);
        auto r = std::make_unique<dwf_report>();
        r->rep = dwf::run(cfg->cfg, t, out_dir != nullptr ? std::filesystem::path(out_dir) : std::filesystem::path());
        *report = r.release();
    });
}

size_t dwf_report_line_count(const dwf_report* report) {
    return report == nullptr ? 0 : report->rep.messages.size();
}

const char* dwf_report_line(const dwf_report* report, size_t i) {
    if (report == nullptr || i >= report->rep.messages.size()) return "";
    return report->rep.messages[i].c_str();
}

const char* dwf_report_json(const dwf_report* report) {
    return report == nullptr ? "" : report->rep.summary_json.c_str();
}

int dwf_report_valid(const dwf_report* report) {
    return report != nullptr && report->rep.valid ? 1 : 0;
}

void dwf_report_destroy(dwf_report* report) {
    delete report;
}

dwf_status dwf_spectrum_compute(double D, double F, double omega, int K, int NF, dwf_spectrum** out) {
    DWF_REQUIRE(out != nullptr, "dwf_spectrum_compute: out is NULL");
    *out = nullptr;
    return guard([&] {
        const dwf::SystemParams sp = dwf::SystemParams::from_rescaled(D, F, omega);
        sp.validate();
        if (K < 2) throw dwf::InvalidArgument("K must be >= 2");
        auto s = std::make_unique<dwf_spectrum>();
        s->h0 = dwf::solve_h0(sp, std::max(300, 5 * K), K);
        s->spec = dwf::solve_floquet(s->h0, sp, NF);
        *out = s.release();
    });
}

size_t dwf_spectrum_size(const dwf_spectrum* s) {
    return s == nullptr ? 0 : s->spec.states.size();
}

dwf_status dwf_spectrum_state(const dwf_spectrum* s, size_t i, double* quasienergy, int* parity, double* mean_energy) {
    DWF_REQUIRE(s != nullptr, "dwf_spectrum_state: NULL spectrum");
    DWF_REQUIRE(i < s->spec.states.size(), "dwf_spectrum_state: index out of range");
    const dwf::FloquetState& st = s->spec.states[i];
    if (quasienergy != nullptr) *quasienergy = st.quasienergy;
    if (parity != nullptr) *parity = st.parity;
    if (mean_energy != nullptr) *mean_energy = st.mean_energy;
    return DWF_OK;
}

dwf_status dwf_spectrum_attractor_purity(const dwf_spectrum* s, int M, double gamma, double kT, double* purity) {
    DWF_REQUIRE(s != nullptr && purity != nullptr, "dwf_spectrum_attractor_purity: NULL argument");
    DWF_REQUIRE(M >= 1 && M <= s->spec.size(), "dwf_spectrum_attractor_purity: M out of range");
    return guard([&] {
        const std::vector<dwf::FloquetState> st(s->spec.states.begin(), s->spec.states.begin() + M);
        dwf::BathParams b;
        b.gamma = gamma;
        b.kT = kT;
        const dwf::DissipativeKernel k =
            dwf::assemble_rwa_kernel(st, dwf::x_fourier_coefficients(st, s->h0.x), b, s->spec.params.omega);
        *purity = dwf::asymptotic_state(k, false).purity;
    });
}

void dwf_spectrum_destroy(dwf_spectrum* s) {
    delete s;
}

dwf_status dwf_three_state_probabilities(double delta, double delta_c, double b, double t, double out[3]) {
    DWF_REQUIRE(out != nullptr, "dwf_three_state_probabilities: out is NULL");
    return guard([&] {
        dwf::ThreeStateParams p;
        p.delta = delta;
        p.delta_c = delta_c;
        p.b = b;
        const dwf::TunnelProbabilities r = dwf::tunneling_probabilities(p, t);
        out[0] = r.right;
        out[1] = r.left;
        out[2] = r.chaotic;
    });
}

dwf_status dwf_classical_orbit(double D, double F, double omega, double x0, double p0, int n_periods, double* xs,
                               double* ps) {
    DWF_REQUIRE(xs != nullptr && ps != nullptr, "dwf_classical_orbit: NULL output");
    return guard([&] {
        const dwf::SystemParams sp = dwf::SystemParams::from_rescaled(D, F, omega);
        const std::vector<dwf::PhasePoint> orbit = dwf::stroboscopic_orbit({x0, p0, 0.0}, n_periods, sp);
        for (std::size_t i = 0; i < orbit.size(); ++i) {
            xs[i] = orbit[i].x;
            ps[i] = orbit[i].p;
        }
    });
}

} // extern "C"
