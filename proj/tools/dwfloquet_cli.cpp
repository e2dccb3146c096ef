// Command-line front end. Talks to the library only through the C API.
#include "dwfloquet/dwfloquet.h"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

namespace {

struct Common {
    std::string config;
    std::vector<std::string> sets;
    std::string output;
    bool json = false;
    bool quiet = false;
};

int exit_code(dwf_status s) {
    return s == DWF_OK ? 0 : static_cast<int>(s) + 1;
}

int report_error(dwf_status s) {
    std::cerr << "dwfloquet: error: " << dwf_last_error() << '\n';
    return exit_code(s);
}

int run_task(const std::string& task, const Common& c) {
    dwf_config* cfg = nullptr;
    dwf_status s = dwf_config_create(&cfg);
    if (s != DWF_OK) return report_error(s);
    struct Free {
        dwf_config* c;
        ~Free() { dwf_config_destroy(c); }
    } free_cfg{cfg};

    if (!c.config.empty() && (s = dwf_config_load(cfg, c.config.c_str())) != DWF_OK) return report_error(s);
    for (const std::string& a : c.sets) {
        const auto eq = a.find('=');
        if (eq == std::string::npos) {
            std::cerr << "dwfloquet: error: --set expects section.key=value, got '" << a << "'\n";
            return exit_code(DWF_ERR_CONFIG);
        }
        if ((s = dwf_config_set(cfg, a.substr(0, eq).c_str(), a.substr(eq + 1).c_str())) != DWF_OK) {
            return report_error(s);
        }
    }

    dwf_report* rep = nullptr;
    s = dwf_run(cfg, task.c_str(), c.output.empty() ? nullptr : c.output.c_str(), &rep);
    if (s != DWF_OK) return report_error(s);
    for (size_t i = 0; i < dwf_report_line_count(rep); ++i) std::cerr << dwf_report_line(rep, i) << '\n';
    if (c.json || task == "validate") {
        std::cout << dwf_report_json(rep) << '\n';
    } else if (!c.quiet) {
        std::cout << task << ": done\n";
    }
    const int valid = dwf_report_valid(rep);
    dwf_report_destroy(rep);
    return valid ? 0 : exit_code(DWF_ERR_CONFIG);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Floquet spectra and dissipative dynamics of the driven double well"};
    app.set_version_flag("--version", std::string(dwf_version()));
    app.require_subcommand(1);

    Common common;
    const std::vector<std::pair<std::string, std::string>> tasks = {
        {"spectrum", "undriven levels and the Floquet spectrum at system.F"},
        {"sweep", "quasienergies and mean energies along an amplitude sweep, with crossings"},
        {"tunnel", "coherent tunneling inside the crossing triple"},
        {"dissipate", "master-equation trajectory and decoherence/relaxation times"},
        {"attractor", "asymptotic state versus temperature"},
        {"classical", "stroboscopic phase-space portrait"},
        {"validate", "check a configuration without running it"},
    };
    std::string chosen;
    for (const auto& [name, help] : tasks) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("-c,--config", common.config, "INI configuration file")->check(CLI::ExistingFile);
        sub->add_option("-s,--set", common.sets, "override, section.key=value (repeatable)");
        if (name != "validate") {
            sub->add_option("-o,--output", common.output, "output directory (overrides run.output_dir)");
            sub->add_flag("--json", common.json, "print the run summary as JSON");
            sub->add_flag("-q,--quiet", common.quiet, "no progress line");
        }
        sub->callback([&chosen, n = name] { chosen = n; });
    }
    bool defaults = false;
    app.add_subcommand("defaults", "print the configuration reference page")->callback([&] { defaults = true; });

    CLI11_PARSE(app, argc, argv);
    if (defaults) {
        std::cout << dwf_reference_page();
        return 0;
    }
    return run_task(chosen, common);
}
