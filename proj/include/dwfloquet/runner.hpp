#pragma once

#include "dwfloquet/config.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace dwf {

enum class Task { spectrum, sweep, tunnel, dissipate, attractor, classical, validate };

// Throws ConfigError for unknown names.
Task parse_task(const std::string& name);
const char* task_name(Task t);

inline constexpr const char* csv_schema_line = "# dwfloquet-csv v1 config=";

struct ValidationReport {
    std::vector<std::pair<std::string, std::string>> errors; // (field, message)
    std::vector<std::string> warnings;
    std::vector<std::string> notes;
    bool valid() const { return errors.empty(); }
};

// Range and truncation checks plus weak-coupling warnings. Only the undriven
// spectrum is computed, for the level spacings.
ValidationReport validate_config(const Config& cfg);

struct Artifact {
    std::string path; // relative to the output directory
    std::string sha256;
};

struct RunReport {
    Task task = Task::validate;
    std::vector<std::string> messages; // "warning: ..." / "note: ..."
    std::vector<Artifact> artifacts;
    std::string summary_json;
    bool valid = true; // validate task only
};

// Runs one task and writes its CSV/JSON artifacts plus manifest.json into
// out_dir (run.output_dir when empty). Invalid configurations throw
// ConfigError; validate reports instead of throwing.
RunReport run(const Config& cfg, Task task, const std::filesystem::path& out_dir = {});

} // namespace dwf
