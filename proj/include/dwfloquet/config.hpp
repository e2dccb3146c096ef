#pragma once

#include "dwfloquet/classical.hpp"
#include "dwfloquet/dissipation.hpp"
#include "dwfloquet/params.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace dwf {

enum class ValueType { real, integer, boolean, text, real_list, choice };

struct ConfigKey {
    std::string name; // "section.key"
    ValueType type;
    std::string default_value;
    std::string doc;
    std::vector<std::string> choices; // ValueType::choice only
};

// Keys known to the runner, in reference-page order.
const std::vector<ConfigKey>& config_registry();

// Markdown page listing every key with its default.
std::string config_reference_page();

// Scenario configuration: INI file sections [system], [truncation], [bath],
// [sweep], [tunnel], [dissipate], [attractor], [classical], [run]. Values are
// type-checked on entry; ranges are checked by validate().
class Config {
public:
    Config(); // registry defaults; run.output_dir from DWF_OUTPUT_ROOT when set

    // Throws ConfigError naming the line and field.
    void load_file(const std::filesystem::path& path);
    void load_string(const std::string& text, const std::string& source = "<string>");

    // "section.key", value as text. Throws ConfigError for unknown keys or
    // values of the wrong type.
    void set(const std::string& key, const std::string& value);
    // "section.key=value"
    void set_assignment(const std::string& assignment);

    const std::string& get(const std::string& key) const;
    double real(const std::string& key) const;
    int integer(const std::string& key) const;
    bool boolean(const std::string& key) const;
    std::vector<double> real_list(const std::string& key) const;

    // All range problems as (field, message); empty when valid.
    std::vector<std::pair<std::string, std::string>> problems() const;
    // Throws ConfigError for the first problem.
    void validate() const;

    // Sorted key=value lines, run.output_dir and run.workers excluded.
    std::string canonical() const;
    std::string hash() const; // sha256 of canonical()

    SystemParams system() const;
    BathParams bath() const;
    ClassicalOptions classical_options() const;

    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

} // namespace dwf
