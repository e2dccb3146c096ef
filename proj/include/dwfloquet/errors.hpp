#pragma once

#include <stdexcept>
#include <string>

namespace dwf {

enum class ErrorCode {
    invalid_argument = 1,
    config = 2,
    numerical = 3,
    io = 4,
    internal = 5,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

struct InvalidArgument : Error {
    explicit InvalidArgument(const std::string& w) : Error(ErrorCode::invalid_argument, w) {}
};

// Carries the offending "section.key" so front ends can point at it.
struct ConfigError : Error {
    ConfigError(std::string field, const std::string& w)
        : Error(ErrorCode::config, field.empty() ? w : field + ": " + w), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

struct NumericalError : Error {
    explicit NumericalError(const std::string& w) : Error(ErrorCode::numerical, w) {}
};

struct IoError : Error {
    explicit IoError(const std::string& w) : Error(ErrorCode::io, w) {}
};

struct InternalError : Error {
    explicit InternalError(const std::string& w) : Error(ErrorCode::internal, w) {}
};

} // namespace dwf
