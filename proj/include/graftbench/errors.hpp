#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace graftbench {

// Invalid configuration or unusable arguments (maps to exit/status code 2).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Failure writing output files (maps to exit/status code 3).
struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input data (maps to exit/status code 4).
struct InputError : std::runtime_error {
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
    InputError(const std::string& what, std::size_t line)
        : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line_number(line) {}
    std::size_t line_number = 0;
};

}  // namespace graftbench
