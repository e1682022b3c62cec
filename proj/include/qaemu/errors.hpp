#pragma once

#include <stdexcept>
#include <string>

namespace qaemu {

// Thrown when vector lengths disagree with the problem size.
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Thrown when an input violates a structural constraint (bad graph element,
// out-of-range parameter, all-zero Hamiltonian, ...).
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Thrown for inconsistent run/experiment configuration.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when a text file cannot be parsed; carries the 1-based line number.
struct ParseError : std::runtime_error {
    ParseError(const std::string& msg, int line_number)
        : std::runtime_error(msg + " (line " + std::to_string(line_number) + ")"),
          line(line_number) {}
    int line;
};

// Thrown when a randomized generator exhausts its retry budget.
struct GenerationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace qaemu
