#pragma once

#include <stdexcept>
#include <string>

namespace dgmd {

/// Collinear or coincident atoms where an angle/dihedral/distance direction is undefined.
class DegenerateGeometry : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid experiment setup: box, decomposition, cell grid, force-field tables.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text. Carries the 1-based line number when known.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, int line)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line), detail_(what) {}
    int line() const noexcept { return line_; }
    /// The message without the line prefix.
    const std::string& detail() const noexcept { return detail_; }

private:
    int line_;
    std::string detail_;
};

/// A sink that could not be written or a file that could not be opened.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An implicit step whose nonlinear or linear solve did not converge.
class StepFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace dgmd
