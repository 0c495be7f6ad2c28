#pragma once

#include <stdexcept>
#include <string>

namespace ec3r {

// Malformed instance text. `line` is 1-based within the parsed input.
class ParseError : public std::runtime_error {
public:
    ParseError(int line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    int line() const { return line_; }

private:
    int line_;
};

// A numerical routine failed to reach its accuracy target (never silently truncated).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace ec3r
