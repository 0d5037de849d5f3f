#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace metacog {

/// Malformed input file; carries the 1-based line number when known.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what)
        : std::runtime_error(source.empty() ? what
                                            : source + (line ? ":" + std::to_string(line) : std::string()) + ": " + what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A file could not be opened, created or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace metacog
