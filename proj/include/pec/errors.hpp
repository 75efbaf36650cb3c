#pragma once

#include <stdexcept>
#include <string>

namespace pec {

// Parameters that violate a model precondition (e.g. r_open <= 1).
class InvalidParameters : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Malformed or inconsistent input data (CSV files, date ranges, series).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what, long line = -1)
        : std::runtime_error(line >= 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line)
    {}

    long line() const noexcept { return line_; }

private:
    long line_;
};

} // namespace pec
