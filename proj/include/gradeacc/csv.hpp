#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace gradeacc::csv {

/// Raised by file readers: missing files, malformed headers, bad numbers.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Reads a CSV with an exact expected header. Returns one row of raw string
/// fields per data line. Throws InputError with the offending header echoed.
std::vector<std::vector<std::string>> read_rows(const std::string& path,
                                                const std::string& expected_header);

/// Reads a CSV with an exact expected header. Returns one row of parsed
/// doubles per data line. Throws InputError with the offending header or
/// field echoed.
std::vector<std::vector<double>> read_numeric_csv(const std::string& path,
                                                  const std::string& expected_header);

/// Shortest round-trip decimal representation (std::to_chars).
std::string format_double(double value);

/// Strict double parse of a whole field.
double parse_double(const std::string& field, const std::string& context);

}  // namespace gradeacc::csv
