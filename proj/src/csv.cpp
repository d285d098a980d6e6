#include "gradeacc/csv.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace gradeacc::csv {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) {
        fields.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        fields.emplace_back();
    }
    return fields;
}

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    return line;
}

}  // namespace

std::vector<std::vector<double>> read_numeric_csv(const std::string& path,
                                                  const std::string& expected_header) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open input file: " + path);
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw InputError("empty CSV file: " + path);
    }
    line = strip_cr(line);
    if (line != expected_header) {
        throw InputError("malformed CSV header in " + path + ": expected `" + expected_header +
                         "`, got `" + line + "`");
    }
    const std::size_t n_cols = split_line(expected_header).size();

    std::vector<std::vector<double>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) {
            continue;
        }
        const auto fields = split_line(line);
        if (fields.size() != n_cols) {
            throw InputError(path + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(n_cols) + " fields, got " +
                             std::to_string(fields.size()));
        }
        std::vector<double> row;
        row.reserve(n_cols);
        for (const auto& f : fields) {
            row.push_back(parse_double(f, path + ":" + std::to_string(line_no)));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& field, const std::string& context) {
    double value = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    const auto res = std::from_chars(begin, end, value);
    if (res.ec != std::errc() || res.ptr != end) {
        throw InputError(context + ": cannot parse number `" + field + "`");
    }
    return value;
}

}  // namespace gradeacc::csv
