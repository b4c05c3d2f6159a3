#pragma once

#include <optional>
#include <string>
#include <vector>

namespace pite::io {

// Shortest decimal text that round-trips the double exactly (%.17g).
std::string format_double(double x);

// Missing values are the literal token "NA".
std::string format_optional(const std::optional<double>& x);
std::optional<double> parse_optional(const std::string& field);
double parse_double(const std::string& field);

std::vector<std::string> split_csv_line(const std::string& line);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const;  // -1 when absent
};

CsvTable read_csv(const std::string& path);
void write_lines(const std::string& path, const std::vector<std::string>& lines);

std::string join_csv(const std::vector<std::string>& fields);

}  // namespace pite::io
