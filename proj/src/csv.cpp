#include "pite/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pite::io {

std::string format_double(double x) {
    std::string best;
    for (int prec = 1; prec <= 17; ++prec) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.*g", prec, x);
        if (std::strtod(buf, nullptr) == x) {
            best = buf;
            break;
        }
    }
    // prefer the plain integer rendering when it is no longer
    if (std::abs(x) < 1e15 && x == std::rint(x)) {
        char plain[40];
        std::snprintf(plain, sizeof(plain), "%.0f", x);
        if (best.empty() || std::string(plain).size() <= best.size()) return plain;
    }
    return best;
}

std::string format_optional(const std::optional<double>& x) {
    return x ? format_double(*x) : std::string("NA");
}

std::optional<double> parse_optional(const std::string& field) {
    if (field == "NA" || field.empty()) return std::nullopt;
    return std::strtod(field.c_str(), nullptr);
}

double parse_double(const std::string& field) {
    char* end = nullptr;
    double v = std::strtod(field.c_str(), &end);
    if (end == field.c_str()) throw std::runtime_error("not a number: '" + field + "'");
    return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

int CsvTable::column(const std::string& name) const {
    for (size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
    return -1;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty csv: " + path);
    t.header = split_csv_line(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != t.header.size())
            throw std::runtime_error("ragged csv row in " + path);
        t.rows.push_back(std::move(fields));
    }
    return t;
}

void write_lines(const std::string& path, const std::vector<std::string>& lines) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (const auto& l : lines) out << l << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string join_csv(const std::vector<std::string>& fields) {
    std::string out;
    for (size_t i = 0; i < fields.size(); ++i) {
        if (i) out.push_back(',');
        out += fields[i];
    }
    return out;
}

}  // namespace pite::io
