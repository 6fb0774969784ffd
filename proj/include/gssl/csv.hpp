#pragma once
#include <cstdio>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace gssl {

/// One CSV cell: integer, floating-point (printed with 17 significant
/// digits so values round-trip exactly), or text.
using CsvCell = std::variant<long long, double, std::string>;

inline std::string csv_format(const CsvCell& cell) {
    if (std::holds_alternative<long long>(cell)) {
        return std::to_string(std::get<long long>(cell));
    }
    if (std::holds_alternative<double>(cell)) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", std::get<double>(cell));
        return buf;
    }
    // Text cells never carry structural characters; replace any that slip
    // through so rows stay rectangular.
    std::string s = std::get<std::string>(cell);
    for (char& c : s) {
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    }
    return s;
}

inline void csv_row(std::ostream& os, const std::vector<CsvCell>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
        if (i) os << ',';
        os << csv_format(cells[i]);
    }
    os << '\n';
}

inline void csv_header(std::ostream& os, const std::vector<std::string>& names) {
    for (size_t i = 0; i < names.size(); ++i) {
        if (i) os << ',';
        os << names[i];
    }
    os << '\n';
}

}  // namespace gssl
