#include "nlx/io/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "nlx/core/errors.hpp"

namespace nlx::io {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void CsvTable::add(std::vector<std::string> row) {
    if (row.size() != header.size()) throw std::logic_error("csv row width does not match the header");
    rows.push_back(std::move(row));
}

std::string CsvTable::str() const {
    std::string out;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("cannot write " + path.string());
    out << text;
    if (!out) throw InvalidInput("cannot write " + path.string());
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) { write_text(path, table.str()); }

std::string summary_text(const std::vector<CheckResult>& results) {
    std::vector<const CheckResult*> order;
    for (const auto& r : results) order.push_back(&r);
    std::stable_partition(order.begin(), order.end(), [](const CheckResult* r) { return !r->pass; });
    std::string out;
    for (const auto* r : order)
        out += "CHECK " + r->name + " " + format_number(r->value) + " " + format_number(r->tolerance) + " " +
               (r->pass ? "PASS" : "FAIL") + "\n";
    return out;
}

bool all_pass(const std::vector<CheckResult>& results) {
    return std::all_of(results.begin(), results.end(), [](const CheckResult& r) { return r.pass; });
}

CsvTable lattice_report_table() { return CsvTable{{"check", "node", "time", "value", "tolerance", "pass"}, {}}; }

void add_lattice_row(CsvTable& table, const std::string& check, const std::string& node, int time, double value,
                     double tolerance, bool pass) {
    table.add({check, node, std::to_string(time), format_number(value), format_number(tolerance),
               pass ? "true" : "false"});
}

}  // namespace nlx::io
