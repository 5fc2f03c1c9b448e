#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace nlx::io {

/// `%.12g`, with inf/-inf/nan spelled out.
[[nodiscard]] std::string format_number(double v);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> row);
    [[nodiscard]] std::string str() const;
};

void write_text(const std::filesystem::path& path, const std::string& text);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

struct CheckResult {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

/// `CHECK <name> <value> <tol> <PASS|FAIL>` lines, failures first, otherwise
/// in insertion order.
[[nodiscard]] std::string summary_text(const std::vector<CheckResult>& results);
[[nodiscard]] bool all_pass(const std::vector<CheckResult>& results);

/// Rows of the lattice report `check,node,time,value,tolerance,pass`.
[[nodiscard]] CsvTable lattice_report_table();
void add_lattice_row(CsvTable& table, const std::string& check, const std::string& node, int time, double value,
                     double tolerance, bool pass);

}  // namespace nlx::io
