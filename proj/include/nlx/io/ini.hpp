#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace nlx::io {

/// One `[name]` block: `key = value` entries and, for table-like sections,
/// bare data rows (lines without '=').
struct IniSection {
    std::string name;
    int line = 0;
    std::map<std::string, std::string> entries;
    std::vector<std::string> rows;
    std::vector<int> row_lines;
};

/// Flat sectioned key-value text. '#' and ';' at line start begin comments;
/// a repeated section or key is a schema error.
class IniDocument {
public:
    static IniDocument parse(std::string_view text, std::string origin = "<string>");
    static IniDocument load(const std::filesystem::path& path);

    [[nodiscard]] const std::vector<IniSection>& sections() const noexcept { return sections_; }
    [[nodiscard]] const IniSection* find(std::string_view name) const;
    [[nodiscard]] bool has(std::string_view name) const { return find(name) != nullptr; }
    [[nodiscard]] const std::string& origin() const noexcept { return origin_; }

private:
    std::string origin_;
    std::vector<IniSection> sections_;
};

/// Typed access to a section that remembers which keys were read, so that
/// `finish()` can reject unknown keys.
class SectionReader {
public:
    SectionReader(const IniSection* section, std::string name);

    [[nodiscard]] bool present() const noexcept { return section_ != nullptr; }
    [[nodiscard]] bool has(const std::string& key) const;
    [[nodiscard]] std::string get(const std::string& key, const std::string& fallback);
    [[nodiscard]] std::string require(const std::string& key);
    [[nodiscard]] double get_double(const std::string& key, double fallback);
    [[nodiscard]] double require_double(const std::string& key);
    [[nodiscard]] int get_int(const std::string& key, int fallback);
    [[nodiscard]] bool get_bool(const std::string& key, bool fallback);
    /// Comma-separated list of numbers.
    [[nodiscard]] std::vector<double> get_list(const std::string& key, std::vector<double> fallback);
    /// Positive number (tolerances, steps).
    [[nodiscard]] double get_positive(const std::string& key, double fallback);
    void finish() const;

private:
    const IniSection* section_;
    std::string name_;
    std::set<std::string> used_;
};

[[nodiscard]] std::string trim(std::string_view s);
[[nodiscard]] std::vector<std::string> split(std::string_view s, char sep);
[[nodiscard]] double parse_double(std::string_view s, const std::string& context);
[[nodiscard]] int parse_int(std::string_view s, const std::string& context);

}  // namespace nlx::io
