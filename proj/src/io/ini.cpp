#include "nlx/io/ini.hpp"

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "nlx/core/errors.hpp"

namespace nlx::io {

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

double parse_double(std::string_view s, const std::string& context) {
    const std::string t = trim(s);
    if (t == "inf" || t == "+inf") return HUGE_VAL;
    if (t == "-inf") return -HUGE_VAL;
    if (t.empty()) throw InvalidInput(context + ": expected a number");
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size() || errno == ERANGE || std::isnan(v))
        throw InvalidInput(context + ": '" + t + "' is not a number");
    return v;
}

int parse_int(std::string_view s, const std::string& context) {
    const std::string t = trim(s);
    char* end = nullptr;
    errno = 0;
    const long v = std::strtol(t.c_str(), &end, 10);
    if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE || v < -(1L << 30) || v > (1L << 30))
        throw InvalidInput(context + ": '" + t + "' is not an integer");
    return static_cast<int>(v);
}

IniDocument IniDocument::parse(std::string_view text, std::string origin) {
    IniDocument doc;
    doc.origin_ = std::move(origin);
    std::istringstream in{std::string(text)};
    std::string raw;
    int line = 0;
    IniSection* current = nullptr;
    auto where = [&] { return doc.origin_ + ":" + std::to_string(line); };
    while (std::getline(in, raw)) {
        ++line;
        const std::string s = trim(raw);
        if (s.empty() || s[0] == '#' || s[0] == ';') continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw InvalidInput(where() + ": malformed section header");
            const std::string name = trim(std::string_view(s).substr(1, s.size() - 2));
            if (name.empty()) throw InvalidInput(where() + ": empty section name");
            if (doc.find(name)) throw InvalidInput(where() + ": section [" + name + "] repeated");
            doc.sections_.push_back(IniSection{name, line, {}, {}, {}});
            current = &doc.sections_.back();
            continue;
        }
        if (!current) throw InvalidInput(where() + ": content before the first section");
        const std::size_t eq = s.find('=');
        if (eq == std::string::npos) {
            current->rows.push_back(s);
            current->row_lines.push_back(line);
            continue;
        }
        const std::string key = trim(std::string_view(s).substr(0, eq));
        const std::string value = trim(std::string_view(s).substr(eq + 1));
        if (key.empty()) throw InvalidInput(where() + ": empty key");
        if (!current->entries.emplace(key, value).second)
            throw InvalidInput(where() + ": key '" + key + "' repeated in [" + current->name + "]");
    }
    return doc;
}

IniDocument IniDocument::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path.string());
}

const IniSection* IniDocument::find(std::string_view name) const {
    for (const auto& s : sections_)
        if (s.name == name) return &s;
    return nullptr;
}

SectionReader::SectionReader(const IniSection* section, std::string name)
    : section_(section), name_(std::move(name)) {}

bool SectionReader::has(const std::string& key) const {
    return section_ && section_->entries.count(key) > 0;
}

std::string SectionReader::get(const std::string& key, const std::string& fallback) {
    used_.insert(key);
    if (!has(key)) return fallback;
    return section_->entries.at(key);
}

std::string SectionReader::require(const std::string& key) {
    used_.insert(key);
    if (!has(key)) throw InvalidInput("[" + name_ + "] is missing '" + key + "'");
    return section_->entries.at(key);
}

double SectionReader::get_double(const std::string& key, double fallback) {
    used_.insert(key);
    if (!has(key)) return fallback;
    return parse_double(section_->entries.at(key), "[" + name_ + "] " + key);
}

double SectionReader::require_double(const std::string& key) {
    return parse_double(require(key), "[" + name_ + "] " + key);
}

int SectionReader::get_int(const std::string& key, int fallback) {
    used_.insert(key);
    if (!has(key)) return fallback;
    return parse_int(section_->entries.at(key), "[" + name_ + "] " + key);
}

bool SectionReader::get_bool(const std::string& key, bool fallback) {
    used_.insert(key);
    if (!has(key)) return fallback;
    const std::string v = section_->entries.at(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw InvalidInput("[" + name_ + "] " + key + ": expected true or false");
}

std::vector<double> SectionReader::get_list(const std::string& key, std::vector<double> fallback) {
    used_.insert(key);
    if (!has(key)) return fallback;
    std::vector<double> out;
    for (const auto& item : split(section_->entries.at(key), ','))
        out.push_back(parse_double(item, "[" + name_ + "] " + key));
    return out;
}

double SectionReader::get_positive(const std::string& key, double fallback) {
    const double v = get_double(key, fallback);
    if (!(v > 0.0)) throw InvalidInput("[" + name_ + "] " + key + " must be positive");
    return v;
}

void SectionReader::finish() const {
    if (!section_) return;
    for (const auto& [key, value] : section_->entries)
        if (!used_.count(key)) throw InvalidInput("[" + name_ + "] has unknown key '" + key + "'");
    if (!section_->rows.empty())
        throw InvalidInput("[" + name_ + "] line " + std::to_string(section_->row_lines.front()) +
                           ": expected key = value");
}

}  // namespace nlx::io
