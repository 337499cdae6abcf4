#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "morphseg/error.hpp"

namespace morphseg {

inline bool is_ascii_lower(char c) { return c >= 'a' && c <= 'z'; }

inline bool is_ascii_alpha(char c) { return is_ascii_lower(c) || (c >= 'A' && c <= 'Z'); }

inline bool is_ascii_digit(char c) { return c >= '0' && c <= '9'; }

inline bool is_vowel(char c)
{
    return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

inline char to_ascii_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

inline std::string to_lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), to_ascii_lower);
    return out;
}

/// True iff `s` is non-empty and consists of ASCII a-z only.
inline bool is_lower_alpha_word(std::string_view s)
{
    return !s.empty() && std::all_of(s.begin(), s.end(), is_ascii_lower);
}

inline std::string_view trim(std::string_view s)
{
    const auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    while (!s.empty() && ws(s.front())) s.remove_prefix(1);
    while (!s.empty() && ws(s.back())) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string> split(std::string_view s, char sep)
{
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            parts.emplace_back(s.substr(start));
            return parts;
        }
        parts.emplace_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

inline std::string join(const std::vector<std::string>& parts, std::string_view sep)
{
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) out += sep;
        out += parts[i];
    }
    return out;
}

/// A line read from a list file together with its 1-based line number.
struct NumberedLine {
    std::size_t line_number;
    std::string text;
};

/// Reads every line of a UTF-8 text file. A trailing '\r' is stripped.
inline std::vector<NumberedLine> read_lines(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open " + path.string());
    std::vector<NumberedLine> lines;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back({n, line});
    }
    return lines;
}

/// Reads a list file: one entry per line, blank lines and '#' comments skipped,
/// entries trimmed and lowercased.
inline std::vector<NumberedLine> read_list_file(const std::filesystem::path& path)
{
    std::vector<NumberedLine> entries;
    for (auto& line : read_lines(path)) {
        const auto t = trim(line.text);
        if (t.empty() || t.front() == '#') continue;
        entries.push_back({line.line_number, to_lower(t)});
    }
    return entries;
}

}  // namespace morphseg
