#ifndef ENDCYCLE_TEXT_HPP
#define ENDCYCLE_TEXT_HPP

// Shared lexing for the line-based file formats.

#include <cctype>
#include <charconv>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"

namespace endcycle::text {

struct Token {
    std::string text;
    std::size_t line = 0;
    std::size_t column = 0;
};

struct Line {
    std::size_t number = 0;
    std::vector<Token> tokens;
};

inline bool is_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

inline bool is_identifier(std::string_view s) {
    if (s.empty() || std::isdigit(static_cast<unsigned char>(s.front()))) return false;
    for (char c : s)
        if (!is_name_char(c)) return false;
    return true;
}

/// Splits one source line. `{ } ( ) ; : =` and `->` are standalone tokens;
/// bracketed suffixes such as `v[+1]` stay attached to their name.
inline std::vector<Token> tokenize(std::string_view line, std::size_t line_number) {
    std::vector<Token> out;
    std::size_t i = 0;
    auto push = [&](std::size_t begin, std::size_t end) {
        out.push_back(Token{std::string(line.substr(begin, end - begin)), line_number, begin + 1});
    };
    while (i < line.size()) {
        char c = line[i];
        if (c == '#') break;
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (c == '{' || c == '}' || c == '(' || c == ')' || c == ';' || c == ':' || c == '=') {
            push(i, i + 1);
            ++i;
            continue;
        }
        if (c == '-' && i + 1 < line.size() && line[i + 1] == '>') {
            push(i, i + 2);
            i += 2;
            continue;
        }
        std::size_t begin = i;
        int depth = 0;
        while (i < line.size()) {
            char d = line[i];
            if (d == '[') ++depth;
            if (d == ']') --depth;
            if (depth == 0 && (std::isspace(static_cast<unsigned char>(d)) || d == '{' || d == '}' ||
                               d == '(' || d == ')' || d == ';' || d == ':' || d == '=' || d == '#'))
                break;
            if (depth == 0 && d == '-' && i + 1 < line.size() && line[i + 1] == '>') break;
            ++i;
        }
        push(begin, i);
    }
    return out;
}

inline std::vector<Line> split_lines(std::string_view source) {
    std::vector<Line> lines;
    std::size_t number = 0;
    std::size_t pos = 0;
    while (pos <= source.size()) {
        std::size_t end = source.find('\n', pos);
        if (end == std::string_view::npos) end = source.size();
        ++number;
        auto tokens = tokenize(source.substr(pos, end - pos), number);
        if (!tokens.empty()) lines.push_back(Line{number, std::move(tokens)});
        if (end == source.size()) break;
        pos = end + 1;
    }
    return lines;
}

[[noreturn]] inline void fail(const Token& at, const std::string& message) {
    throw ParseError(at.line, at.column, message);
}

inline std::optional<std::int64_t> to_int(std::string_view s) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return value;
}

inline std::int64_t expect_int(const Token& token) {
    auto v = to_int(token.text);
    if (!v) fail(token, "expected integer, found '" + token.text + "'");
    return *v;
}

/// `name` or `name[<int>]`.
struct Ref {
    std::string name;
    std::optional<std::int64_t> index;
};

inline Ref parse_ref(const Token& token) {
    const std::string& s = token.text;
    auto open = s.find('[');
    if (open == std::string::npos) {
        if (!is_identifier(s)) fail(token, "bad name '" + s + "'");
        return Ref{s, std::nullopt};
    }
    if (s.back() != ']') fail(token, "unterminated index in '" + s + "'");
    Ref ref{s.substr(0, open), std::nullopt};
    if (!is_identifier(ref.name)) fail(token, "bad name '" + ref.name + "'");
    auto idx = to_int(std::string_view(s).substr(open + 1, s.size() - open - 2));
    if (!idx) fail(token, "bad index in '" + s + "'");
    ref.index = idx;
    return ref;
}

inline void expect(const Token& token, std::string_view what) {
    if (token.text != what) fail(token, "expected '" + std::string(what) + "', found '" + token.text + "'");
}

}  // namespace endcycle::text

#endif
