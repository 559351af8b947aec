// SPDX-License-Identifier: Apache-2.0
#include "taskforge/text.hpp"

#include <cctype>

namespace taskforge::text {

namespace {

bool is_space(char c) {
    return std::isspace(static_cast<unsigned char>(c)) != 0;
}

bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '.';
}

// Token-boundary substring search on normalized text.
bool contains_token(const std::string& hay, const std::string& needle) {
    if (needle.empty()) return false;
    std::size_t pos = 0;
    while ((pos = hay.find(needle, pos)) != std::string::npos) {
        const bool left_ok = pos == 0 || !is_word_char(hay[pos - 1]);
        const std::size_t end = pos + needle.size();
        const bool right_ok = end >= hay.size() || !is_word_char(hay[end]);
        if (left_ok && right_ok) return true;
        ++pos;
    }
    return false;
}

bool is_numeric(std::string_view s) {
    if (s.empty()) return false;
    bool digit = false;
    for (char c : s) {
        if (std::isdigit(static_cast<unsigned char>(c))) {
            digit = true;
        } else if (c != '.' && c != ',') {
            return false;
        }
    }
    return digit;
}

bool looks_like_field_label(std::string_view seg) {
    std::size_t colon = seg.find(':');
    if (colon == std::string_view::npos || colon == 0) return false;
    for (std::size_t i = 0; i < colon; ++i) {
        char c = seg[i];
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    }
    return true;
}

}  // namespace

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return std::string(s.substr(b, e - b));
}

std::string normalize(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (char c : s) {
        if (is_space(c)) {
            if (!out.empty()) pending_space = true;
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

bool contains_normalized(std::string_view haystack, std::string_view needle) {
    const std::string h = normalize(haystack);
    const std::string n = normalize(needle);
    if (n.empty()) return false;
    return h.find(n) != std::string::npos;
}

std::vector<std::string> numeric_tokens(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && !cur.empty())) {
            cur.push_back(c);
        } else {
            if (is_numeric(cur)) {
                while (!cur.empty() && cur.back() == '.') cur.pop_back();
                if (!cur.empty()) out.push_back(cur);
            }
            cur.clear();
        }
    }
    if (is_numeric(cur)) {
        while (!cur.empty() && cur.back() == '.') cur.pop_back();
        if (!cur.empty()) out.push_back(cur);
    }
    return out;
}

bool contains_answer(std::string_view question, std::string_view answer) {
    const std::string q = normalize(question);
    const std::string a = normalize(answer);
    if (a.empty()) return false;

    if (a.size() <= 3 || is_numeric(a)) {
        if (contains_token(q, a)) return true;
    } else if (q.find(a) != std::string::npos) {
        return true;
    }

    // Salient numeric identifiers of the answer leaking into the question.
    for (const auto& tok : numeric_tokens(a)) {
        if (tok.size() >= 2 && contains_token(q, tok)) return true;
    }
    return false;
}

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string fnv1a64_hex(std::string_view data) {
    static const char* digits = "0123456789abcdef";
    std::uint64_t h = fnv1a64(data);
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[h & 0xf];
        h >>= 4;
    }
    return out;
}

std::vector<std::string> split_lines(std::string_view s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        std::size_t nl = s.find('\n', start);
        std::string_view line =
            nl == std::string_view::npos ? s.substr(start) : s.substr(start, nl - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        out.emplace_back(line);
        if (nl == std::string_view::npos) break;
        start = nl + 1;
    }
    return out;
}

std::map<std::string, std::string> parse_record(std::string_view reply) {
    std::map<std::string, std::string> out;
    std::string current_field;

    auto consume_segment = [&](std::string_view seg, const char* joiner) {
        std::string segment = trim(seg);
        if (segment.empty()) return;
        if (looks_like_field_label(segment)) {
            std::size_t colon = segment.find(':');
            current_field = normalize(segment.substr(0, colon));
            out[current_field] = trim(segment.substr(colon + 1));
        } else if (!current_field.empty()) {
            auto& v = out[current_field];
            if (!v.empty()) v += joiner;
            v += segment;
        }
    };

    for (const auto& line : split_lines(reply)) {
        std::size_t start = 0;
        bool first_in_line = true;
        while (start <= line.size()) {
            std::size_t sep = line.find(" | ", start);
            std::string_view seg = sep == std::string::npos
                                       ? std::string_view(line).substr(start)
                                       : std::string_view(line).substr(start, sep - start);
            consume_segment(seg, first_in_line ? "\n" : " | ");
            first_in_line = false;
            if (sep == std::string::npos) break;
            start = sep + 3;
        }
    }
    return out;
}

std::vector<std::map<std::string, std::string>> parse_records(
    std::string_view reply, std::string_view first_field) {
    std::vector<std::map<std::string, std::string>> out;
    const std::string marker = std::string(first_field) + ":";
    std::string chunk;
    auto flush = [&] {
        if (chunk.empty()) return;
        auto rec = parse_record(chunk);
        if (!rec.empty()) out.push_back(std::move(rec));
        chunk.clear();
    };
    for (const auto& line : split_lines(reply)) {
        const std::string t = trim(line);
        if (t.rfind(marker, 0) == 0) flush();
        if (!chunk.empty()) chunk += '\n';
        chunk += line;
    }
    flush();
    return out;
}

}  // namespace taskforge::text
