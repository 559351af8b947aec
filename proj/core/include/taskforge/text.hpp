// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace taskforge::text {

/// Strips leading/trailing ASCII whitespace.
std::string trim(std::string_view s);

/// Lower-cases ASCII and collapses every whitespace run to one space.
std::string normalize(std::string_view s);

/// Case-folded, whitespace-collapsed substring test.
bool contains_normalized(std::string_view haystack, std::string_view needle);

/// Answer-containment check used by task invariants and the leakage
/// short-circuit. Short or purely numeric answers match only on token
/// boundaries ("5" does not match inside "2025"); longer answers match as
/// normalized substrings. Numeric tokens of the answer with >= 2 characters
/// (e.g. "34.5" out of "34.5B USD") also count as leaks when they appear as
/// standalone tokens in the text.
bool contains_answer(std::string_view question, std::string_view answer);

/// Numeric tokens ("34.5", "2022") of a string, in order.
std::vector<std::string> numeric_tokens(std::string_view s);

/// FNV-1a 64-bit over bytes; stable across runs and platforms.
std::uint64_t fnv1a64(std::string_view data);

/// fnv1a64 rendered as 16 lowercase hex digits.
std::string fnv1a64_hex(std::string_view data);

/// Splits into lines, dropping trailing '\r'.
std::vector<std::string> split_lines(std::string_view s);

/// Parses a delimited record of "field: value" segments separated by
/// newlines or " | ". A segment that does not start with a field label is
/// folded back into the preceding value, so values may themselves contain
/// " | " (webpage titles often do).
std::map<std::string, std::string> parse_record(std::string_view reply);

/// Like parse_record but for replies carrying one record per line, where a
/// new record begins whenever `first_field` reappears.
std::vector<std::map<std::string, std::string>> parse_records(
    std::string_view reply, std::string_view first_field);

}  // namespace taskforge::text
