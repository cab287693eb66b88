#pragma once

// Small text helpers shared by the file formats: round-trip number
// formatting and strict parsing.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace respan::text {

/// Shortest decimal representation that parses back to the same double.
/// Infinities are written as "inf" / "-inf".
std::string format_double(double v);

/// Strict parse of the whole token; nullopt on any trailing garbage.
std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);

std::string_view trim(std::string_view s);

/// Splits on `sep` without quoting rules; fields are trimmed.
std::vector<std::string> split(std::string_view line, char sep);

/// Splits on runs of whitespace.
std::vector<std::string> split_ws(std::string_view line);

bool has_whitespace(std::string_view s);

}  // namespace respan::text
