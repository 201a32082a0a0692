#pragma once

// Small RFC-4180-style CSV reader/writer: comma separator, double-quoted
// fields with "" escapes, LF or CRLF line ends. Quoted fields may not span
// lines.

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace kartel::csv {

std::vector<std::string> split_line(std::string_view line);
std::string escape(std::string_view field);
std::string join(const std::vector<std::string>& fields);

/// Reads the next non-blank line into fields; nullopt at end of input.
/// `line_no` is advanced past every consumed line.
std::optional<std::vector<std::string>> next_row(std::istream& in, long& line_no);

/// Exact decimal money in hundredths ("12.3" -> 1230). Accepts an optional
/// leading '-', at most two fractional digits. Throws ParseError otherwise.
std::int64_t parse_cents(std::string_view text);
std::string format_cents(std::int64_t cents);

double parse_double(std::string_view text);
long parse_long(std::string_view text);

}  // namespace kartel::csv
