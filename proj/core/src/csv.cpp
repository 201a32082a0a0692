#include "kartel/csv.hpp"

#include <charconv>
#include <cmath>
#include <fmt/format.h>

#include "kartel/errors.hpp"

namespace kartel::csv {

std::vector<std::string> split_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"' && cur.empty() && !was_quoted) {
      quoted = true;
      was_quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
      was_quoted = false;
    } else {
      cur.push_back(c);
    }
  }
  if (quoted) throw ParseError("unterminated quoted field");
  fields.push_back(std::move(cur));
  return fields;
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string join(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    out += escape(fields[i]);
  }
  return out;
}

std::optional<std::vector<std::string>> next_row(std::istream& in, long& line_no) {
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    // Strip a UTF-8 byte-order mark on the first line.
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    try {
      return split_line(line);
    } catch (const ParseError& e) {
      throw ParseError(fmt::format("line {}: {}", line_no, e.what()));
    }
  }
  return std::nullopt;
}

std::int64_t parse_cents(std::string_view text) {
  const std::string original(text);
  bool negative = false;
  if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  const auto dot = text.find('.');
  const std::string_view whole = text.substr(0, dot);
  const std::string_view frac = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
  auto digits_only = [](std::string_view s) {
    for (char c : s) {
      if (c < '0' || c > '9') return false;
    }
    return true;
  };
  if (whole.empty() || !digits_only(whole) || !digits_only(frac) || frac.size() > 2 ||
      (dot != std::string_view::npos && frac.empty())) {
    throw ParseError(fmt::format("'{}' is not a decimal amount with at most two fractional digits", original));
  }
  std::int64_t units = 0;
  const auto [ptr, ec] = std::from_chars(whole.data(), whole.data() + whole.size(), units);
  if (ec != std::errc{} || ptr != whole.data() + whole.size() || units > INT64_MAX / 100 - 1) {
    throw ParseError(fmt::format("amount '{}' out of range", original));
  }
  std::int64_t cents = 0;
  if (!frac.empty()) {
    cents = (frac[0] - '0') * 10 + (frac.size() > 1 ? frac[1] - '0' : 0);
  }
  const std::int64_t total = units * 100 + cents;
  return negative ? -total : total;
}

std::string format_cents(std::int64_t cents) {
  const bool negative = cents < 0;
  const std::uint64_t mag = negative ? static_cast<std::uint64_t>(-(cents + 1)) + 1 : static_cast<std::uint64_t>(cents);
  return fmt::format("{}{}.{:02d}", negative ? "-" : "", mag / 100, mag % 100);
}

double parse_double(std::string_view text) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw ParseError(fmt::format("'{}' is not a finite number", text));
  }
  return v;
}

long parse_long(std::string_view text) {
  long v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ParseError(fmt::format("'{}' is not an integer", text));
  }
  return v;
}

}  // namespace kartel::csv
