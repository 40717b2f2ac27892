#pragma once

// Minimal comma-separated reader: one record per line, no quoting, surrounding
// whitespace trimmed, blank lines skipped.

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace plasmadiag::csv {

struct Row {
  std::size_t line = 0; // 1-based line number in the source
  std::vector<std::string> fields;
};

class Reader {
public:
  explicit Reader(std::istream& in) : in_(in) {}

  // Next non-blank record, or nullopt at end of input.
  std::optional<Row> next();

private:
  std::istream& in_;
  std::size_t line_ = 0;
};

std::vector<std::string> split(std::string_view line);

// Column lookup by exact (trimmed) header name.
std::optional<std::size_t> find_column(const std::vector<std::string>& header, std::string_view name);

// Whole-field numeric parse; nullopt on trailing garbage, empty input or non-finite values.
std::optional<double> parse_number(std::string_view text);

// 17 significant digits; parses back to the identical double.
std::string format_number(double value);

} // namespace plasmadiag::csv
