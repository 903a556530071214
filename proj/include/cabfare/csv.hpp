#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace cabfare {

/// Minimal RFC 4180 reader: comma separated, double-quoted fields with ""
/// escapes, CRLF or LF line endings. Quoted fields may span lines.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  /// Reads the next record; false at end of input. Blank lines are skipped.
  bool next(std::vector<std::string>& fields);

  /// 1-based line number where the last returned record started.
  std::size_t line() const noexcept { return record_line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
  std::size_t record_line_ = 0;
};

/// Column lookup by (trimmed, case-insensitive) header name.
class CsvHeader {
 public:
  explicit CsvHeader(std::vector<std::string> const& names);

  std::optional<std::size_t> find(std::string const& name) const;
  /// Throws InvalidInput naming the column if absent.
  std::size_t require(std::string const& name) const;

 private:
  std::unordered_map<std::string, std::size_t> index_;
};

std::string trim_copy(std::string const& s);

}  // namespace cabfare
