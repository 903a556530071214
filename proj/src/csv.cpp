#include "cabfare/csv.hpp"

#include <algorithm>
#include <cctype>

#include "cabfare/error.hpp"

namespace cabfare {

namespace {

std::string lower(std::string s) {
  std::transform(begin(s), end(s), begin(s),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

std::string trim_copy(std::string const& s) {
  auto const b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) {
    return {};
  }
  auto const e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool CsvReader::next(std::vector<std::string>& fields) {
  std::string line;
  while (true) {
    if (!std::getline(in_, line)) {
      return false;
    }
    ++line_;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (!trim_copy(line).empty()) {
      break;
    }
  }
  record_line_ = line_;
  fields.clear();
  std::string field;
  bool quoted = false;
  std::size_t i = 0;
  while (true) {
    if (i >= line.size()) {
      if (quoted) {
        // Embedded newline inside a quoted field.
        std::string more;
        if (!std::getline(in_, more)) {
          break;
        }
        ++line_;
        if (!more.empty() && more.back() == '\r') {
          more.pop_back();
        }
        field += '\n';
        line = std::move(more);
        i = 0;
        continue;
      }
      break;
    }
    auto const c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field += c;
    }
    ++i;
  }
  fields.push_back(std::move(field));
  return true;
}

CsvHeader::CsvHeader(std::vector<std::string> const& names) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    auto name = lower(trim_copy(names[i]));
    if (i == 0 && name.size() >= 3 &&
        static_cast<unsigned char>(name[0]) == 0xEF &&
        static_cast<unsigned char>(name[1]) == 0xBB &&
        static_cast<unsigned char>(name[2]) == 0xBF) {
      name = name.substr(3);  // UTF-8 BOM
    }
    index_.emplace(std::move(name), i);
  }
}

std::optional<std::size_t> CsvHeader::find(std::string const& name) const {
  auto const it = index_.find(lower(name));
  if (it == index_.end()) {
    return std::nullopt;
  }
  return it->second;
}

std::size_t CsvHeader::require(std::string const& name) const {
  auto const idx = find(name);
  if (!idx) {
    throw InvalidInput("missing CSV column '" + name + "'");
  }
  return *idx;
}

}  // namespace cabfare
