#pragma once

#include <cstddef>
#include <istream>
#include <string>
#include <vector>

namespace rmtcorr::detail {

/// Minimal delimited-text reader: one record per line, optional double
/// quotes around a field, surrounding whitespace trimmed, blank lines
/// skipped. Row 0 is the header; data rows count from 1.
class CsvReader {
 public:
  CsvReader(std::istream& in, char delimiter) : in_(in), delimiter_(delimiter) {}

  bool next(std::vector<std::string>& fields) {
    std::string line;
    while (std::getline(in_, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (first_ && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      split(line, fields);
      row_ = first_ ? 0 : row_ + 1;
      first_ = false;
      return true;
    }
    return false;
  }

  std::size_t row() const { return row_; }

 private:
  void split(const std::string& line, std::vector<std::string>& fields) const {
    fields.clear();
    std::size_t start = 0;
    while (true) {
      const std::size_t stop = line.find(delimiter_, start);
      fields.push_back(trim(line.substr(start, stop == std::string::npos ? std::string::npos
                                                                          : stop - start)));
      if (stop == std::string::npos) break;
      start = stop + 1;
    }
  }

  static std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    s = s.substr(b, e - b + 1);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return s;
  }

  std::istream& in_;
  char delimiter_;
  std::size_t row_ = 0;
  bool first_ = true;
};

}  // namespace rmtcorr::detail
