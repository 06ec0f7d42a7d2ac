#pragma once

#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "mtilink/error.hpp"

namespace mtilink {

struct TsvRow {
  std::vector<std::string> fields;
  std::size_t line_no = 0;
};

// Reads tab-separated rows; lines starting with '#' and blank lines are
// skipped. When expected_cols > 0, a row with a different field count is a
// MalformedRow error.
inline std::vector<TsvRow> read_tsv(std::istream& in, int expected_cols = 0,
                                    const std::string& source = "<stream>") {
  std::vector<TsvRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos || line[0] == '#') continue;
    TsvRow row;
    row.line_no = line_no;
    std::size_t start = 0;
    for (;;) {
      const std::size_t tab = line.find('\t', start);
      if (tab == std::string::npos) {
        row.fields.push_back(line.substr(start));
        break;
      }
      row.fields.push_back(line.substr(start, tab - start));
      start = tab + 1;
    }
    if (expected_cols > 0 && static_cast<int>(row.fields.size()) != expected_cols) {
      raise(Errc::MalformedRow, source + ":" + std::to_string(line_no) + ": expected " +
                                    std::to_string(expected_cols) + " columns, got " +
                                    std::to_string(row.fields.size()));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::vector<TsvRow> read_tsv_file(const std::string& path, int expected_cols = 0) {
  std::ifstream in(path);
  if (!in) raise(Errc::IoError, "cannot open " + path);
  return read_tsv(in, expected_cols, path);
}

}  // namespace mtilink
