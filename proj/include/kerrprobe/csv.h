#pragma once
#include <map>
#include <string>
#include <vector>

// Minimal CSV with "# key=value" metadata comment lines before the header.
// Numeric cells are written with enough digits to round-trip a double.

namespace kerr {

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::map<std::string, std::string> meta;

  int col(const std::string& name) const;  // -1 if absent
  double num(size_t row, int col) const;
  void add_row(const std::vector<std::string>& cells);
};

std::string format_num(double v);

void write_csv(const std::string& path, const CsvTable& table);
CsvTable read_csv(const std::string& path);

}  // namespace kerr
