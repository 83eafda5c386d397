#include "kerrprobe/csv.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "kerrprobe/errors.h"

namespace kerr {

int CsvTable::col(const std::string& name) const {
  for (size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return (int)i;
  return -1;
}

double CsvTable::num(size_t row, int c) const {
  if (c < 0 || row >= rows.size() || (size_t)c >= rows[row].size())
    throw GridMismatch("csv cell out of range");
  return std::stod(rows[row][c]);
}

void CsvTable::add_row(const std::vector<std::string>& cells) {
  rows.push_back(cells);
}

std::string format_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  // prefer the shortest representation that still round-trips
  for (int prec = 1; prec < 17; ++prec) {
    char shorter[40];
    std::snprintf(shorter, sizeof shorter, "%.*g", prec, v);
    if (std::strtod(shorter, nullptr) == v) return shorter;
  }
  return buf;
}

void write_csv(const std::string& path, const CsvTable& table) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  for (const auto& [k, v] : table.meta) out << "# " << k << "=" << v << "\n";
  for (size_t i = 0; i < table.columns.size(); ++i)
    out << table.columns[i] << (i + 1 < table.columns.size() ? "," : "");
  out << "\n";
  for (const auto& row : table.rows) {
    for (size_t i = 0; i < row.size(); ++i)
      out << row[i] << (i + 1 < row.size() ? "," : "");
    out << "\n";
  }
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  cells.push_back(cur);
  return cells;
}

}  // namespace

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  CsvTable t;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    if (line[0] == '#') {
      std::string body = line.substr(1);
      size_t a = body.find_first_not_of(' ');
      size_t eq = body.find('=');
      if (a != std::string::npos && eq != std::string::npos && eq > a)
        t.meta[body.substr(a, eq - a)] = body.substr(eq + 1);
      continue;
    }
    if (!have_header) {
      t.columns = split_line(line);
      have_header = true;
    } else {
      t.rows.push_back(split_line(line));
    }
  }
  return t;
}

}  // namespace kerr
