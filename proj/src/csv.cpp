// csv.cpp
#include "eit/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace eit::csv {

std::string format(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string strip(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(strip(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(strip(cur));
  return out;
}

double to_double(const std::string& field, size_t lineno) {
  try {
    size_t pos = 0;
    const double v = std::stod(field, &pos);
    if (pos != field.size()) throw std::invalid_argument("trailing garbage");
    return v;
  } catch (const std::exception&) {
    throw SchemaError("csv: not a number at line " + std::to_string(lineno) + ": '" + field + "'");
  }
}

Table read_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path);
  Table t;
  std::string line;
  if (!std::getline(is, line)) throw SchemaError("csv: empty file " + path);
  t.header = split(line);
  size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (strip(line).empty()) continue;
    const auto fields = split(line);
    if (fields.size() != t.header.size())
      throw SchemaError("csv: line " + std::to_string(lineno) + " of " + path +
                        ": field count mismatch");
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields) row.push_back(to_double(f, lineno));
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table read_file(const std::string& path, const std::vector<std::string>& expect) {
  Table t = read_file(path);
  if (t.header != expect) {
    std::string want;
    for (const auto& h : expect) want += (want.empty() ? "" : ",") + h;
    throw SchemaError("csv: " + path + ": expected header '" + want + "'");
  }
  return t;
}

void write_file(const std::string& path, const std::vector<std::string>& header,
                const std::vector<std::vector<double>>& rows) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path);
  for (size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format(row[i]);
    os << '\n';
  }
}

}  // namespace eit::csv
