// csv.hpp - minimal CSV helpers with fixed 9-significant-digit formatting
#ifndef EIT_CSV_HPP
#define EIT_CSV_HPP

#include <string>
#include <vector>

#include "eit/errors.hpp"

namespace eit::csv {

// All numeric output goes through here so identical configs produce
// byte-identical files.
std::string format(double v);

std::string strip(const std::string& s);
std::vector<std::string> split(const std::string& line, char sep = ',');
double to_double(const std::string& field, size_t lineno = 0);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

// Reads a numeric CSV with a mandatory header line.
Table read_file(const std::string& path);

// Requires the file's header to match `expect` exactly.
Table read_file(const std::string& path, const std::vector<std::string>& expect);

void write_file(const std::string& path, const std::vector<std::string>& header,
                const std::vector<std::vector<double>>& rows);

}  // namespace eit::csv

#endif  // EIT_CSV_HPP
