#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gcnsamp/common.hpp"

namespace gcnsamp {

// Shortest decimal text that parses back to the same double; "nan", "inf", "-inf" otherwise.
std::string format_double(double v);
double parse_double(const std::string& text);

std::vector<std::string> split_csv_line(const std::string& line);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Throws ConfigError when the column is missing.
  std::size_t column(const std::string& name) const;
};

// First line is the header; every row must have as many fields as the header.
CsvTable read_csv(std::istream& in);
void write_csv(const CsvTable& table, std::ostream& out);

// Headerless numeric matrix, one row per line.
void write_matrix_csv(const Matrix& m, std::ostream& out);
Matrix read_matrix_csv(std::istream& in);

}  // namespace gcnsamp
