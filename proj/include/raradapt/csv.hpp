#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "raradapt/design.hpp"

namespace raradapt {

// Shortest round-trip representation, C locale, '.' decimal point.
std::string format_double(double value);

int parse_int(const std::string& field, const char* what);
double parse_double(const std::string& field, const char* what);

// Minimal comma-separated reader: no quoting (none of our formats need it),
// LF or CRLF line endings, mandatory header.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  void expect_header(const std::vector<std::string>& columns);
  bool next_row(std::vector<std::string>& row);
  int line() const { return line_; }

 private:
  std::istream& in_;
  int line_ = 0;
  std::size_t width_ = 0;
};

}  // namespace raradapt
