#include "raradapt/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <sstream>

namespace raradapt {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[40];
  // %.17g round-trips; prefer the shortest representation that does.
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof(buf), "%.*g", precision, value);
    if (std::strtod(buf, nullptr) == value) break;
  }
  return buf;
}

int parse_int(const std::string& field, const char* what) {
  char* end = nullptr;
  const long value = std::strtol(field.c_str(), &end, 10);
  if (end == field.c_str() || *end != '\0') {
    throw ConfigError(std::string("expected an integer for ") + what + ", got '" +
                      field + "'");
  }
  return static_cast<int>(value);
}

double parse_double(const std::string& field, const char* what) {
  char* end = nullptr;
  const double value = std::strtod(field.c_str(), &end);
  if (end == field.c_str() || *end != '\0') {
    throw ConfigError(std::string("expected a number for ") + what + ", got '" +
                      field + "'");
  }
  return value;
}

namespace {

std::vector<std::string> split_line(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

}  // namespace

void CsvReader::expect_header(const std::vector<std::string>& columns) {
  std::string line;
  if (!std::getline(in_, line)) throw ConfigError("csv: missing header row");
  ++line_;
  const std::vector<std::string> fields = split_line(line);
  if (fields != columns) {
    std::string expected;
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (i) expected += ',';
      expected += columns[i];
    }
    throw ConfigError("csv: header mismatch, expected '" + expected + "', got '" + line +
                      "'");
  }
  width_ = columns.size();
}

bool CsvReader::next_row(std::vector<std::string>& row) {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_;
    if (line.empty() || line == "\r") continue;
    row = split_line(std::move(line));
    if (row.size() != width_) {
      throw ConfigError("csv: line " + std::to_string(line_) + " has " +
                        std::to_string(row.size()) + " fields, expected " +
                        std::to_string(width_));
    }
    return true;
  }
  return false;
}

}  // namespace raradapt
