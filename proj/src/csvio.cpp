#include "tunnelchrono/csvio.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>

namespace tunnelchrono::csvio {

namespace {

std::string trim(const std::string& s) {
  const std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return out;
}

double parse_double(const std::string& field, int line_no) {
  if (field.empty()) throw ParseError(line_no, "empty numeric field");
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (end == field.c_str() || *end != '\0' || errno == ERANGE || !std::isfinite(v)) {
    throw ParseError(line_no, "not a finite number: '" + field + "'");
  }
  return v;
}

}  // namespace

std::vector<std::vector<double>> read_numeric_csv(std::istream& in, const std::string& header,
                                                  std::size_t columns) {
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    if (!saw_header) {
      if (stripped != header) {
        throw ParseError(line_no, "expected header '" + header + "', got '" + stripped + "'");
      }
      saw_header = true;
      continue;
    }
    const std::vector<std::string> fields = split_fields(stripped);
    if (fields.size() != columns) {
      throw ParseError(line_no, "expected " + std::to_string(columns) + " fields, got " +
                                    std::to_string(fields.size()));
    }
    std::vector<double> row(columns);
    for (std::size_t i = 0; i < columns; ++i) row[i] = parse_double(fields[i], line_no);
    rows.push_back(std::move(row));
  }
  if (!saw_header) throw ParseError(line_no, "missing header '" + header + "'");
  return rows;
}

std::string format_field(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

void write_row(std::ostream& out, const std::vector<double>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << format_field(fields[i]);
  }
  out << '\n';
}

}  // namespace tunnelchrono::csvio
