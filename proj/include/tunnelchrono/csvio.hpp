#ifndef TUNNELCHRONO_CSVIO_HPP
#define TUNNELCHRONO_CSVIO_HPP

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

// Minimal CSV helpers shared by the file formats this project emits and
// consumes: comma-separated numeric columns, a mandatory header line,
// `#` comment lines, no quoting.
namespace tunnelchrono::csvio {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_number(line) {}
  int line_number;
};

// Reads the whole stream. The first non-comment line must equal `header`
// exactly; every following data line must hold `columns` numeric fields.
std::vector<std::vector<double>> read_numeric_csv(std::istream& in, const std::string& header,
                                                  std::size_t columns);

// Shortest-round-trip style formatting used in every emitted table.
std::string format_field(double value);  // %.12g

void write_row(std::ostream& out, const std::vector<double>& fields);

}  // namespace tunnelchrono::csvio

#endif
