#ifndef TWCC_CLI_ANGLE_CSV_HPP
#define TWCC_CLI_ANGLE_CSV_HPP

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "twcc/angle_sample.hpp"

namespace twcc::cli {

/// Malformed input; the message names the offending line.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CsvReadResult {
  AngleSample sample;
  /// Values that were outside [0, 2pi) before reduction.
  std::size_t reduced = 0;
};

/// Reads a header `u1,u2,u3` (or `phi,psi,omega`) followed by rows of three
/// numbers. `path` "-" reads standard input.
CsvReadResult read_angle_csv(std::istream& in, bool degrees);
CsvReadResult read_angle_csv_file(const std::string& path, bool degrees);

void write_angle_csv(std::ostream& out, const AngleMatrix& rows, bool degrees);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double x);

}  // namespace twcc::cli

#endif  // TWCC_CLI_ANGLE_CSV_HPP
