#include "cli/angle_csv.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <fstream>
#include <iostream>
#include <vector>

namespace twcc::cli {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

CsvReadResult read_angle_csv(std::istream& in, bool degrees) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      have_header = true;
      break;
    }
  }
  if (!have_header) throw ParseError("empty input: expected a header u1,u2,u3");
  const std::vector<std::string> header = split(line);
  std::vector<std::string> names;
  for (const auto& h : header) names.push_back(lower(h));
  const bool plain = names == std::vector<std::string>{"u1", "u2", "u3"};
  const bool alias = names == std::vector<std::string>{"phi", "psi", "omega"};
  if (!plain && !alias) {
    throw ParseError("line " + std::to_string(line_no) +
                     ": header must be u1,u2,u3 or phi,psi,omega, got '" + trim(line) + "'");
  }

  std::vector<std::array<double, 3>> rows;
  std::size_t reduced = 0;
  const double scale = degrees ? pi / 180.0 : 1.0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split(line);
    if (fields.size() != 3) {
      throw ParseError("line " + std::to_string(line_no) + ": expected 3 fields, got " +
                       std::to_string(fields.size()));
    }
    std::array<double, 3> row{};
    for (int c = 0; c < 3; ++c) {
      const std::string& f = fields[c];
      double v = 0.0;
      const auto [end, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || end != f.data() + f.size() || f.empty() || !std::isfinite(v)) {
        throw ParseError("line " + std::to_string(line_no) + ", column " +
                         std::to_string(c + 1) + ": '" + f + "' is not a finite number");
      }
      v *= scale;
      if (!(v >= 0.0 && v < two_pi)) ++reduced;
      row[c] = v;
    }
    rows.push_back(row);
  }

  AngleMatrix m(static_cast<Eigen::Index>(rows.size()), 3);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (int c = 0; c < 3; ++c) m(static_cast<Eigen::Index>(r), c) = rows[r][c];
  }
  return CsvReadResult{AngleSample(std::move(m)), reduced};
}

CsvReadResult read_angle_csv_file(const std::string& path, bool degrees) {
  if (path == "-") return read_angle_csv(std::cin, degrees);
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return read_angle_csv(in, degrees);
}

void write_angle_csv(std::ostream& out, const AngleMatrix& rows, bool degrees) {
  out << "u1,u2,u3\n";
  const double scale = degrees ? 180.0 / pi : 1.0;
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    out << format_double(scale * rows(r, 0)) << ',' << format_double(scale * rows(r, 1))
        << ',' << format_double(scale * rows(r, 2)) << '\n';
  }
}

std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

}  // namespace twcc::cli
