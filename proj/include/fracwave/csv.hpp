#pragma once

#include <fstream>
#include <ios>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "fracwave/errors.hpp"

namespace fracwave {

/// Comma-separated output with a header row. Doubles carry 17 significant digits so
/// that a round trip through text is exact and goldens diff cleanly.
class CsvWriter {
 public:
  using Cell = std::variant<double, long long, std::string>;

  CsvWriter(std::ostream& out, const std::vector<std::string>& header) : out_(out), columns_(header.size()) {
    if (header.empty()) throw DomainError("CsvWriter: header must not be empty");
    write_cells(std::vector<Cell>(header.begin(), header.end()));
  }

  void row(const std::vector<Cell>& cells) {
    if (cells.size() != columns_) throw DomainError("CsvWriter: row width differs from header");
    write_cells(cells);
  }

  static std::string format(double v) {
    std::ostringstream s;
    s.imbue(std::locale::classic());
    s.precision(std::numeric_limits<double>::max_digits10);
    s << v;
    return s.str();
  }

 private:
  void write_cells(const std::vector<Cell>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      if (const auto* d = std::get_if<double>(&cells[i])) out_ << format(*d);
      else if (const auto* n = std::get_if<long long>(&cells[i])) out_ << *n;
      else out_ << quote(std::get<std::string>(cells[i]));
    }
    out_ << '\n';
    if (!out_) throw IoError("CsvWriter: write failed");
  }

  static std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + '"';
  }

  std::ostream& out_;
  std::size_t columns_;
};

/// Open a file for writing or throw IoError.
inline std::ofstream open_output(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open " + path + " for writing");
  return f;
}

}  // namespace fracwave
