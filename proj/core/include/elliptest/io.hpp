#pragma once

//! CSV input and number formatting. Parsing is strict: one optional header
//! line (auto-detected by any non-numeric token in the first line), '.'
//! decimal separator, rectangular rows, and parse failures report 1-based
//! file coordinates.

#include <Eigen/Core>
#include <string>
#include <vector>

namespace elliptest {

struct CsvData {
  Eigen::MatrixXd values;
  std::vector<std::string> header;  // empty when the file had none
  bool had_header = false;
};

CsvData parse_csv(const std::string& text);
CsvData read_csv(const std::string& path);

//! Shortest decimal representation that round-trips to the same double.
std::string format_double(double v);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace elliptest
