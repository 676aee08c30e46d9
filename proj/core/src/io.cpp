#include "elliptest/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "elliptest/errors.hpp"

namespace elliptest {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) {
    return "";
  }
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    out.push_back(trim(field));
  }
  if (!line.empty() && line.back() == ',') {
    out.push_back("");
  }
  return out;
}

bool parse_number(const std::string& token, double& out) {
  if (token.empty()) {
    return false;
  }
  const char* begin = token.data();
  const char* end = begin + token.size();
  if (*begin == '+') {
    ++begin;  // from_chars rejects an explicit plus sign
    if (begin == end) {
      return false;
    }
  }
  const auto result = std::from_chars(begin, end, out);
  return result.ec == std::errc() && result.ptr == end;
}

}  // namespace

CsvData parse_csv(const std::string& text) {
  std::vector<std::string> lines;
  {
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
      if (!trim(line).empty()) {
        lines.push_back(line);
      }
    }
  }
  if (lines.empty()) {
    throw ParseError("csv: no data rows", 1, 1);
  }

  CsvData out;
  std::size_t first_data_line = 0;
  const std::vector<std::string> first = split_line(lines[0]);
  double probe = 0.0;
  for (const std::string& token : first) {
    if (!parse_number(token, probe)) {
      out.had_header = true;
      break;
    }
  }
  if (out.had_header) {
    out.header = first;
    first_data_line = 1;
    if (lines.size() == 1) {
      throw ParseError("csv: header present but no data rows", 1, 1);
    }
  }

  const std::size_t n_rows = lines.size() - first_data_line;
  std::size_t n_cols = 0;
  std::vector<double> buffer;
  for (std::size_t r = 0; r < n_rows; ++r) {
    const int file_row = static_cast<int>(first_data_line + r) + 1;
    const std::vector<std::string> tokens = split_line(lines[first_data_line + r]);
    if (r == 0) {
      n_cols = tokens.size();
      if (n_cols == 0) {
        throw ParseError("csv: empty data row", file_row, 1);
      }
      buffer.reserve(n_rows * n_cols);
    } else if (tokens.size() != n_cols) {
      throw ParseError("csv: row has " + std::to_string(tokens.size()) + " fields, expected " +
                           std::to_string(n_cols),
                       file_row, 1);
    }
    for (std::size_t c = 0; c < n_cols; ++c) {
      double value = 0.0;
      if (!parse_number(tokens[c], value)) {
        throw ParseError("csv: cannot parse '" + tokens[c] + "' as a number at row " +
                             std::to_string(file_row) + ", column " + std::to_string(c + 1),
                         file_row, static_cast<int>(c + 1));
      }
      buffer.push_back(value);
    }
  }

  out.values.resize(static_cast<Eigen::Index>(n_rows), static_cast<Eigen::Index>(n_cols));
  for (std::size_t r = 0; r < n_rows; ++r) {
    for (std::size_t c = 0; c < n_cols; ++c) {
      out.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          buffer[r * n_cols + c];
    }
  }
  return out;
}

CsvData read_csv(const std::string& path) {
  return parse_csv(read_text_file(path));
}

std::string format_double(double v) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, result.ptr);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw InvalidInput("cannot open file for writing: " + path);
  }
  out << content;
  if (!out) {
    throw InvalidInput("failed to write file: " + path);
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InvalidInput("cannot open file: " + path);
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace elliptest
