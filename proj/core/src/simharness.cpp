#include "elliptest/simharness.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <sstream>

#include "elliptest/errors.hpp"
#include "elliptest/io.hpp"
#include "elliptest/parallel.hpp"

namespace elliptest {

namespace {

struct Cell {
  int setting;
  int n;
  int p;
  int s;
};

std::vector<Cell> expand_cells(const ExperimentGrid& grid) {
  if (grid.settings.empty() || grid.ns.empty() || grid.ps.empty() || grid.ss.empty()) {
    throw InvalidInput("grid requires at least one setting, n, p, and s");
  }
  if (grid.reps < 1) {
    throw InvalidInput("grid requires reps >= 1");
  }
  for (int setting : grid.settings) {
    if (setting < 1 || setting > 4) {
      throw InvalidInput("grid settings must be 1..4");
    }
    if (grid.mode == TestMode::Known && setting != 1) {
      throw InvalidInput(
          "known-moments grids support setting 1 only (mu = 0, Sigma = I holds for every s "
          "there)");
    }
  }
  std::vector<Cell> cells;
  for (int setting : grid.settings) {
    for (int n : grid.ns) {
      for (int p : grid.ps) {
        for (int s : grid.ss) {
          if (s > p) {
            continue;  // not a meaningful cell for this dimension
          }
          cells.push_back({setting, n, p, s});
        }
      }
    }
  }
  if (cells.empty()) {
    throw InvalidInput("grid expands to no valid cells (is every s larger than every p?)");
  }
  return cells;
}

}  // namespace

RejectionTable run_grid(const ExperimentGrid& grid) {
  const std::vector<Cell> cells = expand_cells(grid);
  const int reps = grid.reps;
  const int n_jobs = static_cast<int>(cells.size()) * reps;

  // -1 failure, 0 accept, 1 reject; one slot per (cell, rep).
  std::vector<signed char> outcomes(static_cast<std::size_t>(n_jobs), 0);
  std::vector<double> elapsed(static_cast<std::size_t>(n_jobs), 0.0);

  parallel_for(n_jobs, [&](int job) {
    const Cell& cell = cells[static_cast<std::size_t>(job / reps)];
    const int rep = job % reps;

    const std::uint64_t rep_seed = mix_seed(
        {grid.config.seed, static_cast<std::uint64_t>(cell.setting),
         static_cast<std::uint64_t>(cell.n), static_cast<std::uint64_t>(cell.p),
         static_cast<std::uint64_t>(cell.s), static_cast<std::uint64_t>(rep)});

    const auto t0 = std::chrono::steady_clock::now();
    signed char outcome = -1;
    try {
      SettingSpec spec;
      spec.setting = cell.setting;
      spec.n = cell.n;
      spec.p = cell.p;
      spec.s = cell.s;
      spec.seed = mix_seed({rep_seed, 1});
      const Eigen::MatrixXd data = generate(spec, grid.truncation);

      TestConfig cfg = grid.config;
      cfg.seed = mix_seed({rep_seed, 2});

      TestResult result;
      if (grid.mode == TestMode::Known) {
        result = run_test(data, Vector::Zero(cell.p), Matrix::Identity(cell.p, cell.p), cfg);
      } else {
        result = run_test(data, cfg);
      }
      outcome = result.reject ? 1 : 0;
    } catch (const Error&) {
      outcome = -1;
    }
    outcomes[static_cast<std::size_t>(job)] = outcome;
    elapsed[static_cast<std::size_t>(job)] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  });

  RejectionTable table;
  table.rows.reserve(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    CellResult row;
    row.setting = cells[c].setting;
    row.n = cells[c].n;
    row.p = cells[c].p;
    row.s = cells[c].s;
    for (int rep = 0; rep < reps; ++rep) {
      const std::size_t job = c * static_cast<std::size_t>(reps) + static_cast<std::size_t>(rep);
      row.wall_time_s += elapsed[job];
      switch (outcomes[job]) {
        case 1:
          ++row.reject_count;
          ++row.reps;
          break;
        case 0:
          ++row.reps;
          break;
        default:
          ++row.failures;
      }
    }
    if (row.reps > 0) {
      row.reject_rate = static_cast<double>(row.reject_count) / static_cast<double>(row.reps);
      row.mc_se = std::sqrt(row.reject_rate * (1.0 - row.reject_rate) /
                            static_cast<double>(row.reps));
    }
    table.rows.push_back(row);
  }
  return table;
}

namespace {

const char* kCsvHeader = "setting,n,p,s,reps,failures,reject_count,reject_rate,mc_se";

std::string emit_csv(const RejectionTable& table, bool include_timing) {
  std::string out = kCsvHeader;
  if (include_timing) {
    out += ",wall_time_s";
  }
  out += "\n";
  for (const CellResult& r : table.rows) {
    out += std::to_string(r.setting) + "," + std::to_string(r.n) + "," + std::to_string(r.p) +
           "," + std::to_string(r.s) + "," + std::to_string(r.reps) + "," +
           std::to_string(r.failures) + "," + std::to_string(r.reject_count) + "," +
           format_double(r.reject_rate) + "," + format_double(r.mc_se);
    if (include_timing) {
      out += "," + format_double(r.wall_time_s);
    }
    out += "\n";
  }
  return out;
}

std::string emit_json(const RejectionTable& table, bool include_timing) {
  std::string out = "[\n";
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const CellResult& r = table.rows[i];
    out += "  {";
    out += "\"setting\": " + std::to_string(r.setting);
    out += ", \"n\": " + std::to_string(r.n);
    out += ", \"p\": " + std::to_string(r.p);
    out += ", \"s\": " + std::to_string(r.s);
    out += ", \"reps\": " + std::to_string(r.reps);
    out += ", \"failures\": " + std::to_string(r.failures);
    out += ", \"reject_count\": " + std::to_string(r.reject_count);
    out += ", \"reject_rate\": " + format_double(r.reject_rate);
    out += ", \"mc_se\": " + format_double(r.mc_se);
    if (include_timing) {
      out += ", \"wall_time_s\": " + format_double(r.wall_time_s);
    }
    out += i + 1 < table.rows.size() ? "},\n" : "}\n";
  }
  out += "]\n";
  return out;
}

std::string emit_markdown(const RejectionTable& table, bool include_timing) {
  std::string out = "| setting | n | p | s | reps | failures | reject_count | reject_rate | mc_se |";
  std::string rule = "|---|---|---|---|---|---|---|---|---|";
  if (include_timing) {
    out += " wall_time_s |";
    rule += "---|";
  }
  out += "\n" + rule + "\n";
  for (const CellResult& r : table.rows) {
    out += "| " + std::to_string(r.setting) + " | " + std::to_string(r.n) + " | " +
           std::to_string(r.p) + " | " + std::to_string(r.s) + " | " + std::to_string(r.reps) +
           " | " + std::to_string(r.failures) + " | " + std::to_string(r.reject_count) + " | " +
           format_double(r.reject_rate) + " | " + format_double(r.mc_se) + " |";
    if (include_timing) {
      out += " " + format_double(r.wall_time_s) + " |";
    }
    out += "\n";
  }
  return out;
}

}  // namespace

std::string emit_table(const RejectionTable& table, OutputFormat format, bool include_timing) {
  switch (format) {
    case OutputFormat::Csv:
      return emit_csv(table, include_timing);
    case OutputFormat::Json:
      return emit_json(table, include_timing);
    default:
      return emit_markdown(table, include_timing);
  }
}

RejectionTable parse_table_csv(const std::string& text) {
  std::stringstream ss(text);
  std::string line;
  if (!std::getline(ss, line)) {
    throw ParseError("rejection table: empty input", 1, 1);
  }
  const bool with_timing = line == std::string(kCsvHeader) + ",wall_time_s";
  if (!with_timing && line != kCsvHeader) {
    throw ParseError("rejection table: unexpected header '" + line + "'", 1, 1);
  }
  RejectionTable table;
  int file_row = 1;
  while (std::getline(ss, line)) {
    ++file_row;
    if (line.empty()) {
      continue;
    }
    std::stringstream fields(line);
    std::string tok;
    std::vector<std::string> tokens;
    while (std::getline(fields, tok, ',')) {
      tokens.push_back(tok);
    }
    const std::size_t expected = with_timing ? 10 : 9;
    if (tokens.size() != expected) {
      throw ParseError("rejection table: wrong field count", file_row, 1);
    }
    CellResult r;
    try {
      r.setting = std::stoi(tokens[0]);
      r.n = std::stoi(tokens[1]);
      r.p = std::stoi(tokens[2]);
      r.s = std::stoi(tokens[3]);
      r.reps = std::stoi(tokens[4]);
      r.failures = std::stoi(tokens[5]);
      r.reject_count = std::stoi(tokens[6]);
      r.reject_rate = std::stod(tokens[7]);
      r.mc_se = std::stod(tokens[8]);
      if (with_timing) {
        r.wall_time_s = std::stod(tokens[9]);
      }
    } catch (const std::exception&) {
      throw ParseError("rejection table: cannot parse row", file_row, 1);
    }
    table.rows.push_back(r);
  }
  return table;
}

namespace {

std::string to_lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string strip(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) {
    return "";
  }
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = strip(item);
    if (!item.empty()) {
      out.push_back(item);
    }
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& value, const std::string& key, int line) {
  std::vector<int> out;
  for (const std::string& item : split_list(value)) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size()) {
        throw std::invalid_argument(item);
      }
      out.push_back(v);
    } catch (const std::exception&) {
      throw ParseError("config: '" + key + "' expects integers, got '" + item + "'", line, 1);
    }
  }
  if (out.empty()) {
    throw ParseError("config: '" + key + "' has no values", line, 1);
  }
  return out;
}

double parse_one_double(const std::string& value, const std::string& key, int line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) {
      throw std::invalid_argument(value);
    }
    return v;
  } catch (const std::exception&) {
    throw ParseError("config: '" + key + "' expects a number, got '" + value + "'", line, 1);
  }
}

int parse_one_int(const std::string& value, const std::string& key, int line) {
  const std::vector<int> v = parse_int_list(value, key, line);
  if (v.size() != 1) {
    throw ParseError("config: '" + key + "' expects one value", line, 1);
  }
  return v[0];
}

}  // namespace

ParsedGrid parse_grid_config(const std::string& text) {
  ParsedGrid parsed;
  ExperimentGrid& grid = parsed.grid;

  std::stringstream ss(text);
  std::string raw_line;
  int line_no = 0;
  while (std::getline(ss, raw_line)) {
    ++line_no;
    std::string line = raw_line;
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      line = line.substr(0, hash);
    }
    line = strip(line);
    if (line.empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError("config: expected 'key = value'", line_no, 1);
    }
    const std::string key = to_lower(strip(line.substr(0, eq)));
    const std::string value = strip(line.substr(eq + 1));
    if (value.empty()) {
      throw ParseError("config: '" + key + "' has no value", line_no, 1);
    }

    if (key == "settings" || key == "setting") {
      grid.settings = parse_int_list(value, key, line_no);
    } else if (key == "n") {
      grid.ns = parse_int_list(value, key, line_no);
    } else if (key == "p") {
      grid.ps = parse_int_list(value, key, line_no);
    } else if (key == "s") {
      grid.ss = parse_int_list(value, key, line_no);
    } else if (key == "reps") {
      grid.reps = parse_one_int(value, key, line_no);
    } else if (key == "alpha") {
      grid.config.alpha = parse_one_double(value, key, line_no);
    } else if (key == "mode") {
      const std::string v = to_lower(value);
      if (v == "known") {
        grid.mode = TestMode::Known;
      } else if (v == "unknown") {
        grid.mode = TestMode::Unknown;
      } else {
        throw ParseError("config: mode must be known or unknown", line_no, 1);
      }
    } else if (key == "b" || key == "resamples") {
      grid.config.resamples = parse_one_int(value, key, line_no);
    } else if (key == "variance") {
      const std::string v = to_lower(value);
      if (v == "inflation") {
        grid.config.variance_mode = VarianceMode::Inflation;
      } else if (v == "plugin") {
        grid.config.variance_mode = VarianceMode::Plugin;
      } else {
        throw ParseError("config: variance must be inflation or plugin", line_no, 1);
      }
    } else if (key == "c_exponent") {
      grid.config.c_exponent = parse_one_double(value, key, line_no);
    } else if (key == "bandwidth") {
      grid.config.bandwidth = parse_one_double(value, key, line_no);
    } else if (key == "kp" || key == "k_p") {
      grid.config.k_p = parse_one_int(value, key, line_no);
    } else if (key == "k1" || key == "k_1") {
      grid.config.k_1 = parse_one_int(value, key, line_no);
    } else if (key == "weights") {
      const std::string v = to_lower(value);
      if (v == "auto") {
        grid.config.weight_rule = WeightRule::Auto;
      } else if (v == "uniform") {
        grid.config.weight_rule = WeightRule::Uniform;
      } else if (v == "optimal") {
        grid.config.weight_rule = WeightRule::Optimal;
      } else {
        throw ParseError("config: weights must be auto, uniform, or optimal", line_no, 1);
      }
    } else if (key == "truncation") {
      const std::string v = to_lower(value);
      if (v == "clamp") {
        grid.truncation = Truncation::Clamp;
      } else if (v == "reject") {
        grid.truncation = Truncation::Reject;
      } else {
        throw ParseError("config: truncation must be clamp or reject", line_no, 1);
      }
    } else if (key == "seed") {
      try {
        grid.config.seed = std::stoull(value);
        parsed.has_seed = true;
      } catch (const std::exception&) {
        throw ParseError("config: seed must be a non-negative integer", line_no, 1);
      }
    } else {
      throw ParseError("config: unknown key '" + key + "'", line_no, 1);
    }
  }
  return parsed;
}

ExperimentGrid preset_grid(const std::string& name) {
  ExperimentGrid grid;
  if (name == "size-study") {
    grid.settings = {1, 2, 3, 4};
    grid.ns = {500};
    grid.ps = {2, 5};
    grid.ss = {0};
    grid.reps = 200;
  } else if (name == "power-study") {
    grid.settings = {1, 3};
    grid.ns = {500};
    grid.ps = {2};
    grid.ss = {1, 2};
    grid.reps = 200;
  } else if (name == "smoke") {
    grid.settings = {1};
    grid.ns = {200};
    grid.ps = {2};
    grid.ss = {0, 1};
    grid.reps = 10;
    grid.config.resamples = 10;
  } else {
    throw InvalidInput("unknown preset '" + name + "' (expected size-study, power-study, smoke)");
  }
  return grid;
}

}  // namespace elliptest
