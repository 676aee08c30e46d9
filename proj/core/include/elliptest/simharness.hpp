#pragma once

//! Monte Carlo harness: run the test over a grid of (setting, n, p, s) cells
//! with independent replications, tally rejection rates, and serialize the
//! table. Replication seeds derive deterministically from (base seed,
//! setting, n, p, s, rep), so results do not depend on cell order, worker
//! count, or which subset of cells a grid contains.

#include <string>
#include <vector>

#include "elliptest/elliptic_test.hpp"
#include "elliptest/generators.hpp"

namespace elliptest {

enum class OutputFormat { Csv, Json, Markdown };

struct ExperimentGrid {
  std::vector<int> settings;  // generator settings, subset of 1..4
  std::vector<int> ns;        // sample sizes
  std::vector<int> ps;        // dimensions
  std::vector<int> ss;        // perturbed-coordinate counts; cells with s > p are skipped
  int reps = 200;
  TestMode mode = TestMode::Unknown;
  Truncation truncation = Truncation::Clamp;
  TestConfig config;  // config.seed is the base seed for the whole grid
};

struct CellResult {
  int setting = 0;
  int n = 0;
  int p = 0;
  int s = 0;
  int reps = 0;           // successful replications (failures excluded)
  int failures = 0;
  int reject_count = 0;
  double reject_rate = 0.0;  // reject_count / reps
  double mc_se = 0.0;        // sqrt(rate (1 - rate) / reps)
  double wall_time_s = 0.0;  // summed replication time; excluded from default output
};

struct RejectionTable {
  std::vector<CellResult> rows;
};

//! Run every cell of the grid. Replications run in parallel (see
//! ELLIPTEST_THREADS); per-replication failures are counted and excluded
//! from the rate denominator. Known-moments mode supports Setting 1 only,
//! where the true moments are mu = 0, Sigma = I for every s.
RejectionTable run_grid(const ExperimentGrid& grid);

//! Serialize the table. Timing is opt-in because it is the one column that
//! is not reproducible run to run.
std::string emit_table(const RejectionTable& table, OutputFormat format,
                       bool include_timing = false);

//! Parse a table back from its CSV form (exact round trip: rates are written
//! with shortest round-trip precision).
RejectionTable parse_table_csv(const std::string& text);

//! Parse a grid from key=value config text. Recognized keys: settings, n, p,
//! s, reps, alpha, mode (known|unknown), b, variance (inflation|plugin),
//! c_exponent, bandwidth, kp, k1, weights (auto|uniform|optimal), truncation
//! (clamp|reject), seed. Lists are comma-separated; '#' starts a comment.
//! Unknown keys are errors. Returns the grid and whether a seed was given.
struct ParsedGrid {
  ExperimentGrid grid;
  bool has_seed = false;
};

ParsedGrid parse_grid_config(const std::string& text);

//! Built-in grids: "size-study" (settings 1-4, n 500, p {2,5}, s 0, 200
//! reps), "power-study" (settings {1,3}, n 500, p 2, s {1,2}, 200 reps),
//! "smoke" (setting 1, n 200, p 2, s {0,1}, 10 reps, 10 resamples).
ExperimentGrid preset_grid(const std::string& name);

}  // namespace elliptest
