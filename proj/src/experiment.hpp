#pragma once
// Declarative experiment grids over the model/bound/conditional machinery:
// JSON configs in, deterministic ResultRow lists out, CSV/JSON reports with a
// config-hash preamble, and the log-log decay fit used by the ratio checks.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "stats.hpp"
#include "tail_model.hpp"

namespace bigjump {

inline constexpr const char* kHarnessVersion = "0.1.0";

// Config violations map to their own exception so the CLI can exit 2.
struct SchemaError : std::runtime_error {
  explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

struct ExperimentConfig {
  std::string experiment;  // ratio tail_ratio tv2 tv3 fn_bound poisson scales sample
  TailModel model = TailModel::zeta(1.5);
  std::vector<std::int64_t> grid_n;
  std::vector<std::int64_t> grid_x;  // empty when x_rule or x-less experiment
  bool has_x_rule = false;
  double x_rule_c = 0.0;  // x = round(c * n)
  bool has_seed = false;
  std::uint64_t seed = 0;
  std::string output_path;  // empty: stdout
  std::string format = "csv";
  std::map<std::string, double> tolerances;  // free-form knobs
  std::string raw_json;  // exact config text, hashed into the preamble
};

ExperimentConfig parse_config_text(const std::string& json_text);

struct ResultRow {
  std::string experiment;
  std::int64_t n = 0;
  std::int64_t x = 0;
  double value = 0.0;
  bool has_value = false;
  double value2 = 0.0;
  bool has_value2 = false;
  double bound = 0.0;
  bool has_bound = false;
  double bound2 = 0.0;
  bool has_bound2 = false;
  std::string method;
  double stderr_value = 0.0;
  bool has_stderr = false;
  std::string status = "ok";  // "ok", "warn: ...", or "error: ..."
  std::string extra;          // sample coordinates, space separated
  double wall_ms = 0.0;       // reported in JSON only, so CSV bytes are stable
};

// Grid order preserved; per-row failures land in the status column.
std::vector<ResultRow> run_experiment(const ExperimentConfig& config);

// OLS of log(y_col) on log(x_col); columns named n, x, value, value2, bound,
// bound2, stderr. Needs >= 4 usable rows, all positive in both columns.
LineFit fit_decay_exponent(const std::vector<ResultRow>& rows,
                           const std::string& x_col, const std::string& y_col);

// Report text with the metadata preamble (config hash, seed, version).
std::string emit_csv(const std::vector<ResultRow>& rows,
                     const ExperimentConfig& config);
std::string emit_json(const std::vector<ResultRow>& rows,
                      const ExperimentConfig& config);
// Dispatches on config.format; path empty writes nothing and returns text.
std::string emit_report(const std::vector<ResultRow>& rows,
                        const ExperimentConfig& config,
                        const std::string& path);

}  // namespace bigjump
