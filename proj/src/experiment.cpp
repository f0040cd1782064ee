#include "experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "json.hpp"

#include "bounds.hpp"
#include "compound_poisson.hpp"
#include "conditional.hpp"
#include "convolution.hpp"
#include "rng.hpp"
#include "scales.hpp"

namespace bigjump {

namespace {

using nlohmann::json;

const std::set<std::string>& experiment_names() {
  static const std::set<std::string> names{"ratio",    "tail_ratio", "tv2",
                                           "tv3",      "fn_bound",   "poisson",
                                           "scales",   "sample"};
  return names;
}

double tol(const ExperimentConfig& c, const std::string& key, double dflt) {
  const auto it = c.tolerances.find(key);
  return it == c.tolerances.end() ? dflt : it->second;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += "\"";
  return out;
}

struct GridPoint {
  std::int64_t n = 0;
  std::int64_t x = 0;
};

std::vector<GridPoint> build_grid(const ExperimentConfig& c) {
  std::vector<GridPoint> pts;
  if (c.has_x_rule) {
    for (std::int64_t n : c.grid_n)
      pts.push_back({n, static_cast<std::int64_t>(
                            std::llround(c.x_rule_c * static_cast<double>(n)))});
  } else if (c.grid_x.empty()) {
    for (std::int64_t n : c.grid_n) pts.push_back({n, 0});
  } else if (c.grid_x.size() == c.grid_n.size()) {
    for (std::size_t i = 0; i < c.grid_n.size(); ++i)
      pts.push_back({c.grid_n[i], c.grid_x[i]});
  } else {
    for (std::int64_t n : c.grid_n)
      for (std::int64_t x : c.grid_x) pts.push_back({n, x});
  }
  return pts;
}

ConditionalSpec spec_for(const ExperimentConfig& c, std::int64_t n,
                         std::int64_t x, CondKind kind) {
  ConditionalSpec spec;
  spec.model = c.model;
  spec.n = n;
  spec.x = x;
  const double mult = tol(c, "offset_mult", 4.0);
  const double an = scale_an(c.model, std::max<std::int64_t>(n, 2));
  std::int64_t x_minus =
      x - static_cast<std::int64_t>(std::ceil(mult * an));
  x_minus = std::max(x_minus, x - x / 2);
  spec.x_minus = x_minus;
  spec.kind = kind;
  return spec;
}

void run_ratio(const ExperimentConfig& c, const GridPoint& g, bool tail,
               ResultRow& row) {
  const TailModel& model = c.model;
  const std::int64_t margin =
      static_cast<std::int64_t>(tol(c, "window_margin", 4096.0));
  // the survival completion carries (W/x)^(-alpha) of the mass, so the tail
  // variant needs a multiplicative window or the completion's residual
  // swamps the deviation it is supposed to measure
  const std::int64_t window =
      tail ? std::max(g.x + margin, 4 * g.x) : g.x + margin;
  const LatticePMF law = sum_pmf_recentered(model, g.n, window);
  double log_num, log_den;
  if (!tail) {
    log_num = law.at(g.x);
    log_den = std::log(static_cast<double>(g.n)) + model.log_pmf(g.x);
  } else {
    log_num = log_survival_completed(model, g.n, law, g.x - 1);
    log_den = std::log(static_cast<double>(g.n)) +
              model.log_survival(static_cast<double>(g.x - 1));
  }
  if (log_num == kNegInf) throw std::domain_error("no mass at x in the window");
  const double ratio = std::exp(log_num - log_den);
  row.value = std::abs(ratio - 1.0);
  row.has_value = true;
  row.value2 = ratio;
  row.has_value2 = true;
  row.method = "exact_conv";
  try {
    const ErrorBoundReport rep =
        error_bound_A(model, g.n, g.x, tol(c, "eps", 0.05));
    row.bound = rep.total;
    row.has_bound = true;
    row.bound2 = rep.leading_term;
    row.has_bound2 = true;
  } catch (const std::domain_error& e) {
    row.status = std::string("warn: ") + e.what();
  }
}

void run_tv(const ExperimentConfig& c, const GridPoint& g, bool thm3,
            ResultRow& row) {
  const ConditionalSpec spec =
      spec_for(c, g.n, g.x, thm3 ? CondKind::Hit : CondKind::Exceed);
  const std::int64_t window = static_cast<std::int64_t>(tol(c, "window", 0.0));
  const TVReport rep =
      thm3 ? tv_exact_thm3(spec, window)
           : tv_exact_thm2(spec, window,
                           static_cast<std::int64_t>(tol(c, "k_cap", 8.0)));
  row.value = rep.tv;
  row.has_value = true;
  row.value2 = rep.tv_squared;
  row.has_value2 = true;
  row.bound = rep.bound_max;
  row.has_bound = true;
  row.method = "exact_dp";
}

void run_fn(const ExperimentConfig& c, const GridPoint& g, ResultRow& row) {
  const double y_frac = tol(c, "y_frac", 0.25);
  const std::int64_t y = std::max<std::int64_t>(
      1, std::llround(y_frac * static_cast<double>(g.x)));
  FNConstants consts;
  consts.c1 = tol(c, "c1", 1.0);
  consts.c2 = tol(c, "c2", 1.0);
  consts.c3 = tol(c, "c3", 1.0);
  const LatticePMF law =
      truncated_max_sum_pmf(c.model, g.n, y, g.x + 4 * y);
  row.value = law.at(g.x);
  row.has_value = true;
  row.bound = fuk_nagaev_log_bound(c.model, g.n, g.x, y, consts);
  row.has_bound = true;
  row.method = "exact_conv";
}

void run_poisson(const ExperimentConfig& c, const GridPoint& g,
                 ResultRow& row) {
  CompoundPoissonSpec spec;
  spec.lambda = tol(c, "lambda", 0.5);
  spec.n = g.n;
  spec.alpha = c.model.alpha;
  const std::int64_t dflt_window = std::max<std::int64_t>(1024, 2 * g.x);
  spec.window = static_cast<std::int64_t>(tol(
      c, "window", static_cast<double>(dflt_window)));
  spec.terms_M = static_cast<std::int64_t>(tol(c, "terms_M", 0.0));
  const CondensationReport rep =
      condensation_check(spec, g.x, tol(c, "regime_c", 3.0));
  row.value = rep.ratio;
  row.has_value = true;
  row.value2 = rep.rhs;
  row.has_value2 = true;
  row.bound = rep.err_prediction;
  row.has_bound = true;
  row.method = "exact_series";
  if (!rep.in_regime) row.status = "warn: k below the c*n regime";
}

void run_scales(const ExperimentConfig& c, const GridPoint& g, ResultRow& row) {
  row.value = scale_an(c.model, g.n);
  row.has_value = true;
  row.value2 = scale_bn(c.model, g.n);
  row.has_value2 = true;
  row.method = "bisection";
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& json_text) {
  const json j = json::parse(json_text, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw SchemaError("config must be a JSON object");
  ExperimentConfig c;
  c.raw_json = json_text;

  if (!j.contains("experiment") || !j["experiment"].is_string())
    throw SchemaError("config needs an 'experiment' string");
  c.experiment = j["experiment"].get<std::string>();
  if (experiment_names().count(c.experiment) == 0)
    throw SchemaError("unknown experiment '" + c.experiment + "'");

  if (!j.contains("model") || !j["model"].is_object())
    throw SchemaError("config needs a 'model' object");
  try {
    c.model = TailModel::from_json(j["model"].dump());
  } catch (const std::exception& e) {
    throw SchemaError(std::string("model: ") + e.what());
  }

  if (!j.contains("grid") || !j["grid"].is_object())
    throw SchemaError("config needs a 'grid' object");
  const json& grid = j["grid"];
  if (!grid.contains("n") || !grid["n"].is_array() || grid["n"].empty())
    throw SchemaError("grid needs a non-empty 'n' array");
  for (const json& v : grid["n"]) {
    if (!v.is_number_integer()) throw SchemaError("grid n entries must be integers");
    c.grid_n.push_back(v.get<std::int64_t>());
  }
  if (grid.contains("x_rule")) {
    if (grid.contains("x"))
      throw SchemaError("grid takes either 'x' or 'x_rule', not both");
    if (!grid["x_rule"].is_object() || !grid["x_rule"].contains("c") ||
        !grid["x_rule"]["c"].is_number())
      throw SchemaError("x_rule needs a numeric 'c'");
    c.has_x_rule = true;
    c.x_rule_c = grid["x_rule"]["c"].get<double>();
  } else if (grid.contains("x")) {
    if (!grid["x"].is_array() || grid["x"].empty())
      throw SchemaError("grid 'x' must be a non-empty array");
    for (const json& v : grid["x"]) {
      if (!v.is_number_integer())
        throw SchemaError("grid x entries must be integers");
      c.grid_x.push_back(v.get<std::int64_t>());
    }
  }
  const bool needs_x = c.experiment != "scales";
  if (needs_x && !c.has_x_rule && c.grid_x.empty())
    throw SchemaError("experiment '" + c.experiment +
                      "' needs grid 'x' or 'x_rule'");

  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer())
      throw SchemaError("seed must be an integer");
    c.has_seed = true;
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (c.experiment == "sample" && !c.has_seed)
    throw SchemaError("experiment 'sample' needs a seed");

  if (j.contains("output_path")) {
    if (!j["output_path"].is_string())
      throw SchemaError("output_path must be a string");
    c.output_path = j["output_path"].get<std::string>();
  }
  if (j.contains("format")) {
    if (!j["format"].is_string()) throw SchemaError("format must be a string");
    c.format = j["format"].get<std::string>();
  }
  if (c.format != "csv" && c.format != "json")
    throw SchemaError("format must be 'csv' or 'json'");
  if (j.contains("tolerances")) {
    if (!j["tolerances"].is_object())
      throw SchemaError("tolerances must be an object");
    for (const auto& kv : j["tolerances"].items()) {
      if (!kv.value().is_number())
        throw SchemaError("tolerance '" + kv.key() + "' must be numeric");
      c.tolerances[kv.key()] = kv.value().get<double>();
    }
  }
  return c;
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& config) {
  const std::vector<GridPoint> grid = build_grid(config);
  std::vector<ResultRow> rows;
  std::uint64_t row_index = 0;

  for (const GridPoint& g : grid) {
    if (config.experiment == "sample") {
      // one emitted row per draw; substream keyed by emitted-row index
      const std::int64_t per_point =
          static_cast<std::int64_t>(tol(config, "samples", 10.0));
      const bool hit = tol(config, "hit", 0.0) != 0.0;
      try {
        const ConditionalSpec spec = spec_for(
            config, g.n, g.x, hit ? CondKind::Hit : CondKind::Exceed);
        validate_spec(spec);
        std::int64_t whi =
            static_cast<std::int64_t>(tol(config, "whi", 0.0));
        if (whi == 0) whi = g.x + std::max<std::int64_t>(g.x / 2, 1024);
        const ConditionalSampler sampler(spec, -whi, whi);
        for (std::int64_t i = 0; i < per_point; ++i) {
          ResultRow row;
          row.experiment = config.experiment;
          row.n = g.n;
          row.x = g.x;
          const auto t0 = std::chrono::steady_clock::now();
          std::mt19937_64 rng = substream(config.seed, row_index);
          const std::vector<std::int64_t> seq = sampler.sample_exact(rng);
          std::int64_t total = 0, mx = seq[0];
          std::string joined;
          for (std::int64_t v : seq) {
            total += v;
            mx = std::max(mx, v);
            if (!joined.empty()) joined += ' ';
            joined += std::to_string(v);
          }
          row.value = static_cast<double>(total);
          row.has_value = true;
          row.value2 = static_cast<double>(mx);
          row.has_value2 = true;
          row.method = "exact_dp";
          row.extra = joined;
          row.wall_ms = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
          rows.push_back(std::move(row));
          ++row_index;
        }
      } catch (const std::exception& e) {
        ResultRow row;
        row.experiment = config.experiment;
        row.n = g.n;
        row.x = g.x;
        row.status = std::string("error: ") + e.what();
        rows.push_back(std::move(row));
        ++row_index;
      }
      continue;
    }

    ResultRow row;
    row.experiment = config.experiment;
    row.n = g.n;
    row.x = g.x;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      if (config.experiment == "ratio")
        run_ratio(config, g, false, row);
      else if (config.experiment == "tail_ratio")
        run_ratio(config, g, true, row);
      else if (config.experiment == "tv2")
        run_tv(config, g, false, row);
      else if (config.experiment == "tv3")
        run_tv(config, g, true, row);
      else if (config.experiment == "fn_bound")
        run_fn(config, g, row);
      else if (config.experiment == "poisson")
        run_poisson(config, g, row);
      else if (config.experiment == "scales")
        run_scales(config, g, row);
      else
        throw SchemaError("unhandled experiment '" + config.experiment + "'");
    } catch (const std::exception& e) {
      row.has_value = row.has_value2 = row.has_bound = row.has_bound2 = false;
      row.has_stderr = false;
      row.status = std::string("error: ") + e.what();
    }
    row.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    rows.push_back(std::move(row));
    ++row_index;
  }
  return rows;
}

namespace {

bool row_column(const ResultRow& row, const std::string& col, double& out) {
  if (col == "n") {
    out = static_cast<double>(row.n);
    return true;
  }
  if (col == "x") {
    out = static_cast<double>(row.x);
    return true;
  }
  if (col == "value") {
    out = row.value;
    return row.has_value;
  }
  if (col == "value2") {
    out = row.value2;
    return row.has_value2;
  }
  if (col == "bound") {
    out = row.bound;
    return row.has_bound;
  }
  if (col == "bound2") {
    out = row.bound2;
    return row.has_bound2;
  }
  if (col == "stderr") {
    out = row.stderr_value;
    return row.has_stderr;
  }
  throw std::invalid_argument("fit_decay_exponent: unknown column '" + col +
                              "'");
}

}  // namespace

LineFit fit_decay_exponent(const std::vector<ResultRow>& rows,
                           const std::string& x_col, const std::string& y_col) {
  std::vector<double> xs, ys;
  std::string bad;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    double xv = 0.0, yv = 0.0;
    if (!row_column(rows[i], x_col, xv) || !row_column(rows[i], y_col, yv))
      continue;  // rows that failed upstream carry no fit information
    if (!(xv > 0.0) || !(yv > 0.0)) {
      if (!bad.empty()) bad += ", ";
      bad += std::to_string(i);
      continue;
    }
    xs.push_back(std::log(xv));
    ys.push_back(std::log(yv));
  }
  if (!bad.empty())
    throw std::invalid_argument(
        "fit_decay_exponent: non-positive values at rows " + bad);
  if (xs.size() < 4)
    throw std::invalid_argument(
        "fit_decay_exponent: need at least 4 usable rows");
  return fit_line(xs, ys);
}

namespace {

std::string preamble(const ExperimentConfig& config) {
  char hash[24];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(fnv1a64(config.raw_json)));
  std::string out;
  out += "# experiment=" + config.experiment + "\n";
  out += std::string("# config_hash=") + hash + "\n";
  out += "# seed=" +
         (config.has_seed ? std::to_string(config.seed) : std::string("-")) +
         "\n";
  out += std::string("# version=") + kHarnessVersion + "\n";
  return out;
}

}  // namespace

std::string emit_csv(const std::vector<ResultRow>& rows,
                     const ExperimentConfig& config) {
  std::string out = preamble(config);
  out += "experiment,n,x,value,value2,bound,bound2,method,stderr,status,extra\n";
  for (const ResultRow& r : rows) {
    out += r.experiment;
    out += ',' + std::to_string(r.n) + ',' + std::to_string(r.x) + ',';
    if (r.has_value) out += fmt_double(r.value);
    out += ',';
    if (r.has_value2) out += fmt_double(r.value2);
    out += ',';
    if (r.has_bound) out += fmt_double(r.bound);
    out += ',';
    if (r.has_bound2) out += fmt_double(r.bound2);
    out += ',';
    out += r.method;
    out += ',';
    if (r.has_stderr) out += fmt_double(r.stderr_value);
    out += ',';
    out += csv_quote(r.status) + ',' + csv_quote(r.extra) + "\n";
  }
  return out;
}

std::string emit_json(const std::vector<ResultRow>& rows,
                      const ExperimentConfig& config) {
  char hash[24];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(fnv1a64(config.raw_json)));
  json meta;
  meta["experiment"] = config.experiment;
  meta["config_hash"] = hash;
  if (config.has_seed) meta["seed"] = config.seed;
  meta["version"] = kHarnessVersion;
  json arr = json::array();
  for (const ResultRow& r : rows) {
    json o;
    o["experiment"] = r.experiment;
    o["n"] = r.n;
    o["x"] = r.x;
    if (r.has_value) o["value"] = r.value;
    if (r.has_value2) o["value2"] = r.value2;
    if (r.has_bound) o["bound"] = r.bound;
    if (r.has_bound2) o["bound2"] = r.bound2;
    o["method"] = r.method;
    if (r.has_stderr) o["stderr"] = r.stderr_value;
    o["status"] = r.status;
    if (!r.extra.empty()) o["extra"] = r.extra;
    o["wall_ms"] = r.wall_ms;
    arr.push_back(std::move(o));
  }
  json doc;
  doc["meta"] = std::move(meta);
  doc["rows"] = std::move(arr);
  return doc.dump(2) + "\n";
}

std::string emit_report(const std::vector<ResultRow>& rows,
                        const ExperimentConfig& config,
                        const std::string& path) {
  const std::string text =
      config.format == "json" ? emit_json(rows, config) : emit_csv(rows, config);
  if (!path.empty()) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file " + path);
    f << text;
    if (!f) throw std::runtime_error("failed writing output file " + path);
  }
  return text;
}

}  // namespace bigjump
