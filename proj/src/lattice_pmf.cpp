#include "lattice_pmf.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "json.hpp"

namespace bigjump {

LatticePMF materialize_pmf(const TailModel& model, std::int64_t half_window) {
  if (half_window < 2)
    throw std::invalid_argument("materialize_pmf: need half_window >= 2");
  if (half_window > (std::int64_t{1} << 26))
    throw std::invalid_argument("materialize_pmf: half_window too large");
  LatticePMF f;
  f.offset = -half_window;
  f.log_mass.resize(static_cast<std::size_t>(2 * half_window + 1));
  for (std::int64_t k = -half_window; k <= half_window; ++k)
    f.log_mass[static_cast<std::size_t>(k + half_window)] = model.log_pmf(k);
  const double cert = std::log1p(1e-12);
  f.out_left_log = model.log_left_tail(static_cast<double>(half_window)) + cert;
  f.out_right_log =
      model.log_survival(static_cast<double>(half_window)) + cert;
  f.model = std::make_shared<const TailModel>(model);
  return f;
}

double pmf_log_survival(const LatticePMF& f, std::int64_t x) {
  const std::int64_t lo = f.lo(), hi = f.hi();
  if (x >= hi) {
    if (x == hi || !f.model) return f.out_right_log;
    return f.model->log_survival(static_cast<double>(x));
  }
  if (x >= lo - 1) {
    const std::size_t from = static_cast<std::size_t>(x + 1 - f.offset);
    const double win =
        log_sum(f.log_mass.data() + from, f.log_mass.size() - from);
    return log_add(win, f.out_right_log);
  }
  // everything in and above the window exceeds x
  double below;
  if (f.model)
    below = std::exp(f.model->log_left_tail(static_cast<double>(-(x + 1))));
  else
    below = std::exp(f.out_left_log);
  return std::log1p(-std::min(below, 1.0));
}

TruncatedMoments truncated_moments(const LatticePMF& f, std::int64_t x) {
  if (x < 1) throw std::invalid_argument("truncated_moments: need x >= 1");
  const std::int64_t lo = f.lo(), hi = f.hi();
  TruncatedMoments out;
  double mean = 0.0;
  for (std::int64_t k = lo; k <= hi; ++k)
    mean += static_cast<double>(k) * std::exp(f.at(k));
  out.mean = mean;

  const double xr = static_cast<double>(x);
  double var = 0.0;
  for (std::int64_t k = lo; k <= hi; ++k) {
    const double d = static_cast<double>(k) - mean;
    if (std::abs(d) <= xr) var += d * d * std::exp(f.at(k));
  }
  out.trunc_var = var;

  if (!f.model)
    throw std::invalid_argument("truncated_moments: needs a model-backed pmf");
  const double alpha = f.model->alpha;
  double s2a = 0.0;
  for (std::int64_t k = std::max(lo, -x); k <= std::min(hi, x); ++k) {
    if (k == 0) continue;
    s2a += std::pow(std::abs(static_cast<double>(k)), alpha) * std::exp(f.at(k));
  }
  out.sigma_2alpha = s2a;

  out.truncation_uncertain =
      (std::ceil(mean - xr) < static_cast<double>(lo)) ||
      (std::floor(mean + xr) > static_cast<double>(hi)) || (x > hi) ||
      (-x < lo);
  return out;
}

void dump_pmf_csv(const LatticePMF& f, const std::string& path) {
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) throw std::runtime_error("dump_pmf_csv: cannot open " + path);
  std::fprintf(fp, "k,log_mass\n");
  for (std::int64_t k = f.lo(); k <= f.hi(); ++k)
    std::fprintf(fp, "%lld,%.17g\n", static_cast<long long>(k), f.at(k));
  std::fclose(fp);

  nlohmann::json j;
  j["offset"] = f.offset;
  j["len"] = f.log_mass.size();
  j["out_mass_log"] = f.out_mass_log();
  std::FILE* sp = std::fopen((path + ".json").c_str(), "w");
  if (!sp) throw std::runtime_error("dump_pmf_csv: cannot open sidecar");
  const std::string text = j.dump();
  std::fwrite(text.data(), 1, text.size(), sp);
  std::fclose(sp);
}

}  // namespace bigjump
