#pragma once
// Materialized log-domain PMFs over an integer window, with certified
// out-of-window mass kept split by side so that derived quantities (survival,
// convolution bookkeeping) stay exact to the certification level.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "stats.hpp"
#include "tail_model.hpp"

namespace bigjump {

struct LatticePMF {
  std::int64_t offset = 0;        // value of the first lattice point
  std::vector<double> log_mass;   // window [offset, offset + len)
  double out_left_log = kNegInf;   // certified mass below the window
  double out_right_log = kNegInf;  // certified mass above the window
  bool window_overflow = false;    // clipped mass exceeded the caller budget
  std::shared_ptr<const TailModel> model;  // set for model-derived PMFs

  std::int64_t lo() const { return offset; }
  std::int64_t hi() const {
    return offset + static_cast<std::int64_t>(log_mass.size()) - 1;
  }
  double at(std::int64_t k) const {
    if (k < lo() || k > hi()) return kNegInf;
    return log_mass[static_cast<std::size_t>(k - offset)];
  }
  double out_mass_log() const { return log_add(out_left_log, out_right_log); }
  double window_log_sum() const { return log_sum(log_mass); }
};

// PMF over [-W, W]; tail mass on each side bounded analytically.
LatticePMF materialize_pmf(const TailModel& model, std::int64_t half_window);

// log P(Y > x); inside the window an exact log-sum-exp, beyond it the
// analytic tail when a model is attached, else the certified bound.
double pmf_log_survival(const LatticePMF& f, std::int64_t x);

struct TruncatedMoments {
  double mean = 0.0;
  double trunc_var = 0.0;     // E[(X-mean)^2 1{|X-mean| <= x}]
  double sigma_2alpha = 0.0;  // E[|X|^alpha 1{|X| <= x}]
  bool truncation_uncertain = false;  // indicator range clipped by the window
};

TruncatedMoments truncated_moments(const LatticePMF& f, std::int64_t x);

// CSV columns (k, log_mass) with a header row; JSON sidecar at path + ".json"
// holding {offset, len, out_mass_log}.
void dump_pmf_csv(const LatticePMF& f, const std::string& path);

}  // namespace bigjump
