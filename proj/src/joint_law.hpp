#pragma once
// Joint law of (S_n, N) where N counts summands above a threshold t: the
// backbone of the exact total-variation computations. Built by splitting the
// jump law at t and recombining binomially, so each count row is exact.

#include <cstdint>
#include <memory>
#include <vector>

#include "lattice_pmf.hpp"
#include "tail_model.hpp"

namespace bigjump {

struct JointSumCountLaw {
  std::int64_t offset = 0;   // cell s maps to log_mass[k][s - offset]
  std::int64_t k_cap = 0;    // requested cap; rows cover 0..k_rows()-1
  std::int64_t n = 0;
  std::int64_t threshold = 0;  // N = #{i : X_i > threshold}
  // log_mass[k][j] = log P(S_n = offset + j, N = k); counts above the last
  // row are certified into out_mass_log together with spatial clipping.
  std::vector<std::vector<double>> log_mass;
  // per-count spatially clipped mass, split by side so integrands that are
  // constant on each out half-line stay exact
  std::vector<double> row_out_left_log;
  std::vector<double> row_out_right_log;
  double remainder_log = kNegInf;  // counts above the last row, side unknown
  double out_left_log = kNegInf;
  double out_right_log = kNegInf;
  std::shared_ptr<const TailModel> model;

  std::int64_t lo() const { return offset; }
  std::int64_t hi() const {
    return offset + static_cast<std::int64_t>(cells()) - 1;
  }
  std::size_t cells() const { return log_mass.empty() ? 0 : log_mass[0].size(); }
  std::int64_t k_rows() const { return static_cast<std::int64_t>(log_mass.size()); }
  double at(std::int64_t s, std::int64_t k) const;
  double out_mass_log() const { return log_add(out_left_log, out_right_log); }

  // log P(N = k) for k < k_rows(), cells plus per-row clipped mass.
  std::vector<double> count_marginal_log() const;
  // Marginal law of S_n; out mass carries the clipped + high-count remainder.
  LatticePMF sum_marginal() const;
};

// Exact rows for N = 0..min(K_cap, n); the binomial remainder P(N > that)
// is certified into the out mass. Requires 0 <= threshold < window.
JointSumCountLaw joint_sum_count(const TailModel& model, std::int64_t n,
                                 std::int64_t threshold, std::int64_t k_cap,
                                 std::int64_t window);

}  // namespace bigjump
