#include "joint_law.hpp"

#include <cmath>
#include <stdexcept>

#include "convolution.hpp"
#include "stats.hpp"

namespace bigjump {

double JointSumCountLaw::at(std::int64_t s, std::int64_t k) const {
  if (k < 0 || k >= k_rows()) return kNegInf;
  if (s < lo() || s > hi()) return kNegInf;
  return log_mass[static_cast<std::size_t>(k)][static_cast<std::size_t>(s - offset)];
}

std::vector<double> JointSumCountLaw::count_marginal_log() const {
  std::vector<double> out(log_mass.size(), kNegInf);
  for (std::size_t k = 0; k < log_mass.size(); ++k)
    out[k] = log_add(log_sum(log_mass[k]),
                     log_add(row_out_left_log[k], row_out_right_log[k]));
  return out;
}

LatticePMF JointSumCountLaw::sum_marginal() const {
  LatticePMF f;
  f.offset = offset;
  f.log_mass.assign(cells(), kNegInf);
  for (std::size_t j = 0; j < cells(); ++j) {
    ScaledAcc acc;
    for (std::size_t k = 0; k < log_mass.size(); ++k)
      acc.add_log(log_mass[k][j]);
    f.log_mass[j] = acc.log_value();
  }
  f.out_left_log = out_left_log;
  f.out_right_log = out_right_log;
  f.model = model;
  return f;
}

JointSumCountLaw joint_sum_count(const TailModel& model, std::int64_t n,
                                 std::int64_t threshold, std::int64_t k_cap,
                                 std::int64_t window) {
  if (n < 1) throw std::invalid_argument("joint_sum_count: need n >= 1");
  if (k_cap < 2) throw std::invalid_argument("joint_sum_count: need K_cap >= 2");
  if (threshold < 0 || threshold >= window)
    throw std::invalid_argument("joint_sum_count: need 0 <= threshold < window");

  const LatticePMF full = materialize_pmf(model, window);
  const double log_g = model.log_survival(static_cast<double>(threshold));
  if (log_g == kNegInf)
    throw std::domain_error("joint_sum_count: threshold beyond the support");
  const double log_1mg = std::log1p(-std::exp(log_g));
  if (!std::isfinite(log_1mg))
    throw std::domain_error("joint_sum_count: no mass at or below threshold");

  // split at the threshold and renormalize each part to a probability law
  LatticePMF low, high;
  low.offset = full.offset;
  low.model = full.model;
  low.out_left_log = full.out_left_log - log_1mg;
  low.log_mass.assign(full.log_mass.begin(),
                      full.log_mass.begin() + (threshold - full.offset + 1));
  for (double& v : low.log_mass) v -= log_1mg;
  high.offset = threshold + 1;
  high.model = full.model;
  high.out_right_log = full.out_right_log - log_g;
  high.log_mass.assign(full.log_mass.begin() + (threshold - full.offset + 1),
                       full.log_mass.end());
  for (double& v : high.log_mass) v -= log_g;

  const Window target{-window, window};
  const std::int64_t k_use = std::min<std::int64_t>(k_cap, n);
  PowerLadder low_ladder(low, target);

  JointSumCountLaw joint;
  joint.offset = -window;
  joint.k_cap = k_cap;
  joint.n = n;
  joint.threshold = threshold;
  joint.model = full.model;
  const std::size_t ncells = static_cast<std::size_t>(2 * window + 1);
  joint.log_mass.assign(static_cast<std::size_t>(k_use + 1),
                        std::vector<double>(ncells, kNegInf));
  joint.row_out_left_log.assign(static_cast<std::size_t>(k_use + 1), kNegInf);
  joint.row_out_right_log.assign(static_cast<std::size_t>(k_use + 1), kNegInf);

  LatticePMF high_pow;  // high^k, grown as k advances
  for (std::int64_t k = 0; k <= k_use; ++k) {
    if (k == 1)
      high_pow = convolve(high, make_delta(0), target);
    else if (k > 1)
      high_pow = convolve(high_pow, high, target);
    LatticePMF row;
    if (k == 0)
      row = low_ladder.pow(n);
    else if (k == n)
      row = high_pow;
    else
      row = convolve(high_pow, low_ladder.pow(n - k), target);
    const double coef = log_binom(n, k) + static_cast<double>(n - k) * log_1mg +
                        static_cast<double>(k) * log_g;
    std::vector<double>& dst = joint.log_mass[static_cast<std::size_t>(k)];
    for (std::int64_t s = row.lo(); s <= row.hi(); ++s) {
      if (s < -window || s > window) continue;
      dst[static_cast<std::size_t>(s + window)] = row.at(s) + coef;
    }
    joint.row_out_left_log[static_cast<std::size_t>(k)] =
        coef + row.out_left_log;
    joint.row_out_right_log[static_cast<std::size_t>(k)] =
        coef + row.out_right_log;
    joint.out_left_log = log_add(joint.out_left_log, coef + row.out_left_log);
    joint.out_right_log =
        log_add(joint.out_right_log, coef + row.out_right_log);
  }

  // counts above the last exact row: binomial remainder, certified outside
  if (k_use < n) {
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(n - k_use));
    for (std::int64_t k = k_use + 1; k <= n; ++k)
      terms.push_back(log_binom(n, k) + static_cast<double>(k) * log_g +
                      static_cast<double>(n - k) * log_1mg);
    joint.remainder_log = log_sum(terms);
    joint.out_right_log = log_add(joint.out_right_log, joint.remainder_log);
  }
  return joint;
}

}  // namespace bigjump
