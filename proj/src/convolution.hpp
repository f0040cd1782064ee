#pragma once
// Exact windowed lattice convolution in log domain. The kernel works on
// block-scaled linear values (one scale per 512-cell block) so the inner loop
// is a dense FMA; per-cell floating-scale accumulators absorb the huge dynamic
// range across block pairs. Clipped mass is split by side and folded into the
// certified out-of-window totals, never dropped: the grand total of any result
// equals the product of the input totals up to rounding.
//
// Side attribution of out-mass for convolved laws is heuristic (cross terms
// are assigned by dominant direction); the combined out_mass_log is exact.

#include <cstdint>
#include <optional>

#include "lattice_pmf.hpp"

namespace bigjump {

struct Window {
  std::int64_t lo = 0;
  std::int64_t hi = 0;  // inclusive
};

// target absent: exact full support (grow policy). clip_budget: linear mass
// allowance for clipping before the result's window_overflow flag is raised.
LatticePMF convolve(const LatticePMF& a, const LatticePMF& b,
                    const std::optional<Window>& target = std::nullopt,
                    double clip_budget = 1.0);

LatticePMF convolve_square(const LatticePMF& a,
                           const std::optional<Window>& target = std::nullopt,
                           double clip_budget = 1.0);

// n-fold power by binary doubling; deterministic association order.
LatticePMF conv_power(const LatticePMF& p, std::int64_t n,
                      const std::optional<Window>& target = std::nullopt,
                      double clip_budget = 1.0);

// Sequential reference path (n-1 plain convolutions, exact support); n <= 64.
LatticePMF direct_convolve_oracle(const LatticePMF& p, std::int64_t n);

// Point mass at `at`.
LatticePMF make_delta(std::int64_t at = 0);

// The centering shift floor(b_n) used by the recentered sum laws.
std::int64_t sum_center(const TailModel& model, std::int64_t n);

// Law of S_n - floor(b_n) on [-window, window].
LatticePMF sum_pmf_recentered(const TailModel& model, std::int64_t n,
                              std::int64_t window);

// Sub-probability law of (S_n - floor(b_n)) restricted to max X_i <= y;
// total mass (1 - G(y))^n.
LatticePMF truncated_max_sum_pmf(const TailModel& model, std::int64_t n,
                                 std::int64_t y, std::int64_t window);

// log P(S_hat_n > x) from a windowed sum law: in-window log-sum-exp plus a
// beyond-window completion n * rho * G(max(x, W)), where rho is the measured
// ratio of the sum law to n*mu over the top 15% band of the window.
double log_survival_completed(const TailModel& model, std::int64_t n,
                              const LatticePMF& sum_law, std::int64_t x);

// log P(S_hat_n > v) (strict; v on the recentered scale), exact deep in the
// tail. Partitions on the number of coordinates above half the level: the
// all-small block is a truncated windowed power read far from its edges, one
// big coordinate integrates the analytic tail against the small-sum law, two
// bigs go through an explicit pair convolution, and three or more sit below
// double rounding. No completion fit, so none of its window systematics.
// Needs the level about eight lattice steps past the centering shift.
double log_survival_split(const TailModel& model, std::int64_t n,
                          std::int64_t v);

// Doubling ladder over a fixed base, reusable across several exponents.
class PowerLadder {
 public:
  PowerLadder(const LatticePMF& base, const std::optional<Window>& target,
              double clip_budget = 1.0);
  // m >= 0 (m = 0 gives the delta at 0)
  LatticePMF pow(std::int64_t m) const;

 private:
  std::optional<Window> target_;
  double clip_budget_;
  mutable std::vector<LatticePMF> sq_;  // sq_[j] = base^(2^j), grown lazily
  const LatticePMF& level(std::size_t j) const;
};

}  // namespace bigjump
