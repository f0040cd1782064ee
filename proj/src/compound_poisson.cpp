#include "compound_poisson.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "bounds.hpp"
#include "convolution.hpp"
#include "stats.hpp"

namespace bigjump {

namespace {

void validate(const CompoundPoissonSpec& spec) {
  if (!(spec.lambda > 0.0))
    throw std::invalid_argument("compound_poisson: need lambda > 0");
  if (spec.n < 0) throw std::invalid_argument("compound_poisson: need n >= 0");
  if (!(spec.alpha > 1.0))
    throw std::invalid_argument("compound_poisson: need alpha > 1");
  if (spec.window < 2)
    throw std::invalid_argument("compound_poisson: need window >= 2");
}

}  // namespace

std::int64_t resolve_terms(const CompoundPoissonSpec& spec) {
  validate(spec);
  const double big_lambda = spec.total_intensity();
  const double floor_m = big_lambda + 10.0 * std::sqrt(big_lambda);
  if (spec.terms_M == 0)
    return static_cast<std::int64_t>(
        std::ceil(big_lambda + 12.0 * std::sqrt(big_lambda) + 20.0));
  if (static_cast<double>(spec.terms_M) < floor_m)
    throw std::invalid_argument(
        "compound_poisson: terms_M below Lambda + 10 sqrt(Lambda)");
  return spec.terms_M;
}

LatticePMF compound_poisson_pmf(const CompoundPoissonSpec& spec) {
  const std::int64_t M = resolve_terms(spec);
  const double big_lambda = spec.total_intensity();
  const double log_lambda = std::log(big_lambda);
  const TailModel jump = TailModel::zeta(spec.alpha);
  const LatticePMF mu = materialize_pmf(jump, spec.window);
  const Window target{-spec.window, spec.window};

  const std::size_t ncell = mu.log_mass.size();
  std::vector<ScaledAcc> acc(ncell);
  ScaledAcc out_left, out_right;

  LatticePMF cur = make_delta(0);
  for (std::int64_t m = 0; m <= M; ++m) {
    if (m > 0) cur = convolve(cur, mu, target);
    const double logw =
        -big_lambda + static_cast<double>(m) * log_lambda - std::lgamma(m + 1.0);
    for (std::int64_t s = cur.lo(); s <= cur.hi(); ++s) {
      const double v = cur.at(s);
      if (v == kNegInf) continue;
      acc[static_cast<std::size_t>(s + spec.window)].add_log(logw + v);
    }
    out_left.add_log(logw + cur.out_left_log);
    out_right.add_log(logw + cur.out_right_log);
  }

  LatticePMF result;
  result.offset = -spec.window;
  result.log_mass.resize(ncell);
  for (std::size_t j = 0; j < ncell; ++j) result.log_mass[j] = acc[j].log_value();
  // Poisson tail beyond M: certified truncation mass, split across the sides
  const double tail = gamma_p(static_cast<double>(M + 1), big_lambda);
  const double log_half_tail =
      tail > 0.0 ? std::log(0.5 * tail) : kNegInf;
  result.out_left_log = log_add(out_left.log_value(), log_half_tail);
  result.out_right_log = log_add(out_right.log_value(), log_half_tail);
  result.model = std::make_shared<const TailModel>(jump);
  return result;
}

CondensationReport condensation_check(const CompoundPoissonSpec& spec,
                                      std::int64_t k, double c) {
  validate(spec);
  if (k < 1) throw std::invalid_argument("condensation_check: need k >= 1");
  const LatticePMF pmf = compound_poisson_pmf(spec);
  const TailModel jump = TailModel::zeta(spec.alpha);
  const double big_lambda = spec.total_intensity();

  CondensationReport rep;
  rep.lhs = std::exp(pmf.at(k));
  rep.rhs = -std::expm1(-big_lambda * std::exp(jump.log_pmf(k)));
  rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs
                            : std::numeric_limits<double>::quiet_NaN();
  rep.err_prediction =
      std::pow(static_cast<double>(spec.n), -beta_exponent(spec.alpha));
  rep.in_regime = static_cast<double>(k) >= c * static_cast<double>(spec.n);
  return rep;
}

}  // namespace bigjump
