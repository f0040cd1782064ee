#pragma once
// Compound-Poisson sums of symmetric zeta jumps over the sites -n..n, and the
// condensation identity: a large total is realized by one macroscopic jump.

#include <cstdint>

#include "lattice_pmf.hpp"
#include "tail_model.hpp"

namespace bigjump {

struct CompoundPoissonSpec {
  double lambda = 1.0;     // per-site intensity
  std::int64_t n = 1;      // sites -n..n, so total intensity (2n+1)*lambda
  double alpha = 1.5;      // jump law: symmetric zeta(1+alpha)
  std::int64_t window = 1024;
  std::int64_t terms_M = 0;  // 0: default Lambda + 12 sqrt(Lambda) + 20

  double total_intensity() const {
    return static_cast<double>(2 * n + 1) * lambda;
  }
};

// terms_M resolved to its default when 0; throws if the explicit value is
// below the Lambda + 10 sqrt(Lambda) floor.
std::int64_t resolve_terms(const CompoundPoissonSpec& spec);

// pmf of the compound sum: the Poisson mixture of jump-law convolution
// powers, truncated at terms_M with the Poisson tail certified into the out
// mass (split evenly by side; the jump law is symmetric).
LatticePMF compound_poisson_pmf(const CompoundPoissonSpec& spec);

struct CondensationReport {
  double lhs = 0.0;    // P(S = k)
  double rhs = 0.0;    // P(some jump equals k) = 1 - exp(-Lambda P(Y=k))
  double ratio = 0.0;  // lhs / rhs
  double err_prediction = 0.0;  // n^(-beta), beta from beta_exponent(alpha)
  bool in_regime = true;        // k >= c*n
};

CondensationReport condensation_check(const CompoundPoissonSpec& spec,
                                      std::int64_t k, double c = 3.0);

}  // namespace bigjump
