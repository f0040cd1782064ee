// Joint (sum, exceedance-count) law: binomial row structure and marginals.
#include <cmath>
#include <cstdint>
#include <vector>

#include "convolution.hpp"
#include "doctest.h"
#include "joint_law.hpp"
#include "oracle_util.hpp"
#include "tail_model.hpp"

using namespace bigjump;

TEST_CASE("two-summand joint law matches the dense split reference") {
  const auto m = TailModel::zeta(1.5).truncate(-20, 20);
  const auto joint = joint_sum_count(m, 2, 3, 2, 40);
  REQUIRE(joint.k_rows() == 3);

  std::vector<double> low(41, 0.0), high(41, 0.0);  // index j holds value j-20
  for (std::int64_t v = -20; v <= 20; ++v)
    (v > 3 ? high : low)[static_cast<std::size_t>(v + 20)] = m.pmf(v);
  auto conv = [](const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> r(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
  };
  const auto r0 = conv(low, low);
  auto r1 = conv(low, high);
  for (double& v : r1) v *= 2.0;
  const auto r2 = conv(high, high);
  const std::vector<const std::vector<double>*> rows{&r0, &r1, &r2};
  for (std::int64_t k = 0; k < 3; ++k)
    for (std::int64_t s = -40; s <= 40; ++s) {
      const double want = (*rows[static_cast<std::size_t>(k)])
          [static_cast<std::size_t>(s + 40)];
      if (want < 1e-300) continue;
      CHECK(std::exp(joint.at(s, k)) == doctest::Approx(want).epsilon(1e-12));
    }
  CHECK(joint.out_mass_log() == kNegInf);
  CHECK(joint.remainder_log == kNegInf);
}

TEST_CASE("count marginal is the exceedance binomial") {
  const auto m = TailModel::zeta(1.5);
  const std::int64_t n = 5, t = 50, W = 2048;
  const auto joint = joint_sum_count(m, n, t, n, W);
  REQUIRE(joint.k_rows() == n + 1);
  const double lg = m.log_survival(static_cast<double>(t));
  const double l1mg = std::log1p(-std::exp(lg));
  const auto cm = joint.count_marginal_log();
  for (std::int64_t k = 0; k <= n; ++k) {
    const double want = log_binom(n, k) + static_cast<double>(k) * lg +
                        static_cast<double>(n - k) * l1mg;
    CHECK(cm[static_cast<std::size_t>(k)] ==
          doctest::Approx(want).epsilon(1e-10));
  }
}

TEST_CASE("sum marginal agrees with the plain convolution power") {
  const auto m = TailModel::zeta(1.5);
  const std::int64_t W = 2048;
  const auto joint = joint_sum_count(m, 5, 50, 5, W);
  const auto marg = joint.sum_marginal();
  const auto ref = sum_pmf_recentered(m, 5, W);
  REQUIRE(marg.lo() == ref.lo());
  long double tv = 0.0L;
  for (std::int64_t s = -W; s <= W; ++s)
    tv += std::fabs(std::exp(marg.at(s)) - std::exp(ref.at(s)));
  // identity up to roundoff: the split rows re-associate the block-scaled
  // accumulation, so ~4k cells each drift by a few ulp
  CHECK(static_cast<double>(0.5L * tv) < 1e-8);
}

TEST_CASE("capped rows push the binomial remainder outside") {
  const auto m = TailModel::zeta(1.5);
  const std::int64_t n = 5, t = 50, W = 1024, k_cap = 2;
  const auto joint = joint_sum_count(m, n, t, k_cap, W);
  REQUIRE(joint.k_rows() == k_cap + 1);
  const double g = std::exp(m.log_survival(static_cast<double>(t)));
  long double tail = 0.0L;
  for (std::int64_t k = k_cap + 1; k <= n; ++k)
    tail += std::exp(log_binom(n, k)) * std::pow(g, static_cast<double>(k)) *
            std::pow(1.0 - g, static_cast<double>(n - k));
  CHECK(std::exp(joint.remainder_log) ==
        doctest::Approx(static_cast<double>(tail)).epsilon(1e-12));

  const auto marg = joint.sum_marginal();
  const double total = log_add(marg.window_log_sum(), marg.out_mass_log());
  CHECK(std::exp(total) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("joint law rejects bad shapes") {
  const auto m = TailModel::zeta(1.5);
  CHECK_THROWS(joint_sum_count(m, 0, 10, 4, 100));
  CHECK_THROWS(joint_sum_count(m, 3, 10, 1, 100));
  CHECK_THROWS(joint_sum_count(m, 3, -1, 4, 100));
  CHECK_THROWS(joint_sum_count(m, 3, 100, 4, 100));
}
