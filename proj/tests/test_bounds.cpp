// Approximation-error machinery: exponents, regimes, budgets, FN bounds.
#include <cmath>
#include <cstdint>
#include <vector>

#include "bounds.hpp"
#include "convolution.hpp"
#include "doctest.h"
#include "oracle_util.hpp"
#include "scales.hpp"
#include "tail_model.hpp"

using namespace bigjump;

TEST_CASE("decay exponent by alpha case") {
  CHECK(beta_exponent(1.5) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(beta_exponent(2.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(beta_exponent(3.0) == doctest::Approx(0.375).epsilon(1e-15));
  CHECK_THROWS(beta_exponent(1.0));
}

TEST_CASE("beta selection clamps to its admissible range") {
  const std::int64_t n = 1000;
  const auto boundary = static_cast<std::int64_t>(
      std::ceil(std::sqrt(static_cast<double>(n) * std::log(static_cast<double>(n)))));
  CHECK(choose_beta(3.0, n, boundary) == 0.0);
  // far in the tail the cap (alpha-2)(alpha+1)/(2(2alpha+1)) binds
  CHECK(choose_beta(3.0, 100, 1000000000) ==
        doctest::Approx(2.0 / 7.0).epsilon(1e-15));
  CHECK_THROWS(choose_beta(2.0, 100, 1000));
}

TEST_CASE("single-jump approximants are n times the one-jump law") {
  const auto m = TailModel::zeta(1.5);
  const double local = bigjump_local_log(m, 10, 30);
  CHECK(std::exp(local) ==
        doctest::Approx(10.0 * std::pow(30.0, -2.5) / (2.0 * oracle::kZeta25))
            .epsilon(1e-13));
  const double tail = bigjump_tail_log(m, 10, 30);
  CHECK(tail == doctest::Approx(std::log(10.0) + m.log_survival(29.0))
                    .epsilon(1e-14));
  CHECK_THROWS(bigjump_local_log(m, 10, 0));
  CHECK_THROWS(bigjump_tail_log(m, 10, 0));
}

TEST_CASE("regime boundaries by alpha case") {
  const auto m = TailModel::zeta(1.5);
  const std::int64_t n = 100;
  const double a = scale_an(m, n);
  const auto hi = static_cast<std::int64_t>(std::ceil(4.0 * a)) + 1;
  const auto lo = static_cast<std::int64_t>(std::floor(4.0 * a)) - 1;
  CHECK(regime_check(m, n, hi).regime == Regime::BigJump);
  CHECK(regime_check(m, n, lo).regime == Regime::Intermediate);
  CHECK(regime_check(m, n, hi).q_value > 0.0);

  const auto h = TailModel::zeta(3.0);
  CHECK(regime_check(h, 100, 30).regime == Regime::BigJump);
  CHECK(regime_check(h, 100, 15).regime == Regime::Gaussian);
  CHECK(regime_check(h, 100, 21).regime == Regime::Intermediate);

  CHECK(std::isnan(regime_check(TailModel::zeta(0.8), 100, 500).q_value));
  CHECK_THROWS(regime_check(m, 1, 100));
}

TEST_CASE("epsilon sequences follow the case formulas") {
  const auto m = TailModel::zeta(1.5);
  const std::int64_t n = 100, x = 1000;
  const double a = scale_an(m, n);
  const auto e = epsilon_sequences(m, n, x);
  CHECK(e.eps_n ==
        doctest::Approx(std::pow(1000.0 / a, -0.6)).epsilon(1e-13));
  const double lg = std::log(1000.0 / (a * std::sqrt(std::log(100.0))));
  CHECK(e.eps_tilde_n ==
        doctest::Approx(std::min(0.25, 1.0 / (lg * lg))).epsilon(1e-13));
  CHECK(e.eps_tilde_n <= 0.25);
  CHECK(e.eps_tilde_n > 0.0);
  CHECK_THROWS(epsilon_sequences(m, n, 20));  // not in the big-jump regime
}

TEST_CASE("error budget terms, constant slowly varying factor") {
  const auto m = TailModel::zeta(1.5);
  const std::int64_t n = 100, x = 1000;
  const auto e = epsilon_sequences(m, n, x);
  const auto t = error_budget(m, n, x);
  CHECK(t.at("t1_err") == 0.0);
  CHECK(t.at("t2_eps") == e.eps_n);
  const double c = 1.0 / (1.5 * oracle::kZeta25);
  CHECK(t.at("t3_nlx") ==
        doctest::Approx(100.0 * c * std::pow(1000.0, -2.5)).epsilon(1e-12));
  CHECK(t.at("t4_exp") ==
        doctest::Approx(std::exp(-1.0 / e.eps_tilde_n)).epsilon(1e-12));
  const double t5 = 100.0 * c * std::pow(1000.0, -1.5) *
                    std::pow(e.eps_n, -1.5) * std::pow(e.eps_tilde_n, -2.5);
  CHECK(t.at("t5_balance") == doctest::Approx(t5).epsilon(1e-12));
}

TEST_CASE("error bound report, heavy case") {
  const auto m = TailModel::zeta(1.5);
  const std::int64_t n = 100, x = 1000;
  const auto rep = error_bound_A(m, n, x, 0.05);
  CHECK(rep.alpha_case == AlphaCase::LT2);
  CHECK(rep.alpha1 == doctest::Approx(0.6).epsilon(1e-15));
  const double a = scale_an(m, n);
  CHECK(rep.leading_term ==
        doctest::Approx(std::pow(a / 1000.0, 0.55)).epsilon(1e-13));
  CHECK(rep.err_term == 0.0);
  CHECK(rep.err_term_literal == 0.0);
  CHECK(rep.total == rep.leading_term);
  CHECK(rep.budget_terms.size() == 5);
  CHECK_THROWS(error_bound_A(m, n, x, 0.7));   // eps must stay below alpha1
  CHECK_THROWS(error_bound_A(m, n, 20, 0.05)); // outside the regime
}

TEST_CASE("error bound report, light and boundary cases") {
  const auto h = TailModel::zeta(3.0);
  const std::int64_t n = 100, x = 2000;
  const auto rep = error_bound_A(h, n, x, 0.05);
  CHECK(rep.alpha_case == AlphaCase::GT2);
  const double beta = choose_beta(3.0, n, x);
  CHECK(rep.beta == beta);
  const double snl = std::sqrt(100.0 * std::log(100.0));
  const double lead = std::pow(100.0, 1.0 - 1.5 + beta * 0.75) *
                      std::pow(snl / 2000.0, 0.75 - 0.05);
  CHECK(rep.leading_term == doctest::Approx(lead).epsilon(1e-12));

  const auto b = TailModel::zeta(2.0);
  std::int64_t xb = 1000;
  while (regime_check(b, 50, xb).regime != Regime::BigJump && xb < 100000000)
    xb *= 2;
  REQUIRE(regime_check(b, 50, xb).regime == Regime::BigJump);
  const auto rb = error_bound_A(b, 50, xb, 0.05);
  CHECK(rb.alpha_case == AlphaCase::EQ2);
  const double r =
      scale_an(b, 50) * std::sqrt(std::log(50.0)) / static_cast<double>(xb);
  CHECK(rb.leading_term ==
        doctest::Approx(std::pow(r, 2.0 / 3.0 - 0.05)).epsilon(1e-12));
}

TEST_CASE("fuk-nagaev bound at y = x") {
  const auto m = TailModel::zeta(1.5);
  const std::int64_t n = 100, x = 1000;
  const double got = fuk_nagaev_log_bound(m, n, x, x);
  const double a = scale_an(m, n);
  const double c = 1.0 / (1.5 * oracle::kZeta25);
  // default constants: (1/a_n) sqrt(n L(x) x^-alpha)
  const double want =
      -std::log(a) + 0.5 * (std::log(100.0 * c) - 1.5 * std::log(1000.0));
  CHECK(got == doctest::Approx(want).epsilon(1e-12));
  CHECK_THROWS(fuk_nagaev_log_bound(m, n, x, 0));
  CHECK_THROWS(fuk_nagaev_log_bound(m, n, x, x + 1));
  CHECK_THROWS(fuk_nagaev_log_bound(m, n, 2, 1));  // x below a_n
}

TEST_CASE("fitted constants dominate the calibration grid") {
  const auto m = TailModel::zeta(1.5);
  std::vector<FNGridPoint> grid;
  for (std::int64_t n : {std::int64_t{8}, std::int64_t{16}}) {
    const std::int64_t x = 50 * n;
    grid.push_back({n, x, x / 4});
    grid.push_back({n, x, x / 2});
  }
  const FNConstants fc = fit_fn_constants(m, grid);
  CHECK(fc.c1 > 0.0);
  CHECK(fc.c3 > 0.0);
  for (const auto& g : grid) {
    const auto law = truncated_max_sum_pmf(m, g.n, g.y, g.x + 4 * g.y);
    const double exact = law.at(g.x);
    const double bound = fuk_nagaev_log_bound(m, g.n, g.x, g.y, fc);
    CHECK(bound >= exact + std::log(4.0) - 1e-9);
  }
  CHECK_THROWS(fit_fn_constants(TailModel::zeta(3.0), grid));
}
