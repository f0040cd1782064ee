#pragma once
// Quantitative single-big-jump machinery: the local and tail approximations,
// the error-term formulas by alpha-case, the epsilon sequences and five-term
// error budget behind them, regime classification, and the local Fuk-Nagaev
// bound with empirically fitted constants.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tail_model.hpp"

namespace bigjump {

// log(n P(X_1 = x)), x != 0.
double bigjump_local_log(const TailModel& model, std::int64_t n,
                         std::int64_t x);
// log(n P(X_1 >= x)), x >= 1.
double bigjump_tail_log(const TailModel& model, std::int64_t n, std::int64_t x);

// (alpha-1)/(alpha+1) on (1,2], alpha/(2+2alpha) above 2.
double beta_exponent(double alpha);

// Largest beta >= 0 with n^-beta (x/sqrt(n log n))^(1-alpha1) >= n^0.01,
// capped at (alpha-2)(alpha+1)/(2(2alpha+1)); 0 when nothing qualifies.
double choose_beta(double alpha, std::int64_t n, std::int64_t x);

enum class AlphaCase { LT2, EQ2, GT2 };
enum class Regime { BigJump, Gaussian, Intermediate };

struct RegimeReport {
  Regime regime = Regime::Intermediate;
  double q_value = 0.0;  // q(a_n) = a_n^2 G(a_n) / sigma2(a_n) when defined
};
RegimeReport regime_check(const TailModel& model, std::int64_t n,
                          std::int64_t x);

struct EpsilonPair {
  double eps_n = 0.0;
  double eps_tilde_n = 0.0;  // in (0, 1/4]
};
EpsilonPair epsilon_sequences(const TailModel& model, std::int64_t n,
                              std::int64_t x);

// The five summands of the collected error expansion, keyed t1..t5.
std::map<std::string, double> error_budget(const TailModel& model,
                                           std::int64_t n, std::int64_t x);

struct ErrorBoundReport {
  AlphaCase alpha_case = AlphaCase::LT2;
  double alpha1 = 0.0;  // alpha/(alpha+1)
  double beta = 0.0;    // GT2 only
  double epsilon = 0.0;
  double leading_term = 0.0;
  double err_term = 0.0;          // |err[x, eps_n x]| (displacement form)
  double err_term_literal = 0.0;  // |err[x, (a_n/x)^alpha1]| analogue
  double total = 0.0;             // leading_term + err_term
  std::map<std::string, double> budget_terms;
};
ErrorBoundReport error_bound_A(const TailModel& model, std::int64_t n,
                               std::int64_t x, double eps = 0.05);

struct FNConstants {
  double c1 = 1.0;
  double c2 = 1.0;
  double c3 = 1.0;
};

// log of the case formula's right-hand side; pre: 1 <= y <= x, x >= a_n.
double fuk_nagaev_log_bound(const TailModel& model, std::int64_t n,
                            std::int64_t x, std::int64_t y,
                            const FNConstants& c = FNConstants{});

struct FNGridPoint {
  std::int64_t n = 0;
  std::int64_t x = 0;
  std::int64_t y = 0;
};

// Fit (c1, c3) for the alpha in (1,2) case so the bound dominates the exact
// truncated probabilities on the calibration grid with a x4 safety margin.
FNConstants fit_fn_constants(const TailModel& model,
                             const std::vector<FNGridPoint>& calibration);

const char* regime_name(Regime r);
const char* alpha_case_name(AlphaCase c);

}  // namespace bigjump
