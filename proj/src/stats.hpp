#pragma once
// Small numerics toolbox shared across the library: log-domain helpers,
// scaled accumulators, regularized incomplete gamma, least squares, hashing.

#include <cstddef>
#include <cstdint>
#include <cmath>
#include <limits>
#include <string_view>
#include <utility>
#include <vector>

namespace bigjump {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

// log(exp(a) - exp(b)) for a >= b; returns -inf when the difference underflows.
inline double log_sub(double a, double b) {
  if (b == kNegInf) return a;
  if (b >= a) return kNegInf;
  return a + std::log1p(-std::exp(b - a));
}

double log_sum(const double* x, std::size_t n);

inline double log_sum(const std::vector<double>& x) { return log_sum(x.data(), x.size()); }

// Accumulates sum_i exp(scale_i) * v_i (v_i >= 0) while tracking a single
// floating scale frame, so contributions spanning thousands of orders of
// magnitude combine without overflow or premature underflow.
struct ScaledAcc {
  double scale = kNegInf;
  double sum = 0.0;

  void add(double s, double v) {
    if (v <= 0.0 || s == kNegInf) return;
    if (scale == kNegInf) {
      scale = s;
      sum = v;
    } else if (s <= scale) {
      sum += v * std::exp(s - scale);
    } else {
      sum = sum * std::exp(scale - s) + v;
      scale = s;
    }
  }
  void add_log(double lv) { add(lv, 1.0); }
  double log_value() const {
    if (scale == kNegInf || sum <= 0.0) return kNegInf;
    return scale + std::log(sum);
  }
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Regularized incomplete gamma functions (series / continued fraction).
double gamma_p(double a, double x);
double gamma_q(double a, double x);
double log_gamma_q(double a, double x);

// Survival function of the chi-square distribution with `dof` degrees.
double chi2_sf(double stat, double dof);

double log_binom(std::int64_t n, std::int64_t k);

std::uint64_t fnv1a64(std::string_view s);

}  // namespace bigjump
