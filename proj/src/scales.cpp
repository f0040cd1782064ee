#include "scales.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace bigjump {

namespace {

// bisection on u = log a so the stopping rule is relative in a
double bisect_log(const std::function<double(double)>& g, double u_lo,
                  double u_hi) {
  if (!(g(u_lo) > 0.0) || !(g(u_hi) < 0.0))
    throw std::domain_error(
        "scale_an: defining function does not bracket a root (n too small)");
  while (u_hi - u_lo > 1e-9) {
    const double mid = 0.5 * (u_lo + u_hi);
    if (g(mid) > 0.0)
      u_lo = mid;
    else
      u_hi = mid;
  }
  return std::exp(0.5 * (u_lo + u_hi));
}

}  // namespace

double scale_an(const TailModel& model, std::int64_t n) {
  if (n < 2) throw std::invalid_argument("scale_an: need n >= 2");
  const double nd = static_cast<double>(n);
  const double alpha = model.alpha;
  const double u_hi =
      (2.0 / std::min(alpha, 2.0) + 1.0) * std::log(nd);  // a_hi = n^(...)
  if (alpha < 2.0) {
    auto g = [&](double u) {
      const double a = std::exp(u);
      return std::log(nd) + model.L.log_eval(a) - alpha * u;  // log(n L a^-a)
    };
    return bisect_log(g, 0.0, u_hi);
  }
  auto g = [&](double u) {
    const double a = std::exp(u);
    return std::log(nd * model.sigma2(a)) - 2.0 * u;
  };
  return bisect_log(g, 0.0, u_hi);
}

double scale_bn(const TailModel& model, std::int64_t n) {
  if (n < 2) throw std::invalid_argument("scale_bn: need n >= 2");
  const double alpha = model.alpha;
  if (alpha < 1.0) return 0.0;
  if (alpha == 1.0)
    return static_cast<double>(n) * model.truncated_mean(scale_an(model, n));
  return static_cast<double>(n) * model.mean();
}

}  // namespace bigjump
