#include "slowly_varying.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace bigjump {

namespace {
constexpr double kLogFloor = 2.0;  // LogPower is evaluated at max(x, 2)
}

SlowlyVaryingFn SlowlyVaryingFn::constant(double c) {
  if (!(c > 0.0)) throw std::invalid_argument("SlowlyVaryingFn: constant c must be > 0");
  SlowlyVaryingFn L;
  L.variant = Variant::Constant;
  L.c = c;
  return L;
}

SlowlyVaryingFn SlowlyVaryingFn::log_power(double beta) {
  if (!(beta > -1.0)) throw std::invalid_argument("SlowlyVaryingFn: log_power needs beta > -1");
  SlowlyVaryingFn L;
  L.variant = Variant::LogPower;
  L.beta = beta;
  return L;
}

SlowlyVaryingFn SlowlyVaryingFn::one_plus_power(double gamma, double kappa) {
  if (!(gamma > 0.0)) throw std::invalid_argument("SlowlyVaryingFn: one_plus_power needs gamma > 0");
  if (!(1.0 + kappa > 0.0))
    throw std::invalid_argument("SlowlyVaryingFn: one_plus_power needs 1 + kappa > 0");
  SlowlyVaryingFn L;
  L.variant = Variant::OnePlusPower;
  L.gamma = gamma;
  L.kappa = kappa;
  return L;
}

double SlowlyVaryingFn::eval(double x) const {
  switch (variant) {
    case Variant::Constant:
      return c;
    case Variant::LogPower:
      return std::pow(std::log(std::max(x, kLogFloor)), beta);
    case Variant::OnePlusPower:
      return 1.0 + kappa * std::pow(x, -gamma);
  }
  return c;
}

double SlowlyVaryingFn::log_eval(double x) const {
  switch (variant) {
    case Variant::Constant:
      return std::log(c);
    case Variant::LogPower:
      return beta * std::log(std::log(std::max(x, kLogFloor)));
    case Variant::OnePlusPower:
      return std::log1p(kappa * std::pow(x, -gamma));
  }
  return std::log(c);
}

double SlowlyVaryingFn::derivative(double x) const {
  switch (variant) {
    case Variant::Constant:
      return 0.0;
    case Variant::LogPower: {
      if (x <= kLogFloor) return 0.0;
      const double lx = std::log(x);
      return beta * std::pow(lx, beta - 1.0) / x;
    }
    case Variant::OnePlusPower:
      return -kappa * gamma * std::pow(x, -gamma - 1.0);
  }
  return 0.0;
}

double SlowlyVaryingFn::err(double x, double y) const {
  if (!(x > 0.0) || !(x + y > 0.0))
    throw std::invalid_argument("SlowlyVaryingFn::err: need x > 0 and x + y > 0");
  switch (variant) {
    case Variant::Constant:
      return 0.0;
    case Variant::LogPower: {
      const double a = std::log(std::max(x + y, kLogFloor));
      const double b = std::log(std::max(x, kLogFloor));
      return std::expm1(beta * (std::log(a) - std::log(b)));
    }
    case Variant::OnePlusPower: {
      const double la = std::log1p(kappa * std::pow(x + y, -gamma));
      const double lb = std::log1p(kappa * std::pow(x, -gamma));
      return std::expm1(la - lb);
    }
  }
  return 0.0;
}

double SlowlyVaryingFn::domain_floor(double s_min) const {
  switch (variant) {
    case Variant::Constant:
      return 1.0;
    case Variant::LogPower:
      // L(x) x^-s decreasing needs beta / log(x) < s.
      if (beta <= 0.0) return kLogFloor;
      return std::max(kLogFloor, std::exp(beta / std::max(s_min, 1e-9)) + 1.0);
    case Variant::OnePlusPower:
      return 1.0;
  }
  return 1.0;
}

std::string SlowlyVaryingFn::variant_name() const {
  switch (variant) {
    case Variant::Constant:
      return "constant";
    case Variant::LogPower:
      return "log_power";
    case Variant::OnePlusPower:
      return "one_plus_power";
  }
  return "constant";
}

double potter_constant(const SlowlyVaryingFn& L, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("potter_constant: delta must be > 0");
  const double lo = L.domain_floor(0.5);
  const double hi = 1e8;
  const int n = 50;
  std::vector<double> xs(n), ls(n);
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / (n - 1);
    xs[i] = lo * std::pow(hi / lo, t);
    ls[i] = L.eval(xs[i]);
  }
  double cd = 1.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double ratio = ls[i] / ls[j];
      const double r = xs[i] / xs[j];
      const double envelope = std::pow(std::max(r, 1.0 / r), delta);
      cd = std::max(cd, ratio / envelope);
    }
  }
  return cd;
}

double potter_ratio_bound(const SlowlyVaryingFn& L, double a, double b, double delta) {
  const double floor = L.domain_floor(0.5);
  if (!(a >= floor) || !(b >= floor))
    throw std::invalid_argument("potter_ratio_bound: arguments below fitted domain floor");
  const double cd = potter_constant(L, delta);
  const double r = a / b;
  return cd * std::pow(std::max(r, 1.0 / r), delta);
}

}  // namespace bigjump
