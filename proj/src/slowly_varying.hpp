#pragma once
// Slowly varying factors L(x) for the tail laws, with the precision measure
// err[x,y] = L(x+y)/L(x) - 1 and empirical Potter-style ratio bounds.

#include <string>

namespace bigjump {

struct SlowlyVaryingFn {
  enum class Variant { Constant, LogPower, OnePlusPower };

  Variant variant = Variant::Constant;
  double c = 1.0;      // Constant: L(x) = c
  double beta = 0.0;   // LogPower: L(x) = log(x)^beta      (x floored at 2)
  double gamma = 0.0;  // OnePlusPower: L(x) = 1 + kappa * x^(-gamma)
  double kappa = 0.0;

  static SlowlyVaryingFn constant(double c);
  static SlowlyVaryingFn log_power(double beta);
  static SlowlyVaryingFn one_plus_power(double gamma, double kappa);

  double eval(double x) const;
  double log_eval(double x) const;
  double derivative(double x) const;  // dL/dx, used by analytic tail sums

  // err[x, y] = L(x+y)/L(x) - 1; requires x > 0 and x + y > 0.
  double err(double x, double y) const;

  // Smallest abscissa from which x -> L(x) * x^(-s) is decreasing for every
  // s >= s_min > 0; also the lower edge of the Potter fitting grid.
  double domain_floor(double s_min) const;

  std::string variant_name() const;
};

// c_delta = sup over a 50-point log grid of L(a)/L(b) / max{(a/b)^d,(b/a)^d}.
double potter_constant(const SlowlyVaryingFn& L, double delta);

// Upper bound c_delta * max{(a/b)^delta, (b/a)^delta} >= L(a)/L(b) for grid
// pairs; requires a, b >= domain_floor.
double potter_ratio_bound(const SlowlyVaryingFn& L, double a, double b, double delta);

}  // namespace bigjump
