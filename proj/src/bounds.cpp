#include "bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "convolution.hpp"
#include "scales.hpp"
#include "stats.hpp"

namespace bigjump {

double bigjump_local_log(const TailModel& model, std::int64_t n,
                         std::int64_t x) {
  if (x == 0) throw std::invalid_argument("bigjump_local: need x != 0");
  if (n < 1) throw std::invalid_argument("bigjump_local: need n >= 1");
  return std::log(static_cast<double>(n)) + model.log_pmf(x);
}

double bigjump_tail_log(const TailModel& model, std::int64_t n,
                        std::int64_t x) {
  if (x < 1) throw std::invalid_argument("bigjump_tail: need x >= 1");
  if (n < 1) throw std::invalid_argument("bigjump_tail: need n >= 1");
  return std::log(static_cast<double>(n)) +
         model.log_survival(static_cast<double>(x - 1));
}

double beta_exponent(double alpha) {
  if (!(alpha > 1.0))
    throw std::invalid_argument("beta_exponent: need alpha > 1");
  if (alpha <= 2.0) return (alpha - 1.0) / (alpha + 1.0);
  return alpha / (2.0 + 2.0 * alpha);
}

double choose_beta(double alpha, std::int64_t n, std::int64_t x) {
  if (!(alpha > 2.0)) throw std::invalid_argument("choose_beta: need alpha > 2");
  const double alpha1 = alpha / (alpha + 1.0);
  const double nd = static_cast<double>(n);
  const double R = static_cast<double>(x) / std::sqrt(nd * std::log(nd));
  const double cap =
      (alpha - 2.0) * (alpha + 1.0) / (2.0 * (2.0 * alpha + 1.0));
  const double raw = (1.0 - alpha1) * std::log(R) / std::log(nd) - 0.01;
  return std::clamp(raw, 0.0, cap);
}

RegimeReport regime_check(const TailModel& model, std::int64_t n,
                          std::int64_t x) {
  if (n < 2) throw std::invalid_argument("regime_check: need n >= 2");
  const double alpha = model.alpha;
  const double an = scale_an(model, n);
  const double xd = static_cast<double>(x);
  const double nd = static_cast<double>(n);
  RegimeReport rep;
  if (alpha > 1.0) {
    // q(a_n) = a_n^2 G(a_n) / sigma2(a_n), reported for context
    rep.q_value = an * an * std::exp(model.log_survival(an)) / model.sigma2(an);
  } else {
    rep.q_value = std::numeric_limits<double>::quiet_NaN();
  }
  if (alpha < 2.0) {
    rep.regime = xd >= 4.0 * an ? Regime::BigJump : Regime::Intermediate;
    return rep;
  }
  const double snl = std::sqrt(nd * std::log(nd));
  if (alpha > 2.0) {
    const double b = std::max(1.05 * std::sqrt(alpha - 2.0), 0.1);
    if (xd > b * snl)
      rep.regime = Regime::BigJump;
    else if (xd < 0.95 * std::sqrt(alpha - 2.0) * snl)
      rep.regime = Regime::Gaussian;
    else
      rep.regime = Regime::Intermediate;
    return rep;
  }
  // alpha == 2: liminf criterion with q(a_n)
  const double crit =
      (xd / an) * (xd / an) / (2.0 * std::log(1.0 / rep.q_value));
  rep.regime = crit > 1.0 ? Regime::BigJump : Regime::Gaussian;
  return rep;
}

EpsilonPair epsilon_sequences(const TailModel& model, std::int64_t n,
                              std::int64_t x) {
  if (regime_check(model, n, x).regime != Regime::BigJump)
    throw std::domain_error("epsilon_sequences: x outside the big-jump regime");
  const double alpha = model.alpha;
  const double alpha1 = alpha / (alpha + 1.0);
  const double an = scale_an(model, n);
  const double xd = static_cast<double>(x);
  const double nd = static_cast<double>(n);
  const double sqlog = std::sqrt(std::log(nd));
  EpsilonPair out;
  if (alpha < 2.0) {
    out.eps_n = std::pow(xd / an, -alpha1);
  } else if (alpha == 2.0) {
    out.eps_n = std::pow(xd / (an * sqlog), -2.0 / 3.0);
  } else {
    const double snl = std::sqrt(nd * std::log(nd));
    const double beta = choose_beta(alpha, n, x);
    out.eps_n = std::pow(nd, -beta) * std::pow(xd / snl, -alpha1);
  }
  const double lg = std::log(xd / (an * sqlog));
  out.eps_tilde_n = lg == 0.0 ? 0.25 : std::min(0.25, 1.0 / (lg * lg));
  return out;
}

std::map<std::string, double> error_budget(const TailModel& model,
                                           std::int64_t n, std::int64_t x) {
  const EpsilonPair e = epsilon_sequences(model, n, x);
  const double alpha = model.alpha;
  const double xd = static_cast<double>(x);
  const double nd = static_cast<double>(n);
  std::map<std::string, double> t;
  t["t1_err"] = std::abs(model.L.err(xd, e.eps_n * xd));
  t["t2_eps"] = e.eps_n;
  t["t3_nlx"] =
      nd * std::exp(model.L.log_eval(xd) - (1.0 + alpha) * std::log(xd));
  t["t4_exp"] = std::exp(-1.0 / e.eps_tilde_n);
  // n L(eps x) L(etilde x) / L(x) x^-alpha eps^-alpha etilde^-(1+alpha)
  const double log_t5 =
      std::log(nd) + model.L.log_eval(e.eps_n * xd) +
      model.L.log_eval(e.eps_tilde_n * xd) - model.L.log_eval(xd) -
      alpha * std::log(xd) - alpha * std::log(e.eps_n) -
      (1.0 + alpha) * std::log(e.eps_tilde_n);
  t["t5_balance"] = std::exp(log_t5);
  return t;
}

ErrorBoundReport error_bound_A(const TailModel& model, std::int64_t n,
                               std::int64_t x, double eps) {
  const double alpha = model.alpha;
  const double alpha1 = alpha / (alpha + 1.0);
  if (!(eps > 0.0) || !(eps < alpha1))
    throw std::invalid_argument("error_bound_A: need eps in (0, alpha1)");
  const RegimeReport reg = regime_check(model, n, x);
  if (reg.regime != Regime::BigJump)
    throw std::domain_error("error_bound_A: x outside the big-jump regime");
  const double an = scale_an(model, n);
  const double xd = static_cast<double>(x);
  const double nd = static_cast<double>(n);

  ErrorBoundReport rep;
  rep.alpha1 = alpha1;
  rep.epsilon = eps;
  const EpsilonPair es = epsilon_sequences(model, n, x);
  if (alpha < 2.0) {
    rep.alpha_case = AlphaCase::LT2;
    rep.leading_term = std::pow(an / xd, alpha1 - eps);
    rep.err_term_literal = std::abs(model.L.err(xd, std::pow(an / xd, alpha1)));
  } else if (alpha == 2.0) {
    rep.alpha_case = AlphaCase::EQ2;
    const double r = an * std::sqrt(std::log(nd)) / xd;
    rep.leading_term = std::pow(r, 2.0 / 3.0 - eps);
    rep.err_term_literal = std::abs(model.L.err(xd, std::pow(r, 2.0 / 3.0)));
  } else {
    rep.alpha_case = AlphaCase::GT2;
    rep.beta = choose_beta(alpha, n, x);
    const double snl = std::sqrt(nd * std::log(nd));
    rep.leading_term = std::pow(nd, 1.0 - alpha / 2.0 + rep.beta * alpha1) *
                       std::pow(snl / xd, alpha1 - eps);
    rep.err_term_literal = std::abs(
        model.L.err(xd, std::pow(nd, -rep.beta) * std::pow(snl / xd, alpha1)));
  }
  rep.err_term = std::abs(model.L.err(xd, es.eps_n * xd));
  rep.total = rep.leading_term + rep.err_term;
  rep.budget_terms = error_budget(model, n, x);
  return rep;
}

double fuk_nagaev_log_bound(const TailModel& model, std::int64_t n,
                            std::int64_t x, std::int64_t y,
                            const FNConstants& c) {
  if (y < 1 || y > x)
    throw std::invalid_argument("fuk_nagaev: need 1 <= y <= x");
  const double an = scale_an(model, n);
  const double xd = static_cast<double>(x), yd = static_cast<double>(y);
  const double nd = static_cast<double>(n);
  if (xd < an) throw std::domain_error("fuk_nagaev: need x >= a_n");
  const double alpha = model.alpha;
  const double pre = std::log(c.c3) - std::log(an);
  if (alpha > 2.0) {
    const double t1 = -c.c1 * xd * xd / nd;
    const double base =
        xd * std::pow(yd, alpha - 1.0) / (nd * model.sigma_2alpha(yd));
    const double t2 = -(c.c2 * xd / yd) * std::log(base);
    return pre + log_add(t1, t2);
  }
  if (alpha == 2.0) {
    const double t =
        xd / yd - (xd / yd) * std::log1p(xd * yd / (nd * model.sigma2(yd)));
    return pre + t;
  }
  if (alpha > 1.0) {
    const double base = std::log(c.c1) + std::log(yd / xd) + std::log(nd) +
                        model.L.log_eval(yd) - alpha * std::log(yd);
    return pre + (xd / (2.0 * yd)) * base;
  }
  if (alpha == 1.0) {
    const double t1 = 3.0 * xd / yd -
                      (xd / (4.0 * yd)) *
                          std::log1p(c.c1 * xd / (nd * model.L.eval(yd)));
    const double t2 = -c.c2 * (xd / an) * (xd / an);
    return pre + log_add(t1, t2);
  }
  const double t =
      xd / (4.0 * yd) -
      (xd / yd) * std::log1p(c.c1 * xd /
                             (nd * std::pow(yd, 1.0 - alpha) * model.L.eval(yd)));
  return pre + t;
}

FNConstants fit_fn_constants(const TailModel& model,
                             const std::vector<FNGridPoint>& calibration) {
  if (!(model.alpha > 1.0) || !(model.alpha < 2.0))
    throw std::invalid_argument(
        "fit_fn_constants: implemented for alpha in (1,2)");
  if (calibration.size() < 2)
    throw std::invalid_argument("fit_fn_constants: need >= 2 grid points");
  const double alpha = model.alpha;
  std::vector<double> ts, rs;
  for (const FNGridPoint& g : calibration) {
    const double an = scale_an(model, g.n);
    const std::int64_t window = g.x + 4 * g.y;
    const LatticePMF law = truncated_max_sum_pmf(model, g.n, g.y, window);
    const double exact_log = law.at(g.x);
    if (exact_log == kNegInf)
      throw std::domain_error("fit_fn_constants: zero exact probability");
    const double xd = static_cast<double>(g.x), yd = static_cast<double>(g.y);
    const double t = xd / (2.0 * yd);
    const double base = std::log(yd / xd) + std::log(static_cast<double>(g.n)) +
                        model.L.log_eval(yd) - alpha * std::log(yd);
    ts.push_back(t);
    rs.push_back(exact_log + std::log(an) - t * base);
  }
  const LineFit fit = fit_line(ts, rs);
  double excess = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ts.size(); ++i)
    excess = std::max(excess, rs[i] - (fit.slope * ts[i] + fit.intercept));
  FNConstants out;
  out.c1 = std::exp(fit.slope);
  out.c2 = 1.0;
  out.c3 = std::exp(fit.intercept + excess + std::log(4.0));
  return out;
}

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::BigJump: return "big_jump";
    case Regime::Gaussian: return "gaussian";
    case Regime::Intermediate: return "intermediate";
  }
  return "unknown";
}

const char* alpha_case_name(AlphaCase c) {
  switch (c) {
    case AlphaCase::LT2: return "lt2";
    case AlphaCase::EQ2: return "eq2";
    case AlphaCase::GT2: return "gt2";
  }
  return "unknown";
}

}  // namespace bigjump
