#include "tail_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "json.hpp"
#include "stats.hpp"

namespace bigjump {

namespace {

constexpr std::int64_t kDirectTerms = 4096;
// Beyond this half-width the truncated moments switch from the cell loop to
// the indicator form plus analytic range sums.
constexpr double kMomentCap = 2097152.0;

// log of int_a^inf L(x) x^-s dx, s > 1, a >= 2.
double log_power_integral(const SlowlyVaryingFn& L, double s, double a) {
  const double la = std::log(a);
  switch (L.variant) {
    case SlowlyVaryingFn::Variant::Constant:
      return std::log(L.c) + (1.0 - s) * la - std::log(s - 1.0);
    case SlowlyVaryingFn::Variant::OnePlusPower: {
      const double extra =
          L.kappa * std::pow(a, -L.gamma) * (s - 1.0) / (s - 1.0 + L.gamma);
      return (1.0 - s) * la - std::log(s - 1.0) + std::log1p(extra);
    }
    case SlowlyVaryingFn::Variant::LogPower: {
      // substitute t = (s-1) log x: (s-1)^-(beta+1) Gamma(beta+1, (s-1) log a)
      const double b1 = L.beta + 1.0;
      const double z = (s - 1.0) * la;
      return -b1 * std::log(s - 1.0) + std::lgamma(b1) + log_gamma_q(b1, z);
    }
  }
  throw std::logic_error("unreachable");
}

// int_A^B L(x) x^-s dx for finite 2 <= A < B, any real s.
double power_integral_range(const SlowlyVaryingFn& L, double s, double A,
                            double B) {
  auto plain = [&](double sx) {
    // int_A^B x^-sx dx
    if (std::abs(sx - 1.0) < 1e-12) return std::log(B / A);
    return (std::pow(A, 1.0 - sx) - std::pow(B, 1.0 - sx)) / (sx - 1.0);
  };
  switch (L.variant) {
    case SlowlyVaryingFn::Variant::Constant:
      return L.c * plain(s);
    case SlowlyVaryingFn::Variant::OnePlusPower:
      return plain(s) + L.kappa * plain(s + L.gamma);
    case SlowlyVaryingFn::Variant::LogPower: {
      const double b1 = L.beta + 1.0;
      const double lA = std::log(A), lB = std::log(B);
      if (std::abs(s - 1.0) < 1e-12)
        return (std::pow(lB, b1) - std::pow(lA, b1)) / b1;
      if (s > 1.0) {
        const double r = s - 1.0;
        return std::pow(r, -b1) * std::exp(std::lgamma(b1)) *
               (gamma_q(b1, r * lA) - gamma_q(b1, r * lB));
      }
      const double r = 1.0 - s;
      return std::pow(r, -b1) * std::exp(std::lgamma(b1)) *
             (gamma_p(b1, r * lB) - gamma_p(b1, r * lA));
    }
  }
  throw std::logic_error("unreachable");
}

// Euler-Maclaurin correction factor at abscissa a relative to the integral:
// sum_{k=a}^inf f(k) = I * (1 + corr), f = L(x) x^-s.
double em_corr_ratio(const SlowlyVaryingFn& L, double s, double a,
                     double log_integral) {
  const double log_f = L.log_eval(a) - s * std::log(a);
  const double r = std::exp(log_f - log_integral);
  const double dratio = L.derivative(a) / L.eval(a) - s / a;
  return r * (0.5 - dratio / 12.0 -
              s * (s + 1.0) * (s + 2.0) / (720.0 * a * a * a));
}

}  // namespace

TailSum power_tail_log(const SlowlyVaryingFn& L, double s, double x) {
  if (!(s > 1.0)) throw std::invalid_argument("power_tail_log: need s > 1");
  if (!(x < 1e15)) throw std::invalid_argument("power_tail_log: x too large");
  const std::int64_t start =
      std::max<std::int64_t>(static_cast<std::int64_t>(std::floor(x)) + 1, 1);
  const std::int64_t a = start + kDirectTerms;

  double log_direct;
  if (s * std::log(static_cast<double>(std::max<std::int64_t>(start, 2))) >
      600.0) {
    // terms underflow linearly; accumulate in log domain
    std::vector<double> logs;
    logs.reserve(kDirectTerms);
    for (std::int64_t k = start; k < a; ++k) {
      const double kd = static_cast<double>(k);
      logs.push_back(L.log_eval(kd) - s * std::log(kd));
    }
    log_direct = log_sum(logs);
  } else {
    double direct = 0.0;
    for (std::int64_t k = start; k < a; ++k) {
      const double kd = static_cast<double>(k);
      direct += L.eval(kd) * std::pow(kd, -s);
    }
    log_direct = direct > 0.0 ? std::log(direct) : kNegInf;
  }

  const double ad = static_cast<double>(a);
  const double log_I = log_power_integral(L, s, ad);
  const double log_tail = log_I + std::log1p(em_corr_ratio(L, s, ad, log_I));

  TailSum out;
  out.log_value = log_add(log_direct, log_tail);
  out.log_upper = out.log_value + std::log1p(1e-12);
  return out;
}

double power_series_log(const SlowlyVaryingFn& L, double s) {
  return power_tail_log(L, s, 0.0).log_value;
}

double power_range_sum(const SlowlyVaryingFn& L, double s, std::int64_t A,
                       std::int64_t B) {
  if (A < 0 || B <= A) throw std::invalid_argument("power_range_sum: bad range");
  auto f = [&](double xx) { return L.eval(xx) * std::pow(xx, -s); };
  if (B - A <= 4096 || A < 64) {
    double acc = 0.0;
    for (std::int64_t k = A + 1; k <= B; ++k) acc += f(static_cast<double>(k));
    return acc;
  }
  const double Ad = static_cast<double>(A), Bd = static_cast<double>(B);
  auto fp = [&](double xx) {
    return (L.derivative(xx) - s * L.eval(xx) / xx) * std::pow(xx, -s);
  };
  // sum_{k=A+1}^{B} f(k) = int_A^B f - f(A)/2 + f(B)/2 + (f'(B)-f'(A))/12 ...
  return power_integral_range(L, s, Ad, Bd) - 0.5 * f(Ad) + 0.5 * f(Bd) +
         (fp(Bd) - fp(Ad)) / 12.0;
}

double riemann_zeta(double s) {
  if (!(s > 1.0)) throw std::invalid_argument("riemann_zeta: need s > 1");
  return std::exp(power_series_log(SlowlyVaryingFn::constant(1.0), s));
}

TailModel TailModel::zeta(double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("zeta model: need alpha > 0");
  TailModel m;
  m.kind = ModelKind::Zeta;
  m.alpha = alpha;
  m.alpha_tilde = alpha;
  m.p = 0.5;
  m.q = 0.5;
  m.L = SlowlyVaryingFn::constant(1.0 / (alpha * riemann_zeta(1.0 + alpha)));
  m.log_p0 = kNegInf;
  return m;
}

TailModel TailModel::general(double alpha, double p, double q,
                             double alpha_tilde, const SlowlyVaryingFn& L) {
  if (!(alpha > 0.0)) throw std::invalid_argument("model: need alpha > 0");
  if (!(alpha_tilde >= alpha))
    throw std::invalid_argument("model: need alpha_tilde >= alpha");
  if (!(p >= 0.0) || !(q >= 0.0) || std::abs(p + q - 1.0) > 1e-12)
    throw std::invalid_argument("model: need p, q >= 0 with p + q = 1");
  TailModel m;
  m.kind = ModelKind::GeneralPowerLaw;
  m.alpha = alpha;
  m.alpha_tilde = alpha_tilde;
  m.p = p;
  m.q = q;
  m.L = L;
  double mass = 0.0;
  if (p > 0.0) mass += p * alpha * std::exp(power_series_log(L, 1.0 + alpha));
  if (q > 0.0)
    mass += q * alpha * std::exp(power_series_log(L, 1.0 + alpha_tilde));
  const double p0 = 1.0 - mass;
  if (p0 < -1e-9)
    throw std::invalid_argument("model: tail mass exceeds 1, no slack at zero");
  m.log_p0 = p0 > 0.0 ? std::log(p0) : kNegInf;
  return m;
}

TailModel TailModel::truncate(std::int64_t lo, std::int64_t hi) const {
  if (truncated) throw std::invalid_argument("truncate: already truncated");
  if (!(lo <= 0 && hi >= 1))
    throw std::invalid_argument("truncate: need lo <= 0 < hi");
  if (hi - lo > (std::int64_t{1} << 22))
    throw std::invalid_argument("truncate: support too wide");
  TailModel m = *this;
  m.truncated = true;
  m.trunc_lo = lo;
  m.trunc_hi = hi;
  const double z = 1.0 - std::exp(raw_log_survival(static_cast<double>(hi))) -
                   std::exp(raw_log_left_tail(static_cast<double>(-lo)));
  if (!(z > 0.0)) throw std::invalid_argument("truncate: no mass retained");
  m.log_trunc_z = std::log(z);
  m.sigma2_cap_cache = -1.0;
  m.sig2a_cap_cache = -1.0;
  return m;
}

bool TailModel::symmetric() const {
  return p == q && alpha == alpha_tilde &&
         (!truncated || trunc_lo == -trunc_hi);
}

double TailModel::raw_log_pmf(std::int64_t k) const {
  if (k == 0) return log_p0;
  if (k > 0) {
    if (p <= 0.0) return kNegInf;
    const double kd = static_cast<double>(k);
    return std::log(p * alpha) + L.log_eval(kd) - (1.0 + alpha) * std::log(kd);
  }
  if (q <= 0.0) return kNegInf;
  const double kd = static_cast<double>(-k);
  return std::log(q * alpha) + L.log_eval(kd) -
         (1.0 + alpha_tilde) * std::log(kd);
}

double TailModel::log_pmf(std::int64_t k) const {
  if (!truncated) return raw_log_pmf(k);
  if (k < trunc_lo || k > trunc_hi) return kNegInf;
  return raw_log_pmf(k) - log_trunc_z;
}

double TailModel::pmf(std::int64_t k) const { return std::exp(log_pmf(k)); }

double TailModel::raw_log_survival(double x) const {
  if (x >= 0.0) {
    if (p <= 0.0) return kNegInf;
    return std::log(p * alpha) +
           power_tail_log(L, 1.0 + alpha, x).log_value;
  }
  // P(X > x) = 1 - P(X <= floor(x)) for x < 0
  const double t = -std::floor(x);  // >= 1
  double below = 0.0;
  if (q > 0.0)
    below = q * alpha *
            std::exp(power_tail_log(L, 1.0 + alpha_tilde, t - 1.0).log_value);
  return std::log1p(-std::min(below, 1.0));
}

double TailModel::log_survival(double x) const {
  if (!truncated) return raw_log_survival(x);
  if (x >= static_cast<double>(trunc_hi)) return kNegInf;
  if (x < static_cast<double>(trunc_lo)) return 0.0;
  return log_sub(raw_log_survival(x),
                 raw_log_survival(static_cast<double>(trunc_hi))) -
         log_trunc_z;
}

double TailModel::raw_log_left_tail(double x) const {
  if (!(x >= 0.0)) throw std::invalid_argument("log_left_tail: need x >= 0");
  if (q <= 0.0) return kNegInf;
  return std::log(q * alpha) +
         power_tail_log(L, 1.0 + alpha_tilde, x).log_value;
}

double TailModel::log_left_tail(double x) const {
  if (!truncated) return raw_log_left_tail(x);
  if (!(x >= 0.0)) throw std::invalid_argument("log_left_tail: need x >= 0");
  if (-x <= static_cast<double>(trunc_lo)) return kNegInf;
  return log_sub(raw_log_left_tail(x),
                 raw_log_left_tail(static_cast<double>(-trunc_lo))) -
         log_trunc_z;
}

double TailModel::mean() const {
  if (truncated)
    return truncated_mean(
        static_cast<double>(std::max(-trunc_lo, trunc_hi)));
  if (!(alpha > 1.0) || !(alpha_tilde > 1.0))
    throw std::domain_error("mean: requires alpha, alpha_tilde > 1");
  double m = 0.0;
  if (p > 0.0) m += p * alpha * std::exp(power_series_log(L, alpha));
  if (q > 0.0) m -= q * alpha * std::exp(power_series_log(L, alpha_tilde));
  return m;
}

double TailModel::truncated_mean(double a) const {
  if (!(a >= 0.0)) throw std::invalid_argument("truncated_mean: need a >= 0");
  if (a > 5e7) throw std::domain_error("truncated_mean: cutoff too large");
  if (truncated) {
    const std::int64_t lo =
        std::max(trunc_lo, static_cast<std::int64_t>(std::ceil(-a)));
    const std::int64_t hi =
        std::min(trunc_hi, static_cast<std::int64_t>(std::floor(a)));
    double acc = 0.0;
    for (std::int64_t k = lo; k <= hi; ++k)
      if (k != 0) acc += static_cast<double>(k) * pmf(k);
    return acc;
  }
  const double pa = p * alpha, qa = q * alpha;
  const std::int64_t hi = static_cast<std::int64_t>(std::floor(a));
  double acc = 0.0;
  for (std::int64_t k = 1; k <= hi; ++k) {
    const double kd = static_cast<double>(k);
    acc += L.eval(kd) *
           (pa * std::pow(kd, -alpha) - qa * std::pow(kd, -alpha_tilde));
  }
  return acc;
}

double TailModel::sigma2(double a) const {
  if (!(a >= 0.0)) throw std::invalid_argument("sigma2: need a >= 0");
  const double mu = mean();  // enforces alpha, alpha_tilde > 1
  auto cell = [&](std::int64_t k, double w) {
    const double d = static_cast<double>(k) - mu;
    return w * d * d * pmf(k);
  };
  if (truncated || a <= kMomentCap) {
    // ramp weight keeps a -> sigma2(a) continuous for root finding
    std::int64_t lo = static_cast<std::int64_t>(std::ceil(mu - a - 1.0));
    std::int64_t hi = static_cast<std::int64_t>(std::floor(mu + a + 1.0));
    if (truncated) {
      lo = std::max(lo, trunc_lo);
      hi = std::min(hi, trunc_hi);
    }
    double acc = 0.0;
    for (std::int64_t k = lo; k <= hi; ++k) {
      const double w = std::clamp(a - std::abs(static_cast<double>(k) - mu) + 1.0,
                                  0.0, 1.0);
      if (w > 0.0) acc += cell(k, w);
    }
    return acc;
  }
  if (sigma2_cap_cache < 0.0) {
    const std::int64_t lo =
        static_cast<std::int64_t>(std::ceil(mu - kMomentCap));
    const std::int64_t hi =
        static_cast<std::int64_t>(std::floor(mu + kMomentCap));
    double acc = 0.0;
    for (std::int64_t k = lo; k <= hi; ++k) acc += cell(k, 1.0);
    sigma2_cap_cache = acc;
  }
  double ext = 0.0;
  {  // right tail cells, (k - mu)^2 expanded into power range sums
    const std::int64_t A = static_cast<std::int64_t>(std::floor(mu + kMomentCap));
    const std::int64_t B = static_cast<std::int64_t>(std::floor(mu + a));
    if (B > A && p > 0.0)
      ext += p * alpha *
             (power_range_sum(L, alpha - 1.0, A, B) -
              2.0 * mu * power_range_sum(L, alpha, A, B) +
              mu * mu * power_range_sum(L, alpha + 1.0, A, B));
  }
  {
    const std::int64_t A = static_cast<std::int64_t>(std::floor(kMomentCap - mu));
    const std::int64_t B = static_cast<std::int64_t>(std::floor(a - mu));
    if (B > A && q > 0.0)
      ext += q * alpha *
             (power_range_sum(L, alpha_tilde - 1.0, A, B) +
              2.0 * mu * power_range_sum(L, alpha_tilde, A, B) +
              mu * mu * power_range_sum(L, alpha_tilde + 1.0, A, B));
  }
  return sigma2_cap_cache + ext;
}

double TailModel::sigma_2alpha(double a) const {
  if (!(a >= 0.0)) throw std::invalid_argument("sigma_2alpha: need a >= 0");
  if (truncated) {
    const std::int64_t lo =
        std::max(trunc_lo, -static_cast<std::int64_t>(std::floor(a + 1.0)));
    const std::int64_t hi =
        std::min(trunc_hi, static_cast<std::int64_t>(std::floor(a + 1.0)));
    double acc = 0.0;
    for (std::int64_t k = lo; k <= hi; ++k) {
      if (k == 0) continue;
      const double kd = std::abs(static_cast<double>(k));
      const double w = std::clamp(a - kd + 1.0, 0.0, 1.0);
      if (w > 0.0) acc += w * std::pow(kd, alpha) * pmf(k);
    }
    return acc;
  }
  const double pa = p * alpha, qa = q * alpha;
  // |k|^alpha P(X = +/-k) = L(k) (pa k^-1 + qa k^(alpha - alpha_tilde - 1))
  auto cell = [&](double kd) {
    return L.eval(kd) *
           (pa / kd + qa * std::pow(kd, alpha - alpha_tilde - 1.0));
  };
  if (a <= kMomentCap) {
    const std::int64_t hi = static_cast<std::int64_t>(std::floor(a + 1.0));
    double acc = 0.0;
    for (std::int64_t k = 1; k <= hi; ++k) {
      const double kd = static_cast<double>(k);
      const double w = std::clamp(a - kd + 1.0, 0.0, 1.0);
      if (w > 0.0) acc += w * cell(kd);
    }
    return acc;
  }
  if (sig2a_cap_cache < 0.0) {
    double acc = 0.0;
    for (std::int64_t k = 1; k <= static_cast<std::int64_t>(kMomentCap); ++k)
      acc += cell(static_cast<double>(k));
    sig2a_cap_cache = acc;
  }
  const std::int64_t A = static_cast<std::int64_t>(kMomentCap);
  const std::int64_t B = static_cast<std::int64_t>(std::floor(a));
  double ext = 0.0;
  if (B > A) {
    if (p > 0.0) ext += pa * power_range_sum(L, 1.0, A, B);
    if (q > 0.0)
      ext += qa * power_range_sum(L, 1.0 + alpha_tilde - alpha, A, B);
  }
  return sig2a_cap_cache + ext;
}

std::string TailModel::to_json() const {
  nlohmann::json j;
  if (kind == ModelKind::Zeta) {
    j["kind"] = "zeta";
    j["alpha"] = alpha;
    if (truncated) j["truncate"] = {trunc_lo, trunc_hi};
    return j.dump();
  }
  j["kind"] = "general_power_law";
  if (truncated) j["truncate"] = {trunc_lo, trunc_hi};
  j["alpha"] = alpha;
  j["p"] = p;
  j["q"] = q;
  j["alpha_tilde"] = alpha_tilde;
  nlohmann::json jl;
  jl["variant"] = L.variant_name();
  switch (L.variant) {
    case SlowlyVaryingFn::Variant::Constant:
      jl["c"] = L.c;
      break;
    case SlowlyVaryingFn::Variant::LogPower:
      jl["beta"] = L.beta;
      break;
    case SlowlyVaryingFn::Variant::OnePlusPower:
      jl["gamma"] = L.gamma;
      jl["kappa"] = L.kappa;
      break;
  }
  j["L"] = jl;
  return j.dump();
}

TailModel TailModel::from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  const auto maybe_truncate = [&j](TailModel m) {
    if (!j.contains("truncate")) return m;
    const nlohmann::json& t = j.at("truncate");
    if (!t.is_array() || t.size() != 2)
      throw std::invalid_argument("model json: truncate must be [lo, hi]");
    return m.truncate(t[0].get<std::int64_t>(), t[1].get<std::int64_t>());
  };
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "zeta")
    return maybe_truncate(TailModel::zeta(j.at("alpha").get<double>()));
  if (kind != "general_power_law")
    throw std::invalid_argument("model json: unknown kind '" + kind + "'");
  const nlohmann::json& jl = j.at("L");
  const std::string variant = jl.at("variant").get<std::string>();
  SlowlyVaryingFn L;
  if (variant == "constant")
    L = SlowlyVaryingFn::constant(jl.at("c").get<double>());
  else if (variant == "log_power")
    L = SlowlyVaryingFn::log_power(jl.at("beta").get<double>());
  else if (variant == "one_plus_power")
    L = SlowlyVaryingFn::one_plus_power(jl.at("gamma").get<double>(),
                                        jl.at("kappa").get<double>());
  else
    throw std::invalid_argument("model json: unknown L variant '" + variant +
                                "'");
  return maybe_truncate(TailModel::general(
      j.at("alpha").get<double>(), j.at("p").get<double>(),
      j.at("q").get<double>(), j.at("alpha_tilde").get<double>(), L));
}

}  // namespace bigjump
