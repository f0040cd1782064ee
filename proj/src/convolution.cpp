#include "convolution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "scales.hpp"

namespace bigjump {

namespace {

constexpr std::size_t kBlock = 512;
constexpr std::int64_t kMaxResultCells = std::int64_t{1} << 24;

struct Blocked {
  const LatticePMF* src = nullptr;
  std::size_t nblocks = 0;
  std::vector<double> scale;  // per-block max log, kNegInf for empty blocks
  std::vector<double> vals;   // exp(log - block scale), 0 at empty cells
  std::vector<double> bsum;   // per-block sum of vals
};

Blocked make_blocked(const LatticePMF& f) {
  Blocked b;
  b.src = &f;
  const std::size_t n = f.log_mass.size();
  b.nblocks = (n + kBlock - 1) / kBlock;
  b.scale.assign(b.nblocks, kNegInf);
  b.vals.assign(n, 0.0);
  b.bsum.assign(b.nblocks, 0.0);
  for (std::size_t blk = 0; blk < b.nblocks; ++blk) {
    const std::size_t lo = blk * kBlock, hi = std::min(n, lo + kBlock);
    double m = kNegInf;
    for (std::size_t i = lo; i < hi; ++i) m = std::max(m, f.log_mass[i]);
    if (m == kNegInf) continue;
    b.scale[blk] = m;
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      const double lv = f.log_mass[i];
      if (lv != kNegInf) {
        const double v = std::exp(lv - m);
        b.vals[i] = v;
        s += v;
      }
    }
    b.bsum[blk] = s;
  }
  return b;
}

struct ConvAccum {
  std::int64_t res_lo = 0, res_hi = 0;
  std::vector<ScaledAcc> acc;
  ScaledAcc drop_left, drop_right;
};

void add_pair(ConvAccum& C, const Blocked& A, std::size_t ia, const Blocked& B,
              std::size_t ib, double factor) {
  const double s = A.scale[ia] + B.scale[ib];
  if (s == kNegInf) return;
  const std::size_t a0 = ia * kBlock;
  const std::size_t la = std::min(A.vals.size(), a0 + kBlock) - a0;
  const std::size_t b0 = ib * kBlock;
  const std::size_t lb = std::min(B.vals.size(), b0 + kBlock) - b0;
  const std::int64_t r0 = A.src->offset + static_cast<std::int64_t>(a0) +
                          B.src->offset + static_cast<std::int64_t>(b0);
  const std::int64_t r1 = r0 + static_cast<std::int64_t>(la + lb - 2);
  if (r1 < C.res_lo) {
    C.drop_left.add(s, factor * A.bsum[ia] * B.bsum[ib]);
    return;
  }
  if (r0 > C.res_hi) {
    C.drop_right.add(s, factor * A.bsum[ia] * B.bsum[ib]);
    return;
  }

  double temp[2 * kBlock];
  const std::size_t tlen = la + lb - 1;
  std::fill(temp, temp + tlen, 0.0);
  const double* bv = B.vals.data() + b0;
  for (std::size_t i = 0; i < la; ++i) {
    const double v = A.vals[a0 + i];
    if (v == 0.0) continue;
    double* t = temp + i;
    for (std::size_t j = 0; j < lb; ++j) t[j] += v * bv[j];
  }

  if (r0 >= C.res_lo && r1 <= C.res_hi) {
    ScaledAcc* out = C.acc.data() + (r0 - C.res_lo);
    for (std::size_t t = 0; t < tlen; ++t)
      if (temp[t] != 0.0) out[t].add(s, factor * temp[t]);
    return;
  }
  for (std::size_t t = 0; t < tlen; ++t) {
    if (temp[t] == 0.0) continue;
    const std::int64_t k = r0 + static_cast<std::int64_t>(t);
    if (k < C.res_lo)
      C.drop_left.add(s, factor * temp[t]);
    else if (k > C.res_hi)
      C.drop_right.add(s, factor * temp[t]);
    else
      C.acc[static_cast<std::size_t>(k - C.res_lo)].add(s, factor * temp[t]);
  }
}

ConvAccum prepare_accum(const LatticePMF& a, const LatticePMF& b,
                        const std::optional<Window>& target) {
  if (a.log_mass.empty() || b.log_mass.empty())
    throw std::invalid_argument("convolve: empty operand window");
  ConvAccum C;
  if (target) {
    if (target->hi < target->lo)
      throw std::invalid_argument("convolve: bad target window");
    C.res_lo = target->lo;
    C.res_hi = target->hi;
  } else {
    C.res_lo = a.lo() + b.lo();
    C.res_hi = a.hi() + b.hi();
  }
  const std::int64_t cells = C.res_hi - C.res_lo + 1;
  if (cells > kMaxResultCells)
    throw std::invalid_argument("convolve: result window too large");
  C.acc.resize(static_cast<std::size_t>(cells));
  return C;
}

LatticePMF finish(const LatticePMF& a, const LatticePMF& b, ConvAccum& C,
                  double clip_budget) {
  LatticePMF r;
  r.offset = C.res_lo;
  r.log_mass.resize(C.acc.size());
  for (std::size_t i = 0; i < C.acc.size(); ++i)
    r.log_mass[i] = C.acc[i].log_value();
  const double log_win_a = a.window_log_sum();
  const double log_tot_b = log_add(b.window_log_sum(), b.out_mass_log());
  const double dl = C.drop_left.log_value();
  const double dr = C.drop_right.log_value();
  r.out_left_log = log_sum(std::vector<double>{
      dl, a.out_left_log + log_tot_b, log_win_a + b.out_left_log});
  r.out_right_log = log_sum(std::vector<double>{
      dr, a.out_right_log + log_tot_b, log_win_a + b.out_right_log});
  r.window_overflow = a.window_overflow || b.window_overflow ||
                      std::exp(log_add(dl, dr)) > clip_budget;
  return r;
}

LatticePMF clip_to(const LatticePMF& f, const Window& t, double clip_budget) {
  LatticePMF r;
  r.offset = t.lo;
  r.log_mass.assign(static_cast<std::size_t>(t.hi - t.lo + 1), kNegInf);
  ScaledAcc dl, dr;
  for (std::int64_t k = f.lo(); k <= f.hi(); ++k) {
    const double v = f.at(k);
    if (v == kNegInf) continue;
    if (k < t.lo)
      dl.add_log(v);
    else if (k > t.hi)
      dr.add_log(v);
    else
      r.log_mass[static_cast<std::size_t>(k - t.lo)] = v;
  }
  r.out_left_log = log_add(f.out_left_log, dl.log_value());
  r.out_right_log = log_add(f.out_right_log, dr.log_value());
  r.window_overflow =
      f.window_overflow ||
      std::exp(log_add(dl.log_value(), dr.log_value())) > clip_budget;
  r.model = f.model;
  return r;
}

}  // namespace

LatticePMF convolve(const LatticePMF& a, const LatticePMF& b,
                    const std::optional<Window>& target, double clip_budget) {
  ConvAccum C = prepare_accum(a, b, target);
  const Blocked A = make_blocked(a);
  const Blocked B = make_blocked(b);
  for (std::size_t ia = 0; ia < A.nblocks; ++ia)
    for (std::size_t ib = 0; ib < B.nblocks; ++ib) add_pair(C, A, ia, B, ib, 1.0);
  return finish(a, b, C, clip_budget);
}

LatticePMF convolve_square(const LatticePMF& a,
                           const std::optional<Window>& target,
                           double clip_budget) {
  ConvAccum C = prepare_accum(a, a, target);
  const Blocked A = make_blocked(a);
  for (std::size_t ia = 0; ia < A.nblocks; ++ia) {
    add_pair(C, A, ia, A, ia, 1.0);
    for (std::size_t ib = ia + 1; ib < A.nblocks; ++ib)
      add_pair(C, A, ia, A, ib, 2.0);
  }
  return finish(a, a, C, clip_budget);
}

LatticePMF conv_power(const LatticePMF& p, std::int64_t n,
                      const std::optional<Window>& target, double clip_budget) {
  if (n < 1) throw std::invalid_argument("conv_power: need n >= 1");
  LatticePMF acc;
  bool have = false;
  LatticePMF base = p;
  std::int64_t m = n;
  while (true) {
    if (m & 1) {
      acc = have ? convolve(acc, base, target, clip_budget) : base;
      have = true;
    }
    m >>= 1;
    if (!m) break;
    base = convolve_square(base, target, clip_budget);
  }
  if (target && (acc.lo() != target->lo || acc.hi() != target->hi))
    acc = clip_to(acc, *target, clip_budget);
  return acc;
}

LatticePMF direct_convolve_oracle(const LatticePMF& p, std::int64_t n) {
  if (n < 1 || n > 64)
    throw std::invalid_argument("direct_convolve_oracle: need 1 <= n <= 64");
  LatticePMF acc = p;
  for (std::int64_t i = 2; i <= n; ++i) acc = convolve(acc, p);
  return acc;
}

LatticePMF make_delta(std::int64_t at) {
  LatticePMF d;
  d.offset = at;
  d.log_mass.assign(1, 0.0);
  return d;
}

namespace {

// centering shift floor(b_n); n = 1 handled directly (scales need n >= 2)
std::int64_t center_shift(const TailModel& model, std::int64_t n) {
  if (n == 1)
    return model.alpha > 1.0
               ? static_cast<std::int64_t>(std::floor(model.mean()))
               : 0;
  return static_cast<std::int64_t>(std::floor(scale_bn(model, n)));
}

}  // namespace

std::int64_t sum_center(const TailModel& model, std::int64_t n) {
  return center_shift(model, n);
}

LatticePMF sum_pmf_recentered(const TailModel& model, std::int64_t n,
                              std::int64_t window) {
  if (n < 1) throw std::invalid_argument("sum_pmf_recentered: need n >= 1");
  const LatticePMF mu = materialize_pmf(model, window);
  const std::int64_t b = center_shift(model, n);
  if (n == 1) {
    LatticePMF r = mu;
    r.offset -= b;
    return r;
  }
  Window target{b - window, b + window};
  LatticePMF r = conv_power(mu, n, target);
  r.offset -= b;
  return r;
}

LatticePMF truncated_max_sum_pmf(const TailModel& model, std::int64_t n,
                                 std::int64_t y, std::int64_t window) {
  if (n < 1) throw std::invalid_argument("truncated_max_sum_pmf: need n >= 1");
  if (y < 1) throw std::invalid_argument("truncated_max_sum_pmf: need y >= 1");
  if (window < 2)
    throw std::invalid_argument("truncated_max_sum_pmf: need window >= 2");
  const std::int64_t hi_mu = std::min(window, y);
  LatticePMF mu_y;
  mu_y.offset = -window;
  mu_y.log_mass.resize(static_cast<std::size_t>(hi_mu + window + 1));
  for (std::int64_t k = -window; k <= hi_mu; ++k)
    mu_y.log_mass[static_cast<std::size_t>(k + window)] = model.log_pmf(k);
  const double cert = std::log1p(1e-12);
  mu_y.out_left_log =
      model.log_left_tail(static_cast<double>(window)) + cert;
  mu_y.out_right_log =
      y <= window
          ? kNegInf
          : log_sub(model.log_survival(static_cast<double>(window)),
                    model.log_survival(static_cast<double>(y))) +
                cert;
  const std::int64_t b = center_shift(model, n);
  if (n == 1) {
    mu_y.offset -= b;
    return mu_y;
  }
  Window target{b - window, b + window};
  LatticePMF r = conv_power(mu_y, n, target);
  r.offset -= b;
  return r;
}

double log_survival_completed(const TailModel& model, std::int64_t n,
                              const LatticePMF& sum_law, std::int64_t x) {
  const std::int64_t W = sum_law.hi();
  const std::int64_t band_lo = std::max(
      sum_law.lo(), static_cast<std::int64_t>(std::ceil(0.85 * static_cast<double>(W))));
  double rho_log = 0.0;
  if (band_lo < W) {
    ScaledAcc num, den;
    for (std::int64_t k = band_lo; k <= W; ++k) {
      num.add_log(sum_law.at(k));
      den.add_log(model.log_pmf(k));
    }
    const double ln = num.log_value();
    const double ld = std::log(static_cast<double>(n)) + den.log_value();
    if (std::isfinite(ln) && std::isfinite(ld)) rho_log = ln - ld;
  }
  const double beyond = std::log(static_cast<double>(n)) + rho_log +
                        model.log_survival(static_cast<double>(std::max(x, W)));
  if (x >= W) return beyond;
  const std::int64_t from = std::max(x + 1, sum_law.lo());
  const std::size_t idx = static_cast<std::size_t>(from - sum_law.offset);
  const double in_window =
      log_sum(sum_law.log_mass.data() + idx, sum_law.log_mass.size() - idx);
  return log_add(in_window, beyond);
}

double log_survival_split(const TailModel& model, std::int64_t n,
                          std::int64_t v) {
  if (n < 1) throw std::invalid_argument("log_survival_split: need n >= 1");
  const std::int64_t u = v + center_shift(model, n);
  if (u < 8)
    throw std::domain_error("log_survival_split: level too close to center");
  // A coordinate is big when it exceeds theta; two bigs alone already clear u
  // (each is >= theta + 1 on the lattice), so the pair block never needs the
  // small remainder to help, only not to hurt.
  const std::int64_t theta = u / 2;
  const std::int64_t W = 2 * u;

  LatticePMF mu_lo;  // mu restricted to the small class, window [-W, theta]
  mu_lo.offset = -W;
  mu_lo.log_mass.resize(static_cast<std::size_t>(theta + W + 1));
  for (std::int64_t k = -W; k <= theta; ++k)
    mu_lo.log_mass[static_cast<std::size_t>(k + W)] = model.log_pmf(k);
  mu_lo.out_left_log =
      model.log_left_tail(static_cast<double>(W)) + std::log1p(1e-12);

  const PowerLadder ladder(mu_lo, Window{-W, W});
  const LatticePMF qn2 = ladder.pow(std::max<std::int64_t>(n - 2, 0));
  LatticePMF qn1, qn;
  if (n >= 3) {
    qn1 = convolve(qn2, mu_lo, Window{-W, W});
    qn = convolve(qn1, mu_lo, Window{-W, W});
  } else if (n == 2) {
    qn1 = mu_lo;
    qn = convolve(mu_lo, mu_lo, Window{-W, W});
  } else {
    qn1 = qn2;  // delta at 0
    qn = mu_lo;
  }

  // zero bigs: explicit cells past u plus the right lump (sums beyond W, all
  // of which sit above u). Small sums cannot re-enter from beyond the window
  // with enough height to matter: that needs several near-theta coordinates
  // on top of an escaped partial sum.
  long double t0 = 0.0L;
  for (std::int64_t k = std::max(u + 1, qn.lo()); k <= qn.hi(); ++k) {
    const double lv = qn.at(k);
    if (lv != kNegInf) t0 += static_cast<long double>(std::exp(lv));
  }
  t0 += static_cast<long double>(std::exp(qn.out_right_log));

  // one big: integrate the analytic tail against the small-sum law. The left
  // lump is weighted by G(u + W), an upper cap off by under G(u+W)-G(u-s)
  // on a lump of order n * G(W); the right lump needs only the class floor.
  long double t1 = 0.0L;
  for (std::int64_t s = qn1.lo(); s <= qn1.hi(); ++s) {
    const double lq = qn1.at(s);
    if (lq == kNegInf) continue;
    const double need = static_cast<double>(std::max(theta, u - s));
    t1 += static_cast<long double>(std::exp(lq + model.log_survival(need)));
  }
  t1 += static_cast<long double>(std::exp(
      qn1.out_left_log + model.log_survival(static_cast<double>(u + W))));
  t1 += static_cast<long double>(std::exp(
      qn1.out_right_log + model.log_survival(static_cast<double>(theta))));
  t1 *= static_cast<long double>(n);

  // two bigs: pair law of the big slice against the small-sum survival. Pair
  // sums land at u + 1 or deeper, so the lookup argument stays inside the
  // qn2 window down to its exact left edge -W. Mass beyond 3u takes factor
  // one: the small block's chance of dragging the total back under u from
  // there is below n * G(W) of it. Three or more bigs cost at most
  // C(n,3) G(theta)^3, which is below rounding for any level this deep.
  long double t2 = 0.0L;
  if (n >= 2) {
    const std::int64_t big_hi = 3 * u;
    LatticePMF big;  // mu restricted to (theta, 3u], analytic lump beyond
    big.offset = theta + 1;
    big.log_mass.resize(static_cast<std::size_t>(big_hi - theta));
    for (std::int64_t t = theta + 1; t <= big_hi; ++t)
      big.log_mass[static_cast<std::size_t>(t - big.offset)] =
          model.log_pmf(t);
    big.out_right_log =
        model.log_survival(static_cast<double>(big_hi)) + std::log1p(1e-12);
    const LatticePMF pair =
        convolve_square(big, Window{2 * theta + 2, big_hi});

    std::vector<long double> suffix(qn2.log_mass.size() + 1);
    suffix.back() = static_cast<long double>(std::exp(qn2.out_right_log));
    for (std::size_t i = qn2.log_mass.size(); i-- > 0;) {
      const double lv = qn2.log_mass[i];
      suffix[i] = suffix[i + 1] +
                  (lv == kNegInf ? 0.0L
                                 : static_cast<long double>(std::exp(lv)));
    }
    const std::int64_t qlo = qn2.lo(), qhi = qn2.hi();
    const auto qs = [&](std::int64_t z) -> long double {
      if (z >= qhi) return suffix[qn2.log_mass.size()];
      if (z < qlo) return suffix[0];
      return suffix[static_cast<std::size_t>(z - qlo + 1)];
    };

    long double pairs = 0.0L;
    for (std::int64_t w = pair.lo(); w <= pair.hi(); ++w) {
      const double lv = pair.at(w);
      if (lv != kNegInf) pairs += std::exp(lv) * qs(u - w);
    }
    pairs += static_cast<long double>(std::exp(pair.out_right_log));
    t2 = 0.5L * static_cast<long double>(n) *
         static_cast<long double>(n - 1) * pairs;
  }

  const long double total = t0 + t1 + t2;
  if (!(total > 0.0L)) return kNegInf;
  return static_cast<double>(std::log(total));
}

PowerLadder::PowerLadder(const LatticePMF& base,
                         const std::optional<Window>& target,
                         double clip_budget)
    : target_(target), clip_budget_(clip_budget) {
  sq_.push_back(base);
}

const LatticePMF& PowerLadder::level(std::size_t j) const {
  while (sq_.size() <= j)
    sq_.push_back(convolve_square(sq_.back(), target_, clip_budget_));
  return sq_[j];
}

LatticePMF PowerLadder::pow(std::int64_t m) const {
  if (m < 0) throw std::invalid_argument("PowerLadder::pow: need m >= 0");
  if (m == 0) return make_delta(0);
  LatticePMF acc;
  bool have = false;
  for (std::size_t j = 0; m; ++j, m >>= 1) {
    if (m & 1) {
      acc = have ? convolve(acc, level(j), target_, clip_budget_) : level(j);
      have = true;
    }
  }
  if (target_ && (acc.lo() != target_->lo || acc.hi() != target_->hi))
    acc = clip_to(acc, *target_, clip_budget_);
  return acc;
}

}  // namespace bigjump
