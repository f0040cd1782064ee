// Windowed log-domain convolution against dense linear references.
#include <cmath>
#include <cstdint>
#include <limits>

#include "convolution.hpp"
#include "doctest.h"
#include "oracle_util.hpp"
#include "tail_model.hpp"

using namespace bigjump;

namespace {

oracle::DenseLaw dense_from_model(const TailModel& m, std::int64_t W) {
  oracle::DenseLaw d;
  d.offset = -W;
  d.mass.resize(static_cast<std::size_t>(2 * W + 1));
  for (std::int64_t k = -W; k <= W; ++k)
    d.mass[static_cast<std::size_t>(k + W)] = m.pmf(k);
  return d;
}

// window-only restriction with no out mass, for apples-to-apples references
LatticePMF lattice_from_dense(const oracle::DenseLaw& d) {
  LatticePMF f;
  f.offset = d.offset;
  f.log_mass.resize(d.mass.size());
  for (std::size_t i = 0; i < d.mass.size(); ++i)
    f.log_mass[i] = d.mass[i] > 0.0 ? std::log(d.mass[i]) : kNegInf;
  return f;
}

}  // namespace

TEST_CASE("delta is the convolution identity") {
  const auto m = TailModel::zeta(1.5);
  const auto f = materialize_pmf(m, 200);
  const auto r = convolve(f, make_delta(0));
  REQUIRE(r.lo() == f.lo());
  REQUIRE(r.hi() == f.hi());
  for (std::int64_t k = f.lo(); k <= f.hi(); ++k) {
    if (f.at(k) == -std::numeric_limits<double>::infinity())
      CHECK(r.at(k) == f.at(k));  // Approx cannot equate infinities
    else
      CHECK(r.at(k) == doctest::Approx(f.at(k)).epsilon(1e-13));
  }
  const auto s = convolve(f, make_delta(5));
  CHECK(s.lo() == f.lo() + 5);
  CHECK(s.at(12) == doctest::Approx(f.at(7)).epsilon(1e-13));
}

TEST_CASE("convolution commutes") {
  const auto a = materialize_pmf(TailModel::zeta(1.5), 128);
  const auto b = materialize_pmf(TailModel::zeta(2.0), 128);
  const auto ab = convolve(a, b);
  const auto ba = convolve(b, a);
  REQUIRE(ab.lo() == ba.lo());
  REQUIRE(ab.hi() == ba.hi());
  for (std::int64_t k = ab.lo(); k <= ab.hi(); ++k)
    CHECK(ab.at(k) == doctest::Approx(ba.at(k)).epsilon(1e-12));
  CHECK(ab.out_mass_log() == doctest::Approx(ba.out_mass_log()).epsilon(1e-12));
}

TEST_CASE("conv_power matches the dense quadratic reference") {
  const std::int64_t W = 256;
  const auto dense = dense_from_model(TailModel::zeta(1.5), W);
  const auto base = lattice_from_dense(dense);
  const auto eng = conv_power(base, 4);
  const auto ref = oracle::naive_power(dense, 4);
  REQUIRE(eng.lo() == ref.offset);
  REQUIRE(eng.out_mass_log() == kNegInf);  // grow policy clips nothing
  std::size_t compared = 0;
  for (std::size_t i = 0; i < ref.mass.size(); ++i) {
    if (ref.mass[i] < 1e-290) continue;
    const std::int64_t k = ref.offset + static_cast<std::int64_t>(i);
    CHECK(std::exp(eng.at(k)) == doctest::Approx(ref.mass[i]).epsilon(1e-9));
    ++compared;
  }
  CHECK(compared > 1000);
}

TEST_CASE("window clipping conserves total mass") {
  const auto f = materialize_pmf(TailModel::zeta(1.5), 512);
  const auto s = conv_power(f, 16, Window{-512, 512});
  const double total = log_add(s.window_log_sum(), s.out_mass_log());
  CHECK(std::exp(total) == doctest::Approx(1.0).epsilon(1e-11));
  CHECK_FALSE(s.window_overflow);
}

TEST_CASE("max-truncated sum law has mass (1-G(y))^n") {
  const auto m = TailModel::zeta(1.5);
  const std::int64_t n = 6, y = 20, W = 600;
  const auto t = truncated_max_sum_pmf(m, n, y, W);
  const double expect =
      static_cast<double>(n) *
      std::log1p(-std::exp(m.log_survival(static_cast<double>(y))));
  const double total = log_add(t.window_log_sum(), t.out_mass_log());
  CHECK(total == doctest::Approx(expect).epsilon(1e-10));

  // restricting the maximum can only remove mass, cell by cell
  const auto full = sum_pmf_recentered(m, n, W);
  for (std::int64_t k = t.lo(); k <= t.hi(); ++k)
    CHECK(t.at(k) <= full.at(k) + 1e-12);
}

TEST_CASE("doubling respects the semigroup law") {
  const auto base = materialize_pmf(TailModel::zeta(1.5), 64);
  const auto p5 = conv_power(base, 5);
  const auto split = convolve(conv_power(base, 2), conv_power(base, 3));
  REQUIRE(p5.lo() == split.lo());
  for (std::int64_t k = p5.lo(); k <= p5.hi(); ++k) {
    if (p5.at(k) < -600.0) continue;
    CHECK(p5.at(k) == doctest::Approx(split.at(k)).epsilon(1e-10));
  }
}

TEST_CASE("recentered sum with one summand is the jump law") {
  const auto m = TailModel::zeta(1.5);
  const auto s = sum_pmf_recentered(m, 1, 50);
  CHECK(s.lo() == -50);
  for (std::int64_t k = -50; k <= 50; ++k) CHECK(s.at(k) == m.log_pmf(k));
}

TEST_CASE("power ladder agrees with conv_power") {
  const auto base = materialize_pmf(TailModel::zeta(1.5), 128);
  const std::optional<Window> target = Window{-128, 128};
  const PowerLadder ladder(base, target);
  const auto d = ladder.pow(0);
  CHECK(d.lo() == 0);
  CHECK(d.at(0) == 0.0);
  for (std::int64_t mexp : {std::int64_t{1}, std::int64_t{2}, std::int64_t{3},
                            std::int64_t{7}}) {
    const auto a = ladder.pow(mexp);
    const auto b = conv_power(base, mexp, target);
    REQUIRE(a.lo() == b.lo());
    for (std::int64_t k = a.lo(); k <= a.hi(); ++k) {
      if (b.at(k) < -650.0) continue;
      CHECK(a.at(k) == doctest::Approx(b.at(k)).epsilon(1e-11));
    }
  }
}

TEST_CASE("survival completion reproduces the analytic tail") {
  const auto m = TailModel::zeta(1.5);
  const auto law = sum_pmf_recentered(m, 1, 400);
  for (std::int64_t x : {std::int64_t{0}, std::int64_t{5}, std::int64_t{57},
                         std::int64_t{200}}) {
    const double got = log_survival_completed(m, 1, law, x);
    CHECK(got ==
          doctest::Approx(m.log_survival(static_cast<double>(x))).epsilon(1e-11));
  }
  // beyond the window only the analytic completion remains
  const double far = log_survival_completed(m, 1, law, 600);
  CHECK(far ==
        doctest::Approx(m.log_survival(600.0)).epsilon(1e-9));

  const auto law4 = sum_pmf_recentered(m, 4, 300);
  double prev = 1.0;
  for (std::int64_t x : {std::int64_t{-100}, std::int64_t{0}, std::int64_t{50},
                         std::int64_t{150}, std::int64_t{299},
                         std::int64_t{350}}) {
    const double g = std::exp(log_survival_completed(m, 4, law4, x));
    CHECK(g < prev);
    CHECK(g > 0.0);
    prev = g;
  }
}
