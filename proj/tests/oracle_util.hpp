#pragma once
// Test-side reference computations, kept independent of the library's
// analytic machinery: plain long-double series with Euler-Maclaurin tails,
// naive O(W^2) convolutions, frozen constants from standard tables.

#include <cmath>
#include <cstdint>
#include <vector>

namespace oracle {

// frozen reference values
inline constexpr double kZeta15 = 2.6123753486854883;  // zeta(1.5)
inline constexpr double kZeta2 = 1.6449340668482264;   // pi^2/6
inline constexpr double kZeta25 = 1.3414872572509171;
inline constexpr double kZeta3 = 1.2020569031595943;
inline constexpr double kZeta35 = 1.1267338673170566;
inline constexpr double kZeta4 = 1.0823232337111382;   // pi^4/90
inline constexpr double kH2_10 = 1.5497677311665407;   // sum_{k<=10} k^-2

// zeta(s) by direct summation plus the Euler-Maclaurin tail
inline double zeta_ref(double s, std::int64_t N = 100000) {
  long double acc = 0.0L;
  for (std::int64_t k = 1; k <= N; ++k)
    acc += std::pow(static_cast<long double>(k), static_cast<long double>(-s));
  const long double Nd = static_cast<long double>(N);
  acc += std::pow(Nd, 1.0L - s) / (s - 1.0L);
  acc -= 0.5L * std::pow(Nd, -static_cast<long double>(s));
  acc += (s / 12.0L) * std::pow(Nd, -s - 1.0L);
  acc -= (s * (s + 1.0L) * (s + 2.0L) / 720.0L) * std::pow(Nd, -s - 3.0L);
  return static_cast<double>(acc);
}

// sum_{k > x} k^-s, same scheme
inline double tail_ref(double s, std::int64_t x, std::int64_t N = 2000000) {
  long double acc = 0.0L;
  for (std::int64_t k = x + 1; k <= N; ++k)
    acc += std::pow(static_cast<long double>(k), static_cast<long double>(-s));
  const long double Nd = static_cast<long double>(N);
  acc += std::pow(Nd, 1.0L - s) / (s - 1.0L);
  acc -= 0.5L * std::pow(Nd, -static_cast<long double>(s));
  acc += (s / 12.0L) * std::pow(Nd, -s - 1.0L);
  return static_cast<double>(acc);
}

// naive linear-domain convolution of mass vectors anchored at offsets
struct DenseLaw {
  std::int64_t offset = 0;
  std::vector<double> mass;
};

inline DenseLaw naive_convolve(const DenseLaw& a, const DenseLaw& b) {
  DenseLaw r;
  r.offset = a.offset + b.offset;
  r.mass.assign(a.mass.size() + b.mass.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.mass.size(); ++i) {
    if (a.mass[i] == 0.0) continue;
    for (std::size_t j = 0; j < b.mass.size(); ++j)
      r.mass[i + j] += a.mass[i] * b.mass[j];
  }
  return r;
}

inline DenseLaw naive_power(const DenseLaw& p, int n) {
  DenseLaw acc = p;
  for (int i = 1; i < n; ++i) acc = naive_convolve(acc, p);
  return acc;
}

}  // namespace oracle
