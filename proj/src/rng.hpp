#pragma once
// Deterministic RNG substreams plus a Walker alias table for lattice draws.
// Streams are derived from (master seed, stream id) so each result row of an
// experiment owns an independent, reproducible generator.

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace bigjump {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::mt19937_64 substream(std::uint64_t master_seed, std::uint64_t stream_id) {
  std::uint64_t s = master_seed;
  (void)splitmix64(s);
  s ^= 0x517cc1b727220a95ull * (stream_id + 1);
  const std::uint64_t derived = splitmix64(s);
  return std::mt19937_64(derived);
}

// Uniform in [0,1) from the raw 64-bit stream; avoids distribution objects so
// the value sequence is identical across standard library implementations.
inline double unit_uniform(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

class AliasTable {
 public:
  explicit AliasTable(const std::vector<double>& w) {
    const std::size_t n = w.size();
    if (n == 0) throw std::invalid_argument("AliasTable: empty weights");
    double total = 0.0;
    for (double v : w) {
      if (v < 0.0) throw std::invalid_argument("AliasTable: negative weight");
      total += v;
    }
    if (total <= 0.0) throw std::invalid_argument("AliasTable: zero total weight");
    prob_.assign(n, 0.0);
    alias_.assign(n, 0);
    std::vector<double> scaled(n);
    for (std::size_t i = 0; i < n; ++i) scaled[i] = w[i] * static_cast<double>(n) / total;
    std::vector<std::size_t> small, large;
    small.reserve(n);
    large.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
      (scaled[i] < 1.0 ? small : large).push_back(i);
    while (!small.empty() && !large.empty()) {
      const std::size_t s = small.back();
      small.pop_back();
      const std::size_t l = large.back();
      prob_[s] = scaled[s];
      alias_[s] = l;
      scaled[l] = (scaled[l] + scaled[s]) - 1.0;
      if (scaled[l] < 1.0) {
        large.pop_back();
        small.push_back(l);
      }
    }
    for (std::size_t i : large) prob_[i] = 1.0;
    for (std::size_t i : small) prob_[i] = 1.0;
  }

  std::size_t sample(std::mt19937_64& g) const {
    const double u = unit_uniform(g) * static_cast<double>(prob_.size());
    std::size_t i = static_cast<std::size_t>(u);
    if (i >= prob_.size()) i = prob_.size() - 1;
    const double frac = u - static_cast<double>(i);
    return frac < prob_[i] ? i : alias_[i];
  }

 private:
  std::vector<double> prob_;
  std::vector<std::size_t> alias_;
};

}  // namespace bigjump
