#pragma once
// CLT normalizing sequences: a_n from the defining tail relation (exact root
// replacing the asymptotic "~"), b_n by the three-case centering rule.

#include <cstdint>

#include "tail_model.hpp"

namespace bigjump {

// alpha in (0,2): root of n L(a) a^-alpha = 1; alpha >= 2: root of
// n sigma2(a) a^-2 = 1. Bisection on [1, n^(2/min(alpha,2)+1)], relative
// tolerance 1e-9.
double scale_an(const TailModel& model, std::int64_t n);

// 0 for alpha < 1; n E[X 1{|X| <= a_n}] at alpha = 1; n E[X] for alpha > 1.
double scale_bn(const TailModel& model, std::int64_t n);

}  // namespace bigjump
