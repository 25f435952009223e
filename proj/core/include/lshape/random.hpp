#pragma once

#include <cstdint>
#include <random>

#include "lshape/function_table.hpp"

namespace lshape {

// Engine output is fixed by the standard; the conversions below are written
// out so that results do not depend on the standard library's distributions.
using Rng = std::mt19937_64;

/// Uniform integer in [0, bound) by rejection.
std::uint64_t uniform_below(Rng& rng, std::uint64_t bound);
/// Uniform double in [0, 1) with 53 random bits.
double uniform_unit(Rng& rng);

/// Values uniform in the closed unit disc (modulus and phase drawn
/// independently, modulus sqrt-distributed).
FunctionTable random_one_bounded(Rng& rng, int p, int m);
/// Real values uniform in [-1, 1].
FunctionTable random_real_one_bounded(Rng& rng, int p, int m);
/// Each point kept independently with probability `density`.
IndicatorSet random_set(Rng& rng, int p, int m, double density);

}  // namespace lshape
