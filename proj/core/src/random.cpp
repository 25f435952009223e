#include "lshape/random.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace lshape {

std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform_below: empty range");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t v = rng();
  while (v >= limit) v = rng();
  return v % bound;
}

double uniform_unit(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

FunctionTable random_one_bounded(Rng& rng, int p, int m) {
  return FunctionTable::from_index_fn(p, m, [&](Index) {
    const double r = std::sqrt(uniform_unit(rng));
    const double theta = 2.0 * std::numbers::pi * uniform_unit(rng);
    return std::polar(r, theta);
  });
}

FunctionTable random_real_one_bounded(Rng& rng, int p, int m) {
  return FunctionTable::from_index_fn(
      p, m, [&](Index) { return Complex(2.0 * uniform_unit(rng) - 1.0, 0.0); }, TableKind::real);
}

IndicatorSet random_set(Rng& rng, int p, int m, double density) {
  return IndicatorSet::from_predicate(p, m, [&](Index) { return uniform_unit(rng) < density; });
}

}  // namespace lshape
