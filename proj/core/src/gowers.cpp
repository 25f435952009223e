#include "lshape/gowers.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "lshape/spectral.hpp"

namespace lshape {

NormValue make_norm(Complex raw_average, int power) {
  double r = raw_average.real();
  if (r < -1e-12) {
    throw std::logic_error("negative radicand " + std::to_string(r) + " for a norm of power " +
                           std::to_string(power));
  }
  NormValue out;
  out.power = power;
  out.raw_average = raw_average;
  out.value = r <= 0.0 ? 0.0 : std::pow(r, 1.0 / power);
  return out;
}

FunctionTable delta(const FunctionTable& f, Index h) {
  const auto space = f.space();
  std::vector<Complex> out(f.size());
  for (Index x = 0; x < f.size(); ++x) out[x] = f[x] * std::conj(f[space.add(x, h)]);
  const auto kind = f.kind() == TableKind::complex ? TableKind::complex : f.kind();
  return FunctionTable(f.p(), f.dim(), std::move(out), kind);
}

FunctionTable delta(const FunctionTable& f, const GroupVector& h) {
  if (h.dim() != f.dim() || h.p() != f.p()) throw std::invalid_argument("delta: dimension mismatch");
  return delta(f, h.index());
}

double gowers_recursive_cost(int p, int m, int s) {
  const double size = std::pow(static_cast<double>(p), m);
  if (s <= 1) return size;
  return std::pow(size, s - 2) * size * (m * p + 2.0);
}

double gowers_definition_cost(int p, int m, int s) {
  return std::pow(static_cast<double>(p), static_cast<double>(m) * (s + 1)) * std::pow(2.0, s);
}

namespace {

// ||f||_{U^s}^{2^s} via differencing down to the Fourier identity at s = 2.
double gowers_power_recursive(const FunctionTable& f, int s) {
  if (s == 1) return std::norm(f.mean());
  if (s == 2) return u2_fourth_power(f);
  std::vector<double> terms(f.size());
  for (Index h = 0; h < f.size(); ++h) terms[h] = gowers_power_recursive(delta(f, h), s - 1);
  return pairwise_sum(std::span<const double>(terms)) / static_cast<double>(f.size());
}

}  // namespace

Complex cube_average(const std::vector<FunctionTable>& family, int s, const ResourceLimits& limits) {
  if (s < 1) throw std::invalid_argument("cube_average: s must be >= 1");
  const std::size_t corners = std::size_t{1} << s;
  if (family.size() != corners) throw std::invalid_argument("cube_average: family must have 2^s members");
  const int p = family[0].p();
  const int m = family[0].dim();
  for (const auto& f : family) {
    if (f.p() != p || f.dim() != m) throw std::invalid_argument("cube_average: family shape mismatch");
  }
  limits.check_operations(gowers_definition_cost(p, m, s), "cube average");
  const IndexSpace space(p, m);
  const Index size = space.size();
  Index tuples = 1;
  for (int i = 0; i < s; ++i) tuples *= size;

  std::vector<Index> h(static_cast<std::size_t>(s));
  std::vector<Index> offset(corners);
  std::vector<Complex> per_h(tuples);
  for (Index t = 0; t < tuples; ++t) {
    Index rest = t;
    for (int i = 0; i < s; ++i) {
      h[static_cast<std::size_t>(i)] = rest % size;
      rest /= size;
    }
    offset[0] = 0;
    for (std::size_t w = 1; w < corners; ++w) {
      const int top = std::bit_width(w) - 1;
      offset[w] = space.add(offset[w ^ (std::size_t{1} << top)], h[static_cast<std::size_t>(top)]);
    }
    Complex acc = 0.0;
    for (Index x = 0; x < size; ++x) {
      Complex prod = 1.0;
      for (std::size_t w = 0; w < corners; ++w) {
        const Complex v = family[w][space.add(x, offset[w])];
        prod *= (std::popcount(w) % 2 == 1) ? std::conj(v) : v;
      }
      acc += prod;
    }
    per_h[t] = acc / static_cast<double>(size);
  }
  return pairwise_sum(std::span<const Complex>(per_h)) / static_cast<double>(tuples);
}

NormValue gowers_u(const FunctionTable& f, int s, const ResourceLimits& limits, bool definition_only) {
  if (s < 1) throw std::invalid_argument("gowers_u: s must be >= 1");
  const int power = 1 << s;
  if (definition_only) {
    std::vector<FunctionTable> family(static_cast<std::size_t>(power), f);
    return make_norm(cube_average(family, s, limits), power);
  }
  limits.check_operations(gowers_recursive_cost(f.p(), f.dim(), s), "U^s recursion");
  return make_norm(gowers_power_recursive(f, s), power);
}

NormValue gowers_u(const FunctionTable& f, int s, const AffineSubspace& c, const ResourceLimits& limits,
                   bool definition_only) {
  return gowers_u(restrict(f, c), s, limits, definition_only);
}

namespace {

int half_dim(const FunctionTable& g, const char* op) {
  if (g.dim() % 2 != 0) throw std::invalid_argument(std::string(op) + ": table must live on F_p^n x F_p^n");
  return g.dim() / 2;
}

}  // namespace

NormValue box_norm(const FunctionTable& g) {
  const int n = half_dim(g, "box_norm");
  const Index N = IndexSpace(g.p(), n).size();
  std::vector<double> terms(N * N);
  for (Index x = 0; x < N; ++x) {
    for (Index x2 = 0; x2 < N; ++x2) {
      Complex acc = 0.0;
      for (Index y = 0; y < N; ++y) acc += g[pair_index(x, y, N)] * std::conj(g[pair_index(x2, y, N)]);
      acc /= static_cast<double>(N);
      terms[x + N * x2] = std::norm(acc);
    }
  }
  return make_norm(pairwise_sum(std::span<const double>(terms)) / static_cast<double>(N * N), 4);
}

FunctionTable shear(const FunctionTable& g) {
  const int n = half_dim(g, "shear");
  const IndexSpace space(g.p(), n);
  const Index N = space.size();
  std::vector<Complex> out(g.size());
  for (Index b = 0; b < N; ++b) {
    for (Index a = 0; a < N; ++a) out[pair_index(a, b, N)] = g[pair_index(a, space.sub(b, a), N)];
  }
  return FunctionTable(g.p(), g.dim(), std::move(out), g.kind());
}

namespace {

NormValue star1(const FunctionTable& g) {
  const int n = half_dim(g, "star_norm");
  const Index N = IndexSpace(g.p(), n).size();
  const IndexSpace space(g.p(), n);
  std::vector<double> terms(N * N);
  std::vector<Complex> column(N);
  for (Index x = 0; x < N; ++x) {
    for (Index h = 0; h < N; ++h) {
      const Index x2 = space.add(x, h);
      for (Index y = 0; y < N; ++y) column[y] = g[pair_index(x, y, N)] * std::conj(g[pair_index(x2, y, N)]);
      terms[x + N * h] = u2_fourth_power(FunctionTable(g.p(), n, column));
    }
  }
  return make_norm(pairwise_sum(std::span<const double>(terms)) / static_cast<double>(N * N), 8);
}

NormValue star3(const FunctionTable& g) {
  const int n = half_dim(g, "star_norm");
  const IndexSpace space(g.p(), n);
  const Index N = space.size();
  std::vector<double> terms(N);
  for (Index z = 0; z < N; ++z) {
    Complex acc = 0.0;
    for (Index x = 0; x < N; ++x) acc += g[pair_index(x, space.combine(1, z, g.p() - 2, x), N)];
    terms[z] = std::norm(acc / static_cast<double>(N));
  }
  return make_norm(pairwise_sum(std::span<const double>(terms)) / static_cast<double>(N), 2);
}

}  // namespace

NormValue star_norm(const FunctionTable& g, int which) {
  switch (which) {
    case 1: return star1(g);
    case 2: return box_norm(shear(g));
    case 3: return star3(g);
    default: throw std::invalid_argument("star_norm: which must be 1, 2 or 3");
  }
}

double directional_average(const FunctionTable& g, const DirectionSet& dirs, const ResourceLimits& limits) {
  const int n = half_dim(g, "directional_average");
  if (dirs.empty()) throw std::invalid_argument("directional_average: no directions");
  if (dirs.size() > 3) throw ResourceError("directional_average: at most 3 directions");
  const int p = g.p();
  const IndexSpace half(p, n);
  const Index N = half.size();
  for (const auto& d : dirs) {
    if (((d.a % p + p) % p == 0) && ((d.b % p + p) % p == 0)) {
      throw std::invalid_argument("directional_average: zero direction pattern");
    }
  }
  const std::size_t k = dirs.size();
  Index tuples = 1;
  for (std::size_t i = 0; i < k; ++i) tuples *= N;
  limits.check_operations(static_cast<double>(tuples) * static_cast<double>(g.size()) * static_cast<double>(k),
                          "directional average");

  std::vector<Complex> per_h(tuples);
  for (Index t = 0; t < tuples; ++t) {
    Index rest = t;
    FunctionTable cur = g;
    for (std::size_t i = 0; i < k; ++i) {
      const Index h = rest % N;
      rest /= N;
      const Index v = pair_index(half.scale(dirs[i].a % p + p, h), half.scale(dirs[i].b % p + p, h), N);
      cur = delta(cur, v);
    }
    per_h[t] = cur.mean();
  }
  const Complex avg = pairwise_sum(std::span<const Complex>(per_h)) / static_cast<double>(tuples);
  if (g.is_real() && std::abs(avg.imag()) > 1e-9) {
    throw std::logic_error("directional_average: imaginary part " + std::to_string(avg.imag()) + " for real input");
  }
  return avg.real();
}

GcsReport gcs_check(const std::vector<FunctionTable>& family, int s, const ResourceLimits& limits, double slack) {
  GcsReport r;
  r.lhs = std::abs(cube_average(family, s, limits));
  r.rhs = 1.0;
  for (const auto& f : family) {
    r.norms.push_back(gowers_u(f, s, limits).value);
    r.rhs *= r.norms.back();
  }
  r.holds = r.lhs <= r.rhs + slack;
  return r;
}

}  // namespace lshape
