#include "lshape/configurations.hpp"

#include <cmath>
#include <stdexcept>

#include "lshape/random.hpp"

namespace lshape {

namespace {

// One factor of a configuration average: table evaluated at (x + a z, y + b z).
struct Term {
  const FunctionTable* table;
  int a;
  int b;
};

bool zero_one(const FunctionTable& t) {
  if (t.kind() == TableKind::indicator) return true;
  for (const auto& v : t.values()) {
    if (!(v == Complex(0.0) || v == Complex(1.0))) return false;
  }
  return true;
}

LambdaResult pattern_average(const std::vector<Term>& terms, const ResourceLimits& limits) {
  const auto& first = *terms[0].table;
  if (first.dim() % 2 != 0) throw std::invalid_argument("configuration count: tables must live on F_p^n x F_p^n");
  for (const auto& t : terms) {
    if (t.table->p() != first.p() || t.table->dim() != first.dim()) {
      throw std::invalid_argument("configuration count: table shape mismatch");
    }
  }
  const int p = first.p();
  const int n = first.dim() / 2;
  const IndexSpace space(p, n);
  const Index N = space.size();
  limits.check_operations(static_cast<double>(N) * N * N * terms.size(), "configuration count");

  bool indicators = true;
  for (const auto& t : terms) indicators = indicators && zero_one(*t.table);

  // row_nonzero[k][x]: table k has a nonzero entry in row x
  std::vector<std::vector<std::uint8_t>> row_nonzero(terms.size(), std::vector<std::uint8_t>(N, 0));
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const auto& t = *terms[k].table;
    for (Index y = 0; y < N; ++y) {
      for (Index x = 0; x < N; ++x) {
        if (t[pair_index(x, y, N)] != Complex(0.0)) row_nonzero[k][x] = 1;
      }
    }
  }

  LambdaResult r;
  std::uint64_t count = 0;
  std::uint64_t trivial = 0;
  std::vector<Complex> per_z(N, 0.0);
  std::vector<std::vector<Index>> shifted_y(terms.size(), std::vector<Index>(N));
  std::vector<Index> xs(terms.size());
  std::vector<Complex> per_x(N);
  for (Index z = 0; z < N; ++z) {
    for (std::size_t k = 0; k < terms.size(); ++k) {
      for (Index y = 0; y < N; ++y) shifted_y[k][y] = space.combine(1, y, terms[k].b, z);
    }
    for (Index x = 0; x < N; ++x) {
      per_x[x] = 0.0;
      bool skip = false;
      for (std::size_t k = 0; k < terms.size(); ++k) {
        xs[k] = space.combine(1, x, terms[k].a, z);
        skip = skip || !row_nonzero[k][xs[k]];
      }
      if (skip) continue;
      Complex acc = 0.0;
      std::uint64_t c = 0;
      for (Index y = 0; y < N; ++y) {
        if (indicators) {
          bool all = true;
          for (std::size_t k = 0; k < terms.size() && all; ++k) {
            all = (*terms[k].table)[pair_index(xs[k], shifted_y[k][y], N)] != Complex(0.0);
          }
          if (all) ++c;
        } else {
          Complex prod = 1.0;
          for (std::size_t k = 0; k < terms.size(); ++k) prod *= (*terms[k].table)[pair_index(xs[k], shifted_y[k][y], N)];
          acc += prod;
        }
      }
      if (indicators) {
        count += c;
        if (z == 0) trivial += c;
      } else {
        per_x[x] = acc;
      }
    }
    if (!indicators) per_z[z] = pairwise_sum(std::span<const Complex>(per_x));
  }
  const double total = static_cast<double>(N) * static_cast<double>(N) * static_cast<double>(N);
  if (indicators) {
    r.exact_count = count;
    r.nontrivial_count = count - trivial;
    r.value = static_cast<double>(count) / total;
  } else {
    r.value = pairwise_sum(std::span<const Complex>(per_z)) / total;
  }
  r.average = r.value.real();
  return r;
}

}  // namespace

LambdaResult lambda_L(const FunctionTable& g0, const FunctionTable& g1, const FunctionTable& g2,
                      const FunctionTable& g3, const ResourceLimits& limits) {
  return pattern_average({{&g0, 0, 0}, {&g1, 0, 1}, {&g2, 0, 2}, {&g3, 1, 0}}, limits);
}

LambdaResult lambda_corner(const FunctionTable& g0, const FunctionTable& g1, const FunctionTable& g2,
                           const ResourceLimits& limits) {
  return pattern_average({{&g0, 0, 0}, {&g1, 0, 1}, {&g2, 1, 0}}, limits);
}

LambdaResult count_L(const IndicatorSet& s, const ResourceLimits& limits) {
  const auto t = s.table();
  return lambda_L(t, t, t, t, limits);
}

LambdaResult count_corners(const IndicatorSet& s, const ResourceLimits& limits) {
  const auto t = s.table();
  return lambda_corner(t, t, t, limits);
}

bool is_L_free(const IndicatorSet& s, const ResourceLimits& limits) {
  return *count_L(s, limits).nontrivial_count == 0;
}

TelescopeReport telescope_check(const IndicatorSet& s, const ResourceLimits& limits, double slack) {
  const double sigma = s.density();
  const auto S = s.table();
  const auto g = balanced(s);
  const auto one = FunctionTable::constant(s.p(), s.dim(), 1.0);
  TelescopeReport r;
  r.lhs = std::abs(lambda_L(S, S, S, S, limits).value - std::pow(sigma, 4));
  r.terms[0] = std::abs(lambda_L(one, one, g, S, limits).value);
  r.terms[1] = std::abs(lambda_L(one, g, S, S, limits).value);
  r.terms[2] = std::abs(lambda_L(g, S, S, S, limits).value);
  r.rhs = sigma * sigma * r.terms[0] + sigma * r.terms[1] + r.terms[2];
  r.holds = r.lhs <= r.rhs + slack;
  return r;
}

std::string to_string(ObstructionKind kind) {
  switch (kind) {
    case ObstructionKind::dot: return "dot";
    case ObstructionKind::random_phi: return "random_phi";
    case ObstructionKind::coordinate: return "coordinate";
  }
  return "?";
}

ObstructionKind obstruction_kind_from_string(const std::string& name) {
  if (name == "dot") return ObstructionKind::dot;
  if (name == "random_phi") return ObstructionKind::random_phi;
  if (name == "coordinate") return ObstructionKind::coordinate;
  throw std::invalid_argument("unknown obstruction kind '" + name + "'");
}

IndicatorSet dot_set(int p, int n) {
  const IndexSpace space(p, n);
  const Index N = space.size();
  return IndicatorSet::from_predicate(p, 2 * n, [&](Index i) { return space.dot(i % N, i / N) == 0; });
}

IndicatorSet phi_dot_set(int p, int n, const std::vector<Index>& phi) {
  const IndexSpace space(p, n);
  const Index N = space.size();
  if (phi.size() != N) throw std::invalid_argument("phi_dot_set: phi must have p^n entries");
  return IndicatorSet::from_predicate(p, 2 * n, [&](Index i) { return space.dot(phi[i % N], i / N) == 0; });
}

IndicatorSet coordinate_set(int p, int n, const std::vector<Residue>& u) {
  const IndexSpace space(p, n);
  const Index N = space.size();
  if (u.size() != N) throw std::invalid_argument("coordinate_set: u must have p^n entries");
  if (n < 1) throw std::invalid_argument("coordinate_set: n must be >= 1");
  return IndicatorSet::from_predicate(p, 2 * n, [&](Index i) { return space.digit(i / N, 0) == u[i % N]; });
}

std::uint64_t dot_closed_form_count(int p, int n) {
  if (n < 2) throw std::invalid_argument("dot_closed_form_count: needs n >= 2");
  const std::uint64_t P = static_cast<std::uint64_t>(p);
  const std::uint64_t N = IndexSpace(p, n).size();
  return ((N - 1) - (P - 1)) * (N / P - 1) * (N / (P * P)) + (N / P - 1) * (P - 1) * (N / P) + N +
         2 * (N - 1) * (N / P);
}

ObstructionExample obstruction_example(ObstructionKind kind, int p, int n, std::uint64_t seed) {
  const IndexSpace space(p, n);
  const Index N = space.size();
  const double Nd = static_cast<double>(N);
  switch (kind) {
    case ObstructionKind::dot: {
      if (n < 3) throw std::invalid_argument("obstruction_example: the dot kind needs n >= 3");
      ObstructionExample ex(dot_set(p, n), kind);
      ex.density_numerator = (N - 1) * (N / static_cast<Index>(p)) + N;
      ex.density_denominator = N * N;
      ex.predicted_density = static_cast<double>(ex.density_numerator) / static_cast<double>(ex.density_denominator);
      ex.predicted_count = dot_closed_form_count(p, n);
      ex.expected_count_scale = Nd * Nd * Nd / std::pow(p, 3);
      return ex;
    }
    case ObstructionKind::random_phi: {
      Rng rng(seed);
      std::vector<Index> phi(N);
      for (auto& v : phi) v = uniform_below(rng, N);
      ObstructionExample ex(phi_dot_set(p, n, phi), kind);
      ex.predicted_density = 1.0 / p;
      ex.expected_count_scale = Nd * Nd * Nd / std::pow(p, 3);
      return ex;
    }
    case ObstructionKind::coordinate: {
      Rng rng(seed);
      std::vector<Residue> u(N);
      for (auto& v : u) v = static_cast<Residue>(uniform_below(rng, static_cast<std::uint64_t>(p)));
      ObstructionExample ex(coordinate_set(p, n, u), kind);
      ex.density_numerator = 1;
      ex.density_denominator = static_cast<std::uint64_t>(p);
      ex.predicted_density = 1.0 / p;
      ex.expected_count_scale = Nd * Nd * Nd / std::pow(p, 3);
      return ex;
    }
  }
  throw std::invalid_argument("obstruction_example: unknown kind");
}

SystemCount count_system(const std::vector<IndicatorSet>& sets, const LinearFormSystem& sys,
                         const ResourceLimits& limits) {
  SystemCount r;
  r.count = system_count(sys, sets, limits);
  const int n = sets.at(0).dim() / sys.blocks();
  r.average = static_cast<double>(*r.count) / std::pow(static_cast<double>(IndexSpace(sys.p(), n).size()), sys.variables());
  return r;
}

SystemCount count_system(const std::vector<FunctionTable>& tables, const LinearFormSystem& sys,
                         const ResourceLimits& limits) {
  SystemCount r;
  r.average = system_average(sys, tables, limits);
  return r;
}

}  // namespace lshape
