#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "lshape/function_table.hpp"
#include "lshape/linear_systems.hpp"

namespace lshape {

struct LambdaResult {
  Complex value = 0.0;
  double average = 0.0;
  /// Present when every input is a {0,1} table.
  std::optional<std::uint64_t> exact_count;
  std::optional<std::uint64_t> nontrivial_count;
};

/// E_{x,y,z} g0(x,y) g1(x,y+z) g2(x,y+2z) g3(x+z,y) over F_p^n x F_p^n.
LambdaResult lambda_L(const FunctionTable& g0, const FunctionTable& g1, const FunctionTable& g2,
                      const FunctionTable& g3, const ResourceLimits& limits = {});
/// E_{x,y,z} g0(x,y) g1(x,y+z) g2(x+z,y), normalized by p^{3n}.
LambdaResult lambda_corner(const FunctionTable& g0, const FunctionTable& g1, const FunctionTable& g2,
                           const ResourceLimits& limits = {});

LambdaResult count_L(const IndicatorSet& s, const ResourceLimits& limits = {});
LambdaResult count_corners(const IndicatorSet& s, const ResourceLimits& limits = {});
/// True when s has no L-shape with z != 0.
bool is_L_free(const IndicatorSet& s, const ResourceLimits& limits = {});

struct TelescopeReport {
  double lhs = 0.0;
  double rhs = 0.0;
  /// |Lambda(1,1,g,S)|, |Lambda(1,g,S,S)|, |Lambda(g,S,S,S)|.
  double terms[3] = {0.0, 0.0, 0.0};
  bool holds = true;
};

TelescopeReport telescope_check(const IndicatorSet& s, const ResourceLimits& limits = {}, double slack = 1e-9);

enum class ObstructionKind { dot, random_phi, coordinate };
std::string to_string(ObstructionKind kind);
ObstructionKind obstruction_kind_from_string(const std::string& name);

struct ObstructionExample {
  ObstructionExample(IndicatorSet s, ObstructionKind k) : set(std::move(s)), kind(k) {}

  IndicatorSet set;
  ObstructionKind kind = ObstructionKind::dot;
  /// Predicted density as an exact fraction for the dot kind, else ~1/p.
  std::uint64_t density_numerator = 0;
  std::uint64_t density_denominator = 1;
  double predicted_density = 0.0;
  /// Closed-form L-count for the dot kind.
  std::optional<std::uint64_t> predicted_count;
  /// Heuristic N^3/p^3 scale for the random kinds.
  double expected_count_scale = 0.0;
};

/// {(x, y) : x . y = 0}.
IndicatorSet dot_set(int p, int n);
/// {(x, y) : phi(x) . y = 0}, phi given by the index of phi(x) for each x.
IndicatorSet phi_dot_set(int p, int n, const std::vector<Index>& phi);
/// {(x, y) : y_1 = u(x)}.
IndicatorSet coordinate_set(int p, int n, const std::vector<Residue>& u);

/// Closed-form L-count of the dot set; needs n >= 2.
std::uint64_t dot_closed_form_count(int p, int n);

ObstructionExample obstruction_example(ObstructionKind kind, int p, int n, std::uint64_t seed);

struct SystemCount {
  Complex average = 0.0;
  std::optional<std::uint64_t> count;
};

SystemCount count_system(const std::vector<IndicatorSet>& sets, const LinearFormSystem& sys,
                         const ResourceLimits& limits = {});
SystemCount count_system(const std::vector<FunctionTable>& tables, const LinearFormSystem& sys,
                         const ResourceLimits& limits = {});

}  // namespace lshape
