#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "lshape/function_table.hpp"
#include "lshape/group.hpp"

namespace lshape {

/// A norm value together with the average it was extracted from.
struct NormValue {
  double value = 0.0;
  int power = 1;
  Complex raw_average = 0.0;
};

/// Takes the power-th root of a nonnegative average. Radicands below
/// -1e-12 throw std::logic_error; smaller negative noise clamps to zero.
NormValue make_norm(Complex raw_average, int power);

/// x -> f(x) conj(f(x + h)).
FunctionTable delta(const FunctionTable& f, const GroupVector& h);
FunctionTable delta(const FunctionTable& f, Index h);

/// ||f||_{U^s}. The power 2^s is computed by differencing down to U^2 and
/// summing |fhat|^4 there; `definition_only` evaluates the cube average
/// directly instead.
NormValue gowers_u(const FunctionTable& f, int s, const ResourceLimits& limits = {},
                   bool definition_only = false);
/// ||f||_{U^s(c)}, i.e. the norm of f pulled back to the coset's parameters.
NormValue gowers_u(const FunctionTable& f, int s, const AffineSubspace& c, const ResourceLimits& limits = {},
                   bool definition_only = false);

/// Operation estimates used by the resource guard.
double gowers_recursive_cost(int p, int m, int s);
double gowers_definition_cost(int p, int m, int s);

/// Box norm of g on F_p^n x F_p^n, computed as
/// E_{x,x'} |E_y g(x,y) conj g(x',y)|^2.
NormValue box_norm(const FunctionTable& g);

/// The directional norms star_1, star_2, star_3 on F_p^n x F_p^n.
NormValue star_norm(const FunctionTable& g, int which);

/// The sheared table (a, b) -> g(a, b - a).
FunctionTable shear(const FunctionTable& g);

/// A differencing direction h -> (a h, b h) on F_p^n x F_p^n.
struct DirectionPattern {
  Residue a = 0;
  Residue b = 0;
};
using DirectionSet = std::vector<DirectionPattern>;

/// Real part of E_{x,y,h_1..h_k} Delta_{(a_1 h_1, b_1 h_1), ...} g(x,y).
/// Throws std::logic_error if g is real and the imaginary part exceeds 1e-9.
double directional_average(const FunctionTable& g, const DirectionSet& dirs, const ResourceLimits& limits = {});

struct GcsReport {
  double lhs = 0.0;
  double rhs = 0.0;
  std::vector<double> norms;
  bool holds = true;
};

/// Both sides of |E_{x,h} prod_w C^{|w|} f_w(x + w.h)| <= prod_w ||f_w||_{U^s}
/// for a family indexed by the bitmask w in [0, 2^s).
GcsReport gcs_check(const std::vector<FunctionTable>& family, int s, const ResourceLimits& limits = {},
                    double slack = 1e-9);

/// Raw cube average E_{x,h} prod_w C^{|w|} f_w(x + w.h) by enumeration.
Complex cube_average(const std::vector<FunctionTable>& family, int s, const ResourceLimits& limits = {});

}  // namespace lshape
