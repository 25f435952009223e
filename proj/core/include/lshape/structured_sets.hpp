#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lshape/cell.hpp"
#include "lshape/function_table.hpp"
#include "lshape/group.hpp"
#include "lshape/linear_systems.hpp"

namespace lshape {

/// A family of affine fibers {(x, y) : x in A, y in u_x + V_x}. Offsets and
/// codimensions may vary with x.
class FiberFamily {
 public:
  FiberFamily(IndicatorSet A, std::vector<std::optional<AffineSubspace>> fibers);

  int p() const { return A_.p(); }
  int n() const { return A_.dim(); }
  const IndicatorSet& A() const { return A_; }
  /// u_x + V_x for x in A.
  const AffineSubspace& fiber(Index x) const;
  bool contains(Index x, Index y) const;

  /// The set on F_p^n x F_p^n.
  IndicatorSet set() const;
  std::uint64_t cardinality() const;
  /// The codimension shared by every fiber, if there is one.
  std::optional<int> uniform_codim() const;

 private:
  IndicatorSet A_;
  std::vector<std::optional<AffineSubspace>> fibers_;
  IndexSpace space_;
};

enum class PhiGenerator { phi_map, explicit_normals, full };
std::string to_string(PhiGenerator g);

/// Phi = {(x, y) : x in A, y in u + V_x} with every V_x of codimension d.
class PhiDescriptor {
 public:
  int p() const { return family_.p(); }
  int n() const { return family_.n(); }
  int d() const { return d_; }
  const GroupVector& u() const { return u_; }
  const IndicatorSet& A() const { return family_.A(); }
  PhiGenerator generator() const { return gen_; }
  const FiberFamily& family() const { return family_; }

  /// Normals of V_x in reduced echelon form.
  const std::vector<GroupVector>& normals(Index x) const { return family_.fiber(x).normals(); }
  bool contains(Index x, Index y) const { return family_.contains(x, y); }
  IndicatorSet set() const { return family_.set(); }
  /// rho = p^{-d}.
  double rho() const;
  /// alpha p^{-d}, exact as |A| p^{n-d} / p^{2n}.
  double density() const;

 private:
  friend PhiDescriptor build_phi_full(const IndicatorSet& A);
  friend PhiDescriptor build_phi_map(const IndicatorSet& A, const std::vector<Index>& phi, const GroupVector& u);
  friend PhiDescriptor build_phi_normals(const IndicatorSet& A, const std::vector<std::vector<GroupVector>>& normals,
                                         const GroupVector& u, int d);
  PhiDescriptor(FiberFamily family, GroupVector u, int d, PhiGenerator gen)
      : family_(std::move(family)), u_(std::move(u)), d_(d), gen_(gen) {}

  FiberFamily family_;
  GroupVector u_;
  int d_;
  PhiGenerator gen_;
};

/// d = 0: Phi = A x F_p^n.
PhiDescriptor build_phi_full(const IndicatorSet& A);
/// d = 1: V_x = phi(x)^perp, phi(x) given by index; phi(x) = 0 is rejected.
PhiDescriptor build_phi_map(const IndicatorSet& A, const std::vector<Index>& phi, const GroupVector& u);
/// normals[x] must hold d independent vectors for every x in A.
PhiDescriptor build_phi_normals(const IndicatorSet& A, const std::vector<std::vector<GroupVector>>& normals,
                                const GroupVector& u, int d);

// Phi files: header "p=<p> n=<n> d=<d> u=<digits>", then one line per x in A,
// "x : normal_1 ; ... ; normal_d" with normals as comma-separated digits
// (d = 0 lines are just "x :").
void write_phi(std::ostream& os, const PhiDescriptor& phi);
PhiDescriptor read_phi(std::istream& is);

/// T = {(x, y) : B(y) C(x+y) D(2x+y) Phi(x, y) = 1}.
struct TDescriptor {
  IndicatorSet A, B, C, D;
  PhiDescriptor phi;
  IndicatorSet T;

  double alpha() const { return A.density(); }
  double beta() const { return B.density(); }
  double gamma() const { return C.density(); }
  double delta() const { return D.density(); }
  double rho() const { return phi.rho(); }
  double product_density() const;
};

/// Builds T and asserts it equals the product of its lifted factors.
TDescriptor build_T(const IndicatorSet& B, const IndicatorSet& C, const IndicatorSet& D, const PhiDescriptor& phi);

struct FiberFamilyStats {
  std::string name;
  double expected = 0.0;
  /// Density of each relevant fiber, in index order of the fiber label.
  std::vector<double> densities;
  double mean = 0.0;
  double deviating_proportion = 0.0;
  /// eps^{1/8} / (eps'^2 * base density), the shape of the fiber-size bound.
  double bound_shape = 0.0;
};

struct FiberStatsReport {
  double eps_prime = 0.0;
  /// max of the factor and Phi deviations feeding the bound shape.
  double measured_eps = 0.0;
  FiberFamilyStats families[4];
};

/// Row, column, anti-diagonal and 2x+y line fibers of T over A, B, C, D.
/// `uniformity_s` is the U^s used for the factor deviations (0 skips them).
FiberStatsReport fiber_stats(const TDescriptor& t, double eps_prime, int uniformity_s = 5,
                             const ResourceLimits& limits = {});

struct PhiLevel {
  int i = 0;
  IndicatorSet at_most;
  IndicatorSet exactly;
};

/// Level of each x in the cell's first factor: codim of V_x cap V in V when
/// (u_x + V_x) meets the second factor, else -1.
std::vector<int> phi_cell_levels(const FiberFamily& phi, const Cell& cell);
/// Phi^{<=i} and Phi^i for i = 0..d restricted to the cell.
std::vector<PhiLevel> phi_levels(const PhiDescriptor& phi, const Cell& cell);

struct TransferReport {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = true;
};

/// ||A - alpha||_{U^s} against rho^{-1} ||Phi - alpha rho||_{U^s} on F_p^{2n}.
TransferReport phi_uniformity_transfer_check(const PhiDescriptor& phi, int s, const ResourceLimits& limits = {},
                                             double slack = 1e-9);

struct SampledProportion {
  double proportion = 0.0;
  bool exact = true;
  std::uint64_t samples = 0;
  std::uint64_t admissible = 0;
  std::uint64_t seed = 0;
  double standard_error = 0.0;
};

/// Proportion of admissible (x, h_1..h_s), i.e. with all 2^s corners in A,
/// on which the s-fold additive difference of phi vanishes. Enumerates when
/// the work fits `limits`, otherwise samples (unless force_exact).
SampledProportion approx_poly_proportion(const IndicatorSet& A, const std::vector<Index>& phi, int s,
                                         const ResourceLimits& limits = {}, std::uint64_t seed = 1,
                                         std::uint64_t samples = 200000, bool force_exact = false);

/// Expected proportion for a uniformly random map on full A: tuples with
/// some h_i = 0 always vanish, the rest vanish with probability p^{-n}.
double random_map_expected_proportion(int p, int n, int s);

/// Proportion of (2s+2)-dimensional parallelepipeds in A on which every
/// (2s+1)-dimensional face derivative of phi vanishes.
SampledProportion face_derivative_statistic(const IndicatorSet& A, const std::vector<Index>& phi, int s,
                                            const ResourceLimits& limits = {}, std::uint64_t seed = 1,
                                            std::uint64_t samples = 200000, bool force_exact = false);

struct IntersectionReport {
  std::uint64_t admissible = 0;
  std::uint64_t degenerate = 0;
  double proportion = 0.0;
  int expected_codim = 0;
};

/// Proportion of tuples with every psi_i(x) in A for which
/// {y : prod_i Phi(psi_i(x), y + w_i) = 1} does not have codimension r d
/// (an empty intersection counts as codimension n).
IntersectionReport intersection_codim_statistic(const PhiDescriptor& phi, const LinearFormSystem& sys,
                                                const std::vector<GroupVector>& shifts,
                                                const ResourceLimits& limits = {});

}  // namespace lshape
