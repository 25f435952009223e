#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lshape/function_table.hpp"
#include "lshape/group.hpp"

namespace lshape {

/// d linear forms in r variables over F_p. A form has one or more output
/// blocks; each block is a coefficient row of length r, so a form with k
/// blocks maps (F_p^n)^r to F_p^{kn} (blocks stored low to high, matching
/// the pair encoding). Most systems are scalar (one block per form).
class LinearFormSystem {
 public:
  using Row = std::vector<Residue>;

  LinearFormSystem(int p, int r, std::vector<Row> forms);
  static LinearFormSystem with_blocks(int p, int r, std::vector<std::vector<Row>> forms);

  int p() const { return p_; }
  int variables() const { return r_; }
  int size() const { return static_cast<int>(forms_.size()); }
  int blocks() const { return blocks_; }
  bool scalar() const { return blocks_ == 1; }

  /// Coefficient row of a scalar form.
  const Row& form(int j) const;
  const std::vector<Row>& form_blocks(int j) const { return forms_[static_cast<std::size_t>(j)]; }

  /// Image of the variable tuple under form j, as an index of F_p^{blocks n}.
  Index image(int j, std::span<const Index> vars, const IndexSpace& space) const;

  /// Forms with duplicates removed; `groups[k]` lists the original indices
  /// of the k-th distinct form.
  LinearFormSystem distinct(std::vector<std::vector<int>>* groups = nullptr) const;
  bool has_duplicates() const;

  /// (x, y, z) -> (x, y), (x, y + z), (x + z, y).
  static LinearFormSystem corners(int p);
  /// (x, y, z) -> (x, y), (x, y + z), (x, y + 2z), (x + z, y).
  static LinearFormSystem l_shapes(int p);
  /// The corner pattern seen through (x, y) -> y - x: three scalar forms
  /// y - x, y - x + z, y - x - z in the variables (x, y, z).
  static LinearFormSystem corner_shadow(int p);
  /// x, x + y, ..., x + (k-1) y.
  static LinearFormSystem progression(int p, int k);

  std::string describe() const;

 private:
  LinearFormSystem() = default;
  void validate();

  int p_ = 3;
  int r_ = 0;
  int blocks_ = 1;
  std::vector<std::vector<Row>> forms_;
};

/// E over (F_p^n)^r of prod_j f_j(psi_j(x_1..x_r)); tables[j] lives on
/// F_p^{blocks n}.
Complex system_average(const LinearFormSystem& sys, const std::vector<FunctionTable>& tables,
                       const ResourceLimits& limits = {});
/// Exact number of tuples with every image in the corresponding set.
std::uint64_t system_count(const LinearFormSystem& sys, const std::vector<IndicatorSet>& sets,
                           const ResourceLimits& limits = {});

struct ComplexityCertificate {
  bool infinite = false;
  int s = 0;
  /// Indices (into the original system) of the distinct forms searched.
  std::vector<int> representatives;
  /// For each representative j, the classes of the other distinct forms.
  std::vector<std::vector<std::vector<int>>> partitions;
  /// Two distinct parallel forms witnessing infinite complexity.
  std::optional<std::pair<int, int>> parallel;
};

/// Smallest s such that every form avoids the spans of some partition of
/// the others into at most s + 1 classes. Scalar systems only; duplicates
/// are treated as one form.
ComplexityCertificate cs_complexity(const LinearFormSystem& sys, int max_forms = 12);
/// Independent rank checks on every class of the certificate.
bool verify_certificate(const LinearFormSystem& sys, const ComplexityCertificate& cert);

struct GvnReport {
  int complexity = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  std::vector<double> norms;
  bool holds = true;
};

/// |E prod f_j(psi_j)| against min over distinct forms of the U^{s+1} norm
/// of the product of the functions sharing that form.
GvnReport gvn_check(const LinearFormSystem& sys, const std::vector<FunctionTable>& fs, int s,
                    const ResourceLimits& limits = {}, double slack = 1e-9);

struct UsUniformityReport {
  int complexity = 0;
  std::vector<Complex> means;
  std::vector<double> deviations;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = true;
};

/// |E prod f_j(psi_j) - prod alpha_j| against d max_j ||f_j - alpha_j||_{U^{s+1}}.
UsUniformityReport usuniformity_check(const LinearFormSystem& sys, const std::vector<FunctionTable>& fs, int s,
                                      const ResourceLimits& limits = {}, double slack = 1e-9);

struct Cs2Factor {
  FunctionTable f;
  Slot slot = Slot::y;
};

struct Cs2Report {
  int complexity = 0;
  bool complexity_ok = true;
  std::vector<double> factor_deviations;
  double threshold = 0.0;
  double proportion = 0.0;
  double sqrt_eps = 0.0;
};

/// Proportion of x with ||F(x, .) - prod beta_j||_{U^2} >= eps^{1/8}, where
/// F(x, y) = prod_j f_j(slot_j(x, y)).
Cs2Report cs2_statistic(const std::vector<Cs2Factor>& factors, int s, double eps, const ResourceLimits& limits = {});

/// The multiset of forms in (x, y, h, k) built from the slots of F.
LinearFormSystem cs2_form_system(int p, const std::vector<Slot>& slots);

}  // namespace lshape
