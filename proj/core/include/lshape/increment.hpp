#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lshape/cell.hpp"
#include "lshape/function_table.hpp"
#include "lshape/structured_sets.hpp"

namespace lshape {

/// Cells (u + V) x (w + V) that partition F_p^n x F_p^n.
class ProductCosetPartition {
 public:
  /// Audits that the cells are disjoint and cover the space.
  ProductCosetPartition(int p, int n, std::vector<Cell> cells);
  static ProductCosetPartition trivial(int p, int n);

  int p() const { return p_; }
  int n() const { return n_; }
  std::size_t size() const { return cells_.size(); }
  const std::vector<Cell>& cells() const { return cells_; }
  const Cell& cell(std::size_t i) const { return cells_.at(i); }

  /// True when every cell of *this lies inside a cell of `coarse`.
  bool refines(const ProductCosetPartition& coarse) const;

 private:
  int p_;
  int n_;
  std::vector<Cell> cells_;
};

/// Restricted densities of one cell.
struct CellStats {
  double mass = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double delta = 0.0;
  /// phi^{<=i}(C) = |Phi^{<=i} cap C| / |V|^2 for i = 0..d.
  std::vector<double> phi_le;
  std::uint64_t t_count = 0;
};

CellStats cell_stats(const Cell& cell, const TDescriptor& t);

struct EnergyBreakdown {
  double total = 0.0;
  /// sum_C beta^2 mu, gamma^2 mu, delta^2 mu, and sum_i phi_i^2 mu.
  double sums[4] = {0.0, 0.0, 0.0, 0.0};
};

EnergyBreakdown energy_breakdown(const ProductCosetPartition& partition, const TDescriptor& t);
double energy(const ProductCosetPartition& partition, const TDescriptor& t);

enum class RefineSlot { first, second, mixed };

/// Replaces cell `index` by the products of cosets of V cap xi^perp inside
/// its two factors. For `mixed`, xi lives on F_p^{2n} and both halves cut V.
ProductCosetPartition refine_on_character(const ProductCosetPartition& partition, std::size_t index,
                                          const GroupVector& xi, RefineSlot slot = RefineSlot::second);
/// Same, cutting V by every xi given (each in F_p^n).
ProductCosetPartition refine_on_characters(const ProductCosetPartition& partition, std::size_t index,
                                           const std::vector<GroupVector>& xis);

struct MonotoneReport {
  EnergyBreakdown coarse;
  EnergyBreakdown fine;
  bool holds = true;
};

/// Each of the four energy sums does not drop from `coarse` to `fine`.
MonotoneReport energy_monotone_check(const ProductCosetPartition& coarse, const ProductCosetPartition& fine,
                                     const TDescriptor& t, double slack = 1e-9);

struct CellStatus {
  bool expired = false;
  bool uniform = true;
  /// U^2 deviations of B, C, D on their cosets, then of Phi^{<=i} on the cell.
  std::vector<double> deviations;
  /// Characters to refine on when the cell is not uniform (empty otherwise).
  std::vector<GroupVector> refine_on;
};

CellStatus classify_cell(const Cell& cell, const TDescriptor& t, double eps, double tau);

struct PseudorandomRound {
  int round = 0;
  double energy_before = 0.0;
  double energy_after = 0.0;
  double refined_mass = 0.0;
  double bad_t_mass = 0.0;
  std::size_t refined_cells = 0;
  /// eps^4 * refined_mass / (4 + d), the guaranteed gain.
  double guaranteed_gain = 0.0;
};

struct PseudorandomizeResult {
  explicit PseudorandomizeResult(ProductCosetPartition start) : partition(std::move(start)) {}

  ProductCosetPartition partition;
  std::vector<PseudorandomRound> rounds;
  double final_energy = 0.0;
  double round_bound = 0.0;
  double final_bad_t_mass = 0.0;
  /// True when non-uniform mass remained but no cell could be refined.
  bool exhausted = false;
  std::optional<std::size_t> cell;
  int level = -1;
  double ratio = 0.0;
  double sigma = 0.0;
  double target = 0.0;
  bool reached = false;
};

/// Refines the trivial partition until the non-expired, non-uniform part of
/// T has mass below tau mu(T) / 2, then picks the uniform cell and level i
/// maximizing the density of S on T cap cell cap Phi^i. Only cells with
/// dim V >= min_cell_dim are eligible for the selection.
PseudorandomizeResult pseudorandomize_u2(const TDescriptor& t, const IndicatorSet& s, double eps, double tau,
                                         int min_cell_dim = 0);

struct IncrementReport {
  std::string tool;
  std::string statistic;
  bool triggered = false;
  bool success = false;
  double before = 0.0;
  double after = 0.0;
  double gain = 0.0;
  double statistic_value = 0.0;
  double threshold = 0.0;
  /// Which of A, B, C, D was replaced.
  char replaced = 0;
  std::optional<IndicatorSet> subset;
  std::optional<TDescriptor> t_prime;
  std::uint64_t s_count = 0;
  std::uint64_t t_count = 0;
};

/// mu_T(S) with S a subset of T.
double relative_density(const IndicatorSet& s, const IndicatorSet& t);

/// Splits A, B or C along the degree-1 statistic that triggers.
IncrementReport deg1_increment(const IndicatorSet& s, const TDescriptor& t, double tau);
/// Splits D along the means of g_S on the lines 2x + y = w.
IncrementReport star3_fiber_split(const IndicatorSet& s, const TDescriptor& t, double tau);
/// Recounts |S cap T'| and |T'| pointwise from the factors of t_prime.
bool verify_increment(const IncrementReport& report, const IndicatorSet& s, double tol = 1e-12);

/// T with one factor replaced; Phi is cut down to the new A.
TDescriptor replace_factor(const TDescriptor& t, char which, const IndicatorSet& replacement);

struct AlignReport {
  explicit AlignReport(IndicatorSet a) : A_u(std::move(a)) {}

  bool success = false;
  GroupVector u;
  IndicatorSet A_u;
  double before = 0.0;
  double after = 0.0;
  double gain = 0.0;
  double alpha = 0.0;
  double rho = 0.0;
  double mass_floor = 0.0;
  /// sum_u |A_u| and |A| p^{n-d}; equal exactly.
  std::uint64_t identity_lhs = 0;
  std::uint64_t identity_rhs = 0;
  std::uint64_t s_count = 0;
  std::uint64_t t_count = 0;
  /// max_x |E_y K(x,y) - kappa| and max over cosets H of V_x of
  /// |E_y K(x,y) H(y) - kappa rho|.
  double kappa = 0.0;
  double row_deviation = 0.0;
  double coset_deviation = 0.0;
};

/// Picks the common offset u maximizing the density of S on K cap Psi_u
/// among u with mu(A_u) >= tau alpha rho / 2.
AlignReport align_translate(const FiberFamily& psi, const IndicatorSet& K, const IndicatorSet& s, double tau);

enum class SearchMethod { exhaustive, greedy, local, random };
std::string to_string(SearchMethod m);
SearchMethod search_method_from_string(const std::string& name);

struct ExtremalResult {
  explicit ExtremalResult(IndicatorSet b) : best(std::move(b)) {}

  IndicatorSet best;
  SearchMethod method = SearchMethod::exhaustive;
  bool exact = false;
  bool budget_exceeded = false;
  bool verified = false;
  std::uint64_t nodes = 0;
};

/// Largest L-free subset found of F_p^n x F_p^n. The exhaustive method is
/// exact and limited to p^{2n} <= 25.
ExtremalResult search_extremal_L_free(int p, int n, SearchMethod method, std::uint64_t budget, std::uint64_t seed);

/// Greedy L-free subset of `candidates`, visiting points in a seeded order.
IndicatorSet greedy_L_free(const IndicatorSet& candidates, std::uint64_t seed);

struct DriverConfig {
  double eps = 0.1;
  double tau = 0.1;
  double gain_floor = 1e-9;
  int max_steps = 32;
};

struct TrajectoryStep {
  int step = 0;
  std::string tool;
  double sigma_before = 0.0;
  double sigma_after = 0.0;
  double gain = 0.0;
  int n = 0;
  int d = 0;
  std::uint64_t s_count = 0;
  std::uint64_t t_count = 0;
  std::string witness;
};

struct Trajectory {
  std::vector<TrajectoryStep> steps;
  std::string halt_reason;
};

/// Restriction of (S, T) to a cell and level, in the cell's coordinates.
struct CellRestriction {
  int n = 0;
  IndicatorSet A, B, C, D;
  FiberFamily psi;
  IndicatorSet K;
  IndicatorSet S;
};

CellRestriction restrict_to_cell(const TDescriptor& t, const IndicatorSet& s, const Cell& cell, int level);

/// Alternates pseudorandomization, realignment and the degree-1 and star-3
/// splits, starting from T = everything.
Trajectory increment_driver(const IndicatorSet& s0, const DriverConfig& config);

/// T = F_p^n x F_p^n (A = B = C = D = everything, d = 0).
TDescriptor full_T(int p, int n);

enum class PlantedKind { half_A, half_D };
std::string to_string(PlantedKind k);
PlantedKind planted_kind_from_string(const std::string& name);

/// T cap (A_half x F_p^n) for half_A, T cap {2x + y in D_half} for half_D;
/// the half is a seeded choice of ceil(|A|/2) or ceil(|D|/2) labels.
IndicatorSet planted_set(PlantedKind kind, const TDescriptor& t, std::uint64_t seed);
/// Greedy L-free subset of the planted set on T = everything.
IndicatorSet planted_instance(PlantedKind kind, int p, int n, std::uint64_t seed);

}  // namespace lshape
