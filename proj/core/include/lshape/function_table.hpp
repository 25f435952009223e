#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lshape/group.hpp"

namespace lshape {

using Complex = std::complex<double>;

enum class TableKind { complex, real, indicator };

/// Error while reading a set, function, or descriptor file; carries the
/// 1-based line number of the offending line.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

/// Sum in index-ascending pairwise order; deterministic run to run.
Complex pairwise_sum(std::span<const Complex> values);
double pairwise_sum(std::span<const double> values);

/// Dense function F_p^m -> C indexed by canonical encoding.
class FunctionTable {
 public:
  FunctionTable(int p, int m, std::vector<Complex> values, TableKind kind = TableKind::complex,
                const ResourceLimits& limits = {});

  static FunctionTable constant(int p, int m, Complex c, const ResourceLimits& limits = {});
  static FunctionTable zeros(int p, int m, const ResourceLimits& limits = {});
  static FunctionTable from_index_fn(int p, int m, const std::function<Complex(Index)>& fn,
                                     TableKind kind = TableKind::complex,
                                     const ResourceLimits& limits = {});
  /// x -> e_p(xi . x).
  static FunctionTable character(const GroupVector& xi);

  int p() const { return p_; }
  int dim() const { return m_; }
  Index size() const { return static_cast<Index>(values_.size()); }
  TableKind kind() const { return kind_; }
  IndexSpace space() const { return IndexSpace(p_, m_); }

  std::span<const Complex> values() const { return values_; }
  Complex operator[](Index i) const { return values_[i]; }
  Complex at(const GroupVector& x) const { return values_.at(x.index()); }

  bool is_one_bounded(double tol = 1e-12) const;
  bool is_real(double tol = 0.0) const;
  Complex mean() const;
  double max_modulus() const;

  FunctionTable conj() const;
  FunctionTable operator*(const FunctionTable& other) const;
  FunctionTable operator+(const FunctionTable& other) const;
  FunctionTable operator-(const FunctionTable& other) const;
  FunctionTable operator-(Complex c) const;
  FunctionTable scaled(Complex c) const;

  friend bool operator==(const FunctionTable&, const FunctionTable&) = default;

 private:
  void require_compatible(const FunctionTable& other, const char* op) const;

  int p_;
  int m_;
  TableKind kind_;
  std::vector<Complex> values_;
};

/// A subset of F_p^m with exact cardinality.
class IndicatorSet {
 public:
  IndicatorSet(int p, int m, std::vector<std::uint8_t> membership, const ResourceLimits& limits = {});

  static IndicatorSet empty(int p, int m);
  static IndicatorSet full(int p, int m);
  static IndicatorSet from_indices(int p, int m, std::span<const Index> elements);
  static IndicatorSet from_predicate(int p, int m, const std::function<bool(Index)>& pred);
  static IndicatorSet from_subspace(const AffineSubspace& coset);

  int p() const { return p_; }
  int dim() const { return m_; }
  Index size() const { return static_cast<Index>(member_.size()); }
  bool contains(Index i) const { return member_[i] != 0; }
  std::uint64_t cardinality() const { return cardinality_; }
  double density() const;
  std::vector<Index> elements() const;
  std::span<const std::uint8_t> membership() const { return member_; }

  FunctionTable table() const;

  IndicatorSet intersect(const IndicatorSet& other) const;
  IndicatorSet unite(const IndicatorSet& other) const;
  IndicatorSet minus(const IndicatorSet& other) const;
  IndicatorSet complement() const;
  bool subset_of(const IndicatorSet& other) const;

  friend bool operator==(const IndicatorSet& a, const IndicatorSet& b) {
    return a.p_ == b.p_ && a.m_ == b.m_ && a.member_ == b.member_;
  }

 private:
  void require_compatible(const IndicatorSet& other) const;

  int p_;
  int m_;
  std::vector<std::uint8_t> member_;
  std::uint64_t cardinality_ = 0;
};

/// g_S = S - mu(S).
FunctionTable balanced(const IndicatorSet& s);

/// Pulls f back through the coset parameterisation to a table on
/// F_p^{dim(coset)}.
FunctionTable restrict(const FunctionTable& f, const AffineSubspace& coset);
IndicatorSet restrict(const IndicatorSet& s, const AffineSubspace& coset);

/// x -> f(x - h).
FunctionTable translate(const FunctionTable& f, const GroupVector& h);

/// The four linear slots through which a function on F_p^n is lifted to
/// F_p^n x F_p^n.
enum class Slot { y, x_plus_y, two_x_plus_y, x };

std::string to_string(Slot slot);
Slot slot_from_string(const std::string& name);
/// (a, b) with slot(x, y) = a x + b y.
std::pair<Residue, Residue> slot_coefficients(Slot slot);

/// (x, y) -> a(slot(x, y)) as a table on F_p^{2n}.
FunctionTable product_lift(const FunctionTable& a, Slot slot, const ResourceLimits& limits = {});
IndicatorSet product_lift(const IndicatorSet& a, Slot slot, const ResourceLimits& limits = {});

/// Index of (x, y) in F_p^{2n}.
inline Index pair_index(Index x, Index y, Index n_size) { return x + n_size * y; }

// Set files: header "p=<p> m=<m>", then one element per line as a decimal
// canonical index or comma-separated digits. Blank lines and lines starting
// with '#' are ignored. The writer emits sorted canonical indices, so
// write(read(write(S))) is byte-identical to write(S).
void write_set(std::ostream& os, const IndicatorSet& s);
IndicatorSet read_set(std::istream& is, const ResourceLimits& limits = {});

// Function files: header "p=<p> m=<m> kind=function", then p^m lines
// "<re> <im>" in index order.
void write_function(std::ostream& os, const FunctionTable& f);
FunctionTable read_function(std::istream& is, const ResourceLimits& limits = {});

/// Reads either a set file or a function file, returning a table.
FunctionTable read_table(std::istream& is, const ResourceLimits& limits = {});

}  // namespace lshape
