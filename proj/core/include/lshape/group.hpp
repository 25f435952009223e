#pragma once

// Exact arithmetic and subspace geometry over F_p^m.
//
// Every table in the library is keyed by the little-endian base-p encoding
//   index(x) = x_0 + x_1 p + ... + x_{m-1} p^{m-1}.
// Functions on F_p^n x F_p^n live on F_p^{2n} with x in the low n digits and
// y in the high n digits, so index(x, y) = index(x) + p^n index(y).

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lshape {

using Residue = std::int64_t;
using Index = std::uint64_t;

/// Thrown when an estimated table size or operation count exceeds the
/// configured resource caps.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ResourceLimits {
  Index max_table_entries = Index{1} << 24;
  double max_operations = 4.0e9;

  void check_entries(Index entries, const char* what) const;
  void check_operations(double ops, const char* what) const;
};

bool is_prime(std::int64_t value);

/// Prime field F_p for an odd prime p. In strict mode p >= 11 is required;
/// otherwise small primes are accepted with a one-time warning.
class PrimeField {
 public:
  explicit PrimeField(int p, bool strict_mode = false);

  int p() const { return p_; }
  bool strict_mode() const { return strict_; }

  Residue reduce(std::int64_t v) const {
    Residue r = v % p_;
    return r < 0 ? r + p_ : r;
  }
  Residue add(Residue a, Residue b) const { return reduce(a + b); }
  Residue sub(Residue a, Residue b) const { return reduce(a - b); }
  Residue mul(Residue a, Residue b) const { return reduce(a * b); }
  Residue neg(Residue a) const { return reduce(-a); }
  Residue inverse_of_two() const { return inv2_; }
  /// Multiplicative inverse by Fermat exponentiation; a must be nonzero.
  Residue inverse(Residue a) const;

 private:
  int p_;
  bool strict_;
  Residue inv2_;
};

/// Index arithmetic for F_p^m without materialising digit vectors.
class IndexSpace {
 public:
  IndexSpace(int p, int m);

  int p() const { return p_; }
  int dim() const { return m_; }
  Index size() const { return size_; }
  Index power(int i) const { return pow_[static_cast<std::size_t>(i)]; }

  Residue digit(Index idx, int i) const {
    return static_cast<Residue>((idx / pow_[static_cast<std::size_t>(i)]) % static_cast<Index>(p_));
  }
  void digits(Index idx, std::span<Residue> out) const;
  Index encode(std::span<const Residue> digits) const;

  /// a * i + b * j digitwise mod p.
  Index combine(Residue a, Index i, Residue b, Index j) const;
  Index add(Index i, Index j) const { return combine(1, i, 1, j); }
  Index sub(Index i, Index j) const { return combine(1, i, p_ - 1, j); }
  Index scale(Residue a, Index i) const { return combine(a, i, 0, 0); }
  Residue dot(Index i, Index j) const;

 private:
  int p_;
  int m_;
  Index size_;
  std::vector<Index> pow_;
};

/// An element of F_p^m, stored as its digit vector.
class GroupVector {
 public:
  GroupVector() = default;
  GroupVector(int p, std::vector<Residue> digits);

  static GroupVector zero(int p, int m);
  static GroupVector from_index(int p, int m, Index index);
  static GroupVector unit(int p, int m, int axis);

  int p() const { return p_; }
  int dim() const { return static_cast<int>(digits_.size()); }
  std::span<const Residue> digits() const { return digits_; }
  Residue operator[](int i) const { return digits_[static_cast<std::size_t>(i)]; }
  Index index() const;
  bool is_zero() const;

  friend bool operator==(const GroupVector&, const GroupVector&) = default;

 private:
  int p_ = 3;
  std::vector<Residue> digits_;
};

GroupVector vec_add(const GroupVector& a, const GroupVector& b);
GroupVector vec_sub(const GroupVector& a, const GroupVector& b);
GroupVector vec_scale(Residue c, const GroupVector& a);
GroupVector vec_neg(const GroupVector& a);
Residue dot(const GroupVector& a, const GroupVector& b);
/// Concatenation (x, y) in F_p^{m1 + m2}.
GroupVector vec_concat(const GroupVector& x, const GroupVector& y);
std::string to_string(const GroupVector& v);

/// Row-reduction over F_p. Returns the rank; `rows` is left in reduced row
/// echelon form with zero rows removed, and `pivots` lists pivot columns.
int row_reduce(const PrimeField& field, std::vector<std::vector<Residue>>& rows,
               std::vector<int>* pivots = nullptr);
int rank_of(const PrimeField& field, std::vector<std::vector<Residue>> rows);
/// True when `v` lies in the row span of `rows`.
bool in_span(const PrimeField& field, const std::vector<std::vector<Residue>>& rows,
             const std::vector<Residue>& v);

/// A coset {x : normals[j] . x = offsets[j] for all j} of F_p^m, or the
/// explicitly flagged empty set when the system is inconsistent.
///
/// Normals are kept in reduced row echelon form. Members are parameterised by
/// the free (non-pivot) coordinates in ascending order; `point(t)` maps a
/// parameter index t in [0, p^dim) to the member whose free coordinates are
/// the digits of t, so enumeration order is ascending parameter index.
class AffineSubspace {
 public:
  static AffineSubspace full(int p, int m);
  static AffineSubspace from_normals(int p, int m, std::vector<GroupVector> normals,
                                     std::vector<Residue> offsets);
  /// Coset w + V where V = {x : normals . x = 0}.
  static AffineSubspace coset(int p, int m, const std::vector<GroupVector>& normals,
                              const GroupVector& w);

  int p() const { return p_; }
  int ambient_dim() const { return m_; }
  bool empty() const { return empty_; }
  int codim() const { return static_cast<int>(normals_.size()); }
  int dim() const { return m_ - codim(); }
  Index size() const;

  const std::vector<GroupVector>& normals() const { return normals_; }
  const std::vector<Residue>& offsets() const { return offsets_; }
  const std::vector<int>& free_columns() const { return free_; }
  const std::vector<int>& pivot_columns() const { return pivots_; }

  bool contains(const GroupVector& x) const;
  bool contains_index(const IndexSpace& space, Index x) const;

  /// Member with parameter index t; t = 0 gives the canonical representative.
  GroupVector point(Index t) const;
  Index point_index(Index t) const;
  /// Inverse of point_index for members.
  Index parameter_of(Index member) const;
  /// Direction basis of the underlying linear subspace, one vector per free
  /// column: e_f minus the pivot entries of column f.
  std::vector<GroupVector> basis() const;
  std::vector<Index> member_indices() const;
  std::vector<GroupVector> enumerate() const;

  /// The linear subspace V underlying this coset (offsets zeroed).
  AffineSubspace linear_part() const;
  /// Lift a character of the parameter space F_p^dim to an ambient functional
  /// whose restriction to the coset direction agrees with it.
  GroupVector lift_character(const GroupVector& eta) const;

 private:
  AffineSubspace(int p, int m) : p_(p), m_(m), space_(p, m) {}

  int p_;
  int m_;
  IndexSpace space_;
  bool empty_ = false;
  std::vector<GroupVector> normals_;
  std::vector<Residue> offsets_;
  std::vector<int> pivots_;
  std::vector<int> free_;
};

/// Enumerates the cosets of `sub` inside `super` where sub <= super are linear
/// subspaces; returns one canonical representative per coset.
std::vector<GroupVector> coset_representatives(const AffineSubspace& super,
                                               const AffineSubspace& sub);

/// A k x m matrix over F_p acting on column vectors.
class LinearMap {
 public:
  LinearMap(int p, std::vector<std::vector<Residue>> matrix, int cols);
  static LinearMap identity(int p, int m);

  int rows() const { return static_cast<int>(matrix_.size()); }
  int cols() const { return cols_; }
  int p() const { return p_; }
  const std::vector<std::vector<Residue>>& matrix() const { return matrix_; }

  GroupVector apply(const GroupVector& v) const;
  /// (this o other)(v) = this(other(v)).
  LinearMap compose(const LinearMap& other) const;
  bool invertible() const;

  friend bool operator==(const LinearMap&, const LinearMap&) = default;

 private:
  int p_;
  int cols_;
  std::vector<std::vector<Residue>> matrix_;
};

}  // namespace lshape
