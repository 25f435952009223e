#pragma once

#include <vector>

#include "lshape/group.hpp"

namespace lshape {

/// A product coset (u + V) x (w + V) in F_p^n x F_p^n. The offsets are kept
/// as canonical coset representatives, so equal cells compare equal.
class Cell {
 public:
  Cell(const AffineSubspace& linear, const GroupVector& u, const GroupVector& w);
  static Cell full(int p, int n);

  int p() const { return V_.p(); }
  int n() const { return V_.ambient_dim(); }
  int dim() const { return V_.dim(); }
  int codim() const { return V_.codim(); }
  /// p^{2 dim V}.
  Index size() const;

  const AffineSubspace& linear() const { return V_; }
  const GroupVector& u() const { return u_; }
  const GroupVector& w() const { return w_; }
  const AffineSubspace& first() const { return first_; }
  const AffineSubspace& second() const { return second_; }

  bool contains(Index x, Index y) const;
  /// Pair indices x + N y of all members, x-major within each y.
  std::vector<Index> members() const;

  friend bool operator==(const Cell& a, const Cell& b) {
    return a.V_.normals() == b.V_.normals() && a.u_ == b.u_ && a.w_ == b.w_;
  }

 private:
  AffineSubspace V_;
  GroupVector u_;
  GroupVector w_;
  AffineSubspace first_;
  AffineSubspace second_;
  IndexSpace space_;
};

}  // namespace lshape
