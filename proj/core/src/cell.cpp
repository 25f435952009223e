#include "lshape/cell.hpp"

#include <stdexcept>

namespace lshape {

Cell::Cell(const AffineSubspace& linear, const GroupVector& u, const GroupVector& w)
    : V_(linear.linear_part()),
      u_(AffineSubspace::coset(linear.p(), linear.ambient_dim(), linear.normals(), u).point(0)),
      w_(AffineSubspace::coset(linear.p(), linear.ambient_dim(), linear.normals(), w).point(0)),
      first_(AffineSubspace::coset(linear.p(), linear.ambient_dim(), linear.normals(), u)),
      second_(AffineSubspace::coset(linear.p(), linear.ambient_dim(), linear.normals(), w)),
      space_(linear.p(), linear.ambient_dim()) {
  if (u.dim() != linear.ambient_dim() || w.dim() != linear.ambient_dim()) {
    throw std::invalid_argument("Cell: offset dimension mismatch");
  }
}

Cell Cell::full(int p, int n) {
  return Cell(AffineSubspace::full(p, n), GroupVector::zero(p, n), GroupVector::zero(p, n));
}

Index Cell::size() const { return first_.size() * second_.size(); }

bool Cell::contains(Index x, Index y) const {
  return first_.contains_index(space_, x) && second_.contains_index(space_, y);
}

std::vector<Index> Cell::members() const {
  const Index N = space_.size();
  const auto xs = first_.member_indices();
  const auto ys = second_.member_indices();
  std::vector<Index> out;
  out.reserve(xs.size() * ys.size());
  for (Index y : ys) {
    for (Index x : xs) out.push_back(x + N * y);
  }
  return out;
}

}  // namespace lshape
