#include "lshape/group.hpp"

#include <algorithm>
#include <mutex>
#include <set>
#include <sstream>

#include "lshape/diagnostics.hpp"

namespace lshape {

void ResourceLimits::check_entries(Index entries, const char* what) const {
  if (entries > max_table_entries) {
    std::ostringstream os;
    os << what << ": " << entries << " table entries exceeds cap " << max_table_entries;
    throw ResourceError(os.str());
  }
}

void ResourceLimits::check_operations(double ops, const char* what) const {
  if (ops > max_operations) {
    std::ostringstream os;
    os << what << ": estimated " << ops << " operations exceeds cap " << max_operations;
    throw ResourceError(os.str());
  }
}

bool is_prime(std::int64_t value) {
  if (value < 2) return false;
  for (std::int64_t d = 2; d * d <= value; ++d) {
    if (value % d == 0) return false;
  }
  return true;
}

PrimeField::PrimeField(int p, bool strict_mode) : p_(p), strict_(strict_mode) {
  if (!is_prime(p) || p == 2) {
    throw std::invalid_argument("p must be an odd prime, got " + std::to_string(p));
  }
  if (p < 11) {
    if (strict_) {
      throw std::invalid_argument("strict mode requires p >= 11, got " + std::to_string(p));
    }
    static std::mutex mu;
    static std::set<int> warned;
    std::lock_guard<std::mutex> lock(mu);
    if (warned.insert(p).second) {
      warn("p = " + std::to_string(p) + " is below 11; results are exploratory");
    }
  }
  inv2_ = (p_ + 1) / 2;
}

Residue PrimeField::inverse(Residue a) const {
  a = reduce(a);
  if (a == 0) throw std::domain_error("zero has no inverse");
  Residue result = 1;
  Residue base = a;
  std::int64_t e = p_ - 2;
  while (e > 0) {
    if (e & 1) result = mul(result, base);
    base = mul(base, base);
    e >>= 1;
  }
  return result;
}

IndexSpace::IndexSpace(int p, int m) : p_(p), m_(m) {
  if (p < 2) throw std::invalid_argument("IndexSpace: p < 2");
  if (m < 0 || m > 40) throw std::invalid_argument("IndexSpace: dimension out of range");
  pow_.resize(static_cast<std::size_t>(m) + 1);
  pow_[0] = 1;
  for (int i = 1; i <= m; ++i) {
    pow_[static_cast<std::size_t>(i)] = pow_[static_cast<std::size_t>(i) - 1] * static_cast<Index>(p);
  }
  size_ = pow_[static_cast<std::size_t>(m)];
}

void IndexSpace::digits(Index idx, std::span<Residue> out) const {
  for (int i = 0; i < m_; ++i) {
    out[static_cast<std::size_t>(i)] = static_cast<Residue>(idx % static_cast<Index>(p_));
    idx /= static_cast<Index>(p_);
  }
}

Index IndexSpace::encode(std::span<const Residue> digits) const {
  Index idx = 0;
  for (int i = m_ - 1; i >= 0; --i) {
    idx = idx * static_cast<Index>(p_) + static_cast<Index>(digits[static_cast<std::size_t>(i)]);
  }
  return idx;
}

Index IndexSpace::combine(Residue a, Index i, Residue b, Index j) const {
  const auto pp = static_cast<Index>(p_);
  const auto ua = static_cast<Index>(((a % p_) + p_) % p_);
  const auto ub = static_cast<Index>(((b % p_) + p_) % p_);
  Index out = 0;
  for (int k = 0; k < m_; ++k) {
    out += ((ua * (i % pp) + ub * (j % pp)) % pp) * pow_[static_cast<std::size_t>(k)];
    i /= pp;
    j /= pp;
  }
  return out;
}

Residue IndexSpace::dot(Index i, Index j) const {
  const auto pp = static_cast<Index>(p_);
  Index acc = 0;
  for (int k = 0; k < m_; ++k) {
    acc += (i % pp) * (j % pp);
    i /= pp;
    j /= pp;
  }
  return static_cast<Residue>(acc % pp);
}

GroupVector::GroupVector(int p, std::vector<Residue> digits) : p_(p), digits_(std::move(digits)) {
  for (Residue d : digits_) {
    if (d < 0 || d >= p_) throw std::invalid_argument("GroupVector digit out of range");
  }
}

GroupVector GroupVector::zero(int p, int m) {
  return GroupVector(p, std::vector<Residue>(static_cast<std::size_t>(m), 0));
}

GroupVector GroupVector::from_index(int p, int m, Index index) {
  IndexSpace space(p, m);
  if (index >= space.size()) throw std::out_of_range("GroupVector index out of range");
  std::vector<Residue> d(static_cast<std::size_t>(m));
  space.digits(index, d);
  return GroupVector(p, std::move(d));
}

GroupVector GroupVector::unit(int p, int m, int axis) {
  auto v = std::vector<Residue>(static_cast<std::size_t>(m), 0);
  v.at(static_cast<std::size_t>(axis)) = 1;
  return GroupVector(p, std::move(v));
}

Index GroupVector::index() const {
  Index idx = 0;
  for (auto it = digits_.rbegin(); it != digits_.rend(); ++it) {
    idx = idx * static_cast<Index>(p_) + static_cast<Index>(*it);
  }
  return idx;
}

bool GroupVector::is_zero() const {
  return std::all_of(digits_.begin(), digits_.end(), [](Residue d) { return d == 0; });
}

namespace {

void require_same_shape(const GroupVector& a, const GroupVector& b, const char* op) {
  if (a.p() != b.p() || a.dim() != b.dim()) {
    throw std::invalid_argument(std::string(op) + ": dimension mismatch");
  }
}

Residue mod(Residue v, int p) {
  Residue r = v % p;
  return r < 0 ? r + p : r;
}

}  // namespace

GroupVector vec_add(const GroupVector& a, const GroupVector& b) {
  require_same_shape(a, b, "vec_add");
  std::vector<Residue> out(static_cast<std::size_t>(a.dim()));
  for (int i = 0; i < a.dim(); ++i) out[static_cast<std::size_t>(i)] = mod(a[i] + b[i], a.p());
  return GroupVector(a.p(), std::move(out));
}

GroupVector vec_sub(const GroupVector& a, const GroupVector& b) {
  require_same_shape(a, b, "vec_sub");
  std::vector<Residue> out(static_cast<std::size_t>(a.dim()));
  for (int i = 0; i < a.dim(); ++i) out[static_cast<std::size_t>(i)] = mod(a[i] - b[i], a.p());
  return GroupVector(a.p(), std::move(out));
}

GroupVector vec_scale(Residue c, const GroupVector& a) {
  std::vector<Residue> out(static_cast<std::size_t>(a.dim()));
  for (int i = 0; i < a.dim(); ++i) out[static_cast<std::size_t>(i)] = mod(c * a[i], a.p());
  return GroupVector(a.p(), std::move(out));
}

GroupVector vec_neg(const GroupVector& a) { return vec_scale(-1, a); }

Residue dot(const GroupVector& a, const GroupVector& b) {
  require_same_shape(a, b, "dot");
  Residue acc = 0;
  for (int i = 0; i < a.dim(); ++i) acc = mod(acc + a[i] * b[i], a.p());
  return acc;
}

GroupVector vec_concat(const GroupVector& x, const GroupVector& y) {
  if (x.p() != y.p()) throw std::invalid_argument("vec_concat: field mismatch");
  std::vector<Residue> out(x.digits().begin(), x.digits().end());
  out.insert(out.end(), y.digits().begin(), y.digits().end());
  return GroupVector(x.p(), std::move(out));
}

std::string to_string(const GroupVector& v) {
  std::ostringstream os;
  os << '[';
  for (int i = 0; i < v.dim(); ++i) os << (i ? "," : "") << v[i];
  os << ']';
  return os.str();
}

int row_reduce(const PrimeField& field, std::vector<std::vector<Residue>>& rows,
               std::vector<int>* pivots) {
  if (pivots) pivots->clear();
  if (rows.empty()) return 0;
  const std::size_t cols = rows.front().size();
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows.size(); ++c) {
    std::size_t pivot = rank;
    while (pivot < rows.size() && field.reduce(rows[pivot][c]) == 0) ++pivot;
    if (pivot == rows.size()) continue;
    std::swap(rows[rank], rows[pivot]);
    const Residue inv = field.inverse(rows[rank][c]);
    for (auto& v : rows[rank]) v = field.mul(v, inv);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r == rank) continue;
      const Residue factor = field.reduce(rows[r][c]);
      if (factor == 0) continue;
      for (std::size_t k = 0; k < cols; ++k) {
        rows[r][k] = field.sub(rows[r][k], field.mul(factor, rows[rank][k]));
      }
    }
    if (pivots) pivots->push_back(static_cast<int>(c));
    ++rank;
  }
  rows.resize(rank);
  return static_cast<int>(rank);
}

int rank_of(const PrimeField& field, std::vector<std::vector<Residue>> rows) {
  return row_reduce(field, rows);
}

bool in_span(const PrimeField& field, const std::vector<std::vector<Residue>>& rows,
             const std::vector<Residue>& v) {
  const int base = rank_of(field, rows);
  auto extended = rows;
  extended.push_back(v);
  return rank_of(field, std::move(extended)) == base;
}

AffineSubspace AffineSubspace::full(int p, int m) {
  AffineSubspace s(p, m);
  for (int c = 0; c < m; ++c) s.free_.push_back(c);
  return s;
}

AffineSubspace AffineSubspace::from_normals(int p, int m, std::vector<GroupVector> normals,
                                            std::vector<Residue> offsets) {
  if (normals.size() != offsets.size()) {
    throw std::invalid_argument("from_normals: normals/offsets length mismatch");
  }
  PrimeField field(p);
  std::vector<std::vector<Residue>> rows;
  rows.reserve(normals.size());
  for (std::size_t j = 0; j < normals.size(); ++j) {
    if (normals[j].p() != p || normals[j].dim() != m) {
      throw std::invalid_argument("from_normals: ambient dimension mismatch");
    }
    std::vector<Residue> row(normals[j].digits().begin(), normals[j].digits().end());
    row.push_back(field.reduce(offsets[j]));
    rows.push_back(std::move(row));
  }
  std::vector<int> pivots;
  row_reduce(field, rows, &pivots);

  AffineSubspace s(p, m);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (pivots[r] == m) {
      s.empty_ = true;
      continue;
    }
    std::vector<Residue> normal(rows[r].begin(), rows[r].begin() + m);
    s.normals_.emplace_back(p, std::move(normal));
    s.offsets_.push_back(rows[r][static_cast<std::size_t>(m)]);
    s.pivots_.push_back(pivots[r]);
  }
  for (int c = 0; c < m; ++c) {
    if (std::find(s.pivots_.begin(), s.pivots_.end(), c) == s.pivots_.end()) s.free_.push_back(c);
  }
  return s;
}

AffineSubspace AffineSubspace::coset(int p, int m, const std::vector<GroupVector>& normals,
                                     const GroupVector& w) {
  std::vector<Residue> offsets;
  offsets.reserve(normals.size());
  for (const auto& nrm : normals) offsets.push_back(dot(nrm, w));
  return from_normals(p, m, normals, std::move(offsets));
}

Index AffineSubspace::size() const {
  if (empty_) return 0;
  return space_.power(dim());
}

bool AffineSubspace::contains(const GroupVector& x) const {
  if (empty_) return false;
  if (x.dim() != m_ || x.p() != p_) throw std::invalid_argument("contains: dimension mismatch");
  for (std::size_t j = 0; j < normals_.size(); ++j) {
    if (dot(normals_[j], x) != offsets_[j]) return false;
  }
  return true;
}

bool AffineSubspace::contains_index(const IndexSpace& space, Index x) const {
  if (empty_) return false;
  for (std::size_t j = 0; j < normals_.size(); ++j) {
    if (space.dot(normals_[j].index(), x) != offsets_[j]) return false;
  }
  return true;
}

GroupVector AffineSubspace::point(Index t) const {
  if (empty_) throw std::logic_error("point: empty coset");
  std::vector<Residue> x(static_cast<std::size_t>(m_), 0);
  const auto pp = static_cast<Index>(p_);
  for (int f : free_) {
    x[static_cast<std::size_t>(f)] = static_cast<Residue>(t % pp);
    t /= pp;
  }
  for (std::size_t r = 0; r < normals_.size(); ++r) {
    Residue acc = offsets_[r];
    for (int f : free_) acc -= normals_[r][f] * x[static_cast<std::size_t>(f)];
    x[static_cast<std::size_t>(pivots_[r])] = mod(acc, p_);
  }
  return GroupVector(p_, std::move(x));
}

Index AffineSubspace::point_index(Index t) const { return point(t).index(); }

Index AffineSubspace::parameter_of(Index member) const {
  const auto pp = static_cast<Index>(p_);
  Index t = 0;
  Index scale = 1;
  for (int f : free_) {
    t += static_cast<Index>(space_.digit(member, f)) * scale;
    scale *= pp;
  }
  return t;
}

std::vector<GroupVector> AffineSubspace::basis() const {
  std::vector<GroupVector> out;
  for (int f : free_) {
    std::vector<Residue> b(static_cast<std::size_t>(m_), 0);
    b[static_cast<std::size_t>(f)] = 1;
    for (std::size_t r = 0; r < normals_.size(); ++r) {
      b[static_cast<std::size_t>(pivots_[r])] = mod(-normals_[r][f], p_);
    }
    out.emplace_back(p_, std::move(b));
  }
  return out;
}

std::vector<Index> AffineSubspace::member_indices() const {
  std::vector<Index> out;
  if (empty_) return out;
  const Index count = size();
  out.reserve(count);
  // Walk parameters by incrementing the base point along basis directions.
  const auto base = point(0);
  const auto dirs = basis();
  std::vector<Index> dir_idx;
  for (const auto& d : dirs) dir_idx.push_back(d.index());
  std::vector<Residue> t(dirs.size(), 0);
  Index current = base.index();
  for (Index k = 0; k < count; ++k) {
    out.push_back(current);
    for (std::size_t i = 0; i < t.size(); ++i) {
      current = space_.add(current, dir_idx[i]);
      if (++t[i] < p_) break;
      t[i] = 0;  // wrapped: p steps along dir_i return to the start
    }
  }
  return out;
}

std::vector<GroupVector> AffineSubspace::enumerate() const {
  std::vector<GroupVector> out;
  for (Index idx : member_indices()) out.push_back(GroupVector::from_index(p_, m_, idx));
  return out;
}

AffineSubspace AffineSubspace::linear_part() const {
  AffineSubspace s = *this;
  s.empty_ = false;
  std::fill(s.offsets_.begin(), s.offsets_.end(), 0);
  return s;
}

GroupVector AffineSubspace::lift_character(const GroupVector& eta) const {
  if (eta.dim() != dim()) throw std::invalid_argument("lift_character: dimension mismatch");
  std::vector<Residue> xi(static_cast<std::size_t>(m_), 0);
  for (std::size_t k = 0; k < free_.size(); ++k) {
    xi[static_cast<std::size_t>(free_[k])] = eta[static_cast<int>(k)];
  }
  return GroupVector(p_, std::move(xi));
}

std::vector<GroupVector> coset_representatives(const AffineSubspace& super,
                                               const AffineSubspace& sub) {
  const int p = super.p();
  const int m = super.ambient_dim();
  IndexSpace space(p, m);
  std::set<Index> reps;
  const auto& normals = sub.normals();
  const auto& pivots = sub.pivot_columns();
  for (Index x : super.member_indices()) {
    std::vector<Residue> rep(static_cast<std::size_t>(m), 0);
    for (std::size_t r = 0; r < normals.size(); ++r) {
      rep[static_cast<std::size_t>(pivots[r])] = space.dot(normals[r].index(), x);
    }
    reps.insert(space.encode(rep));
  }
  std::vector<GroupVector> out;
  for (Index r : reps) out.push_back(GroupVector::from_index(p, m, r));
  return out;
}

LinearMap::LinearMap(int p, std::vector<std::vector<Residue>> matrix, int cols)
    : p_(p), cols_(cols), matrix_(std::move(matrix)) {
  for (auto& row : matrix_) {
    if (static_cast<int>(row.size()) != cols_) throw std::invalid_argument("LinearMap: ragged matrix");
    for (auto& v : row) v = mod(v, p_);
  }
}

LinearMap LinearMap::identity(int p, int m) {
  std::vector<std::vector<Residue>> mat(static_cast<std::size_t>(m),
                                        std::vector<Residue>(static_cast<std::size_t>(m), 0));
  for (int i = 0; i < m; ++i) mat[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1;
  return LinearMap(p, std::move(mat), m);
}

GroupVector LinearMap::apply(const GroupVector& v) const {
  if (v.dim() != cols_ || v.p() != p_) throw std::invalid_argument("LinearMap::apply: dimension mismatch");
  std::vector<Residue> out(matrix_.size(), 0);
  for (std::size_t r = 0; r < matrix_.size(); ++r) {
    Residue acc = 0;
    for (int c = 0; c < cols_; ++c) acc += matrix_[r][static_cast<std::size_t>(c)] * v[c];
    out[r] = mod(acc, p_);
  }
  return GroupVector(p_, std::move(out));
}

LinearMap LinearMap::compose(const LinearMap& other) const {
  if (other.rows() != cols_ || other.p_ != p_) throw std::invalid_argument("compose: shape mismatch");
  std::vector<std::vector<Residue>> out(matrix_.size(),
                                        std::vector<Residue>(static_cast<std::size_t>(other.cols_), 0));
  for (std::size_t r = 0; r < matrix_.size(); ++r) {
    for (int c = 0; c < other.cols_; ++c) {
      Residue acc = 0;
      for (int k = 0; k < cols_; ++k) {
        acc += matrix_[r][static_cast<std::size_t>(k)] *
               other.matrix_[static_cast<std::size_t>(k)][static_cast<std::size_t>(c)];
      }
      out[r][static_cast<std::size_t>(c)] = mod(acc, p_);
    }
  }
  return LinearMap(p_, std::move(out), other.cols_);
}

bool LinearMap::invertible() const {
  if (rows() != cols_) return false;
  return rank_of(PrimeField(p_), matrix_) == cols_;
}

}  // namespace lshape
