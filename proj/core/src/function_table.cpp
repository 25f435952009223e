#include "lshape/function_table.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

namespace lshape {

ParseError::ParseError(int line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

namespace {

template <typename T>
T pairwise_sum_impl(std::span<const T> values) {
  if (values.size() <= 8) {
    T acc{};
    for (const auto& v : values) acc += v;
    return acc;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum_impl(values.first(half)) + pairwise_sum_impl(values.subspan(half));
}

Index checked_size(int p, int m, const ResourceLimits& limits) {
  IndexSpace space(p, m);
  limits.check_entries(space.size(), "table");
  return space.size();
}

}  // namespace

Complex pairwise_sum(std::span<const Complex> values) { return pairwise_sum_impl(values); }
double pairwise_sum(std::span<const double> values) { return pairwise_sum_impl(values); }

FunctionTable::FunctionTable(int p, int m, std::vector<Complex> values, TableKind kind,
                             const ResourceLimits& limits)
    : p_(p), m_(m), kind_(kind), values_(std::move(values)) {
  if (values_.size() != checked_size(p, m, limits)) {
    throw std::invalid_argument("FunctionTable: value count does not match p^m");
  }
  if (kind_ == TableKind::indicator) {
    for (const auto& v : values_) {
      if (!(v == Complex(0.0) || v == Complex(1.0))) {
        throw std::invalid_argument("FunctionTable: indicator table with value outside {0,1}");
      }
    }
  } else if (kind_ == TableKind::real) {
    for (const auto& v : values_) {
      if (v.imag() != 0.0) throw std::invalid_argument("FunctionTable: real table with imaginary part");
    }
  }
}

FunctionTable FunctionTable::constant(int p, int m, Complex c, const ResourceLimits& limits) {
  const Index n = checked_size(p, m, limits);
  const TableKind kind = c.imag() == 0.0 ? TableKind::real : TableKind::complex;
  return FunctionTable(p, m, std::vector<Complex>(n, c), kind, limits);
}

FunctionTable FunctionTable::zeros(int p, int m, const ResourceLimits& limits) {
  return constant(p, m, Complex(0.0), limits);
}

FunctionTable FunctionTable::from_index_fn(int p, int m, const std::function<Complex(Index)>& fn,
                                           TableKind kind, const ResourceLimits& limits) {
  const Index n = checked_size(p, m, limits);
  std::vector<Complex> values(n);
  for (Index i = 0; i < n; ++i) values[i] = fn(i);
  return FunctionTable(p, m, std::move(values), kind, limits);
}

FunctionTable FunctionTable::character(const GroupVector& xi) {
  const int p = xi.p();
  const int m = xi.dim();
  IndexSpace space(p, m);
  const Index xi_idx = xi.index();
  std::vector<Complex> roots(static_cast<std::size_t>(p));
  for (int k = 0; k < p; ++k) roots[static_cast<std::size_t>(k)] = std::polar(1.0, 2.0 * std::numbers::pi * k / p);
  return from_index_fn(p, m, [&](Index x) { return roots[static_cast<std::size_t>(space.dot(xi_idx, x))]; });
}

bool FunctionTable::is_one_bounded(double tol) const { return max_modulus() <= 1.0 + tol; }

bool FunctionTable::is_real(double tol) const {
  if (kind_ != TableKind::complex) return true;
  return std::all_of(values_.begin(), values_.end(), [tol](const Complex& v) { return std::abs(v.imag()) <= tol; });
}

Complex FunctionTable::mean() const {
  return pairwise_sum(std::span<const Complex>(values_)) / static_cast<double>(values_.size());
}

double FunctionTable::max_modulus() const {
  double best = 0.0;
  for (const auto& v : values_) best = std::max(best, std::abs(v));
  return best;
}

void FunctionTable::require_compatible(const FunctionTable& other, const char* op) const {
  if (p_ != other.p_ || m_ != other.m_) throw std::invalid_argument(std::string(op) + ": table shape mismatch");
}

FunctionTable FunctionTable::conj() const {
  std::vector<Complex> out(values_.size());
  std::transform(values_.begin(), values_.end(), out.begin(), [](const Complex& v) { return std::conj(v); });
  return FunctionTable(p_, m_, std::move(out), kind_);
}

FunctionTable FunctionTable::operator*(const FunctionTable& other) const {
  require_compatible(other, "operator*");
  std::vector<Complex> out(values_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = values_[i] * other.values_[i];
  TableKind kind = TableKind::complex;
  if (kind_ == TableKind::indicator && other.kind_ == TableKind::indicator) {
    kind = TableKind::indicator;
  } else if (kind_ != TableKind::complex && other.kind_ != TableKind::complex) {
    kind = TableKind::real;
  }
  return FunctionTable(p_, m_, std::move(out), kind);
}

FunctionTable FunctionTable::operator+(const FunctionTable& other) const {
  require_compatible(other, "operator+");
  std::vector<Complex> out(values_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = values_[i] + other.values_[i];
  const bool real = kind_ != TableKind::complex && other.kind_ != TableKind::complex;
  return FunctionTable(p_, m_, std::move(out), real ? TableKind::real : TableKind::complex);
}

FunctionTable FunctionTable::operator-(const FunctionTable& other) const {
  require_compatible(other, "operator-");
  std::vector<Complex> out(values_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = values_[i] - other.values_[i];
  const bool real = kind_ != TableKind::complex && other.kind_ != TableKind::complex;
  return FunctionTable(p_, m_, std::move(out), real ? TableKind::real : TableKind::complex);
}

FunctionTable FunctionTable::operator-(Complex c) const {
  std::vector<Complex> out(values_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = values_[i] - c;
  const bool real = kind_ != TableKind::complex && c.imag() == 0.0;
  return FunctionTable(p_, m_, std::move(out), real ? TableKind::real : TableKind::complex);
}

FunctionTable FunctionTable::scaled(Complex c) const {
  std::vector<Complex> out(values_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = values_[i] * c;
  const bool real = kind_ != TableKind::complex && c.imag() == 0.0;
  return FunctionTable(p_, m_, std::move(out), real ? TableKind::real : TableKind::complex);
}

IndicatorSet::IndicatorSet(int p, int m, std::vector<std::uint8_t> membership, const ResourceLimits& limits)
    : p_(p), m_(m), member_(std::move(membership)) {
  if (member_.size() != checked_size(p, m, limits)) {
    throw std::invalid_argument("IndicatorSet: membership length does not match p^m");
  }
  for (auto& b : member_) {
    if (b > 1) throw std::invalid_argument("IndicatorSet: membership flag outside {0,1}");
    cardinality_ += b;
  }
}

IndicatorSet IndicatorSet::empty(int p, int m) {
  return IndicatorSet(p, m, std::vector<std::uint8_t>(IndexSpace(p, m).size(), 0));
}

IndicatorSet IndicatorSet::full(int p, int m) {
  return IndicatorSet(p, m, std::vector<std::uint8_t>(IndexSpace(p, m).size(), 1));
}

IndicatorSet IndicatorSet::from_indices(int p, int m, std::span<const Index> elements) {
  std::vector<std::uint8_t> member(IndexSpace(p, m).size(), 0);
  for (Index e : elements) member.at(e) = 1;
  return IndicatorSet(p, m, std::move(member));
}

IndicatorSet IndicatorSet::from_predicate(int p, int m, const std::function<bool(Index)>& pred) {
  std::vector<std::uint8_t> member(IndexSpace(p, m).size(), 0);
  for (Index i = 0; i < member.size(); ++i) member[i] = pred(i) ? 1 : 0;
  return IndicatorSet(p, m, std::move(member));
}

IndicatorSet IndicatorSet::from_subspace(const AffineSubspace& coset) {
  const auto members = coset.member_indices();
  return from_indices(coset.p(), coset.ambient_dim(), members);
}

double IndicatorSet::density() const {
  return static_cast<double>(cardinality_) / static_cast<double>(member_.size());
}

std::vector<Index> IndicatorSet::elements() const {
  std::vector<Index> out;
  out.reserve(cardinality_);
  for (Index i = 0; i < member_.size(); ++i) {
    if (member_[i]) out.push_back(i);
  }
  return out;
}

FunctionTable IndicatorSet::table() const {
  std::vector<Complex> values(member_.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = member_[i] ? 1.0 : 0.0;
  return FunctionTable(p_, m_, std::move(values), TableKind::indicator);
}

void IndicatorSet::require_compatible(const IndicatorSet& other) const {
  if (p_ != other.p_ || m_ != other.m_) throw std::invalid_argument("IndicatorSet: shape mismatch");
}

IndicatorSet IndicatorSet::intersect(const IndicatorSet& other) const {
  require_compatible(other);
  std::vector<std::uint8_t> out(member_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = member_[i] & other.member_[i];
  return IndicatorSet(p_, m_, std::move(out));
}

IndicatorSet IndicatorSet::unite(const IndicatorSet& other) const {
  require_compatible(other);
  std::vector<std::uint8_t> out(member_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = member_[i] | other.member_[i];
  return IndicatorSet(p_, m_, std::move(out));
}

IndicatorSet IndicatorSet::minus(const IndicatorSet& other) const {
  require_compatible(other);
  std::vector<std::uint8_t> out(member_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = member_[i] & (1 - other.member_[i]);
  return IndicatorSet(p_, m_, std::move(out));
}

IndicatorSet IndicatorSet::complement() const {
  std::vector<std::uint8_t> out(member_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = 1 - member_[i];
  return IndicatorSet(p_, m_, std::move(out));
}

bool IndicatorSet::subset_of(const IndicatorSet& other) const {
  require_compatible(other);
  for (std::size_t i = 0; i < member_.size(); ++i) {
    if (member_[i] && !other.member_[i]) return false;
  }
  return true;
}

FunctionTable balanced(const IndicatorSet& s) {
  const double sigma = s.density();
  std::vector<Complex> values(s.size());
  for (Index i = 0; i < s.size(); ++i) values[i] = (s.contains(i) ? 1.0 : 0.0) - sigma;
  return FunctionTable(s.p(), s.dim(), std::move(values), TableKind::real);
}

FunctionTable restrict(const FunctionTable& f, const AffineSubspace& coset) {
  if (coset.p() != f.p() || coset.ambient_dim() != f.dim()) {
    throw std::invalid_argument("restrict: ambient dimension mismatch");
  }
  if (coset.empty()) throw std::invalid_argument("restrict: empty coset");
  const auto members = coset.member_indices();
  std::vector<Complex> values(members.size());
  for (std::size_t t = 0; t < members.size(); ++t) values[t] = f[members[t]];
  return FunctionTable(f.p(), coset.dim(), std::move(values), f.kind());
}

IndicatorSet restrict(const IndicatorSet& s, const AffineSubspace& coset) {
  if (coset.p() != s.p() || coset.ambient_dim() != s.dim()) {
    throw std::invalid_argument("restrict: ambient dimension mismatch");
  }
  if (coset.empty()) throw std::invalid_argument("restrict: empty coset");
  const auto members = coset.member_indices();
  std::vector<std::uint8_t> out(members.size());
  for (std::size_t t = 0; t < members.size(); ++t) out[t] = s.contains(members[t]) ? 1 : 0;
  return IndicatorSet(s.p(), coset.dim(), std::move(out));
}

FunctionTable translate(const FunctionTable& f, const GroupVector& h) {
  if (h.dim() != f.dim() || h.p() != f.p()) throw std::invalid_argument("translate: dimension mismatch");
  const auto space = f.space();
  const Index hi = h.index();
  return FunctionTable::from_index_fn(f.p(), f.dim(), [&](Index x) { return f[space.sub(x, hi)]; }, f.kind());
}

std::string to_string(Slot slot) {
  switch (slot) {
    case Slot::y: return "y";
    case Slot::x_plus_y: return "x+y";
    case Slot::two_x_plus_y: return "2x+y";
    case Slot::x: return "x";
  }
  return "?";
}

Slot slot_from_string(const std::string& name) {
  if (name == "y") return Slot::y;
  if (name == "x+y") return Slot::x_plus_y;
  if (name == "2x+y") return Slot::two_x_plus_y;
  if (name == "x") return Slot::x;
  throw std::invalid_argument("unknown slot '" + name + "'");
}

std::pair<Residue, Residue> slot_coefficients(Slot slot) {
  switch (slot) {
    case Slot::y: return {0, 1};
    case Slot::x_plus_y: return {1, 1};
    case Slot::two_x_plus_y: return {2, 1};
    case Slot::x: return {1, 0};
  }
  return {0, 0};
}

namespace {

template <typename Fn>
void for_each_lift(int p, int n, Slot slot, Fn&& fn) {
  IndexSpace space(p, n);
  const Index N = space.size();
  for (Index y = 0; y < N; ++y) {
    for (Index x = 0; x < N; ++x) {
      Index src = 0;
      switch (slot) {
        case Slot::y: src = y; break;
        case Slot::x_plus_y: src = space.add(x, y); break;
        case Slot::two_x_plus_y: src = space.combine(2, x, 1, y); break;
        case Slot::x: src = x; break;
      }
      fn(pair_index(x, y, N), src);
    }
  }
}

}  // namespace

FunctionTable product_lift(const FunctionTable& a, Slot slot, const ResourceLimits& limits) {
  const Index total = checked_size(a.p(), 2 * a.dim(), limits);
  std::vector<Complex> values(total);
  for_each_lift(a.p(), a.dim(), slot, [&](Index dst, Index src) { values[dst] = a[src]; });
  return FunctionTable(a.p(), 2 * a.dim(), std::move(values), a.kind(), limits);
}

IndicatorSet product_lift(const IndicatorSet& a, Slot slot, const ResourceLimits& limits) {
  const Index total = checked_size(a.p(), 2 * a.dim(), limits);
  std::vector<std::uint8_t> member(total);
  for_each_lift(a.p(), a.dim(), slot, [&](Index dst, Index src) { member[dst] = a.contains(src) ? 1 : 0; });
  return IndicatorSet(a.p(), 2 * a.dim(), std::move(member), limits);
}

namespace {

struct Header {
  int p = 0;
  int m = -1;
  std::string kind = "set";
};

bool skip_line(const std::string& line) {
  const auto pos = line.find_first_not_of(" \t\r");
  return pos == std::string::npos || line[pos] == '#';
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

long long parse_int(const std::string& token, int line, const char* what) {
  long long v = 0;
  const auto t = trim(token);
  const auto* first = t.data();
  const auto* last = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || t.empty()) {
    throw ParseError(line, std::string("malformed ") + what + " '" + t + "'");
  }
  return v;
}

Header read_header(std::istream& is, int& line_no) {
  std::string line;
  while (std::getline(is, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    Header h;
    std::istringstream tokens(line);
    std::string tok;
    while (tokens >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) throw ParseError(line_no, "expected key=value in header, got '" + tok + "'");
      const auto key = tok.substr(0, eq);
      const auto value = tok.substr(eq + 1);
      if (key == "p") {
        h.p = static_cast<int>(parse_int(value, line_no, "p"));
      } else if (key == "m") {
        h.m = static_cast<int>(parse_int(value, line_no, "m"));
      } else if (key == "kind") {
        h.kind = value;
      } else {
        throw ParseError(line_no, "unknown header key '" + key + "'");
      }
    }
    if (!is_prime(h.p) || h.p == 2) throw ParseError(line_no, "header p must be an odd prime");
    if (h.m < 0) throw ParseError(line_no, "header is missing m");
    if (h.kind != "set" && h.kind != "function") throw ParseError(line_no, "unknown kind '" + h.kind + "'");
    return h;
  }
  throw ParseError(line_no, "missing header line");
}

IndicatorSet read_set_body(std::istream& is, const Header& h, int line_no, const ResourceLimits& limits) {
  IndexSpace space(h.p, h.m);
  limits.check_entries(space.size(), "set file");
  std::vector<std::uint8_t> member(space.size(), 0);
  std::string line;
  while (std::getline(is, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    const auto body = trim(line);
    Index idx = 0;
    if (body.find(',') != std::string::npos) {
      std::vector<Residue> digits;
      std::istringstream parts(body);
      std::string part;
      while (std::getline(parts, part, ',')) {
        const auto d = parse_int(part, line_no, "digit");
        if (d < 0 || d >= h.p) throw ParseError(line_no, "digit out of range [0, p)");
        digits.push_back(d);
      }
      if (static_cast<int>(digits.size()) != h.m) {
        throw ParseError(line_no, "expected " + std::to_string(h.m) + " digits");
      }
      idx = space.encode(digits);
    } else {
      const auto v = parse_int(body, line_no, "index");
      if (v < 0 || static_cast<Index>(v) >= space.size()) throw ParseError(line_no, "index out of range");
      idx = static_cast<Index>(v);
    }
    member[idx] = 1;
  }
  return IndicatorSet(h.p, h.m, std::move(member), limits);
}

FunctionTable read_function_body(std::istream& is, const Header& h, int line_no, const ResourceLimits& limits) {
  IndexSpace space(h.p, h.m);
  limits.check_entries(space.size(), "function file");
  std::vector<Complex> values;
  values.reserve(space.size());
  std::string line;
  while (std::getline(is, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    std::istringstream parts(line);
    double re = 0.0;
    double im = 0.0;
    if (!(parts >> re)) throw ParseError(line_no, "malformed real part");
    if (!(parts >> im)) im = 0.0;
    std::string extra;
    if (parts >> extra) throw ParseError(line_no, "trailing token '" + extra + "'");
    if (values.size() == space.size()) throw ParseError(line_no, "more than p^m values");
    values.emplace_back(re, im);
  }
  if (values.size() != space.size()) {
    throw ParseError(line_no, "expected " + std::to_string(space.size()) + " values, got " +
                                  std::to_string(values.size()));
  }
  const bool real = std::all_of(values.begin(), values.end(), [](const Complex& v) { return v.imag() == 0.0; });
  return FunctionTable(h.p, h.m, std::move(values), real ? TableKind::real : TableKind::complex, limits);
}

}  // namespace

void write_set(std::ostream& os, const IndicatorSet& s) {
  os << "p=" << s.p() << " m=" << s.dim() << '\n';
  for (Index e : s.elements()) os << e << '\n';
}

IndicatorSet read_set(std::istream& is, const ResourceLimits& limits) {
  int line_no = 0;
  const auto h = read_header(is, line_no);
  if (h.kind != "set") throw ParseError(line_no, "expected a set file");
  return read_set_body(is, h, line_no, limits);
}

void write_function(std::ostream& os, const FunctionTable& f) {
  std::ostringstream body;
  body.precision(17);
  body << "p=" << f.p() << " m=" << f.dim() << " kind=function\n";
  for (const auto& v : f.values()) body << v.real() << ' ' << v.imag() << '\n';
  os << body.str();
}

FunctionTable read_function(std::istream& is, const ResourceLimits& limits) {
  int line_no = 0;
  const auto h = read_header(is, line_no);
  if (h.kind != "function") throw ParseError(line_no, "expected a function file");
  return read_function_body(is, h, line_no, limits);
}

FunctionTable read_table(std::istream& is, const ResourceLimits& limits) {
  int line_no = 0;
  const auto h = read_header(is, line_no);
  if (h.kind == "function") return read_function_body(is, h, line_no, limits);
  return read_set_body(is, h, line_no, limits).table();
}

}  // namespace lshape
