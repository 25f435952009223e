#include "lshape/structured_sets.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "lshape/gowers.hpp"
#include "lshape/random.hpp"

namespace lshape {

namespace {

// Enumeration is used when the estimated work stays below this many
// elementary steps; larger statistics fall back to sampling.
constexpr double kExactBudget = 5.0e7;

}  // namespace

FiberFamily::FiberFamily(IndicatorSet A, std::vector<std::optional<AffineSubspace>> fibers)
    : A_(std::move(A)), fibers_(std::move(fibers)), space_(A_.p(), A_.dim()) {
  if (fibers_.size() != A_.size()) throw std::invalid_argument("FiberFamily: need one fiber slot per x");
  for (Index x = 0; x < A_.size(); ++x) {
    const auto& f = fibers_[x];
    if (A_.contains(x) != f.has_value()) throw std::invalid_argument("FiberFamily: fibers must be given exactly on A");
    if (f && (f->ambient_dim() != A_.dim() || f->p() != A_.p())) {
      throw std::invalid_argument("FiberFamily: fiber dimension mismatch");
    }
    if (f && f->empty()) throw std::invalid_argument("FiberFamily: empty fiber");
  }
}

const AffineSubspace& FiberFamily::fiber(Index x) const {
  if (!fibers_.at(x)) throw std::out_of_range("FiberFamily: x is not in A");
  return *fibers_[x];
}

bool FiberFamily::contains(Index x, Index y) const {
  return fibers_[x].has_value() && fibers_[x]->contains_index(space_, y);
}

IndicatorSet FiberFamily::set() const {
  const Index N = space_.size();
  std::vector<std::uint8_t> member(N * N, 0);
  for (Index x = 0; x < N; ++x) {
    if (!fibers_[x]) continue;
    for (Index y : fibers_[x]->member_indices()) member[pair_index(x, y, N)] = 1;
  }
  return IndicatorSet(p(), 2 * n(), std::move(member));
}

std::uint64_t FiberFamily::cardinality() const {
  std::uint64_t total = 0;
  for (const auto& f : fibers_) {
    if (f) total += f->size();
  }
  return total;
}

std::optional<int> FiberFamily::uniform_codim() const {
  std::optional<int> d;
  for (const auto& f : fibers_) {
    if (!f) continue;
    if (d && *d != f->codim()) return std::nullopt;
    d = f->codim();
  }
  return d;
}

std::string to_string(PhiGenerator g) {
  switch (g) {
    case PhiGenerator::phi_map: return "phi_map";
    case PhiGenerator::explicit_normals: return "explicit";
    case PhiGenerator::full: return "full";
  }
  return "?";
}

double PhiDescriptor::rho() const { return std::pow(static_cast<double>(p()), -d_); }

double PhiDescriptor::density() const {
  const double N = static_cast<double>(IndexSpace(p(), n()).size());
  return static_cast<double>(family_.cardinality()) / (N * N);
}

PhiDescriptor build_phi_full(const IndicatorSet& A) {
  std::vector<std::optional<AffineSubspace>> fibers(A.size());
  for (Index x = 0; x < A.size(); ++x) {
    if (A.contains(x)) fibers[x] = AffineSubspace::full(A.p(), A.dim());
  }
  return PhiDescriptor(FiberFamily(A, std::move(fibers)), GroupVector::zero(A.p(), A.dim()), 0, PhiGenerator::full);
}

PhiDescriptor build_phi_map(const IndicatorSet& A, const std::vector<Index>& phi, const GroupVector& u) {
  const int p = A.p();
  const int n = A.dim();
  if (phi.size() != A.size()) throw std::invalid_argument("build_phi: phi must have p^n entries");
  if (u.dim() != n) throw std::invalid_argument("build_phi: offset dimension mismatch");
  std::vector<std::optional<AffineSubspace>> fibers(A.size());
  for (Index x = 0; x < A.size(); ++x) {
    if (!A.contains(x)) continue;
    if (phi[x] == 0) throw std::invalid_argument("build_phi: phi(" + std::to_string(x) + ") = 0");
    const auto normal = GroupVector::from_index(p, n, phi[x]);
    fibers[x] = AffineSubspace::coset(p, n, {normal}, u);
  }
  return PhiDescriptor(FiberFamily(A, std::move(fibers)), u, 1, PhiGenerator::phi_map);
}

PhiDescriptor build_phi_normals(const IndicatorSet& A, const std::vector<std::vector<GroupVector>>& normals,
                                const GroupVector& u, int d) {
  const int p = A.p();
  const int n = A.dim();
  if (normals.size() != A.size()) throw std::invalid_argument("build_phi: need a normal list per x");
  if (u.dim() != n) throw std::invalid_argument("build_phi: offset dimension mismatch");
  if (d < 0 || d > n) throw std::invalid_argument("build_phi: codimension out of range");
  std::vector<std::optional<AffineSubspace>> fibers(A.size());
  for (Index x = 0; x < A.size(); ++x) {
    if (!A.contains(x)) continue;
    const auto& list = normals[x];
    if (static_cast<int>(list.size()) != d) {
      throw std::invalid_argument("build_phi: x = " + std::to_string(x) + " needs exactly d normals");
    }
    for (const auto& v : list) {
      if (v.dim() != n) throw std::invalid_argument("build_phi: normal dimension mismatch");
      if (v.is_zero()) throw std::invalid_argument("build_phi: zero normal at x = " + std::to_string(x));
    }
    auto fiber = AffineSubspace::coset(p, n, list, u);
    if (fiber.codim() != d) throw std::invalid_argument("build_phi: dependent normals at x = " + std::to_string(x));
    fibers[x] = std::move(fiber);
  }
  const auto gen = d == 0 ? PhiGenerator::full : PhiGenerator::explicit_normals;
  return PhiDescriptor(FiberFamily(A, std::move(fibers)), u, d, gen);
}

namespace {

std::string digits_string(const GroupVector& v) {
  std::string out;
  for (int i = 0; i < v.dim(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  return out;
}

GroupVector parse_digits(const std::string& text, int p, int n, int line) {
  std::vector<Residue> digits;
  std::istringstream parts(text);
  std::string part;
  while (std::getline(parts, part, ',')) {
    std::istringstream one(part);
    long long v = 0;
    std::string extra;
    if (!(one >> v) || (one >> extra)) throw ParseError(line, "malformed digit '" + part + "'");
    if (v < 0 || v >= p) throw ParseError(line, "digit out of range [0, p)");
    digits.push_back(v);
  }
  if (static_cast<int>(digits.size()) != n) throw ParseError(line, "expected " + std::to_string(n) + " digits");
  return GroupVector(p, std::move(digits));
}

std::string strip(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

}  // namespace

void write_phi(std::ostream& os, const PhiDescriptor& phi) {
  os << "p=" << phi.p() << " n=" << phi.n() << " d=" << phi.d() << " u=" << digits_string(phi.u()) << '\n';
  for (Index x = 0; x < phi.A().size(); ++x) {
    if (!phi.A().contains(x)) continue;
    os << x << " :";
    const auto& normals = phi.normals(x);
    for (std::size_t k = 0; k < normals.size(); ++k) os << (k ? " ; " : " ") << digits_string(normals[k]);
    os << '\n';
  }
}

PhiDescriptor read_phi(std::istream& is) {
  std::string line;
  int line_no = 0;
  int p = 0, n = -1, d = -1;
  std::string u_text;
  while (std::getline(is, line)) {
    ++line_no;
    const auto body = strip(line);
    if (body.empty() || body[0] == '#') continue;
    std::istringstream tokens(body);
    std::string tok;
    while (tokens >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) throw ParseError(line_no, "expected key=value in header");
      const auto key = tok.substr(0, eq);
      const auto value = tok.substr(eq + 1);
      try {
        if (key == "p") {
          p = std::stoi(value);
        } else if (key == "n") {
          n = std::stoi(value);
        } else if (key == "d") {
          d = std::stoi(value);
        } else if (key == "u") {
          u_text = value;
        } else {
          throw ParseError(line_no, "unknown header key '" + key + "'");
        }
      } catch (const std::logic_error&) {
        throw ParseError(line_no, "malformed header value '" + value + "'");
      }
    }
    break;
  }
  if (!is_prime(p) || p == 2 || n < 1 || d < 0 || d > n || u_text.empty()) {
    throw ParseError(line_no, "Phi header needs odd prime p, n >= 1, 0 <= d <= n and u");
  }
  const auto u = parse_digits(u_text, p, n, line_no);
  const IndexSpace space(p, n);
  std::vector<Index> members;
  std::vector<std::vector<GroupVector>> normals(space.size());
  while (std::getline(is, line)) {
    ++line_no;
    const auto body = strip(line);
    if (body.empty() || body[0] == '#') continue;
    const auto colon = body.find(':');
    if (colon == std::string::npos) throw ParseError(line_no, "expected 'x : normals'");
    long long x = -1;
    {
      std::istringstream head(body.substr(0, colon));
      std::string extra;
      if (!(head >> x) || (head >> extra)) throw ParseError(line_no, "malformed x index");
    }
    if (x < 0 || static_cast<Index>(x) >= space.size()) throw ParseError(line_no, "x index out of range");
    if (!normals[static_cast<Index>(x)].empty() ||
        std::find(members.begin(), members.end(), static_cast<Index>(x)) != members.end()) {
      throw ParseError(line_no, "duplicate x index");
    }
    const auto rest = strip(body.substr(colon + 1));
    std::vector<GroupVector> list;
    if (!rest.empty()) {
      std::istringstream parts(rest);
      std::string part;
      while (std::getline(parts, part, ';')) list.push_back(parse_digits(strip(part), p, n, line_no));
    }
    if (static_cast<int>(list.size()) != d) throw ParseError(line_no, "expected d normals");
    normals[static_cast<Index>(x)] = std::move(list);
    members.push_back(static_cast<Index>(x));
  }
  const auto A = IndicatorSet::from_indices(p, n, members);
  try {
    return build_phi_normals(A, normals, u, d);
  } catch (const std::invalid_argument& e) {
    throw ParseError(line_no, e.what());
  }
}

double TDescriptor::product_density() const { return alpha() * beta() * gamma() * delta() * rho(); }

TDescriptor build_T(const IndicatorSet& B, const IndicatorSet& C, const IndicatorSet& D, const PhiDescriptor& phi) {
  const int p = phi.p();
  const int n = phi.n();
  for (const auto* s : {&B, &C, &D}) {
    if (s->p() != p || s->dim() != n) throw std::invalid_argument("build_T: factor shape mismatch");
  }
  const auto lifted = product_lift(B, Slot::y)
                          .intersect(product_lift(C, Slot::x_plus_y))
                          .intersect(product_lift(D, Slot::two_x_plus_y))
                          .intersect(phi.set());
  const IndexSpace space(p, n);
  const Index N = space.size();
  for (Index y = 0; y < N; ++y) {
    for (Index x = 0; x < N; ++x) {
      const bool direct = B.contains(y) && C.contains(space.add(x, y)) && D.contains(space.combine(2, x, 1, y)) &&
                          phi.contains(x, y);
      if (direct != lifted.contains(pair_index(x, y, N))) throw std::logic_error("build_T: lifted product mismatch");
    }
  }
  return TDescriptor{phi.A(), B, C, D, phi, lifted};
}

FiberStatsReport fiber_stats(const TDescriptor& t, double eps_prime, int uniformity_s, const ResourceLimits& limits) {
  const int p = t.phi.p();
  const int n = t.phi.n();
  const IndexSpace space(p, n);
  const Index N = space.size();
  FiberStatsReport r;
  r.eps_prime = eps_prime;
  r.measured_eps = -1.0;
  if (uniformity_s > 0) {
    try {
      double worst = 0.0;
      for (const auto* s : {&t.A, &t.B, &t.C, &t.D}) {
        worst = std::max(worst, gowers_u(s->table() - s->density(), uniformity_s, limits).value);
      }
      const auto phi_table = t.phi.set().table();
      worst = std::max(worst, gowers_u(phi_table - t.phi.density(), 2, limits).value);
      r.measured_eps = worst;
    } catch (const ResourceError&) {
      r.measured_eps = -1.0;
    }
  }
  const double rho = t.rho();
  const double expected[4] = {t.beta() * t.gamma() * t.delta() * rho, t.alpha() * t.gamma() * t.delta() * rho,
                              t.alpha() * t.beta() * t.delta() * rho, t.alpha() * t.beta() * t.gamma() * rho};
  const double base[4] = {t.alpha(), t.beta(), t.gamma(), t.delta()};
  const IndicatorSet* labels[4] = {&t.A, &t.B, &t.C, &t.D};
  const char* names[4] = {"rows", "columns", "anti_diagonals", "lines_2x_plus_y"};
  for (int k = 0; k < 4; ++k) {
    auto& fam = r.families[k];
    fam.name = names[k];
    fam.expected = expected[k];
    std::uint64_t deviating = 0;
    for (Index label = 0; label < N; ++label) {
      if (!labels[k]->contains(label)) continue;
      std::uint64_t hits = 0;
      for (Index v = 0; v < N; ++v) {
        Index x = 0, y = 0;
        switch (k) {
          case 0: x = label; y = v; break;
          case 1: x = v; y = label; break;
          case 2: x = v; y = space.sub(label, v); break;
          default: x = v; y = space.combine(1, label, -2, v); break;
        }
        hits += t.T.contains(pair_index(x, y, N)) ? 1 : 0;
      }
      const double density = static_cast<double>(hits) / static_cast<double>(N);
      fam.densities.push_back(density);
      if (std::abs(density - fam.expected) > eps_prime) ++deviating;
    }
    if (!fam.densities.empty()) {
      fam.mean = pairwise_sum(std::span<const double>(fam.densities)) / static_cast<double>(fam.densities.size());
      fam.deviating_proportion = static_cast<double>(deviating) / static_cast<double>(fam.densities.size());
    }
    if (r.measured_eps >= 0.0 && base[k] > 0.0 && eps_prime > 0.0) {
      fam.bound_shape = std::pow(r.measured_eps, 1.0 / 8.0) / (eps_prime * eps_prime * base[k]);
    }
  }
  return r;
}

std::vector<int> phi_cell_levels(const FiberFamily& phi, const Cell& cell) {
  const int p = phi.p();
  const int n = phi.n();
  const IndexSpace space(p, n);
  std::vector<int> level(space.size(), -1);
  const auto& second = cell.second();
  for (Index x : cell.first().member_indices()) {
    if (!phi.A().contains(x)) continue;
    const auto& fiber = phi.fiber(x);
    std::vector<GroupVector> normals = fiber.normals();
    std::vector<Residue> offsets = fiber.offsets();
    normals.insert(normals.end(), second.normals().begin(), second.normals().end());
    offsets.insert(offsets.end(), second.offsets().begin(), second.offsets().end());
    const auto meet = AffineSubspace::from_normals(p, n, normals, offsets);
    if (meet.empty()) continue;
    level[x] = second.dim() - meet.dim();
  }
  return level;
}

std::vector<PhiLevel> phi_levels(const PhiDescriptor& phi, const Cell& cell) {
  const int p = phi.p();
  const int n = phi.n();
  const Index N = IndexSpace(p, n).size();
  const auto level = phi_cell_levels(phi.family(), cell);
  std::vector<PhiLevel> out;
  for (int i = 0; i <= phi.d(); ++i) {
    std::vector<std::uint8_t> at_most(N * N, 0);
    std::vector<std::uint8_t> exactly(N * N, 0);
    for (Index x : cell.first().member_indices()) {
      if (level[x] < 0 || level[x] > i) continue;
      for (Index y : cell.second().member_indices()) {
        if (!phi.contains(x, y)) continue;
        at_most[pair_index(x, y, N)] = 1;
        if (level[x] == i) exactly[pair_index(x, y, N)] = 1;
      }
    }
    out.push_back(PhiLevel{i, IndicatorSet(p, 2 * n, std::move(at_most)), IndicatorSet(p, 2 * n, std::move(exactly))});
  }
  // Phi restricted to the cell is the disjoint union of the exact levels.
  std::uint64_t total = 0;
  for (const auto& lv : out) total += lv.exactly.cardinality();
  std::uint64_t in_cell = 0;
  for (Index x : cell.first().member_indices()) {
    for (Index y : cell.second().member_indices()) in_cell += phi.contains(x, y) ? 1 : 0;
  }
  if (total != in_cell || out.back().at_most.cardinality() != in_cell) {
    throw std::logic_error("phi_levels: levels do not partition Phi on the cell");
  }
  return out;
}

TransferReport phi_uniformity_transfer_check(const PhiDescriptor& phi, int s, const ResourceLimits& limits,
                                             double slack) {
  TransferReport r;
  const double alpha = phi.A().density();
  r.lhs = gowers_u(phi.A().table() - alpha, s, limits).value;
  r.rhs = gowers_u(phi.set().table() - alpha * phi.rho(), s, limits).value / phi.rho();
  r.holds = r.lhs <= r.rhs + slack;
  return r;
}

namespace {

// Sum over the cube corners of sign(w) phi(x + w.h), with sign chosen by
// `keep` (returns 0 to skip, +-1 otherwise). Returns the index of the sum.
template <typename Sign>
Index signed_corner_sum(const IndexSpace& space, const std::vector<Index>& phi, const std::vector<Index>& corners,
                        Sign&& sign) {
  Index acc = 0;
  for (std::size_t w = 0; w < corners.size(); ++w) {
    const int sg = sign(w);
    if (sg == 0) continue;
    acc = space.combine(1, acc, sg, phi[corners[w]]);
  }
  return acc;
}

void fill_corners(const IndexSpace& space, Index x, const std::vector<Index>& h, std::vector<Index>& corners) {
  corners[0] = x;
  for (std::size_t w = 1; w < corners.size(); ++w) {
    const int top = std::bit_width(w) - 1;
    corners[w] = space.add(corners[w ^ (std::size_t{1} << top)], h[static_cast<std::size_t>(top)]);
  }
}

bool all_in(const IndicatorSet& A, const std::vector<Index>& corners) {
  for (Index c : corners) {
    if (!A.contains(c)) return false;
  }
  return true;
}

// Shared driver: enumerate or sample (x, h_1..h_k), keep admissible cubes,
// and count those passing `test`.
template <typename Test>
SampledProportion cube_proportion(const IndicatorSet& A, int k, double per_tuple_cost, const ResourceLimits& limits,
                                  std::uint64_t seed, std::uint64_t samples, bool force_exact, Test&& test) {
  if (A.cardinality() == 0) throw std::invalid_argument("cube statistic: A is empty");
  const IndexSpace space(A.p(), A.dim());
  const Index N = space.size();
  const double tuples = std::pow(static_cast<double>(N), k + 1);
  SampledProportion r;
  std::vector<Index> h(static_cast<std::size_t>(k));
  std::vector<Index> corners(std::size_t{1} << k);
  std::uint64_t good = 0;
  if (force_exact || tuples * per_tuple_cost <= kExactBudget) {
    limits.check_operations(tuples * per_tuple_cost, "cube statistic");
    r.exact = true;
    const auto total = static_cast<std::uint64_t>(tuples);
    for (std::uint64_t t = 0; t < total; ++t) {
      std::uint64_t rest = t;
      const Index x = rest % N;
      rest /= N;
      for (int i = 0; i < k; ++i) {
        h[static_cast<std::size_t>(i)] = rest % N;
        rest /= N;
      }
      fill_corners(space, x, h, corners);
      if (!all_in(A, corners)) continue;
      ++r.admissible;
      if (test(corners)) ++good;
    }
    r.samples = total;
  } else {
    r.exact = false;
    r.seed = seed;
    Rng rng(seed);
    const std::uint64_t max_draws = samples * 1000;
    std::uint64_t draws = 0;
    while (r.admissible < samples && draws < max_draws) {
      ++draws;
      const Index x = uniform_below(rng, N);
      for (auto& v : h) v = uniform_below(rng, N);
      fill_corners(space, x, h, corners);
      if (!all_in(A, corners)) continue;
      ++r.admissible;
      if (test(corners)) ++good;
    }
    r.samples = draws;
  }
  if (r.admissible == 0) throw std::invalid_argument("cube statistic: no admissible cubes");
  r.proportion = static_cast<double>(good) / static_cast<double>(r.admissible);
  if (!r.exact) r.standard_error = std::sqrt(r.proportion * (1.0 - r.proportion) / static_cast<double>(r.admissible));
  return r;
}

}  // namespace

SampledProportion approx_poly_proportion(const IndicatorSet& A, const std::vector<Index>& phi, int s,
                                         const ResourceLimits& limits, std::uint64_t seed, std::uint64_t samples,
                                         bool force_exact) {
  if (s < 1) throw std::invalid_argument("approx_poly_proportion: s must be >= 1");
  if (phi.size() != A.size()) throw std::invalid_argument("approx_poly_proportion: phi must have p^n entries");
  const IndexSpace space(A.p(), A.dim());
  const double cost = std::pow(2.0, s) * (A.dim() + 1);
  return cube_proportion(A, s, cost, limits, seed, samples, force_exact, [&](const std::vector<Index>& corners) {
    const Index d = signed_corner_sum(space, phi, corners, [s](std::size_t w) {
      return ((s - std::popcount(w)) % 2 == 0) ? 1 : -1;
    });
    return d == 0;
  });
}

double random_map_expected_proportion(int p, int n, int s) {
  const double N = static_cast<double>(IndexSpace(p, n).size());
  const double degenerate = 1.0 - std::pow(1.0 - 1.0 / N, s);
  return degenerate + (1.0 - degenerate) / N;
}

SampledProportion face_derivative_statistic(const IndicatorSet& A, const std::vector<Index>& phi, int s,
                                            const ResourceLimits& limits, std::uint64_t seed, std::uint64_t samples,
                                            bool force_exact) {
  if (s < 0) throw std::invalid_argument("face_derivative_statistic: s must be >= 0");
  if (phi.size() != A.size()) throw std::invalid_argument("face_derivative_statistic: phi must have p^n entries");
  const int k = 2 * s + 2;
  const IndexSpace space(A.p(), A.dim());
  const double cost = std::pow(2.0, k) * 2.0 * k * (A.dim() + 1);
  return cube_proportion(A, k, cost, limits, seed, samples, force_exact, [&](const std::vector<Index>& corners) {
    for (int i = 0; i < k; ++i) {
      for (int eps = 0; eps <= 1; ++eps) {
        const Index d = signed_corner_sum(space, phi, corners, [&](std::size_t w) {
          if (static_cast<int>((w >> i) & 1U) != eps) return 0;
          return std::popcount(w) % 2 == 0 ? 1 : -1;
        });
        if (d != 0) return false;
      }
    }
    return true;
  });
}

IntersectionReport intersection_codim_statistic(const PhiDescriptor& phi, const LinearFormSystem& sys,
                                                const std::vector<GroupVector>& shifts, const ResourceLimits& limits) {
  if (!sys.scalar()) throw std::invalid_argument("intersection_codim_statistic: scalar forms only");
  const int r = sys.size();
  if (static_cast<int>(shifts.size()) != r) throw std::invalid_argument("intersection_codim_statistic: one shift per form");
  const int p = phi.p();
  const int n = phi.n();
  const IndexSpace space(p, n);
  const Index N = space.size();
  const int m = sys.variables();
  limits.check_operations(std::pow(static_cast<double>(N), m) * r * (n * n + m), "intersection statistic");
  IntersectionReport rep;
  rep.expected_codim = r * phi.d();
  std::vector<Index> vars(static_cast<std::size_t>(m), 0);
  std::vector<Index> images(static_cast<std::size_t>(r));
  while (true) {
    bool admissible = true;
    for (int i = 0; i < r && admissible; ++i) {
      images[static_cast<std::size_t>(i)] = sys.image(i, vars, space);
      admissible = phi.A().contains(images[static_cast<std::size_t>(i)]);
    }
    if (admissible) {
      ++rep.admissible;
      std::vector<GroupVector> normals;
      std::vector<Residue> offsets;
      for (int i = 0; i < r; ++i) {
        const auto& fiber = phi.family().fiber(images[static_cast<std::size_t>(i)]);
        for (std::size_t k = 0; k < fiber.normals().size(); ++k) {
          normals.push_back(fiber.normals()[k]);
          // y + w_i in fiber  <=>  normal . y = offset - normal . w_i
          offsets.push_back(fiber.offsets()[k] - dot(fiber.normals()[k], shifts[static_cast<std::size_t>(i)]));
        }
      }
      const auto meet = AffineSubspace::from_normals(p, n, normals, offsets);
      const int codim = meet.empty() ? n : meet.codim();
      if (codim != rep.expected_codim) ++rep.degenerate;
    }
    int i = 0;
    while (i < m) {
      if (++vars[static_cast<std::size_t>(i)] < N) break;
      vars[static_cast<std::size_t>(i)] = 0;
      ++i;
    }
    if (i == m) break;
  }
  rep.proportion = rep.admissible ? static_cast<double>(rep.degenerate) / static_cast<double>(rep.admissible) : 0.0;
  return rep;
}

}  // namespace lshape
