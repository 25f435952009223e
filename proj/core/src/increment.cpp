#include "lshape/increment.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "lshape/configurations.hpp"
#include "lshape/gowers.hpp"
#include "lshape/random.hpp"
#include "lshape/spectral.hpp"

namespace lshape {

namespace {

Index pow_index(int p, int e) {
  Index r = 1;
  for (int i = 0; i < e; ++i) r *= static_cast<Index>(p);
  return r;
}

void check_pair_set(const IndicatorSet& s, int p, int n, const char* what) {
  if (s.p() != p || s.dim() != 2 * n) throw std::invalid_argument(std::string(what) + ": set shape mismatch");
}

double u2_deviation(const FunctionTable& f) {
  if (f.dim() == 0) return 0.0;
  const double fourth = u2_fourth_power(f - f.mean());
  return std::pow(std::max(0.0, fourth), 0.25);
}

// Maximizing character of f - E f on its own domain.
GroupVector top_character(const FunctionTable& f) { return inverse_u2(f - f.mean()).xi; }

std::vector<Cell> split_cell(const Cell& cell, const std::vector<GroupVector>& xis) {
  const int p = cell.p();
  const int n = cell.n();
  auto normals = cell.linear().normals();
  for (const auto& xi : xis) {
    if (xi.p() != p || xi.dim() != n) throw std::invalid_argument("refine_on_character: character dimension mismatch");
    if (!xi.is_zero()) normals.push_back(xi);
  }
  const auto sub = AffineSubspace::from_normals(p, n, normals, std::vector<Residue>(normals.size(), 0));
  if (sub.dim() == cell.dim()) {
    throw std::invalid_argument("refine_on_character: character is trivial on the cell's subspace");
  }
  const auto firsts = coset_representatives(cell.first(), sub);
  const auto seconds = coset_representatives(cell.second(), sub);
  std::vector<Cell> out;
  out.reserve(firsts.size() * seconds.size());
  for (const auto& b : seconds) {
    for (const auto& a : firsts) out.emplace_back(sub, a, b);
  }
  return out;
}

AffineSubspace shifted_coset(const Cell& cell, Residue a, Residue b) {
  const auto offset = vec_add(vec_scale(a, cell.u()), vec_scale(b, cell.w()));
  return AffineSubspace::coset(cell.p(), cell.n(), cell.linear().normals(), offset);
}

std::uint64_t count_in(const IndicatorSet& s, const std::vector<Index>& members) {
  std::uint64_t c = 0;
  for (Index i : members) c += s.contains(i) ? 1 : 0;
  return c;
}

void shuffle(Rng& rng, std::vector<Index>& v) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_below(rng, i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace

ProductCosetPartition::ProductCosetPartition(int p, int n, std::vector<Cell> cells)
    : p_(p), n_(n), cells_(std::move(cells)) {
  const Index N = IndexSpace(p, n).size();
  std::vector<std::uint32_t> hits(N * N, 0);
  for (const auto& c : cells_) {
    if (c.p() != p || c.n() != n) throw std::invalid_argument("ProductCosetPartition: cell shape mismatch");
    for (Index m : c.members()) ++hits[m];
  }
  for (Index i = 0; i < N * N; ++i) {
    if (hits[i] != 1) {
      throw std::invalid_argument("ProductCosetPartition: point " + std::to_string(i) + " is covered " +
                                  std::to_string(hits[i]) + " times");
    }
  }
}

ProductCosetPartition ProductCosetPartition::trivial(int p, int n) {
  return ProductCosetPartition(p, n, {Cell::full(p, n)});
}

bool ProductCosetPartition::refines(const ProductCosetPartition& coarse) const {
  if (coarse.p_ != p_ || coarse.n_ != n_) return false;
  const IndexSpace space(p_, n_);
  for (const auto& fine : cells_) {
    const Index x = fine.u().index();
    const Index y = fine.w().index();
    const Cell* host = nullptr;
    for (const auto& c : coarse.cells_) {
      if (c.contains(x, y)) {
        host = &c;
        break;
      }
    }
    if (host == nullptr) return false;
    for (const auto& b : fine.linear().basis()) {
      if (!host->linear().contains(b)) return false;
    }
  }
  return true;
}

CellStats cell_stats(const Cell& cell, const TDescriptor& t) {
  const int p = t.phi.p();
  const int n = t.phi.n();
  if (cell.p() != p || cell.n() != n) throw std::invalid_argument("cell_stats: cell shape mismatch");
  const Index N = IndexSpace(p, n).size();
  CellStats cs;
  const auto V = static_cast<double>(cell.second().size());
  cs.mass = static_cast<double>(cell.size()) / static_cast<double>(N * N);
  cs.beta = static_cast<double>(count_in(t.B, cell.second().member_indices())) / V;
  cs.gamma = static_cast<double>(count_in(t.C, shifted_coset(cell, 1, 1).member_indices())) / V;
  cs.delta = static_cast<double>(count_in(t.D, shifted_coset(cell, 2, 1).member_indices())) / V;

  const int d = t.phi.d();
  const auto levels = phi_cell_levels(t.phi.family(), cell);
  std::vector<double> counts(static_cast<std::size_t>(d) + 1, 0.0);
  const auto vsize = cell.second().size();
  for (Index x : cell.first().member_indices()) {
    const int l = levels[x];
    if (l < 0) continue;
    const double fiber = static_cast<double>(vsize / pow_index(p, l));
    for (int i = l; i <= d; ++i) counts[static_cast<std::size_t>(i)] += fiber;
  }
  for (double c : counts) cs.phi_le.push_back(c / (V * V));
  cs.t_count = count_in(t.T, cell.members());
  return cs;
}

EnergyBreakdown energy_breakdown(const ProductCosetPartition& partition, const TDescriptor& t) {
  EnergyBreakdown e;
  for (const auto& c : partition.cells()) {
    const auto cs = cell_stats(c, t);
    e.sums[0] += cs.beta * cs.beta * cs.mass;
    e.sums[1] += cs.gamma * cs.gamma * cs.mass;
    e.sums[2] += cs.delta * cs.delta * cs.mass;
    double phi = 0.0;
    for (double v : cs.phi_le) phi += v * v;
    e.sums[3] += phi * cs.mass;
  }
  e.total = (e.sums[0] + e.sums[1] + e.sums[2] + e.sums[3]) / (4.0 + t.phi.d());
  return e;
}

double energy(const ProductCosetPartition& partition, const TDescriptor& t) {
  return energy_breakdown(partition, t).total;
}

ProductCosetPartition refine_on_characters(const ProductCosetPartition& partition, std::size_t index,
                                           const std::vector<GroupVector>& xis) {
  if (index >= partition.size()) throw std::out_of_range("refine_on_character: no such cell");
  std::vector<Cell> cells;
  for (std::size_t i = 0; i < partition.size(); ++i) {
    if (i != index) {
      cells.push_back(partition.cell(i));
      continue;
    }
    for (auto& c : split_cell(partition.cell(i), xis)) cells.push_back(std::move(c));
  }
  return ProductCosetPartition(partition.p(), partition.n(), std::move(cells));
}

ProductCosetPartition refine_on_character(const ProductCosetPartition& partition, std::size_t index,
                                          const GroupVector& xi, RefineSlot slot) {
  if (xi.is_zero()) throw std::invalid_argument("refine_on_character: zero character");
  const int n = partition.n();
  if (slot != RefineSlot::mixed) {
    if (xi.dim() != n) throw std::invalid_argument("refine_on_character: character dimension mismatch");
    return refine_on_characters(partition, index, {xi});
  }
  if (xi.dim() != 2 * n) throw std::invalid_argument("refine_on_character: mixed character must live on F_p^{2n}");
  const auto d = xi.digits();
  const GroupVector a(xi.p(), std::vector<Residue>(d.begin(), d.begin() + n));
  const GroupVector b(xi.p(), std::vector<Residue>(d.begin() + n, d.end()));
  return refine_on_characters(partition, index, {a, b});
}

MonotoneReport energy_monotone_check(const ProductCosetPartition& coarse, const ProductCosetPartition& fine,
                                     const TDescriptor& t, double slack) {
  if (!fine.refines(coarse)) throw std::invalid_argument("energy_monotone_check: not a refinement");
  MonotoneReport r;
  r.coarse = energy_breakdown(coarse, t);
  r.fine = energy_breakdown(fine, t);
  for (int k = 0; k < 4; ++k) {
    if (r.fine.sums[k] < r.coarse.sums[k] - slack) r.holds = false;
  }
  return r;
}

CellStatus classify_cell(const Cell& cell, const TDescriptor& t, double eps, double tau) {
  const int p = t.phi.p();
  const int d = t.phi.d();
  CellStatus st;
  const auto cs = cell_stats(cell, t);
  const double floor = tau * t.T.density() / 4.0;
  st.expired = cs.beta < floor || cs.gamma < floor || cs.delta < floor || cs.phi_le.back() < floor;

  std::vector<std::vector<GroupVector>> chars;
  auto consider = [&](const FunctionTable& f, const std::function<std::vector<GroupVector>(const GroupVector&)>& lift) {
    const double dev = u2_deviation(f);
    st.deviations.push_back(dev);
    chars.push_back(dev >= eps ? lift(top_character(f)) : std::vector<GroupVector>{});
  };

  const auto& second = cell.second();
  const auto lift_second = [&](const GroupVector& eta) { return std::vector<GroupVector>{second.lift_character(eta)}; };
  if (cell.dim() == 0) {
    st.deviations.assign(static_cast<std::size_t>(4 + d), 0.0);
    return st;
  }
  consider(restrict(t.B, second).table(), lift_second);
  const auto cpl = shifted_coset(cell, 1, 1);
  consider(restrict(t.C, cpl).table(), lift_second);
  const auto dpl = shifted_coset(cell, 2, 1);
  consider(restrict(t.D, dpl).table(), lift_second);

  const int dimV = cell.dim();
  const Index vsize = second.size();
  const auto levels = phi_cell_levels(t.phi.family(), cell);
  const auto xs = cell.first().member_indices();
  const auto ys = second.member_indices();
  const auto lift_mixed = [&](const GroupVector& eta) {
    const auto dg = eta.digits();
    const GroupVector a(p, std::vector<Residue>(dg.begin(), dg.begin() + dimV));
    const GroupVector b(p, std::vector<Residue>(dg.begin() + dimV, dg.end()));
    std::vector<GroupVector> out;
    if (!a.is_zero()) out.push_back(cell.first().lift_character(a));
    if (!b.is_zero()) out.push_back(second.lift_character(b));
    return out;
  };
  for (int i = 0; i <= d; ++i) {
    std::vector<Complex> values(vsize * vsize, 0.0);
    for (Index a = 0; a < vsize; ++a) {
      const Index x = xs[a];
      if (levels[x] < 0 || levels[x] > i) continue;
      for (Index b = 0; b < vsize; ++b) {
        if (t.phi.contains(x, ys[b])) values[a + vsize * b] = 1.0;
      }
    }
    consider(FunctionTable(p, 2 * dimV, std::move(values), TableKind::real), lift_mixed);
  }

  std::size_t worst = st.deviations.size();
  for (std::size_t k = 0; k < st.deviations.size(); ++k) {
    if (st.deviations[k] >= eps && (worst == st.deviations.size() || st.deviations[k] > st.deviations[worst])) {
      worst = k;
    }
  }
  if (worst < st.deviations.size()) {
    st.uniform = false;
    st.refine_on = chars[worst];
  }
  return st;
}

PseudorandomizeResult pseudorandomize_u2(const TDescriptor& t, const IndicatorSet& s, double eps, double tau,
                                         int min_cell_dim) {
  if (!(eps > 0.0 && eps < 1.0) || !(tau > 0.0 && tau < 1.0)) {
    throw std::invalid_argument("pseudorandomize_u2: eps and tau must lie in (0, 1)");
  }
  const int p = t.phi.p();
  const int n = t.phi.n();
  const int d = t.phi.d();
  check_pair_set(s, p, n, "pseudorandomize_u2");
  if (t.T.cardinality() == 0) throw std::invalid_argument("pseudorandomize_u2: T is empty");
  const Index N = IndexSpace(p, n).size();
  const double NN = static_cast<double>(N * N);
  const double muT = t.T.density();
  const auto S = s.intersect(t.T);

  PseudorandomizeResult r(ProductCosetPartition::trivial(p, n));
  r.round_bound = (4.0 + d) / std::pow(eps, 4);
  std::vector<CellStatus> status;
  double current = energy(r.partition, t);
  for (;;) {
    status.clear();
    double bad = 0.0;
    for (const auto& c : r.partition.cells()) {
      status.push_back(classify_cell(c, t, eps, tau));
      if (!status.back().expired && !status.back().uniform) {
        bad += static_cast<double>(count_in(t.T, c.members())) / NN;
      }
    }
    r.final_bad_t_mass = bad;
    if (bad < tau * muT / 2.0) break;

    PseudorandomRound round;
    round.round = static_cast<int>(r.rounds.size()) + 1;
    round.energy_before = current;
    round.bad_t_mass = bad;
    std::vector<Cell> cells;
    for (std::size_t i = 0; i < r.partition.size(); ++i) {
      const auto& c = r.partition.cell(i);
      if (status[i].expired || status[i].uniform) {
        cells.push_back(c);
        continue;
      }
      round.refined_mass += static_cast<double>(c.size()) / NN;
      ++round.refined_cells;
      for (auto& piece : split_cell(c, status[i].refine_on)) cells.push_back(std::move(piece));
    }
    if (round.refined_cells == 0) {
      r.exhausted = true;
      break;
    }
    r.partition = ProductCosetPartition(p, n, std::move(cells));
    current = energy(r.partition, t);
    round.energy_after = current;
    round.guaranteed_gain = std::pow(eps, 4) * round.refined_mass / (4.0 + d);
    if (round.energy_after < round.energy_before + round.guaranteed_gain - 1e-12) {
      throw std::logic_error("pseudorandomize_u2: energy gain below the U^2 inverse bound in round " +
                             std::to_string(round.round));
    }
    r.rounds.push_back(round);
    if (static_cast<double>(r.rounds.size()) > r.round_bound) {
      throw std::logic_error("pseudorandomize_u2: round count exceeds (4+d)/eps^4");
    }
  }
  r.final_energy = current;

  r.sigma = static_cast<double>(S.cardinality()) / static_cast<double>(t.T.cardinality()) - tau;
  r.target = r.sigma + tau / 4.0;
  double best = -1.0;
  for (std::size_t k = 0; k < r.partition.size(); ++k) {
    const auto& c = r.partition.cell(k);
    if (status[k].expired || !status[k].uniform || c.dim() < min_cell_dim) continue;
    const auto levels = phi_cell_levels(t.phi.family(), c);
    const auto xs = c.first().member_indices();
    const auto ys = c.second().member_indices();
    for (int i = 0; i <= d; ++i) {
      std::uint64_t tc = 0;
      std::uint64_t sc = 0;
      for (Index x : xs) {
        if (levels[x] != i) continue;
        for (Index y : ys) {
          const Index m = pair_index(x, y, N);
          tc += t.T.contains(m) ? 1 : 0;
          sc += S.contains(m) ? 1 : 0;
        }
      }
      if (tc == 0) continue;
      const double ratio = static_cast<double>(sc) / static_cast<double>(tc);
      if (ratio > best) {
        best = ratio;
        r.cell = k;
        r.level = i;
        r.ratio = ratio;
      }
    }
  }
  r.reached = r.cell.has_value() && r.ratio >= r.target;
  return r;
}

double relative_density(const IndicatorSet& s, const IndicatorSet& t) {
  if (t.cardinality() == 0) throw std::invalid_argument("relative_density: empty reference set");
  return static_cast<double>(s.intersect(t).cardinality()) / static_cast<double>(t.cardinality());
}

TDescriptor replace_factor(const TDescriptor& t, char which, const IndicatorSet& replacement) {
  switch (which) {
    case 'A': {
      if (!replacement.subset_of(t.A)) throw std::invalid_argument("replace_factor: new A must lie inside A");
      std::vector<std::vector<GroupVector>> normals(replacement.size());
      for (Index x = 0; x < replacement.size(); ++x) {
        if (replacement.contains(x)) normals[x] = t.phi.normals(x);
      }
      return build_T(t.B, t.C, t.D, build_phi_normals(replacement, normals, t.phi.u(), t.phi.d()));
    }
    case 'B': return build_T(replacement, t.C, t.D, t.phi);
    case 'C': return build_T(t.B, replacement, t.D, t.phi);
    case 'D': return build_T(t.B, t.C, replacement, t.phi);
    default: throw std::invalid_argument(std::string("replace_factor: unknown factor '") + which + "'");
  }
}

namespace {

struct Split {
  char which;
  std::vector<double> means;  // per label, normalized by N
  const IndicatorSet* labels;
  double threshold;           // per-label cut
};

// Candidate factors from the sign-majority part of the large fiber means.
void try_split(const Split& sp, const IndicatorSet& S, const TDescriptor& t, IncrementReport& best) {
  std::vector<std::uint8_t> pos(sp.labels->size(), 0);
  std::vector<std::uint8_t> neg(sp.labels->size(), 0);
  std::size_t np = 0;
  std::size_t nn = 0;
  for (Index v = 0; v < sp.labels->size(); ++v) {
    if (!sp.labels->contains(v) || std::abs(sp.means[v]) < sp.threshold) continue;
    if (sp.means[v] >= 0.0) {
      pos[v] = 1;
      ++np;
    } else {
      neg[v] = 1;
      ++nn;
    }
  }
  if (np + nn == 0) return;
  const IndicatorSet one(sp.labels->p(), sp.labels->dim(), np >= nn ? std::move(pos) : std::move(neg));
  for (const auto& cand : {one, sp.labels->minus(one)}) {
    if (cand.cardinality() == 0) continue;
    auto tp = replace_factor(t, sp.which, cand);
    if (tp.T.cardinality() == 0) continue;
    const auto sc = S.intersect(tp.T).cardinality();
    const double after = static_cast<double>(sc) / static_cast<double>(tp.T.cardinality());
    if (after > best.after) {
      best.after = after;
      best.replaced = sp.which;
      best.subset = cand;
      best.s_count = sc;
      best.t_count = tp.T.cardinality();
      best.t_prime = std::move(tp);
    }
  }
}

void finish(IncrementReport& r) {
  if (r.t_prime && r.after > r.before + 1e-12) {
    r.success = true;
    r.gain = r.after - r.before;
    return;
  }
  r.success = false;
  r.after = r.before;
  r.gain = 0.0;
  r.replaced = 0;
  r.subset.reset();
  r.t_prime.reset();
  r.s_count = 0;
  r.t_count = 0;
}

}  // namespace

IncrementReport deg1_increment(const IndicatorSet& s, const TDescriptor& t, double tau) {
  const int p = t.phi.p();
  const int n = t.phi.n();
  check_pair_set(s, p, n, "deg1_increment");
  if (!s.subset_of(t.T)) throw std::invalid_argument("deg1_increment: S must lie inside T");
  const IndexSpace space(p, n);
  const Index N = space.size();
  IncrementReport r;
  r.tool = "deg1_increment";
  r.before = relative_density(s, t.T);
  r.after = r.before;
  const double sigma = r.before;

  std::vector<double> rows(N, 0.0), cols(N, 0.0), anti(N, 0.0);
  for (Index y = 0; y < N; ++y) {
    for (Index x = 0; x < N; ++x) {
      const Index m = pair_index(x, y, N);
      const double g = (s.contains(m) ? 1.0 : 0.0) - sigma * (t.T.contains(m) ? 1.0 : 0.0);
      rows[x] += g;
      cols[y] += g;
      anti[space.add(x, y)] += g;
    }
  }
  auto mean_square = [&](std::vector<double>& v) {
    double acc = 0.0;
    for (auto& e : v) {
      e /= static_cast<double>(N);
      acc += e * e;
    }
    return acc / static_cast<double>(N);
  };
  const double a = t.alpha(), b = t.beta(), c = t.gamma(), dd = t.delta(), rho = t.rho();
  struct Family {
    const char* name;
    char which;
    std::vector<double>* means;
    const IndicatorSet* labels;
    double stat;
    double threshold;
    double scale;
  };
  Family fams[3] = {
      {"rows", 'A', &rows, &t.A, mean_square(rows), 0.0, b * c * dd * rho},
      {"columns", 'B', &cols, &t.B, mean_square(cols), 0.0, a * c * dd * rho},
      {"anti_diagonals", 'C', &anti, &t.C, mean_square(anti), 0.0, a * b * dd * rho},
  };
  fams[0].threshold = tau * a * fams[0].scale * fams[0].scale;
  fams[1].threshold = tau * b * fams[1].scale * fams[1].scale;
  fams[2].threshold = tau * c * fams[2].scale * fams[2].scale;

  double best_ratio = -1.0;
  for (const auto& f : fams) {
    const double ratio = f.threshold > 0.0 ? f.stat / f.threshold : 0.0;
    const bool trig = f.stat >= f.threshold && f.stat > 0.0;
    if (trig) {
      const double before_after = r.after;
      try_split(Split{f.which, *f.means, f.labels, std::sqrt(tau) * f.scale / 4.0}, s, t, r);
      if (!r.triggered || r.after > before_after) {
        r.statistic = f.name;
        r.statistic_value = f.stat;
        r.threshold = f.threshold;
      }
      r.triggered = true;
    } else if (!r.triggered && ratio > best_ratio) {
      best_ratio = ratio;
      r.statistic = f.name;
      r.statistic_value = f.stat;
      r.threshold = f.threshold;
    }
  }
  finish(r);
  return r;
}

IncrementReport star3_fiber_split(const IndicatorSet& s, const TDescriptor& t, double tau) {
  const int p = t.phi.p();
  const int n = t.phi.n();
  check_pair_set(s, p, n, "star3_fiber_split");
  if (!s.subset_of(t.T)) throw std::invalid_argument("star3_fiber_split: S must lie inside T");
  const IndexSpace space(p, n);
  const Index N = space.size();
  IncrementReport r;
  r.tool = "star3_fiber_split";
  r.statistic = "lines_2x_plus_y";
  r.before = relative_density(s, t.T);
  r.after = r.before;
  const double sigma = r.before;

  std::vector<Complex> g(N * N);
  std::vector<double> lines(N, 0.0);
  for (Index y = 0; y < N; ++y) {
    for (Index x = 0; x < N; ++x) {
      const Index m = pair_index(x, y, N);
      const double v = (s.contains(m) ? 1.0 : 0.0) - sigma * (t.T.contains(m) ? 1.0 : 0.0);
      g[m] = v;
      lines[space.combine(2, x, 1, y)] += v;
    }
  }
  for (auto& e : lines) e /= static_cast<double>(N);
  const double a = t.alpha(), b = t.beta(), c = t.gamma(), dd = t.delta(), rho = t.rho();
  r.statistic_value = star_norm(FunctionTable(p, 2 * n, std::move(g), TableKind::real), 3).value;
  r.threshold = tau * a * b * c * std::sqrt(dd) * rho;
  r.triggered = r.statistic_value >= r.threshold && r.statistic_value > 0.0;
  try_split(Split{'D', lines, &t.D, tau * a * b * c * rho / 4.0}, s, t, r);
  finish(r);
  return r;
}

bool verify_increment(const IncrementReport& report, const IndicatorSet& s, double tol) {
  if (!report.t_prime) return !report.success && report.gain == 0.0 && report.after == report.before;
  const auto& tp = *report.t_prime;
  const int p = tp.phi.p();
  const int n = tp.phi.n();
  const IndexSpace space(p, n);
  const Index N = space.size();
  std::uint64_t tc = 0;
  std::uint64_t sc = 0;
  for (Index y = 0; y < N; ++y) {
    for (Index x = 0; x < N; ++x) {
      const bool in = tp.B.contains(y) && tp.C.contains(space.add(x, y)) && tp.D.contains(space.combine(2, x, 1, y)) &&
                      tp.A.contains(x) && tp.phi.contains(x, y);
      if (!in) continue;
      ++tc;
      sc += s.contains(pair_index(x, y, N)) ? 1 : 0;
    }
  }
  if (tc == 0 || tc != report.t_count || sc != report.s_count) return false;
  const double after = static_cast<double>(sc) / static_cast<double>(tc);
  if (std::abs(after - report.after) > tol) return false;
  if (report.success && report.after < report.before) return false;
  return std::abs(report.gain - (report.after - report.before)) <= tol;
}

AlignReport align_translate(const FiberFamily& psi, const IndicatorSet& K, const IndicatorSet& s, double tau) {
  const int p = psi.p();
  const int n = psi.n();
  check_pair_set(K, p, n, "align_translate");
  check_pair_set(s, p, n, "align_translate");
  const auto codim = psi.uniform_codim();
  const auto& A = psi.A();
  if (A.cardinality() == 0) throw std::invalid_argument("align_translate: empty A");
  if (!codim) throw std::invalid_argument("align_translate: fibers must share one codimension");
  const int d = *codim;
  const IndexSpace space(p, n);
  const Index N = space.size();

  AlignReport r(IndicatorSet::empty(p, n));
  r.alpha = A.density();
  r.rho = 1.0 / static_cast<double>(pow_index(p, d));
  r.mass_floor = tau * r.alpha * r.rho / 2.0;

  // Per-x counts of K and S cap K along the fiber, plus the hypothesis scan.
  std::vector<std::uint64_t> kc(N, 0), sc(N, 0);
  const auto ds = pow_index(p, d);
  double kappa = 0.0;
  std::vector<std::vector<std::uint64_t>> per_coset(N);
  for (Index x = 0; x < N; ++x) {
    if (!A.contains(x)) continue;
    const auto& f = psi.fiber(x);
    auto& bins = per_coset[x];
    bins.assign(ds, 0);
    for (Index y = 0; y < N; ++y) {
      const Index m = pair_index(x, y, N);
      if (!K.contains(m)) continue;
      Index label = 0;
      for (int j = d - 1; j >= 0; --j) {
        label = label * static_cast<Index>(p) + static_cast<Index>(space.dot(f.normals()[j].index(), y));
      }
      ++bins[label];
      if (f.contains_index(space, y)) {
        ++kc[x];
        sc[x] += s.contains(m) ? 1 : 0;
      }
    }
    std::uint64_t row = 0;
    for (auto v : bins) row += v;
    kappa += static_cast<double>(row) / static_cast<double>(N);
  }
  kappa /= static_cast<double>(A.cardinality());
  r.kappa = kappa;
  for (Index x = 0; x < N; ++x) {
    if (!A.contains(x)) continue;
    std::uint64_t row = 0;
    for (auto v : per_coset[x]) {
      row += v;
      r.coset_deviation =
          std::max(r.coset_deviation, std::abs(static_cast<double>(v) / static_cast<double>(N) - kappa * r.rho));
    }
    r.row_deviation = std::max(r.row_deviation, std::abs(static_cast<double>(row) / static_cast<double>(N) - kappa));
  }

  std::uint64_t k_all = 0, s_all = 0;
  for (Index x = 0; x < N; ++x) {
    k_all += kc[x];
    s_all += sc[x];
  }
  r.before = k_all ? static_cast<double>(s_all) / static_cast<double>(k_all) : 0.0;
  r.after = r.before;

  double best = -1.0;
  Index best_u = 0;
  std::vector<std::uint8_t> best_members;
  for (Index u = 0; u < N; ++u) {
    std::vector<std::uint8_t> members(N, 0);
    std::uint64_t size = 0, ku = 0, su = 0;
    for (Index x = 0; x < N; ++x) {
      if (!A.contains(x) || !psi.fiber(x).contains_index(space, u)) continue;
      members[x] = 1;
      ++size;
      ku += kc[x];
      su += sc[x];
    }
    r.identity_lhs += size;
    if (static_cast<double>(size) / static_cast<double>(N) < r.mass_floor || ku == 0) continue;
    const double g = static_cast<double>(su) / static_cast<double>(ku);
    if (g > best) {
      best = g;
      best_u = u;
      best_members = std::move(members);
      r.s_count = su;
      r.t_count = ku;
    }
  }
  r.identity_rhs = A.cardinality() * pow_index(p, n - d);
  if (r.identity_lhs != r.identity_rhs) throw std::logic_error("align_translate: averaging identity failed");
  r.u = GroupVector::from_index(p, n, best_u);
  if (best < 0.0) {
    r.A_u = IndicatorSet::empty(p, n);
    return r;
  }
  r.success = true;
  r.A_u = IndicatorSet(p, n, std::move(best_members));
  r.after = best;
  r.gain = r.after - r.before;
  return r;
}

std::string to_string(SearchMethod m) {
  switch (m) {
    case SearchMethod::exhaustive: return "exhaustive";
    case SearchMethod::greedy: return "greedy";
    case SearchMethod::local: return "local";
    case SearchMethod::random: return "random";
  }
  return "?";
}

SearchMethod search_method_from_string(const std::string& name) {
  if (name == "exhaustive") return SearchMethod::exhaustive;
  if (name == "greedy") return SearchMethod::greedy;
  if (name == "local") return SearchMethod::local;
  if (name == "random") return SearchMethod::random;
  throw std::invalid_argument("unknown search method '" + name + "'");
}

namespace {

// For each point q of F_p^n x F_p^n, the triples of points completing an L
// together with q (q in any of the four roles, z != 0).
class LTriples {
 public:
  LTriples(int p, int n) : space_(p, n), N_(space_.size()), offsets_(N_ * N_ + 1, 0) {
    const Index M = N_ * N_;
    for (Index q = 0; q < M; ++q) {
      const Index x = q % N_;
      const Index y = q / N_;
      for (Index z = 1; z < N_; ++z) {
        auto pt = [&](Index a, Index b) { return pair_index(a, b, N_); };
        const Index yp = space_.add(y, z), yp2 = space_.combine(1, y, 2, z);
        const Index ym = space_.sub(y, z), ym2 = space_.combine(1, y, static_cast<Residue>(p - 2), z);
        const Index xp = space_.add(x, z), xm = space_.sub(x, z);
        push(pt(x, yp), pt(x, yp2), pt(xp, y));
        push(pt(x, ym), pt(x, yp), pt(xp, ym));
        push(pt(x, ym2), pt(x, ym), pt(xp, ym2));
        push(pt(xm, y), pt(xm, yp), pt(xm, yp2));
      }
      offsets_[q + 1] = triples_.size();
    }
  }

  Index points() const { return N_ * N_; }

  bool completes(Index q, const std::vector<std::uint8_t>& in) const {
    for (std::size_t k = offsets_[q]; k < offsets_[q + 1]; ++k) {
      const auto& t = triples_[k];
      if (in[t[0]] && in[t[1]] && in[t[2]]) return true;
    }
    return false;
  }

 private:
  void push(Index a, Index b, Index c) { triples_.push_back({a, b, c}); }

  IndexSpace space_;
  Index N_;
  std::vector<std::size_t> offsets_;
  std::vector<std::array<Index, 3>> triples_;
};

std::vector<std::uint8_t> greedy_pass(const LTriples& lt, std::vector<std::uint8_t> in, const std::vector<Index>& order) {
  for (Index q : order) {
    if (!in[q] && !lt.completes(q, in)) in[q] = 1;
  }
  return in;
}

std::size_t popcount(const std::vector<std::uint8_t>& in) {
  return static_cast<std::size_t>(std::count(in.begin(), in.end(), std::uint8_t{1}));
}

}  // namespace

IndicatorSet greedy_L_free(const IndicatorSet& candidates, std::uint64_t seed) {
  if (candidates.dim() % 2 != 0) throw std::invalid_argument("greedy_L_free: set must live on F_p^n x F_p^n");
  const LTriples lt(candidates.p(), candidates.dim() / 2);
  Rng rng(seed);
  auto order = candidates.elements();
  shuffle(rng, order);
  auto in = greedy_pass(lt, std::vector<std::uint8_t>(lt.points(), 0), order);
  return IndicatorSet(candidates.p(), candidates.dim(), std::move(in));
}

ExtremalResult search_extremal_L_free(int p, int n, SearchMethod method, std::uint64_t budget, std::uint64_t seed) {
  const LTriples lt(p, n);
  const Index M = lt.points();
  std::vector<Index> all(M);
  for (Index i = 0; i < M; ++i) all[i] = i;
  Rng rng(seed);
  ExtremalResult r(IndicatorSet::empty(p, 2 * n));
  r.method = method;
  std::vector<std::uint8_t> best;

  auto random_greedy = [&] {
    auto order = all;
    shuffle(rng, order);
    return greedy_pass(lt, std::vector<std::uint8_t>(M, 0), order);
  };

  switch (method) {
    case SearchMethod::exhaustive: {
      if (M > 25) throw std::invalid_argument("search_extremal_L_free: exhaustive search needs p^{2n} <= 25");
      best = greedy_pass(lt, std::vector<std::uint8_t>(M, 0), all);
      std::size_t best_size = popcount(best);
      std::vector<std::uint8_t> in(M, 0);
      std::function<void(Index, std::size_t)> dfs = [&](Index pos, std::size_t count) {
        if (r.budget_exceeded) return;
        if (++r.nodes > budget) {
          r.budget_exceeded = true;
          return;
        }
        if (count + (M - pos) <= best_size) return;
        if (pos == M) {
          best_size = count;
          best = in;
          return;
        }
        if (!lt.completes(pos, in)) {
          in[pos] = 1;
          dfs(pos + 1, count + 1);
          in[pos] = 0;
        }
        dfs(pos + 1, count);
      };
      dfs(0, 0);
      r.exact = !r.budget_exceeded;
      break;
    }
    case SearchMethod::greedy:
      best = random_greedy();
      r.nodes = 1;
      break;
    case SearchMethod::random:
      for (std::uint64_t i = 0; i < std::max<std::uint64_t>(budget, 1); ++i) {
        auto cand = random_greedy();
        ++r.nodes;
        if (popcount(cand) > popcount(best)) best = std::move(cand);
      }
      break;
    case SearchMethod::local: {
      auto cur = random_greedy();
      best = cur;
      for (std::uint64_t i = 0; i < budget; ++i) {
        ++r.nodes;
        auto next = cur;
        std::vector<Index> members;
        for (Index q = 0; q < M; ++q) {
          if (next[q]) members.push_back(q);
        }
        for (int k = 0; k < 2 && !members.empty(); ++k) {
          const auto j = static_cast<std::size_t>(uniform_below(rng, members.size()));
          next[members[j]] = 0;
          members.erase(members.begin() + static_cast<std::ptrdiff_t>(j));
        }
        auto order = all;
        shuffle(rng, order);
        next = greedy_pass(lt, std::move(next), order);
        if (popcount(next) >= popcount(cur)) cur = std::move(next);
        if (popcount(cur) > popcount(best)) best = cur;
      }
      break;
    }
  }
  r.best = IndicatorSet(p, 2 * n, std::move(best));
  r.verified = is_L_free(r.best);
  if (!r.verified) throw std::logic_error("search_extremal_L_free: result is not L-free");
  return r;
}

TDescriptor full_T(int p, int n) {
  const auto all = IndicatorSet::full(p, n);
  return build_T(all, all, all, build_phi_full(all));
}

CellRestriction restrict_to_cell(const TDescriptor& t, const IndicatorSet& s, const Cell& cell, int level) {
  const int p = t.phi.p();
  const int n = t.phi.n();
  check_pair_set(s, p, n, "restrict_to_cell");
  if (level < 0 || level > t.phi.d()) throw std::invalid_argument("restrict_to_cell: level out of range");
  const int m = cell.dim();
  const IndexSpace space(p, n);
  const IndexSpace sub(p, m);
  const Index N = space.size();
  const Index Nm = sub.size();
  const auto& first = cell.first();
  const auto& second = cell.second();
  const auto cpl = shifted_coset(cell, 1, 1);
  const auto dpl = shifted_coset(cell, 2, 1);
  const auto basis = cell.linear().basis();
  const auto levels = phi_cell_levels(t.phi.family(), cell);

  std::vector<std::uint8_t> a(Nm, 0), b(Nm, 0), c(Nm, 0), dset(Nm, 0);
  std::vector<std::optional<AffineSubspace>> fibers(Nm);
  for (Index v = 0; v < Nm; ++v) {
    b[v] = t.B.contains(second.point_index(v)) ? 1 : 0;
    c[v] = t.C.contains(cpl.point_index(v)) ? 1 : 0;
    dset[v] = t.D.contains(dpl.point_index(v)) ? 1 : 0;
    const Index x = first.point_index(v);
    if (levels[x] != level) continue;
    a[v] = 1;
    const auto& f = t.phi.family().fiber(x);
    std::vector<GroupVector> normals;
    std::vector<Residue> offsets;
    for (std::size_t j = 0; j < f.normals().size(); ++j) {
      const auto& nu = f.normals()[j];
      std::vector<Residue> row(static_cast<std::size_t>(m));
      for (int k = 0; k < m; ++k) row[static_cast<std::size_t>(k)] = dot(nu, basis[static_cast<std::size_t>(k)]);
      normals.emplace_back(p, std::move(row));
      offsets.push_back(static_cast<Residue>((f.offsets()[j] - dot(nu, cell.w()) + p) % p));
    }
    auto fiber = AffineSubspace::from_normals(p, m, normals, offsets);
    if (fiber.empty() || fiber.codim() != level) throw std::logic_error("restrict_to_cell: fiber level mismatch");
    fibers[v] = std::move(fiber);
  }
  CellRestriction r{m,
                    IndicatorSet(p, m, std::move(a)),
                    IndicatorSet(p, m, std::move(b)),
                    IndicatorSet(p, m, std::move(c)),
                    IndicatorSet(p, m, std::move(dset)),
                    FiberFamily(IndicatorSet::empty(p, m), std::vector<std::optional<AffineSubspace>>(Nm)),
                    IndicatorSet::empty(p, 2 * m),
                    IndicatorSet::empty(p, 2 * m)};
  r.psi = FiberFamily(r.A, std::move(fibers));
  std::vector<std::uint8_t> k(Nm * Nm, 0), sm(Nm * Nm, 0);
  for (Index y = 0; y < Nm; ++y) {
    for (Index x = 0; x < Nm; ++x) {
      const Index mm = pair_index(x, y, Nm);
      k[mm] = r.A.contains(x) && r.B.contains(y) && r.C.contains(sub.add(x, y)) && r.D.contains(sub.combine(2, x, 1, y));
      if (k[mm] && r.psi.contains(x, y)) {
        sm[mm] = s.contains(pair_index(first.point_index(x), second.point_index(y), N)) ? 1 : 0;
      }
    }
  }
  r.K = IndicatorSet(p, 2 * m, std::move(k));
  r.S = IndicatorSet(p, 2 * m, std::move(sm));
  return r;
}

namespace {

struct DriverState {
  TDescriptor t;
  IndicatorSet s;
};

std::string describe_subset(char which, const IndicatorSet& sub) {
  std::ostringstream os;
  os << "replaced " << which << " by a subset of size " << sub.cardinality();
  return os.str();
}

}  // namespace

Trajectory increment_driver(const IndicatorSet& s0, const DriverConfig& config) {
  if (s0.dim() % 2 != 0) throw std::invalid_argument("increment_driver: set must live on F_p^n x F_p^n");
  if (!is_L_free(s0)) throw std::invalid_argument("increment_driver: starting set is not L-free");
  Trajectory traj;
  if (s0.cardinality() == 0) {
    traj.halt_reason = "empty set";
    return traj;
  }
  const int p = s0.p();
  DriverState cur{full_T(p, s0.dim() / 2), s0};

  for (int step = 1; step <= config.max_steps; ++step) {
    const int n = cur.t.phi.n();
    const double sigma = relative_density(cur.s, cur.t.T);
    TrajectoryStep best;
    best.gain = config.gain_floor;
    std::optional<DriverState> next;

    auto offer = [&](const std::string& tool, const std::string& witness, double after, DriverState st) {
      if (after - sigma <= best.gain) return;
      best.tool = tool;
      best.witness = witness;
      best.sigma_after = after;
      best.gain = after - sigma;
      next = std::move(st);
    };

    const auto d1 = deg1_increment(cur.s, cur.t, config.tau);
    if (d1.success) {
      if (!verify_increment(d1, cur.s)) throw std::logic_error("increment_driver: deg1 increment failed to verify");
      offer("deg1_increment", d1.statistic + ": " + describe_subset(d1.replaced, *d1.subset), d1.after,
            DriverState{*d1.t_prime, cur.s.intersect(d1.t_prime->T)});
    }
    const auto s3 = star3_fiber_split(cur.s, cur.t, config.tau);
    if (s3.success) {
      if (!verify_increment(s3, cur.s)) throw std::logic_error("increment_driver: star3 split failed to verify");
      offer("star3_fiber_split", describe_subset('D', *s3.subset), s3.after,
            DriverState{*s3.t_prime, cur.s.intersect(s3.t_prime->T)});
    }

    const auto pr = pseudorandomize_u2(cur.t, cur.s, config.eps, config.tau, 1);
    if (pr.cell && pr.partition.cell(*pr.cell).dim() > 0) {
      const auto& cell = pr.partition.cell(*pr.cell);
      const auto cr = restrict_to_cell(cur.t, cur.s, cell, pr.level);
      const auto al = align_translate(cr.psi, cr.K, cr.S, config.tau);
      if (al.success) {
        std::vector<std::vector<GroupVector>> normals(al.A_u.size());
        for (Index x = 0; x < al.A_u.size(); ++x) {
          if (al.A_u.contains(x)) normals[x] = cr.psi.fiber(x).normals();
        }
        auto tn = build_T(cr.B, cr.C, cr.D, build_phi_normals(al.A_u, normals, al.u, pr.level));
        auto sn = cr.S.intersect(tn.T);
        if (tn.T.cardinality() != al.t_count || sn.cardinality() != al.s_count) {
          throw std::logic_error("increment_driver: realigned T disagrees with align_translate");
        }
        std::ostringstream w;
        w << "cell codim " << cell.codim() << ", level " << pr.level << ", rounds " << pr.rounds.size()
          << ", offset " << to_string(al.u);
        offer("pseudorandomize_u2+align_translate", w.str(), al.after, DriverState{std::move(tn), std::move(sn)});
      }
    }

    if (!next) {
      traj.halt_reason = "no tool gains more than the floor";
      return traj;
    }
    if (!is_L_free(next->s)) throw std::logic_error("increment_driver: intermediate set is not L-free");
    best.step = step;
    best.sigma_before = sigma;
    cur = std::move(*next);
    best.n = cur.t.phi.n();
    best.d = cur.t.phi.d();
    best.s_count = cur.s.cardinality();
    best.t_count = cur.t.T.cardinality();
    const double check = relative_density(cur.s, cur.t.T);
    if (std::abs(check - best.sigma_after) > 1e-12) throw std::logic_error("increment_driver: density bookkeeping");
    traj.steps.push_back(best);
    (void)n;
  }
  traj.halt_reason = "step limit";
  return traj;
}

std::string to_string(PlantedKind k) { return k == PlantedKind::half_A ? "halfA" : "halfD"; }

PlantedKind planted_kind_from_string(const std::string& name) {
  if (name == "halfA") return PlantedKind::half_A;
  if (name == "halfD") return PlantedKind::half_D;
  throw std::invalid_argument("unknown planted kind '" + name + "' (expected halfA or halfD)");
}

IndicatorSet planted_set(PlantedKind kind, const TDescriptor& t, std::uint64_t seed) {
  const int p = t.phi.p();
  const int n = t.phi.n();
  const IndexSpace space(p, n);
  const Index N = space.size();
  Rng rng(seed);
  auto labels = (kind == PlantedKind::half_A ? t.A : t.D).elements();
  shuffle(rng, labels);
  std::vector<std::uint8_t> half(N, 0);
  for (std::size_t i = 0; i < (labels.size() + 1) / 2; ++i) half[labels[i]] = 1;
  return IndicatorSet::from_predicate(p, 2 * n, [&](Index m) {
    if (!t.T.contains(m)) return false;
    const Index x = m % N;
    const Index y = m / N;
    return kind == PlantedKind::half_A ? half[x] != 0 : half[space.combine(2, x, 1, y)] != 0;
  });
}

IndicatorSet planted_instance(PlantedKind kind, int p, int n, std::uint64_t seed) {
  return greedy_L_free(planted_set(kind, full_T(p, n), seed), seed);
}

}  // namespace lshape
