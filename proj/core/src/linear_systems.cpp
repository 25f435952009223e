#include "lshape/linear_systems.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "lshape/gowers.hpp"
#include "lshape/spectral.hpp"

namespace lshape {

LinearFormSystem::LinearFormSystem(int p, int r, std::vector<Row> forms) : p_(p), r_(r), blocks_(1) {
  for (auto& f : forms) forms_.push_back({std::move(f)});
  validate();
}

LinearFormSystem LinearFormSystem::with_blocks(int p, int r, std::vector<std::vector<Row>> forms) {
  LinearFormSystem sys;
  sys.p_ = p;
  sys.r_ = r;
  sys.blocks_ = forms.empty() ? 1 : static_cast<int>(forms[0].size());
  sys.forms_ = std::move(forms);
  sys.validate();
  return sys;
}

void LinearFormSystem::validate() {
  if (!is_prime(p_) || p_ == 2) throw std::invalid_argument("LinearFormSystem: p must be an odd prime");
  if (r_ < 1) throw std::invalid_argument("LinearFormSystem: need at least one variable");
  if (forms_.empty()) throw std::invalid_argument("LinearFormSystem: no forms");
  if (blocks_ < 1) throw std::invalid_argument("LinearFormSystem: forms need at least one block");
  for (auto& f : forms_) {
    if (static_cast<int>(f.size()) != blocks_) throw std::invalid_argument("LinearFormSystem: ragged block count");
    bool nonzero = false;
    for (auto& row : f) {
      if (static_cast<int>(row.size()) != r_) throw std::invalid_argument("LinearFormSystem: row length != r");
      for (auto& c : row) {
        c = ((c % p_) + p_) % p_;
        nonzero = nonzero || c != 0;
      }
    }
    if (!nonzero) throw std::invalid_argument("LinearFormSystem: zero form");
  }
}

const LinearFormSystem::Row& LinearFormSystem::form(int j) const {
  if (!scalar()) throw std::logic_error("LinearFormSystem::form: system has block forms");
  return forms_[static_cast<std::size_t>(j)][0];
}

Index LinearFormSystem::image(int j, std::span<const Index> vars, const IndexSpace& space) const {
  const auto& f = forms_[static_cast<std::size_t>(j)];
  const Index N = space.size();
  Index out = 0;
  Index scale = 1;
  for (const auto& row : f) {
    Index acc = 0;
    for (int i = 0; i < r_; ++i) {
      if (row[static_cast<std::size_t>(i)] != 0) acc = space.combine(1, acc, row[static_cast<std::size_t>(i)], vars[static_cast<std::size_t>(i)]);
    }
    out += acc * scale;
    scale *= N;
  }
  return out;
}

LinearFormSystem LinearFormSystem::distinct(std::vector<std::vector<int>>* groups) const {
  std::vector<std::vector<Row>> kept;
  std::vector<std::vector<int>> g;
  for (int j = 0; j < size(); ++j) {
    const auto& f = forms_[static_cast<std::size_t>(j)];
    auto it = std::find(kept.begin(), kept.end(), f);
    if (it == kept.end()) {
      kept.push_back(f);
      g.push_back({j});
    } else {
      g[static_cast<std::size_t>(it - kept.begin())].push_back(j);
    }
  }
  if (groups) *groups = g;
  return with_blocks(p_, r_, std::move(kept));
}

bool LinearFormSystem::has_duplicates() const { return distinct().size() != size(); }

LinearFormSystem LinearFormSystem::corners(int p) {
  return with_blocks(p, 3, {{{1, 0, 0}, {0, 1, 0}}, {{1, 0, 0}, {0, 1, 1}}, {{1, 0, 1}, {0, 1, 0}}});
}

LinearFormSystem LinearFormSystem::l_shapes(int p) {
  return with_blocks(p, 3,
                     {{{1, 0, 0}, {0, 1, 0}}, {{1, 0, 0}, {0, 1, 1}}, {{1, 0, 0}, {0, 1, 2}}, {{1, 0, 1}, {0, 1, 0}}});
}

LinearFormSystem LinearFormSystem::corner_shadow(int p) {
  return LinearFormSystem(p, 3, {{-1, 1, 0}, {-1, 1, 1}, {-1, 1, -1}});
}

LinearFormSystem LinearFormSystem::progression(int p, int k) {
  std::vector<Row> forms;
  for (int i = 0; i < k; ++i) forms.push_back({1, i});
  return LinearFormSystem(p, 2, std::move(forms));
}

std::string LinearFormSystem::describe() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t j = 0; j < forms_.size(); ++j) {
    if (j) os << ',';
    if (blocks_ > 1) os << '[';
    for (std::size_t b = 0; b < forms_[j].size(); ++b) {
      if (b) os << ',';
      os << '[';
      for (std::size_t i = 0; i < forms_[j][b].size(); ++i) os << (i ? "," : "") << forms_[j][b][i];
      os << ']';
    }
    if (blocks_ > 1) os << ']';
  }
  os << ']';
  return os.str();
}

namespace {

template <typename Visit>
void for_each_tuple(int r, Index size, Visit&& visit) {
  std::vector<Index> vars(static_cast<std::size_t>(r), 0);
  while (true) {
    visit(std::span<const Index>(vars));
    int i = 0;
    while (i < r) {
      if (++vars[static_cast<std::size_t>(i)] < size) break;
      vars[static_cast<std::size_t>(i)] = 0;
      ++i;
    }
    if (i == r) return;
  }
}

double tuple_cost(const LinearFormSystem& sys, Index size) {
  return std::pow(static_cast<double>(size), sys.variables()) * sys.size() * sys.variables() * sys.blocks();
}

}  // namespace

Complex system_average(const LinearFormSystem& sys, const std::vector<FunctionTable>& tables,
                       const ResourceLimits& limits) {
  if (static_cast<int>(tables.size()) != sys.size()) throw std::invalid_argument("system_average: need one table per form");
  const int p = sys.p();
  if (tables[0].dim() % sys.blocks() != 0) throw std::invalid_argument("system_average: table dimension");
  const int n = tables[0].dim() / sys.blocks();
  for (const auto& t : tables) {
    if (t.p() != p || t.dim() != n * sys.blocks()) throw std::invalid_argument("system_average: table shape mismatch");
  }
  const IndexSpace space(p, n);
  limits.check_operations(tuple_cost(sys, space.size()), "system average");
  // Sum innermost blocks of size N with plain accumulation, then pairwise
  // over the block sums, so the order is fixed.
  std::vector<Complex> partial;
  Complex acc = 0.0;
  Index count = 0;
  for_each_tuple(sys.variables(), space.size(), [&](std::span<const Index> vars) {
    Complex prod = 1.0;
    for (int j = 0; j < sys.size() && prod != Complex(0.0); ++j) prod *= tables[static_cast<std::size_t>(j)][sys.image(j, vars, space)];
    acc += prod;
    if (++count == space.size()) {
      partial.push_back(acc);
      acc = 0.0;
      count = 0;
    }
  });
  if (count) partial.push_back(acc);
  const double total = std::pow(static_cast<double>(space.size()), sys.variables());
  return pairwise_sum(std::span<const Complex>(partial)) / total;
}

std::uint64_t system_count(const LinearFormSystem& sys, const std::vector<IndicatorSet>& sets,
                           const ResourceLimits& limits) {
  if (static_cast<int>(sets.size()) != sys.size()) throw std::invalid_argument("system_count: need one set per form");
  const int n = sets[0].dim() / sys.blocks();
  for (const auto& s : sets) {
    if (s.p() != sys.p() || s.dim() != n * sys.blocks()) throw std::invalid_argument("system_count: set shape mismatch");
  }
  const IndexSpace space(sys.p(), n);
  limits.check_operations(tuple_cost(sys, space.size()), "system count");
  std::uint64_t count = 0;
  for_each_tuple(sys.variables(), space.size(), [&](std::span<const Index> vars) {
    for (int j = 0; j < sys.size(); ++j) {
      if (!sets[static_cast<std::size_t>(j)].contains(sys.image(j, vars, space))) return;
    }
    ++count;
  });
  return count;
}

namespace {

using Rows = std::vector<std::vector<Residue>>;

struct PartitionSearch {
  const PrimeField& field;
  const Rows& forms;
  int target;
  std::vector<int> others;
  int max_classes;
  std::vector<std::vector<int>> classes;
  std::vector<std::vector<int>> found;

  bool clear(const std::vector<int>& cls) const {
    Rows rows;
    for (int i : cls) rows.push_back(forms[static_cast<std::size_t>(i)]);
    return !in_span(field, rows, forms[static_cast<std::size_t>(target)]);
  }

  bool greedy() {
    classes.clear();
    for (int f : others) {
      bool placed = false;
      for (auto& cls : classes) {
        cls.push_back(f);
        if (clear(cls)) {
          placed = true;
          break;
        }
        cls.pop_back();
      }
      if (!placed) {
        if (static_cast<int>(classes.size()) == max_classes) return false;
        classes.push_back({f});
        if (!clear(classes.back())) return false;
      }
    }
    found = classes;
    return true;
  }

  bool exhaustive(std::size_t next) {
    if (next == others.size()) {
      found = classes;
      return true;
    }
    const int f = others[next];
    for (auto& cls : classes) {
      cls.push_back(f);
      if (clear(cls) && exhaustive(next + 1)) return true;
      cls.pop_back();
    }
    if (static_cast<int>(classes.size()) < max_classes) {
      classes.push_back({f});
      if (clear(classes.back()) && exhaustive(next + 1)) return true;
      classes.pop_back();
    }
    return false;
  }

  bool run() {
    if (others.empty()) {
      found.clear();
      return true;
    }
    if (greedy()) return true;
    classes.clear();
    return exhaustive(0);
  }
};

}  // namespace

ComplexityCertificate cs_complexity(const LinearFormSystem& sys, int max_forms) {
  if (!sys.scalar()) throw std::invalid_argument("cs_complexity: only scalar-coefficient systems are supported");
  std::vector<std::vector<int>> groups;
  const auto distinct = sys.distinct(&groups);
  const int d = distinct.size();
  if (d > max_forms) throw ResourceError("cs_complexity: more than " + std::to_string(max_forms) + " distinct forms");
  const PrimeField field(sys.p());
  Rows forms;
  for (int j = 0; j < d; ++j) forms.push_back(distinct.form(j));

  ComplexityCertificate cert;
  for (const auto& g : groups) cert.representatives.push_back(g[0]);
  for (int a = 0; a < d; ++a) {
    for (int b = a + 1; b < d; ++b) {
      if (rank_of(field, {forms[static_cast<std::size_t>(a)], forms[static_cast<std::size_t>(b)]}) == 1) {
        cert.infinite = true;
        cert.parallel = std::make_pair(cert.representatives[static_cast<std::size_t>(a)],
                                       cert.representatives[static_cast<std::size_t>(b)]);
        return cert;
      }
    }
  }

  // Pairwise non-parallel forms always admit the all-singletons partition,
  // so the search below terminates with s <= d - 2.
  for (int s = 0;; ++s) {
    std::vector<std::vector<std::vector<int>>> partitions;
    bool ok = true;
    for (int j = 0; j < d && ok; ++j) {
      PartitionSearch search{field, forms, j, {}, s + 1, {}, {}};
      for (int i = 0; i < d; ++i) {
        if (i != j) search.others.push_back(i);
      }
      ok = search.run();
      if (ok) {
        for (auto& cls : search.found) {
          for (auto& i : cls) i = cert.representatives[static_cast<std::size_t>(i)];
        }
        partitions.push_back(search.found);
      }
    }
    if (ok) {
      cert.s = s;
      cert.partitions = std::move(partitions);
      return cert;
    }
  }
}

bool verify_certificate(const LinearFormSystem& sys, const ComplexityCertificate& cert) {
  if (cert.infinite) {
    if (!cert.parallel) return false;
    const PrimeField field(sys.p());
    const auto& a = sys.form(cert.parallel->first);
    const auto& b = sys.form(cert.parallel->second);
    return a != b && rank_of(field, {a, b}) == 1;
  }
  if (cert.partitions.size() != cert.representatives.size()) return false;
  const PrimeField field(sys.p());
  for (std::size_t k = 0; k < cert.representatives.size(); ++k) {
    const auto& target = sys.form(cert.representatives[k]);
    const auto& classes = cert.partitions[k];
    if (static_cast<int>(classes.size()) > cert.s + 1) return false;
    std::vector<int> seen;
    for (const auto& cls : classes) {
      Rows rows;
      for (int i : cls) {
        rows.push_back(sys.form(i));
        seen.push_back(i);
      }
      if (in_span(field, rows, target)) return false;
    }
    std::vector<int> expected;
    for (std::size_t o = 0; o < cert.representatives.size(); ++o) {
      if (o != k) expected.push_back(cert.representatives[o]);
    }
    std::sort(seen.begin(), seen.end());
    if (seen != expected) return false;
  }
  return true;
}

GvnReport gvn_check(const LinearFormSystem& sys, const std::vector<FunctionTable>& fs, int s,
                    const ResourceLimits& limits, double slack) {
  const auto cert = cs_complexity(sys);
  if (cert.infinite || cert.s > s) {
    throw std::invalid_argument("gvn_check: system complexity exceeds s");
  }
  GvnReport r;
  r.complexity = cert.s;
  r.lhs = std::abs(system_average(sys, fs, limits));
  std::vector<std::vector<int>> groups;
  sys.distinct(&groups);
  r.rhs = std::numeric_limits<double>::infinity();
  for (const auto& g : groups) {
    FunctionTable merged = fs[static_cast<std::size_t>(g[0])];
    for (std::size_t i = 1; i < g.size(); ++i) merged = merged * fs[static_cast<std::size_t>(g[i])];
    r.norms.push_back(gowers_u(merged, s + 1, limits).value);
    r.rhs = std::min(r.rhs, r.norms.back());
  }
  r.holds = r.lhs <= r.rhs + slack;
  return r;
}

UsUniformityReport usuniformity_check(const LinearFormSystem& sys, const std::vector<FunctionTable>& fs, int s,
                                      const ResourceLimits& limits, double slack) {
  if (sys.has_duplicates()) throw std::invalid_argument("usuniformity_check: forms must be distinct");
  const auto cert = cs_complexity(sys);
  if (cert.infinite || cert.s > s) throw std::invalid_argument("usuniformity_check: system complexity exceeds s");
  UsUniformityReport r;
  r.complexity = cert.s;
  Complex prod = 1.0;
  double worst = 0.0;
  for (const auto& f : fs) {
    const Complex a = f.mean();
    r.means.push_back(a);
    prod *= a;
    r.deviations.push_back(gowers_u(f - a, s + 1, limits).value);
    worst = std::max(worst, r.deviations.back());
  }
  r.lhs = std::abs(system_average(sys, fs, limits) - prod);
  r.rhs = static_cast<double>(fs.size()) * worst;
  r.holds = r.lhs <= r.rhs + slack;
  return r;
}

LinearFormSystem cs2_form_system(int p, const std::vector<Slot>& slots) {
  std::vector<LinearFormSystem::Row> forms;
  // variables (x, y, h, k); shifts y, y+h, y+k, y+h+k
  const int shifts[4][2] = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
  for (const auto& sh : shifts) {
    for (Slot slot : slots) {
      const auto [a, b] = slot_coefficients(slot);
      forms.push_back({a, b, b * sh[0], b * sh[1]});
    }
  }
  return LinearFormSystem(p, 4, std::move(forms));
}

Cs2Report cs2_statistic(const std::vector<Cs2Factor>& factors, int s, double eps, const ResourceLimits& limits) {
  if (factors.empty()) throw std::invalid_argument("cs2_statistic: no factors");
  const int p = factors[0].f.p();
  const int n = factors[0].f.dim();
  std::vector<Slot> slots;
  for (const auto& fac : factors) {
    if (fac.f.p() != p || fac.f.dim() != n) throw std::invalid_argument("cs2_statistic: factor shape mismatch");
    slots.push_back(fac.slot);
  }
  Cs2Report r;
  const auto cert = cs_complexity(cs2_form_system(p, slots));
  r.complexity = cert.infinite ? -1 : cert.s;
  r.complexity_ok = !cert.infinite && cert.s <= s - 1;

  const IndexSpace space(p, n);
  const Index N = space.size();
  limits.check_operations(static_cast<double>(N) * N * (n * p + factors.size()), "cs2 statistic");
  Complex beta = 1.0;
  std::vector<Complex> means;
  for (const auto& fac : factors) {
    means.push_back(fac.f.mean());
    beta *= means.back();
    r.factor_deviations.push_back(gowers_u(fac.f - means.back(), s, limits).value);
  }
  r.threshold = std::pow(eps, 1.0 / 8.0);
  r.sqrt_eps = std::sqrt(eps);
  Index bad = 0;
  std::vector<Complex> column(N);
  for (Index x = 0; x < N; ++x) {
    for (Index y = 0; y < N; ++y) {
      Complex v = 1.0;
      for (const auto& fac : factors) {
        const auto [a, b] = slot_coefficients(fac.slot);
        v *= fac.f[space.combine(a, x, b, y)];
      }
      column[y] = v - beta;
    }
    const double u2 = std::pow(std::max(0.0, u2_fourth_power(FunctionTable(p, n, column))), 0.25);
    if (u2 >= r.threshold) ++bad;
  }
  r.proportion = static_cast<double>(bad) / static_cast<double>(N);
  return r;
}

}  // namespace lshape
