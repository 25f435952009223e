#include "lshape_cli/suites.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>

#include "lshape/configurations.hpp"
#include "lshape/gowers.hpp"
#include "lshape/increment.hpp"
#include "lshape/linear_systems.hpp"
#include "lshape/spectral.hpp"

namespace lshape::cli {

bool SuiteResult::passed() const {
  return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.passed; });
}

namespace {

GroupVector random_vector(Rng& rng, int p, int m) {
  return GroupVector::from_index(p, m, uniform_below(rng, IndexSpace(p, m).size()));
}

GroupVector random_nonzero(Rng& rng, int p, int m) {
  const Index N = IndexSpace(p, m).size();
  return GroupVector::from_index(p, m, 1 + uniform_below(rng, N - 1));
}

double rel_gap(double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

SuiteResult spectral(const SuiteOptions& o) {
  Rng rng(o.seed);
  Tally parseval("parseval", "fourier-parseval-identity");
  Tally inversion("inversion", "fourier-inversion-round-trip");
  Tally fourth("u2-fourth-moment", "u2-equals-fourier-fourth-moment");
  for (int t = 0; t < o.trials; ++t) {
    const auto f = random_one_bounded(rng, o.p, o.n);
    const auto fh = dft(f);
    double lhs = 0.0, rhs = 0.0;
    for (Index i = 0; i < f.size(); ++i) {
      lhs += std::norm(fh[i]);
      rhs += std::norm(f[i]);
    }
    rhs /= static_cast<double>(f.size());
    parseval.check(rel_gap(lhs, rhs), 0.0, o.slack);
    const auto back = inverse_dft(fh);
    double err = 0.0;
    for (Index i = 0; i < f.size(); ++i) err = std::max(err, std::abs(back[i] - f[i]));
    inversion.check(err / std::max(1.0, f.max_modulus()), 0.0, o.slack);
    const double viaf = u2_fourth_power(f);
    const double direct = gowers_u(f, 2, o.limits, true).raw_average.real();
    fourth.check(rel_gap(viaf, direct), 0.0, o.slack);
  }
  return {"spectral", static_cast<std::uint64_t>(o.trials), {parseval.finish(), inversion.finish(), fourth.finish()}};
}

SuiteResult control(const SuiteOptions& o) {
  Rng rng(o.seed);
  const int m = 2 * o.n;
  const auto one = FunctionTable::constant(o.p, m, 1.0);
  Tally c1("lambda-by-star1", "dense-point-control-star1");
  Tally c2("lambda-by-star2", "dense-point-control-star2");
  Tally c3("lambda-by-star3", "dense-point-control-star3");
  for (int t = 0; t < o.trials; ++t) {
    std::vector<FunctionTable> f;
    for (int i = 0; i < 4; ++i) f.push_back(random_one_bounded(rng, o.p, m));
    c1.check(std::abs(lambda_L(f[0], f[1], f[2], f[3], o.limits).value), star_norm(f[0], 1).value, o.slack);
    c2.check(std::abs(lambda_L(one, f[1], f[2], f[3], o.limits).value), star_norm(f[1], 2).value, o.slack);
    c3.check(std::abs(lambda_L(one, one, f[2], f[3], o.limits).value), star_norm(f[2], 3).value, o.slack);
  }
  return {"control", static_cast<std::uint64_t>(o.trials), {c1.finish(), c2.finish(), c3.finish()}};
}

SuiteResult trivial(const SuiteOptions& o) {
  const int p = o.p;
  const int n = o.n;
  std::vector<Assertion> out;
  auto add = [&](const std::string& name, const std::string& anchor, bool ok) {
    Tally t(name, anchor);
    t.check(ok);
    out.push_back(t.finish());
  };
  const Complex c(0.6, -0.3);
  const auto constant = FunctionTable::constant(p, n, c);
  const auto zero = FunctionTable::zeros(p, n);
  bool ok = true;
  for (int s = 1; s <= 3; ++s) ok = ok && std::abs(gowers_u(constant, s, o.limits).value - std::abs(c)) <= o.slack;
  add("constant-norm", "gowers-norm-of-constant", ok);
  ok = true;
  for (int s = 1; s <= 3; ++s) ok = ok && gowers_u(zero, s, o.limits).value == 0.0;
  add("zero-norm", "gowers-norm-of-zero", ok);
  const auto ch = dft(constant);
  ok = std::abs(ch[0] - c) <= o.slack;
  for (Index i = 1; i < ch.size(); ++i) ok = ok && std::abs(ch[i]) <= o.slack;
  add("constant-spectrum", "fourier-transform-of-constant", ok);
  const auto full = IndicatorSet::full(p, 2 * n);
  const auto lam = count_L(full, o.limits);
  const Index N = IndexSpace(p, n).size();
  add("full-set-count", "l-count-of-everything", *lam.exact_count == N * N * N && std::abs(lam.value - 1.0) <= o.slack);
  const auto none = count_L(IndicatorSet::empty(p, 2 * n), o.limits);
  add("empty-set-count", "l-count-of-empty-set", *none.exact_count == 0 && *none.nontrivial_count == 0);
  const auto star_c = FunctionTable::constant(p, 2 * n, c);
  ok = true;
  for (int k = 1; k <= 3; ++k) ok = ok && std::abs(star_norm(star_c, k).value - std::abs(c)) <= o.slack;
  ok = ok && std::abs(box_norm(star_c).value - std::abs(c)) <= o.slack;
  add("constant-directional-norms", "directional-norms-of-constant", ok);
  const auto t = full_T(p, n);
  add("full-energy", "energy-of-full-sets", std::abs(energy(ProductCosetPartition::trivial(p, n), t) - 1.0) <= o.slack);
  const auto e = search_extremal_L_free(p, n, SearchMethod::greedy, 1, o.seed);
  add("greedy-l-free", "extremal-search-output-is-l-free", e.verified);
  return {"trivial", 1, std::move(out)};
}

SuiteResult gcs(const SuiteOptions& o) {
  Rng rng(o.seed);
  Tally t("gowers-cauchy-schwarz", "gowers-cauchy-schwarz-inequality");
  for (int i = 0; i < o.trials; ++i) {
    const int s = 1 + i % 3;
    std::vector<FunctionTable> family;
    for (int w = 0; w < (1 << s); ++w) family.push_back(random_one_bounded(rng, o.p, o.n));
    const auto r = gcs_check(family, s, o.limits, o.slack);
    t.check(r.lhs, r.rhs, o.slack);
  }
  return {"gcs", static_cast<std::uint64_t>(o.trials), {t.finish()}};
}

std::vector<LinearFormSystem> scalar_systems(int p, bool allow_duplicates) {
  std::vector<LinearFormSystem> out{LinearFormSystem::progression(p, 3), LinearFormSystem::corner_shadow(p)};
  auto four = LinearFormSystem::progression(p, 4);
  if (allow_duplicates || !four.has_duplicates()) out.push_back(std::move(four));
  return out;
}

SuiteResult gvn(const SuiteOptions& o) {
  Rng rng(o.seed);
  Tally t("generalized-von-neumann", "counting-bounded-by-uniformity-norm");
  const auto systems = scalar_systems(o.p, true);
  for (int i = 0; i < o.trials; ++i) {
    const auto& sys = systems[static_cast<std::size_t>(i) % systems.size()];
    const int s = cs_complexity(sys).s;
    std::vector<FunctionTable> fs;
    for (int j = 0; j < sys.size(); ++j) fs.push_back(random_one_bounded(rng, o.p, o.n));
    const auto r = gvn_check(sys, fs, s, o.limits, o.slack);
    t.check(r.lhs, r.rhs, o.slack);
  }
  return {"gvn", static_cast<std::uint64_t>(o.trials), {t.finish()}};
}

SuiteResult usuniformity(const SuiteOptions& o) {
  Rng rng(o.seed);
  Tally t("uniform-count", "count-near-product-of-means");
  const auto systems = scalar_systems(o.p, false);
  for (int i = 0; i < o.trials; ++i) {
    const auto& sys = systems[static_cast<std::size_t>(i) % systems.size()];
    const int s = cs_complexity(sys).s;
    std::vector<FunctionTable> fs;
    for (int j = 0; j < sys.size(); ++j) {
      // Sets give means away from zero, which is where the bound bites.
      fs.push_back(i % 2 ? random_one_bounded(rng, o.p, o.n)
                         : random_set(rng, o.p, o.n, 0.3 + 0.5 * uniform_unit(rng)).table());
    }
    const auto r = usuniformity_check(sys, fs, s, o.limits, o.slack);
    t.check(r.lhs, r.rhs, o.slack);
  }
  return {"usuniformity", static_cast<std::uint64_t>(o.trials), {t.finish()}};
}

SuiteResult subspaceavg(const SuiteOptions& o) {
  Rng rng(o.seed);
  const int m = 2 * o.n;
  Tally t("subspace-average", "coset-average-bounded-by-u2");
  for (int i = 0; i < o.trials; ++i) {
    const auto f = random_one_bounded(rng, o.p, m);
    const auto k = static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(m) + 1));
    std::vector<GroupVector> normals;
    for (int j = 0; j < k; ++j) normals.push_back(random_nonzero(rng, o.p, m));
    const auto c = AffineSubspace::coset(o.p, m, normals, random_vector(rng, o.p, m));
    const auto r = subspace_average_bound_check(f, c, o.slack);
    t.check(r.average_modulus, r.bound, o.slack);
  }
  return {"subspaceavg", static_cast<std::uint64_t>(o.trials), {t.finish()}};
}

SuiteResult transfer(const SuiteOptions& o) {
  Rng rng(o.seed);
  Tally t("phi-to-a-transfer", "uniformity-of-a-from-phi");
  for (int i = 0; i < o.trials; ++i) {
    const int d = i % 2;
    const int s = 2 + (i / 2) % 2;
    const auto tt = random_T(rng, o.p, o.n, d, 0.3 + 0.6 * uniform_unit(rng));
    const auto r = phi_uniformity_transfer_check(tt.phi, s, o.limits, o.slack);
    t.check(r.lhs, r.rhs, o.slack);
  }
  return {"transfer", static_cast<std::uint64_t>(o.trials), {t.finish()}};
}

SuiteResult telescope(const SuiteOptions& o) {
  Rng rng(o.seed);
  Tally t("telescoping", "l-count-telescoping-bound");
  for (int i = 0; i < o.trials; ++i) {
    const auto s = random_set(rng, o.p, 2 * o.n, 0.1 + 0.8 * uniform_unit(rng));
    const auto r = telescope_check(s, o.limits, o.slack);
    t.check(r.lhs, r.rhs, o.slack);
  }
  return {"telescope", static_cast<std::uint64_t>(o.trials), {t.finish()}};
}

// A random character that is non-trivial on the cell's V, or nothing when V = 0.
std::optional<GroupVector> random_cell_character(Rng& rng, const Cell& cell) {
  if (cell.dim() == 0) return std::nullopt;
  const auto eta = random_nonzero(rng, cell.p(), cell.dim());
  return cell.second().lift_character(eta);
}

SuiteResult energy_suite(const SuiteOptions& o) {
  Rng rng(o.seed);
  Tally mono("refinement-monotone", "energy-sums-monotone-under-refinement");
  Tally range("energy-in-unit-interval", "energy-range");
  for (int i = 0; i < o.trials; ++i) {
    const auto t = random_T(rng, o.p, o.n, i % 2, 0.5 + 0.4 * uniform_unit(rng));
    auto part = ProductCosetPartition::trivial(o.p, o.n);
    for (int step = 0; step < 3; ++step) {
      std::vector<std::size_t> open;
      for (std::size_t k = 0; k < part.size(); ++k) {
        if (part.cell(k).dim() > 0) open.push_back(k);
      }
      if (open.empty()) break;
      const auto k = open[static_cast<std::size_t>(uniform_below(rng, open.size()))];
      const auto xi = random_cell_character(rng, part.cell(k));
      auto next = refine_on_character(part, k, *xi, uniform_below(rng, 2) ? RefineSlot::first : RefineSlot::second);
      const auto r = energy_monotone_check(part, next, t, o.slack);
      for (int j = 0; j < 4; ++j) mono.check(r.coarse.sums[j], r.fine.sums[j], o.slack);
      range.check(r.fine.total >= -o.slack && r.fine.total <= 1.0 + o.slack);
      part = std::move(next);
    }
  }
  Tally rounds("round-bound", "pseudorandomization-round-bound");
  Tally strict("energy-strictly-increases", "pseudorandomization-energy-increment");
  const int instances = std::max(1, o.trials / 5);
  for (int i = 0; i < instances; ++i) {
    const auto t = random_T(rng, o.p, o.n, i % 2, 0.7);
    const auto s = random_set(rng, o.p, 2 * o.n, 0.3).intersect(t.T);
    const auto r = pseudorandomize_u2(t, s, o.eps, o.tau);
    rounds.check(static_cast<double>(r.rounds.size()), r.round_bound, 0.0);
    for (const auto& rd : r.rounds) strict.check(rd.energy_after > rd.energy_before);
    if (r.rounds.empty()) strict.check(true);
  }
  return {"energy",
          static_cast<std::uint64_t>(o.trials + instances),
          {mono.finish(), range.finish(), rounds.finish(), strict.finish()}};
}

SuiteResult recursion(const SuiteOptions& o) {
  Rng rng(o.seed);
  Tally t("recursion-matches-definition", "gowers-norm-recursion");
  const int smax = o.p == 3 ? 4 : 3;
  for (int i = 0; i < o.trials; ++i) {
    const int s = 1 + i % smax;
    const auto f = random_one_bounded(rng, o.p, o.n);
    const double a = gowers_u(f, s, o.limits).value;
    const double b = gowers_u(f, s, o.limits, true).value;
    t.check(std::abs(a - b), 0.0, o.slack);
  }
  return {"recursion", static_cast<std::uint64_t>(o.trials), {t.finish()}};
}

SuiteResult inverse(const SuiteOptions& o) {
  Rng rng(o.seed);
  Tally t("inverse-u2-contract", "largest-fourier-coefficient-bound");
  for (int i = 0; i < o.trials; ++i) {
    const auto f = random_one_bounded(rng, o.p, o.n);
    const auto r = inverse_u2(f);
    t.check(r.u2 * r.u2, r.corr, 0.0);
  }
  return {"inverse", static_cast<std::uint64_t>(o.trials), {t.finish()}};
}

using SuiteFn = std::function<SuiteResult(const SuiteOptions&)>;

const std::map<std::string, SuiteFn>& registry() {
  static const std::map<std::string, SuiteFn> r = {
      {"spectral", spectral},   {"control", control},         {"trivial", trivial},
      {"gcs", gcs},             {"gvn", gvn},                 {"usuniformity", usuniformity},
      {"subspaceavg", subspaceavg}, {"transfer", transfer},   {"telescope", telescope},
      {"energy", energy_suite}, {"recursion", recursion},     {"inverse", inverse},
  };
  return r;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [k, fn] : registry()) v.push_back(k);
    return v;
  }();
  return names;
}

SuiteResult run_suite(const std::string& name, const SuiteOptions& options) {
  const auto it = registry().find(name);
  if (it == registry().end()) throw std::invalid_argument("unknown suite '" + name + "'");
  if (options.trials < 1) throw std::invalid_argument("trials must be positive");
  return it->second(options);
}

TDescriptor random_T(Rng& rng, int p, int n, int d, double density) {
  if (d < 0 || d > n) throw std::invalid_argument("random_T: codimension out of range");
  for (int attempt = 0; attempt < 1000; ++attempt) {
    auto A = random_set(rng, p, n, density);
    if (A.cardinality() == 0) continue;
    const auto B = random_set(rng, p, n, density);
    const auto C = random_set(rng, p, n, density);
    const auto D = random_set(rng, p, n, density);
    const auto u = random_vector(rng, p, n);
    std::vector<std::vector<GroupVector>> normals(A.size());
    const PrimeField field(p);
    for (Index x = 0; x < A.size(); ++x) {
      if (!A.contains(x)) continue;
      while (static_cast<int>(normals[x].size()) < d) {
        auto v = random_nonzero(rng, p, n);
        std::vector<std::vector<Residue>> rows;
        for (const auto& w : normals[x]) rows.emplace_back(w.digits().begin(), w.digits().end());
        rows.emplace_back(v.digits().begin(), v.digits().end());
        if (rank_of(field, rows) == static_cast<int>(rows.size())) normals[x].push_back(std::move(v));
      }
    }
    auto t = build_T(B, C, D, build_phi_normals(A, normals, u, d));
    if (t.T.cardinality() > 0) return t;
  }
  throw std::runtime_error("random_T: could not draw a non-empty T");
}

}  // namespace lshape::cli
