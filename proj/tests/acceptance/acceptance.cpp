// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <iostream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "lshape/configurations.hpp"
#include "lshape/gowers.hpp"
#include "lshape/increment.hpp"
#include "lshape/random.hpp"
#include "lshape/spectral.hpp"
#include "lshape/structured_sets.hpp"
#include "lshape_cli/commands.hpp"
#include "lshape_cli/suites.hpp"
#include "oracles.hpp"

using namespace lshape;

namespace {

struct Outcome {
  bool passed = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double rel_gap(double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

// E_h |E_x f(x) conj f(x + h)|^2, the cube average with the inner sum done first.
double u2_by_autocorrelation(const FunctionTable& f) {
  const auto space = f.space();
  double acc = 0.0;
  for (Index h = 0; h < f.size(); ++h) {
    Complex inner = 0.0;
    for (Index x = 0; x < f.size(); ++x) inner += f[x] * std::conj(f[space.add(x, h)]);
    acc += std::norm(inner / static_cast<double>(f.size()));
  }
  return acc / static_cast<double>(f.size());
}

Outcome spectral_identities() {
  Rng rng(101);
  const std::vector<std::pair<int, int>> shapes = {{3, 1}, {3, 2}, {3, 3}, {3, 4}, {5, 1}, {5, 2}};
  int failures = 0, tables = 0;
  double worst = 0.0;
  for (const auto& [p, m] : shapes) {
    for (int t = 0; t < 200; ++t) {
      const auto f = random_one_bounded(rng, p, m);
      const auto fh = dft(f);
      double energy_hat = 0.0, energy = 0.0, fourth = 0.0;
      for (Index i = 0; i < f.size(); ++i) {
        energy_hat += std::norm(fh[i]);
        energy += std::norm(f[i]);
        fourth += std::norm(fh[i]) * std::norm(fh[i]);
      }
      energy /= static_cast<double>(f.size());
      const auto back = inverse_dft(fh);
      double inv = 0.0;
      for (Index i = 0; i < f.size(); ++i) inv = std::max(inv, std::abs(back[i] - f[i]));
      const double def = m <= 2 ? gowers_u(f, 2, {}, true).raw_average.real() : u2_by_autocorrelation(f);
      double gap = std::max({rel_gap(energy_hat, energy), inv, rel_gap(fourth, def), rel_gap(u2_fourth_power(f), def)});
      if (m <= 2 && t < 10) {
        const auto slow = oracle::dft(f);
        for (Index i = 0; i < f.size(); ++i) gap = std::max(gap, std::abs(slow[static_cast<std::size_t>(i)] - fh[i]));
      }
      worst = std::max(worst, gap);
      if (gap > 1e-9) ++failures;
      ++tables;
    }
  }
  std::ostringstream os;
  os << tables << " tables, worst relative gap " << worst;
  return {failures == 0, os.str()};
}

Outcome dot_obstruction() {
  const auto ex = obstruction_example(ObstructionKind::dot, 3, 3, 0);
  const auto counted = count_L(ex.set);
  const std::uint64_t brute = oracle::count_L(ex.set, 3, true);
  const std::uint64_t closed = dot_closed_form_count(3, 3);
  std::ostringstream os;
  os << "|S| = " << ex.set.cardinality() << "/729, brute-force count " << brute << ", library count "
     << counted.exact_count.value_or(0) << ", closed form " << closed << ", discrepancy "
     << static_cast<std::int64_t>(brute) - static_cast<std::int64_t>(closed);
  const bool ok = ex.set.cardinality() == 261 && ex.density_numerator * 729 == 261 * ex.density_denominator &&
                  counted.exact_count == brute && brute == 1215 && closed == 1215;
  return {ok, os.str()};
}

Outcome random_obstructions() {
  std::ostringstream os;
  bool all = true;
  const double scale = 27.0 * 27.0 * 27.0 / 27.0;
  for (auto kind : {ObstructionKind::random_phi, ObstructionKind::coordinate}) {
    int good = 0, total_within = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const auto ex = obstruction_example(kind, 3, 3, seed);
      const double density = ex.set.density();
      const auto c = count_L(ex.set);
      const double nontrivial = static_cast<double>(*c.nontrivial_count);
      const double total = static_cast<double>(*c.exact_count);
      const bool band = density >= 0.8 / 3 && density <= 1.2 / 3;
      if (band && nontrivial >= scale / 2 && nontrivial <= scale * 2) ++good;
      if (band && total >= scale / 2 && total <= scale * 2) ++total_within;
    }
    all = all && good >= 18;
    os << to_string(kind) << ": " << good << "/20 (z != 0 count), " << total_within << "/20 (with z = 0); ";
  }
  os << "scale N^3/p^3 = " << scale;
  return {all, os.str()};
}

Outcome control_inequalities() {
  Rng rng(404);
  int violations = 0, quads = 0;
  for (const auto& [n, count] : std::vector<std::pair<int, int>>{{1, 500}, {2, 100}}) {
    const auto one = FunctionTable::constant(3, 2 * n, 1.0);
    for (int i = 0; i < count; ++i) {
      const auto f0 = random_one_bounded(rng, 3, 2 * n);
      const auto f1 = random_one_bounded(rng, 3, 2 * n);
      const auto f2 = random_one_bounded(rng, 3, 2 * n);
      const auto f3 = random_one_bounded(rng, 3, 2 * n);
      const double l0 = std::abs(lambda_L(f0, f1, f2, f3).value);
      const double l1 = std::abs(lambda_L(one, f1, f2, f3).value);
      const double l2 = std::abs(lambda_L(one, one, f2, f3).value);
      if (l0 > star_norm(f0, 1).value + 1e-9) ++violations;
      if (l1 > star_norm(f1, 2).value + 1e-9) ++violations;
      if (l2 > star_norm(f2, 3).value + 1e-9) ++violations;
      if (n == 1 && i < 20 && std::abs(lambda_L(f0, f1, f2, f3).value - oracle::lambda_L(f0, f1, f2, f3, 1)) > 1e-12) {
        ++violations;
      }
      ++quads;
    }
  }
  return {violations == 0, std::to_string(quads) + " quadruples, " + std::to_string(violations) + " violations"};
}

Outcome property_suites() {
  std::ostringstream os;
  bool ok = true;
  for (const std::string suite : {"gcs", "gvn", "usuniformity", "subspaceavg", "transfer", "telescope"}) {
    std::uint64_t instances = 0;
    bool suite_ok = true;
    for (int p : {3, 5}) {
      for (int n : {1, 2}) {
        cli::SuiteOptions o;
        o.p = p;
        o.n = n;
        o.trials = 100;
        o.seed = 7;
        const auto r = cli::run_suite(suite, o);
        instances += r.instances;
        suite_ok = suite_ok && r.passed();
      }
    }
    ok = ok && suite_ok;
    os << suite << " " << instances << (suite_ok ? " ok; " : " FAILED; ");
  }
  return {ok, os.str()};
}

Outcome recursion_vs_definition() {
  Rng rng(606);
  double worst = 0.0;
  int checks = 0;
  for (const auto& [p, n, smax] : std::vector<std::tuple<int, int, int>>{{3, 1, 4}, {3, 2, 4}, {5, 1, 3}}) {
    for (int s = 1; s <= smax; ++s) {
      for (int t = 0; t < 10; ++t) {
        const auto f = random_one_bounded(rng, p, n);
        const double a = gowers_u(f, s).value;
        const double b = gowers_u(f, s, {}, true).value;
        worst = std::max(worst, std::abs(a - b));
        if (n == 1 && s <= 3 && t == 0) {
          const double c = std::pow(std::max(0.0, oracle::gowers_power(f, s).real()), 1.0 / (1 << s));
          worst = std::max(worst, std::abs(a - c));
        }
        ++checks;
      }
    }
  }
  const auto f = random_one_bounded(rng, 3, 2);
  auto t0 = Clock::now();
  double sink = 0.0;
  int rec_reps = 0;
  while (seconds_since(t0) < 0.2 || rec_reps < 5) {
    sink += gowers_u(f, 4).value;
    ++rec_reps;
  }
  const double rec = seconds_since(t0) / rec_reps;
  t0 = Clock::now();
  int def_reps = 0;
  while (seconds_since(t0) < 0.5 || def_reps < 2) {
    sink += gowers_u(f, 4, {}, true).value;
    ++def_reps;
  }
  const double def = seconds_since(t0) / def_reps;
  std::ostringstream os;
  os << checks << " tables, worst gap " << worst << "; (3,2,4) recursion " << rec * 1e3 << " ms, definition "
     << def * 1e3 << " ms, speedup " << def / rec << "x" << (sink < 0 ? "!" : "");
  return {worst <= 1e-9 && def >= 10.0 * rec, os.str()};
}

Outcome inverse_contract() {
  Rng rng(707);
  int violations = 0;
  for (int i = 0; i < 1000; ++i) {
    const int p = i % 2 ? 3 : 5;
    const int m = 1 + i % 3;
    const auto f = random_one_bounded(rng, p, m);
    const auto r = inverse_u2(f);
    const auto fh = oracle::dft(f);
    double best = 0.0;
    for (const auto& c : fh) best = std::max(best, std::abs(c));
    if (!(r.corr >= r.u2 * r.u2) || !r.contract_holds || std::abs(best - r.corr) > 1e-12) ++violations;
  }
  return {violations == 0, "1000 tables, " + std::to_string(violations) + " violations"};
}

// Sum over cells of beta^2 mu, gamma^2 mu, delta^2 mu counted point by point.
std::array<double, 3> factor_energy(const ProductCosetPartition& part, const TDescriptor& t) {
  std::array<double, 3> sums{0.0, 0.0, 0.0};
  const int p = part.p(), n = part.n();
  const Index N = oracle::ipow(p, n);
  const double total = static_cast<double>(N * N);
  for (const auto& cell : part.cells()) {
    const auto members = cell.members();
    double b = 0, c = 0, d = 0;
    for (Index pt : members) {
      const Index x = pt % N, y = pt / N;
      b += t.B.contains(y);
      c += t.C.contains(oracle::lin(p, n, 1, x, 1, y));
      d += t.D.contains(oracle::lin(p, n, 2, x, 1, y));
    }
    const double size = static_cast<double>(members.size());
    const double mu = size / total;
    sums[0] += (b / size) * (b / size) * mu;
    sums[1] += (c / size) * (c / size) * mu;
    sums[2] += (d / size) * (d / size) * mu;
  }
  return sums;
}

Outcome energy_machinery() {
  Rng rng(808);
  int chain_failures = 0, checks = 0;
  for (int chain = 0; chain < 100; ++chain) {
    const int n = 2 + chain % 2;
    const auto t = cli::random_T(rng, 3, n, chain % 2, 0.5 + 0.4 * uniform_unit(rng));
    auto part = ProductCosetPartition::trivial(3, n);
    for (int step = 0; step < 4; ++step) {
      std::vector<std::size_t> open;
      for (std::size_t k = 0; k < part.size(); ++k) {
        if (part.cell(k).dim() > 0) open.push_back(k);
      }
      if (open.empty()) break;
      const auto k = open[static_cast<std::size_t>(uniform_below(rng, open.size()))];
      const auto& cell = part.cell(k);
      const auto eta = GroupVector::from_index(3, cell.dim(), 1 + uniform_below(rng, oracle::ipow(3, cell.dim()) - 1));
      const RefineSlot slot = uniform_below(rng, 2) ? RefineSlot::first : RefineSlot::second;
      const auto xi = slot == RefineSlot::first ? cell.first().lift_character(eta) : cell.second().lift_character(eta);
      auto next = refine_on_character(part, k, xi, slot);
      const auto r = energy_monotone_check(part, next, t, 1e-12);
      const auto coarse = factor_energy(part, t);
      const auto fine = factor_energy(next, t);
      bool ok = r.holds && next.refines(part) && next.size() > part.size();
      for (int j = 0; j < 3; ++j) {
        ok = ok && fine[static_cast<std::size_t>(j)] + 1e-12 >= coarse[static_cast<std::size_t>(j)];
        ok = ok && std::abs(fine[static_cast<std::size_t>(j)] - r.fine.sums[j]) < 1e-9;
      }
      if (!ok) ++chain_failures;
      ++checks;
      part = std::move(next);
    }
  }
  int pr_failures = 0, active = 0, total_rounds = 0;
  for (int i = 0; i < 20; ++i) {
    const auto t = cli::random_T(rng, 3, 3, i % 2, 0.7);
    const auto s = random_set(rng, 3, 6, 0.3).intersect(t.T);
    const auto r = pseudorandomize_u2(t, s, 0.1, 0.1);
    if (static_cast<double>(r.rounds.size()) > r.round_bound) ++pr_failures;
    for (const auto& rd : r.rounds) {
      if (!(rd.energy_after > rd.energy_before)) ++pr_failures;
    }
    if (!r.rounds.empty()) ++active;
    total_rounds += static_cast<int>(r.rounds.size());
  }
  std::ostringstream os;
  os << checks << " refinement steps over 100 chains, " << chain_failures << " failures; 20 pseudorandomizations, "
     << active << " with rounds (" << total_rounds << " rounds), " << pr_failures << " failures";
  return {chain_failures == 0 && pr_failures == 0 && active > 0, os.str()};
}

Outcome extremal_exactness() {
  const auto r = search_extremal_L_free(3, 1, SearchMethod::exhaustive, 50'000'000, 0);
  const int oracle_best = oracle::max_L_free_n1(3);
  const bool free = oracle::count_L(r.best, 1, false) == 0;
  std::ostringstream os;
  os << "search " << r.best.cardinality() << " (" << r.nodes << " nodes), oracle " << oracle_best;
  return {r.exact && r.verified && free && r.best.cardinality() == 6 && oracle_best == 6, os.str()};
}

// |S cap T'| / |T'| recounted from the factors of T'.
double recount(const IndicatorSet& s, const TDescriptor& t) {
  const int p = t.A.p(), n = t.A.dim();
  const Index N = oracle::ipow(p, n);
  double in_t = 0, in_s = 0;
  for (Index x = 0; x < N; ++x) {
    for (Index y = 0; y < N; ++y) {
      const bool member = t.A.contains(x) && t.B.contains(y) && t.C.contains(oracle::lin(p, n, 1, x, 1, y)) &&
                          t.D.contains(oracle::lin(p, n, 2, x, 1, y)) && t.phi.contains(x, y);
      in_t += member;
      in_s += member && s.contains(x + N * y);
    }
  }
  return in_t > 0 ? in_s / in_t : 0.0;
}

Outcome constructive_increments() {
  Rng rng(909);
  int runs = 0, failures = 0;
  double min_gain = 1.0;
  for (int n : {2, 3}) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      for (int variant = 0; variant < 2; ++variant) {
        const auto t = variant == 0 ? full_T(3, n) : cli::random_T(rng, 3, n, 0, 0.8);
        const auto sa = planted_set(PlantedKind::half_A, t, seed);
        const auto sd = planted_set(PlantedKind::half_D, t, seed);
        for (const auto& r : {deg1_increment(sa, t, 0.1), star3_fiber_split(sd, t, 0.1)}) {
          const auto& s = r.tool == "deg1_increment" ? sa : sd;
          const bool ok = r.success && r.gain > 0 && r.t_prime && verify_increment(r, s) &&
                          std::abs(recount(s, *r.t_prime) - r.after) < 1e-12 &&
                          std::abs(recount(s, t) - r.before) < 1e-12;
          if (!ok) ++failures;
          min_gain = std::min(min_gain, r.gain);
          ++runs;
        }
      }
    }
  }
  int identity_failures = 0;
  for (int i = 0; i < 50; ++i) {
    const int n = 1 + i % 3;
    const int d = i % std::min(n + 1, 3);
    const Index N = oracle::ipow(3, n);
    auto A = random_set(rng, 3, n, 0.6);
    if (A.cardinality() == 0) A = IndicatorSet::full(3, n);
    std::vector<std::vector<GroupVector>> normals(static_cast<std::size_t>(N));
    for (Index x : A.elements()) {
      while (true) {
        std::vector<GroupVector> rows;
        for (int j = 0; j < d; ++j) rows.push_back(GroupVector::from_index(3, n, uniform_below(rng, N)));
        std::vector<std::vector<Residue>> digits;
        for (const auto& r : rows) digits.emplace_back(r.digits().begin(), r.digits().end());
        if (rank_of(PrimeField(3), digits) == d) {
          normals[static_cast<std::size_t>(x)] = rows;
          break;
        }
      }
    }
    const auto u = GroupVector::from_index(3, n, uniform_below(rng, N));
    const auto phi = build_phi_normals(A, normals, u, d);
    const auto K = random_set(rng, 3, 2 * n, 0.7);
    const auto s = random_set(rng, 3, 2 * n, 0.5).intersect(K);
    const auto r = align_translate(phi.family(), K, s, 0.1);
    std::uint64_t lhs = 0;
    for (Index v = 0; v < N; ++v) {
      for (Index x : A.elements()) lhs += phi.contains(x, v);
    }
    const std::uint64_t rhs = A.cardinality() * oracle::ipow(3, n - d);
    if (lhs != rhs || r.identity_lhs != lhs || r.identity_rhs != rhs) ++identity_failures;
  }
  std::ostringstream os;
  os << runs << " planted runs, " << failures << " failures, smallest gain " << min_gain << "; align identity "
     << 50 - identity_failures << "/50 exact";
  return {failures == 0 && identity_failures == 0, os.str()};
}

Outcome determinism() {
  const auto dir = std::filesystem::temp_directory_path() / "lshape_acceptance";
  std::filesystem::create_directories(dir);
  const std::string traj = (dir / "trajectory.jsonl").string();
  const std::vector<std::vector<std::string>> commands = {
      {"norm", "--random-dim", "2", "--u", "2", "3", "--p", "3", "--seed", "5", "--audit"},
      {"norm", "--random-dim", "2", "--box", "--star", "1", "2", "3", "--p", "3", "--n", "1", "--seed", "5"},
      {"count", "--example", "dot", "--p", "3", "--n", "3"},
      {"count", "--example", "random_phi", "--p", "3", "--n", "2", "--seed", "9", "--system", "corners"},
      {"verify", "--suite", "all", "--p", "3", "--n", "1", "--trials", "20", "--seed", "3"},
      {"increment", "--planted", "halfA", "--p", "3", "--n", "2", "--seed", "7", "--trajectory", traj},
      {"extremal", "--method", "local", "--p", "3", "--n", "2", "--budget", "200", "--seed", "2"},
      {"pseudorandomize", "--p", "3", "--n", "3", "--d", "1", "--seed", "4"},
  };
  int mismatches = 0;
  for (const auto& args : commands) {
    std::string first, first_traj;
    for (int rep = 0; rep < 3; ++rep) {
      std::ostringstream out, err;
      const int code = cli::run(args, out, err);
      std::string tr;
      if (args[0] == "increment") {
        std::ifstream in(traj);
        tr.assign(std::istreambuf_iterator<char>(in), {});
      }
      if (code != 0 || out.str().empty()) ++mismatches;
      if (rep == 0) {
        first = out.str();
        first_traj = tr;
      } else if (out.str() != first || tr != first_traj) {
        ++mismatches;
      }
    }
  }
  std::filesystem::remove_all(dir);
  return {mismatches == 0,
          std::to_string(commands.size()) + " commands x 3 runs, " + std::to_string(mismatches) + " mismatches"};
}

struct Criterion {
  int id;
  std::string name;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "spectral identities", 10, spectral_identities},
      {2, "dot obstruction exact count", 5, dot_obstruction},
      {3, "random obstructions", 30, random_obstructions},
      {4, "control inequalities", 60, control_inequalities},
      {5, "property suites", 120, property_suites},
      {6, "U^s recursion vs definition", 60, recursion_vs_definition},
      {7, "inverse_u2 contract", 10, inverse_contract},
      {8, "energy machinery", 120, energy_machinery},
      {9, "extremal exactness", 1, extremal_exactness},
      {10, "constructive increments", 60, constructive_increments},
      {11, "determinism", 120, determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double elapsed = seconds_since(start);
    const bool in_time = elapsed <= c.budget_seconds;
    const bool pass = o.passed && in_time;
    if (!pass) ++failed;
    std::printf("%s criterion %d (%s): %s [%.2f s of %.0f s]%s\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                o.detail.c_str(), elapsed, c.budget_seconds, in_time ? "" : " over budget");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
