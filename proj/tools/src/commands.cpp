#include "lshape_cli/commands.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "lshape/configurations.hpp"
#include "lshape/diagnostics.hpp"
#include "lshape/function_table.hpp"
#include "lshape/gowers.hpp"
#include "lshape/increment.hpp"
#include "lshape/random.hpp"
#include "lshape/structured_sets.hpp"
#include "lshape_cli/report.hpp"
#include "lshape_cli/suites.hpp"

namespace lshape::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  int p = 3;
  int n = 1;
  std::uint64_t seed = 1;
  bool strict = false;
  std::uint64_t max_entries = 1u << 24;
  double max_operations = 4e9;
  bool timing = false;
  std::string out;

  ResourceLimits limits() const {
    ResourceLimits l;
    l.max_table_entries = static_cast<Index>(max_entries);
    l.max_operations = max_operations;
    return l;
  }

  void echo(Json& j) const {
    j["p"] = p;
    j["n"] = n;
    j["seed"] = count_string(seed);
    j["strict"] = strict;
    j["max_entries"] = count_string(max_entries);
    j["max_operations"] = max_operations;
  }

  void validate() const {
    if (!is_prime(p)) throw UsageError("--p must be prime");
    if (n < 0) throw UsageError("--n must be nonnegative");
    PrimeField field(p, strict);
  }
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open '" + path + "'");
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw UsageError("cannot write '" + path + "'");
  return os;
}

Json complex_json(Complex c) { return Json{{"re", c.real()}, {"im", c.imag()}}; }

Json norm_json(const NormValue& v) {
  return Json{{"value", v.value}, {"power", v.power}, {"raw_average", complex_json(v.raw_average)}};
}

// ---- norm ----------------------------------------------------------------

struct NormArgs {
  std::string input;
  int random_dim = -1;
  std::vector<int> u;
  bool box = false;
  std::vector<int> star;
  bool audit = false;
};

void cmd_norm(const Common& c, const NormArgs& a, Report& r) {
  auto& cfg = r.config();
  c.echo(cfg);
  cfg["input"] = a.input;
  cfg["random_dim"] = a.random_dim;
  cfg["u"] = a.u;
  cfg["box"] = a.box;
  cfg["star"] = a.star;
  cfg["audit"] = a.audit;
  const auto limits = c.limits();
  std::optional<FunctionTable> table;
  if (!a.input.empty()) {
    auto in = open_input(a.input);
    table = read_table(in, limits);
  } else if (a.random_dim >= 0) {
    Rng rng(c.seed);
    table = random_one_bounded(rng, c.p, a.random_dim);
  } else {
    throw UsageError("norm needs --input or --random-dim");
  }
  if (a.u.empty() && !a.box && a.star.empty()) throw UsageError("norm needs at least one of --u, --box, --star");
  auto& res = r.results();
  res["table"] = {{"p", table->p()}, {"dim", table->dim()}, {"entries", count_string(table->size())}};
  for (int s : a.u) {
    const auto v = gowers_u(*table, s, limits);
    res["gowers"]["U" + std::to_string(s)] = norm_json(v);
    if (a.audit) {
      const auto def = gowers_u(*table, s, limits, true);
      Tally t("U" + std::to_string(s) + "-recursion-vs-definition", "gowers-norm-recursion");
      t.check(std::abs(v.value - def.value), 0.0, 1e-9);
      auto as = t.finish();
      as.values["definition"] = def.value;
      r.add(as);
    }
  }
  if (a.box) res["box"] = norm_json(box_norm(*table));
  for (int k : a.star) res["star"]["star" + std::to_string(k)] = norm_json(star_norm(*table, k));
}

// ---- count ---------------------------------------------------------------

struct CountArgs {
  std::string input;
  std::string example;
  std::string system = "L";
  std::string csv;
};

void write_row_csv(const std::string& path, const IndicatorSet& s) {
  const int n = s.dim() / 2;
  const Index N = IndexSpace(s.p(), n).size();
  auto os = open_output(path);
  os << "x,row_count,row_density\n";
  for (Index x = 0; x < N; ++x) {
    std::uint64_t c = 0;
    for (Index y = 0; y < N; ++y) c += s.contains(pair_index(x, y, N)) ? 1 : 0;
    os << x << ',' << c << ',' << std::setprecision(17) << static_cast<double>(c) / static_cast<double>(N) << '\n';
  }
}

void cmd_count(const Common& c, const CountArgs& a, Report& r) {
  auto& cfg = r.config();
  c.echo(cfg);
  cfg["input"] = a.input;
  cfg["example"] = a.example;
  cfg["system"] = a.system;
  cfg["csv"] = a.csv;
  const auto limits = c.limits();
  if (a.input.empty() == a.example.empty()) throw UsageError("count needs exactly one of --input, --example");
  std::optional<ObstructionExample> ex;
  std::optional<IndicatorSet> set;
  if (!a.example.empty()) {
    ex = obstruction_example(obstruction_kind_from_string(a.example), c.p, c.n, c.seed);
    set = ex->set;
  } else {
    auto in = open_input(a.input);
    set = read_set(in, limits);
  }
  if (set->dim() % 2 != 0) throw UsageError("count needs a set on F_p^n x F_p^n");
  auto& res = r.results();
  const int n = set->dim() / 2;
  const Index N = IndexSpace(set->p(), n).size();
  res["p"] = set->p();
  res["n"] = n;
  res["cardinality"] = count_string(set->cardinality());
  res["density"] = set->density();

  LambdaResult lam;
  if (a.system == "L") {
    lam = count_L(*set, limits);
  } else if (a.system == "corners") {
    lam = count_corners(*set, limits);
  } else {
    throw UsageError("--system must be L or corners");
  }
  res["system"] = a.system;
  res["average"] = lam.average;
  res["count"] = count_string(*lam.exact_count);
  res["nontrivial_count"] = count_string(*lam.nontrivial_count);

  if (ex) {
    res["example"] = to_string(ex->kind);
    if (ex->kind == ObstructionKind::dot) {
      res["predicted_density"] = std::to_string(ex->density_numerator) + "/" + std::to_string(ex->density_denominator);
      Tally t("dot-density-exact", "dot-obstruction-density");
      t.check(set->cardinality() * ex->density_denominator == ex->density_numerator * set->size());
      r.add(t.finish());
      if (a.system == "L" && ex->predicted_count) {
        const auto predicted = *ex->predicted_count;
        const auto brute = *lam.exact_count;
        res["closed_form_count"] = count_string(predicted);
        res["closed_form_matches"] = predicted == brute;
        res["discrepancy"] = (brute >= predicted ? "+" : "-") +
                             count_string(brute >= predicted ? brute - predicted : predicted - brute);
      }
    } else {
      const double p = static_cast<double>(set->p());
      const double scale = static_cast<double>(N) * static_cast<double>(N) * static_cast<double>(N) / (p * p * p);
      res["predicted_density"] = 1.0 / p;
      res["expected_count_scale"] = scale;
      res["density_within_band"] = set->density() >= 0.8 / p && set->density() <= 1.2 / p;
      if (a.system == "L") {
        const double nt = static_cast<double>(*lam.nontrivial_count);
        res["nontrivial_within_factor_two"] = nt >= scale / 2.0 && nt <= 2.0 * scale;
      }
    }
  }
  if (!a.csv.empty()) write_row_csv(a.csv, *set);
}

// ---- verify --------------------------------------------------------------

struct VerifyArgs {
  std::string suite = "all";
  int trials = 100;
  double slack = 1e-9;
  double eps = 0.1;
  double tau = 0.1;
};

void cmd_verify(const Common& c, const VerifyArgs& a, Report& r) {
  auto& cfg = r.config();
  c.echo(cfg);
  cfg["suite"] = a.suite;
  cfg["trials"] = a.trials;
  cfg["slack"] = a.slack;
  cfg["eps"] = a.eps;
  cfg["tau"] = a.tau;
  SuiteOptions o;
  o.p = c.p;
  o.n = c.n;
  o.trials = a.trials;
  o.seed = c.seed;
  o.slack = a.slack;
  o.eps = a.eps;
  o.tau = a.tau;
  o.limits = c.limits();
  std::vector<std::string> names;
  if (a.suite == "all") {
    names = suite_names();
  } else {
    names.push_back(a.suite);
  }
  for (const auto& name : names) {
    SuiteResult s;
    try {
      s = run_suite(name, o);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    r.results()["suites"][name] = {{"instances", count_string(s.instances)}, {"passed", s.passed()}};
    for (auto as : s.assertions) {
      as.name = name + "/" + as.name;
      r.add(as);
    }
  }
}

// ---- increment -----------------------------------------------------------

struct IncrementArgs {
  std::string from_file;
  std::string planted;
  std::string example;
  double eps = 0.1;
  double tau = 0.1;
  double floor = 1e-9;
  int max_steps = 32;
  std::string trajectory = "trajectory.jsonl";
};

Json step_json(const TrajectoryStep& s, std::uint64_t seed) {
  return Json{{"step", s.step},
              {"tool", s.tool},
              {"sigma_before", s.sigma_before},
              {"sigma_after", s.sigma_after},
              {"gain", s.gain},
              {"n", s.n},
              {"d", s.d},
              {"s_count", count_string(s.s_count)},
              {"t_count", count_string(s.t_count)},
              {"witness", s.witness},
              {"seed", count_string(seed)}};
}

void cmd_increment(const Common& c, const IncrementArgs& a, Report& r) {
  auto& cfg = r.config();
  c.echo(cfg);
  cfg["from_file"] = a.from_file;
  cfg["planted"] = a.planted;
  cfg["example"] = a.example;
  cfg["eps"] = a.eps;
  cfg["tau"] = a.tau;
  cfg["floor"] = a.floor;
  cfg["max_steps"] = a.max_steps;
  cfg["trajectory"] = a.trajectory;
  const int sources = !a.from_file.empty() + !a.planted.empty() + !a.example.empty();
  if (sources != 1) throw UsageError("increment needs exactly one of --from-file, --planted, --example");
  std::optional<IndicatorSet> s0;
  if (!a.from_file.empty()) {
    auto in = open_input(a.from_file);
    s0 = read_set(in, c.limits());
  } else if (!a.planted.empty()) {
    s0 = planted_instance(planted_kind_from_string(a.planted), c.p, c.n, c.seed);
  } else if (a.example == "dot") {
    s0 = greedy_L_free(dot_set(c.p, c.n), c.seed);
  } else {
    throw UsageError("--example must be dot");
  }
  if (s0->dim() % 2 != 0) throw UsageError("increment needs a set on F_p^n x F_p^n");
  DriverConfig dc;
  dc.eps = a.eps;
  dc.tau = a.tau;
  dc.gain_floor = a.floor;
  dc.max_steps = a.max_steps;
  const auto traj = increment_driver(*s0, dc);

  auto os = open_output(a.trajectory);
  auto& res = r.results();
  res["initial_cardinality"] = count_string(s0->cardinality());
  res["initial_sigma"] = s0->density();
  res["halt_reason"] = traj.halt_reason;
  res["steps"] = Json::array();
  Tally mono("sigma-non-decreasing", "density-increment-iteration");
  Tally floor("gain-above-floor", "density-increment-iteration");
  double prev = s0->density();
  for (const auto& st : traj.steps) {
    const auto j = step_json(st, c.seed);
    os << j.dump() << '\n';
    res["steps"].push_back(j);
    mono.check(prev, st.sigma_after, 0.0);
    floor.check(st.gain > a.floor);
    prev = st.sigma_after;
  }
  res["final_sigma"] = prev;
  if (traj.steps.empty()) {
    mono.check(true);
    floor.check(true);
  }
  r.add(mono.finish());
  r.add(floor.finish());
}

// ---- extremal ------------------------------------------------------------

struct ExtremalArgs {
  std::string method = "exhaustive";
  std::uint64_t budget = 50000000;
  std::string output;
};

void cmd_extremal(const Common& c, const ExtremalArgs& a, Report& r) {
  auto& cfg = r.config();
  c.echo(cfg);
  cfg["method"] = a.method;
  cfg["budget"] = count_string(a.budget);
  cfg["output"] = a.output;
  SearchMethod m;
  try {
    m = search_method_from_string(a.method);
    const auto e = search_extremal_L_free(c.p, c.n, m, a.budget, c.seed);
    auto& res = r.results();
    res["size"] = count_string(e.best.cardinality());
    res["exact"] = e.exact;
    res["budget_exceeded"] = e.budget_exceeded;
    res["nodes"] = count_string(e.nodes);
    Json pts = Json::array();
    const Index N = IndexSpace(c.p, c.n).size();
    for (Index i : e.best.elements()) pts.push_back({count_string(i % N), count_string(i / N)});
    res["points"] = pts;
    Tally t("output-l-free", "extremal-search-output-is-l-free");
    t.check(e.verified);
    r.add(t.finish());
    if (!a.output.empty()) {
      auto os = open_output(a.output);
      write_set(os, e.best);
    }
  } catch (const std::invalid_argument& ex) {
    throw UsageError(ex.what());
  }
}

// ---- pseudorandomize -----------------------------------------------------

struct PseudoArgs {
  int d = 1;
  double density = 0.7;
  double sigma = 0.3;
  double eps = 0.1;
  double tau = 0.1;
  std::string csv;
};

void cmd_pseudorandomize(const Common& c, const PseudoArgs& a, Report& r) {
  auto& cfg = r.config();
  c.echo(cfg);
  cfg["d"] = a.d;
  cfg["density"] = a.density;
  cfg["sigma"] = a.sigma;
  cfg["eps"] = a.eps;
  cfg["tau"] = a.tau;
  cfg["csv"] = a.csv;
  if (a.d < 0 || a.d > c.n) throw UsageError("--d must lie in [0, n]");
  Rng rng(c.seed);
  const auto t = random_T(rng, c.p, c.n, a.d, a.density);
  const auto s = random_set(rng, c.p, 2 * c.n, a.sigma).intersect(t.T);
  const auto pr = pseudorandomize_u2(t, s, a.eps, a.tau);
  auto& res = r.results();
  res["t_count"] = count_string(t.T.cardinality());
  res["s_count"] = count_string(s.cardinality());
  res["round_bound"] = pr.round_bound;
  res["final_energy"] = pr.final_energy;
  res["cells"] = count_string(pr.partition.size());
  res["exhausted"] = pr.exhausted;
  res["rounds"] = Json::array();
  Tally bound("round-bound", "pseudorandomization-round-bound");
  Tally strict("energy-strictly-increases", "pseudorandomization-energy-increment");
  bound.check(static_cast<double>(pr.rounds.size()), pr.round_bound, 0.0);
  for (const auto& rd : pr.rounds) {
    res["rounds"].push_back({{"round", rd.round},
                             {"energy_before", rd.energy_before},
                             {"energy_after", rd.energy_after},
                             {"refined_mass", rd.refined_mass},
                             {"refined_cells", count_string(rd.refined_cells)},
                             {"bad_t_mass", rd.bad_t_mass},
                             {"guaranteed_gain", rd.guaranteed_gain}});
    strict.check(rd.energy_after > rd.energy_before);
  }
  if (pr.rounds.empty()) strict.check(true);
  r.add(bound.finish());
  r.add(strict.finish());
  if (pr.cell) {
    const auto& cell = pr.partition.cell(*pr.cell);
    res["selection"] = {{"cell", count_string(*pr.cell)}, {"codim", cell.codim()}, {"u", to_string(cell.u())},
                        {"w", to_string(cell.w())},       {"level", pr.level},     {"ratio", pr.ratio},
                        {"target", pr.target},            {"reached", pr.reached}};
  } else {
    res["selection"] = nullptr;
  }
  if (!a.csv.empty()) {
    auto os = open_output(a.csv);
    os << "cell,codim,mass,beta,gamma,delta";
    for (int i = 0; i <= t.phi.d(); ++i) os << ",phi_le_" << i;
    os << '\n' << std::setprecision(17);
    for (std::size_t k = 0; k < pr.partition.size(); ++k) {
      const auto cs = cell_stats(pr.partition.cell(k), t);
      os << k << ',' << pr.partition.cell(k).codim() << ',' << cs.mass << ',' << cs.beta << ',' << cs.gamma << ','
         << cs.delta;
      for (double v : cs.phi_le) os << ',' << v;
      os << '\n';
    }
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  struct SinkGuard {
    WarningSink previous;
    ~SinkGuard() { set_warning_sink(std::move(previous)); }
  } guard{set_warning_sink([&err](std::string_view msg) { err << "warning: " << msg << '\n'; })};

  CLI::App app{"Desk-scale tools for L-shaped configurations in F_p^n x F_p^n"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key=value configuration file with [command] sections");
  Common common;
  app.add_option("--p", common.p, "prime p");
  app.add_option("--n", common.n, "dimension n");
  app.add_option("--seed", common.seed, "random seed");
  app.add_flag("--strict", common.strict, "reject p below 11");
  app.add_option("--max-entries", common.max_entries, "largest table allowed");
  app.add_option("--max-ops", common.max_operations, "largest operation estimate allowed");
  app.add_flag("--timing", common.timing, "include wall-clock time in the report");
  app.add_option("--out", common.out, "write the report here instead of stdout");

  NormArgs norm;
  auto* norm_cmd = app.add_subcommand("norm", "Gowers, box and directional norms of a table");
  norm_cmd->add_option("--input", norm.input, "set or function file");
  norm_cmd->add_option("--random-dim", norm.random_dim, "use a seeded random 1-bounded table on F_p^m");
  norm_cmd->add_option("--u", norm.u, "U^s norms to compute");
  norm_cmd->add_flag("--box", norm.box, "box norm (table on F_p^{2n})");
  norm_cmd->add_option("--star", norm.star, "directional norms 1, 2, 3 (table on F_p^{2n})");
  norm_cmd->add_flag("--audit", norm.audit, "cross-check U^s against the definition");

  CountArgs count;
  auto* count_cmd = app.add_subcommand("count", "L-shape and corner counts");
  count_cmd->add_option("--input", count.input, "set file on F_p^{2n}");
  count_cmd->add_option("--example", count.example, "dot, random_phi or coordinate");
  count_cmd->add_option("--system", count.system, "L or corners");
  count_cmd->add_option("--csv", count.csv, "write row densities as CSV");

  VerifyArgs verify;
  auto* verify_cmd = app.add_subcommand("verify", "randomized property suites");
  verify_cmd->add_option("--suite", verify.suite, "suite name or all");
  verify_cmd->add_option("--trials", verify.trials, "instances per suite");
  verify_cmd->add_option("--slack", verify.slack, "inequality slack");
  verify_cmd->add_option("--eps", verify.eps, "uniformity threshold for the energy suite");
  verify_cmd->add_option("--tau", verify.tau, "density threshold for the energy suite");

  IncrementArgs inc;
  auto* inc_cmd = app.add_subcommand("increment", "run the density-increment driver");
  inc_cmd->add_option("--from-file", inc.from_file, "starting set file");
  inc_cmd->add_option("--planted", inc.planted, "halfA or halfD");
  inc_cmd->add_option("--example", inc.example, "dot (greedy L-free part of the dot set)");
  inc_cmd->add_option("--eps", inc.eps, "uniformity threshold");
  inc_cmd->add_option("--tau", inc.tau, "density threshold");
  inc_cmd->add_option("--floor", inc.floor, "smallest gain that counts");
  inc_cmd->add_option("--max-steps", inc.max_steps, "step limit");
  inc_cmd->add_option("--trajectory", inc.trajectory, "JSON-lines trajectory file");

  ExtremalArgs ext;
  auto* ext_cmd = app.add_subcommand("extremal", "search for large L-free sets");
  ext_cmd->add_option("--method", ext.method, "exhaustive, greedy, local or random");
  ext_cmd->add_option("--budget", ext.budget, "node, iteration or restart budget");
  ext_cmd->add_option("--output", ext.output, "write the best set here");

  PseudoArgs pseudo;
  auto* pseudo_cmd = app.add_subcommand("pseudorandomize", "U^2 pseudorandomization of a seeded instance");
  pseudo_cmd->add_option("--d", pseudo.d, "codimension of the Phi fibers");
  pseudo_cmd->add_option("--density", pseudo.density, "density of A, B, C, D");
  pseudo_cmd->add_option("--sigma", pseudo.sigma, "density of S inside T");
  pseudo_cmd->add_option("--eps", pseudo.eps, "uniformity threshold");
  pseudo_cmd->add_option("--tau", pseudo.tau, "density threshold");
  pseudo_cmd->add_option("--csv", pseudo.csv, "write per-cell statistics as CSV");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, er;
    const int code = app.exit(e, o, er);
    out << o.str();
    err << er.str();
    return code == 0 ? 0 : 2;
  }

  const auto start = std::chrono::steady_clock::now();
  std::string name = app.get_subcommands().front()->get_name();
  Report report(name);
  try {
    common.validate();
    if (name == "norm") cmd_norm(common, norm, report);
    if (name == "count") cmd_count(common, count, report);
    if (name == "verify") cmd_verify(common, verify, report);
    if (name == "increment") cmd_increment(common, inc, report);
    if (name == "extremal") cmd_extremal(common, ext, report);
    if (name == "pseudorandomize") cmd_pseudorandomize(common, pseudo, report);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return 2;
  } catch (const ResourceError& e) {
    err << "resource limit: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::logic_error& e) {
    err << "assertion failed: " << e.what() << '\n';
    return 1;
  }
  if (common.timing) {
    report.set_wall_clock(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }
  if (common.out.empty()) {
    out << report.dump();
  } else {
    try {
      auto os = open_output(common.out);
      os << report.dump();
    } catch (const UsageError& e) {
      err << "error: " << e.what() << '\n';
      return 2;
    }
  }
  return report.passed() ? 0 : 1;
}

}  // namespace lshape::cli
