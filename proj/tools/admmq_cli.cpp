// Command-line front end for the admmq library.
//
// Exit codes: 0 success, 2 usage or input error, 3 divergence,
// 4 parameters outside the convergence condition (override with --force).

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "admmq/admmq.hpp"

namespace fs = std::filesystem;
using namespace admmq;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitDiverged = 3;
constexpr int kExitInfeasible = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double round12(double v) {
  if (!std::isfinite(v)) return v;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

nlohmann::json round_numbers(nlohmann::json j) {
  if (j.is_number_float()) return round12(j.get<double>());
  if (j.is_array() || j.is_object())
    for (auto& e : j) e = round_numbers(e);
  return j;
}

std::string csv_cell(const nlohmann::json& v) {
  if (v.is_array()) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ";" : "") + csv_cell(v[i]);
    return out;
  }
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "";
  return v.dump();
}

struct Common {
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "json";
};

void check_out_path(const std::string& out) {
  if (out.empty()) return;
  const fs::path parent = fs::absolute(fs::path(out)).parent_path();
  if (!fs::is_directory(parent)) throw UsageError("--out: directory " + parent.string() + " does not exist");
}

/// Flat objects become a header row plus a value row in csv mode.
void emit(const nlohmann::json& raw, const Common& c) {
  const nlohmann::json j = round_numbers(raw);
  std::ostringstream text;
  if (c.format == "csv" && j.is_object()) {
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it) text << (first ? "" : ",") << it.key(), first = false;
    text << '\n';
    first = true;
    for (auto it = j.begin(); it != j.end(); ++it) text << (first ? "" : ",") << csv_cell(it.value()), first = false;
    text << '\n';
  } else {
    text << j.dump(2) << '\n';
  }
  if (c.out.empty()) {
    std::cout << text.str();
  } else {
    std::ofstream f(c.out);
    if (!f) throw UsageError("cannot write " + c.out);
    f << text.str();
  }
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(path + ": " + e.what());
  }
}

Instance load_instance(const std::string& path) {
  try {
    return instance_from_json(read_json(path));
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception& e) {
    throw UsageError(path + ": " + e.what());
  }
}

std::vector<double> parse_list(const std::string& s, const char* flag) {
  std::vector<double> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(std::string(flag) + ": cannot parse '" + item + "'");
    }
  }
  if (out.empty()) throw UsageError(std::string(flag) + ": empty list");
  return out;
}

Vector to_vector(const std::vector<double>& v) { return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())); }
std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

// ---------------------------------------------------------------------------

struct GenerateArgs {
  InstanceSpec spec;
  double b_scale = -1.0;
};

int cmd_generate(GenerateArgs& a, const Common& c) {
  if (a.spec.d < 1) throw UsageError("--d must be >= 1");
  if (a.b_scale >= 0.0) a.spec.b_scale = a.b_scale;
  a.spec.seed = c.seed;
  try {
    a.spec.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  check_out_path(c.out);
  const Instance inst = generate_instance(a.spec);
  const std::string text = to_json(inst).dump(1) + "\n";
  if (c.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(c.out);
    if (!f) throw UsageError("cannot write " + c.out);
    f << text;
  }
  return kExitOk;
}

struct SolveArgs {
  std::string instance;
  std::string algorithm = "admm-q";
  double rho = 1.0;
  double gamma = 0.1;
  double beta = 1.0;
  double p = 0.5;
  std::int64_t iters = 1000;
  std::int64_t window = 50;
  double init_scale = 0.0;
  std::string x0;
  std::string trace;
  std::string dual_init = "negative-gradient";
  std::string inner = "closed-form";
  bool force = false;
  CLI::Option* gamma_opt = nullptr;
  CLI::Option* beta_opt = nullptr;
  CLI::Option* p_opt = nullptr;
};

/// Condition that backs the method's convergence statement; GD+Proj has none.
bool condition_holds(Method m, double L, double mu, double rho, double gamma) {
  switch (m) {
    case Method::AdmmQ:
    case Method::AdmmR:
    case Method::AdmmS: return check_decrease_condition(L, mu, rho);
    case Method::IAdmmQ: return check_iadmm_condition(L, mu, rho, gamma);
    case Method::Pgd: return rho >= L;
    case Method::GdProj: return true;
  }
  return true;
}

template <SmoothObjective F>
int solve_with(const F& f, const DiscreteProductSet& set, SolveArgs& a, const Common& c, Method m) {
  SolverConfig cfg;
  cfg.rho = a.rho;
  cfg.gamma = a.gamma;
  cfg.beta = a.beta;
  cfg.mask_prob = a.p;
  cfg.max_iters = a.iters;
  cfg.window = a.window;
  cfg.seed = c.seed;
  cfg.init_scale = a.init_scale;
  cfg.dual_init = a.dual_init == "zero" ? DualInit::Zero : DualInit::NegativeGradient;
  cfg.inner.mode = a.inner == "gd" ? InnerMode::GradientDescent : InnerMode::ClosedForm;
  if constexpr (!is_quadratic<F>::value) cfg.inner.mode = InnerMode::GradientDescent;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  Vector x0;
  if (!a.x0.empty()) {
    x0 = to_vector(parse_list(a.x0, "--x0"));
    if (static_cast<std::size_t>(x0.size()) != set.dim()) throw UsageError("--x0: dimension mismatch");
    if (!contains(set, x0, 1e-12)) throw UsageError("--x0: point is not a member of the set");
  } else {
    x0 = initial_point(set, cfg.seed, cfg.init_scale);
  }

  const double L = f.lipschitz();
  const double mu = f.weak_convexity();
  const bool condition = condition_holds(m, L, mu, a.rho, a.gamma);
  if (!a.trace.empty()) check_out_path(a.trace);
  check_out_path(c.out);

  RunResult res;
  try {
    res = run_from(m, f, set, cfg, x0);
  } catch (const DivergenceError& e) {
    std::cerr << "admmq: " << e.what() << '\n';
    return kExitDiverged;
  } catch (const LinearSolveError& e) {
    std::cerr << "admmq: x-update has no minimizer: " << e.what() << '\n';
    return kExitDiverged;
  } catch (const InnerSolverError& e) {
    std::cerr << "admmq: " << e.what() << '\n';
    return kExitDiverged;
  }

  if (!a.trace.empty()) {
    std::ofstream t(a.trace);
    if (!t) throw UsageError("cannot write " + a.trace);
    res.trace.write_csv(t);
  }

  const Vector point = m == Method::AdmmS ? project(set, res.final_state.y) : res.final_state.y;
  const StationarityReport st = is_rho_stationary(f, set, point, a.rho);
  nlohmann::json out{{"algorithm", std::string(to_string(m))},
                     {"rho", a.rho},
                     {"iterations", res.final_state.r},
                     {"final_objective", res.final_objective},
                     {"best_window_objective", res.best_window_objective},
                     {"residual", res.trace.records.back().residual},
                     {"stationary", st.is_stationary},
                     {"converged", m == Method::GdProj ? res.gd_converged : res.converged()},
                     {"lipschitz", L},
                     {"mu", mu},
                     {"condition", condition},
                     {"y", to_std(point)}};
  emit(out, c);
  if (!condition && !a.force) {
    std::cerr << "admmq: rho=" << a.rho << " violates the convergence condition for " << to_string(m)
              << " (L=" << L << ", mu=" << mu << "); pass --force to accept\n";
    return kExitInfeasible;
  }
  return kExitOk;
}

int cmd_solve(SolveArgs& a, const Common& c) {
  Method m;
  try {
    m = method_from_string(a.algorithm);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (a.beta_opt->count() && m != Method::AdmmS) throw UsageError("--beta applies only to admm-s");
  if (a.p_opt->count() && m != Method::AdmmR) throw UsageError("--p applies only to admm-r");
  if (a.gamma_opt->count() && m != Method::IAdmmQ) throw UsageError("--gamma applies only to iadmm-q");
  if (a.dual_init != "zero" && a.dual_init != "negative-gradient") throw UsageError("--dual-init: zero|negative-gradient");
  if (a.inner != "closed-form" && a.inner != "gd") throw UsageError("--inner: closed-form|gd");

  if (fs::path(a.instance).extension() == ".csv") {
    std::ifstream in(a.instance);
    if (!in) throw UsageError("cannot open " + a.instance);
    std::optional<LogisticObjective> f;
    try {
      f.emplace(logistic_from_csv(in));
    } catch (const std::exception& e) {
      throw UsageError(a.instance + ": " + e.what());
    }
    const auto set = DiscreteProductSet::uniform(f->dim(), CoordinateSet::binary());
    return solve_with(*f, set, a, c, m);
  }
  const Instance inst = load_instance(a.instance);
  return solve_with(inst.objective, inst.set, a, c, m);
}

struct SweepArgs {
  std::string instances;
  std::string protocol;
  std::string algorithms = "admm-q,admm-s,admm-r,pgd,gd-proj";
  bool full = false;
  unsigned threads = 0;
  std::size_t bins = 30;
  std::size_t d = 16;
  double v = 8.0;
  double sigma_q_sq = 30.0;
  double b_scale = -1.0;
};

std::vector<Instance> sweep_instances(const SweepArgs& a, const Common& c) {
  std::vector<Instance> out;
  if (fs::is_directory(a.instances)) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(a.instances))
      if (e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw UsageError("--instances: no .json files in " + a.instances);
    for (const auto& p : files) out.push_back(load_instance(p.string()));
    return out;
  }
  std::size_t used = 0;
  long long n = 0;
  try {
    n = std::stoll(a.instances, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != a.instances.size() || n < 1)
    throw UsageError("--instances: expected a directory or a positive count, got '" + a.instances + "'");
  for (long long i = 0; i < n; ++i) {
    InstanceSpec s;
    s.d = a.d;
    s.v = a.v;
    s.sigma_q_sq = a.sigma_q_sq;
    if (a.b_scale >= 0.0) s.b_scale = a.b_scale;
    s.seed = CounterRng::derive(c.seed, static_cast<std::uint64_t>(i));
    try {
      out.push_back(generate_instance(s));
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  return out;
}

int cmd_sweep(const SweepArgs& a, const Common& c) {
  if (c.out.empty()) throw UsageError("sweep: --out <dir> is required");
  if (!fs::is_directory(c.out)) throw UsageError("--out: directory " + c.out + " does not exist");
  if (a.bins < 1) throw UsageError("--bins must be >= 1");

  ProtocolSpec protocol = a.full ? ProtocolSpec::full() : ProtocolSpec::desk();
  std::vector<std::string> names;
  if (!a.protocol.empty()) {
    const nlohmann::json pj = read_json(a.protocol);
    try {
      protocol = protocol_from_json(pj, protocol);
    } catch (const std::exception& e) {
      throw UsageError(a.protocol + ": " + e.what());
    }
    if (pj.contains("algorithms")) names = pj.at("algorithms").get<std::vector<std::string>>();
    if (!pj.contains("seed")) protocol.seed = c.seed;
  } else {
    protocol.seed = c.seed;
  }
  if (a.threads) protocol.threads = a.threads;
  if (names.empty()) {
    std::istringstream in(a.algorithms);
    for (std::string s; std::getline(in, s, ',');) names.push_back(s);
  }
  std::vector<Method> methods;
  try {
    for (const auto& s : names) methods.push_back(method_from_string(s));
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (methods.empty()) throw UsageError("sweep: no algorithms");

  const std::vector<Instance> instances = sweep_instances(a, c);
  std::size_t last_pct = 101;
  const SweepResult res = run_protocol(instances, methods, protocol, [&](std::size_t k, std::size_t n) {
    const std::size_t pct = 100 * k / n;
    if (pct != last_pct && pct % 5 == 0) std::cerr << "sweep: " << pct << "% (" << k << "/" << n << " runs)\n";
    last_pct = pct;
  });

  const fs::path dir(c.out);
  {
    std::ofstream f(dir / "sweep.csv");
    write_sweep_csv(f, res);
  }
  {
    nlohmann::json s = summary_json(res);
    s["protocol"] = to_json(protocol);
    std::ofstream f(dir / "summary.json");
    f << round_numbers(s).dump(2) << '\n';
  }
  const auto has = [&](Method m) { return std::find(methods.begin(), methods.end(), m) != methods.end(); };
  if (has(Method::AdmmQ)) {
    for (Method m : methods) {
      if (m == Method::AdmmQ) continue;
      const Histogram h = pairwise_histogram(res.best_runs(m), res.best_runs(Method::AdmmQ), a.bins);
      std::ofstream f(dir / ("hist_" + std::string(to_string(m)) + "_minus_admm-q.csv"));
      write_histogram_csv(f, h);
    }
  }
  std::cerr << "sweep: wrote " << (dir / "sweep.csv").string() << ", summary.json\n";
  return kExitOk;
}

struct CheckArgs {
  std::string instance;
  std::string point;
  double rho = 1.0;
  double tol = 1e-9;
};

int cmd_check_stationary(const CheckArgs& a, const Common& c) {
  if (!(a.rho > 0.0)) throw UsageError("--rho must be positive");
  const Instance inst = load_instance(a.instance);
  const Vector x = to_vector(parse_list(a.point, "--point"));
  if (static_cast<std::size_t>(x.size()) != inst.set.dim()) throw UsageError("--point: dimension mismatch");
  if (!contains(inst.set, x, 1e-12)) throw UsageError("--point: not a member of the set");
  check_out_path(c.out);
  nlohmann::json out = to_json(is_rho_stationary(inst.objective, inst.set, x, a.rho, a.tol));
  out["rho"] = a.rho;
  emit(out, c);
  return kExitOk;
}

struct BruteArgs {
  std::string instance;
  std::string bounds;
  std::uint64_t limit = kDefaultEnumerationLimit;
};

int cmd_bruteforce(const BruteArgs& a, const Common& c) {
  const Instance inst = load_instance(a.instance);
  DiscreteProductSet set = inst.set;
  if (!a.bounds.empty()) {
    const auto b = parse_list(a.bounds, "--bounds");
    if (b.size() != 2 || !(b[0] <= b[1])) throw UsageError("--bounds: expected lo,hi with lo <= hi");
    std::vector<CoordinateSet> coords;
    try {
      for (const auto& cs : set.coords()) {
        const auto* l = std::get_if<ScaledLattice>(&cs.kind());
        coords.push_back(l ? CoordinateSet::lattice(l->spacing, std::max(l->lower, b[0]), std::min(l->upper, b[1])) : cs);
      }
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("--bounds: ") + e.what());
    }
    set = DiscreteProductSet(std::move(coords));
  }
  check_out_path(c.out);
  try {
    emit(to_json(brute_force_minimize(inst.objective, set, a.limit)), c);
  } catch (const EnumerationError& e) {
    throw UsageError(e.what());
  }
  return kExitOk;
}

struct ConditionArgs {
  double lf = 1.0;
  double mu = 0.0;
  double rho = 1.0;
  double gamma = 0.1;
  CLI::Option* gamma_opt = nullptr;
};

int cmd_verify_conditions(const ConditionArgs& a, const Common& c) {
  if (!(a.lf > 0.0) || !(a.rho > 0.0) || !(a.mu >= 0.0)) throw UsageError("--Lf and --rho must be positive, --mu non-negative");
  if (a.gamma < 0.0) throw UsageError("--gamma must be non-negative");
  check_out_path(c.out);
  nlohmann::json out{{"Lf", a.lf},
                     {"mu", a.mu},
                     {"rho", a.rho},
                     {"decrease", check_decrease_condition(a.lf, a.mu, a.rho)},
                     {"decrease_value", decrease_condition_value(a.lf, a.mu, a.rho)},
                     {"pgd", a.rho >= a.lf}};
  if (a.gamma_opt->count()) {
    out["gamma"] = a.gamma;
    out["iadmm"] = check_iadmm_condition(a.lf, a.mu, a.rho, a.gamma);
    out["iadmm_value"] = iadmm_condition_value(a.lf, a.mu, a.rho, a.gamma);
  }
  emit(out, c);
  return kExitOk;
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--seed", c.seed, "Random seed")->capture_default_str();
  sub->add_option("--out", c.out, "Output path (stdout when omitted)");
  sub->add_option("--format", c.format, "Output format for summaries")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantized ADMM solvers, stationarity checks and benchmark sweeps", "admmq"};
  app.require_subcommand(1);
  Common common;

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Write a random quadratic lattice instance as JSON");
  g->add_option("--d", gen.spec.d, "Dimension")->capture_default_str();
  g->add_option("--v", gen.spec.v, "Lattice spacing")->capture_default_str();
  g->add_option("--sigma-q-sq", gen.spec.sigma_q_sq, "Variance of the rank-one term")->capture_default_str();
  g->add_option("--b-scale", gen.b_scale, "Std-dev of b (default sqrt(d * sigma_q_sq))");
  add_common(g, common);

  SolveArgs sol;
  auto* s = app.add_subcommand("solve", "Run one solver on an instance (JSON quadratic or CSV logistic data)");
  s->add_option("--instance", sol.instance, "Instance file")->required()->check(CLI::ExistingFile);
  s->add_option("--algorithm", sol.algorithm, "admm-q|iadmm-q|admm-r|admm-s|pgd|gd-proj")->capture_default_str();
  s->add_option("--rho", sol.rho, "Penalty / inverse step size")->capture_default_str();
  sol.gamma_opt = s->add_option("--gamma", sol.gamma, "Inexactness (iadmm-q)")->capture_default_str();
  sol.beta_opt = s->add_option("--beta", sol.beta, "Soft-indicator weight (admm-s)")->capture_default_str();
  sol.p_opt = s->add_option("--p", sol.p, "Mask probability (admm-r)")->capture_default_str();
  s->add_option("--iters", sol.iters, "Iterations")->capture_default_str();
  s->add_option("--window", sol.window, "Best-objective window")->capture_default_str();
  s->add_option("--init-scale", sol.init_scale, "Std-dev of the random start (default: lattice spacing)");
  s->add_option("--x0", sol.x0, "Explicit start, comma separated");
  s->add_option("--trace", sol.trace, "Write the per-iteration trace CSV here");
  s->add_option("--dual-init", sol.dual_init, "negative-gradient|zero")->capture_default_str();
  s->add_option("--inner", sol.inner, "closed-form|gd")->capture_default_str();
  s->add_flag("--force", sol.force, "Exit 0 even when the convergence condition fails");
  add_common(s, common);

  SweepArgs sw;
  auto* w = app.add_subcommand("sweep", "Run the multi-start hyper-parameter protocol");
  w->add_option("--instances", sw.instances, "Directory of instance JSON files, or a count to generate")->required();
  w->add_option("--protocol", sw.protocol, "Protocol JSON (missing keys use the desk preset)");
  w->add_option("--algorithms", sw.algorithms, "Comma-separated algorithms")->capture_default_str();
  w->add_flag("--full", sw.full, "Start from the full-budget preset");
  w->add_option("--threads", sw.threads, "Worker threads (0: all cores)");
  w->add_option("--bins", sw.bins, "Histogram bins")->capture_default_str();
  w->add_option("--d", sw.d, "Dimension of generated instances")->capture_default_str();
  w->add_option("--v", sw.v, "Lattice spacing of generated instances")->capture_default_str();
  w->add_option("--sigma-q-sq", sw.sigma_q_sq, "sigma_q^2 of generated instances")->capture_default_str();
  w->add_option("--b-scale", sw.b_scale, "Std-dev of b for generated instances");
  add_common(w, common);

  CheckArgs chk;
  auto* cs = app.add_subcommand("check-stationary", "Test rho-stationarity of a point");
  cs->add_option("--instance", chk.instance, "Instance file")->required()->check(CLI::ExistingFile);
  cs->add_option("--point", chk.point, "Comma-separated point")->required();
  cs->add_option("--rho", chk.rho, "rho")->required();
  cs->add_option("--tol", chk.tol, "Per-coordinate tolerance")->capture_default_str();
  add_common(cs, common);

  BruteArgs bf;
  auto* b = app.add_subcommand("bruteforce", "Exhaustive minimum over a finite set");
  b->add_option("--instance", bf.instance, "Instance file")->required()->check(CLI::ExistingFile);
  b->add_option("--bounds", bf.bounds, "lo,hi box applied to lattice coordinates");
  b->add_option("--limit", bf.limit, "Maximum number of points")->capture_default_str();
  add_common(b, common);

  ConditionArgs cond;
  auto* vc = app.add_subcommand("verify-conditions", "Evaluate the parameter conditions");
  vc->add_option("--Lf", cond.lf, "Lipschitz constant of the gradient")->required();
  vc->add_option("--mu", cond.mu, "Weak-convexity modulus")->capture_default_str();
  vc->add_option("--rho", cond.rho, "rho")->required();
  cond.gamma_opt = vc->add_option("--gamma", cond.gamma, "Inexactness for the iadmm-q condition");
  add_common(vc, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*g) return cmd_generate(gen, common);
    if (*s) return cmd_solve(sol, common);
    if (*w) return cmd_sweep(sw, common);
    if (*cs) return cmd_check_stationary(chk, common);
    if (*b) return cmd_bruteforce(bf, common);
    if (*vc) return cmd_verify_conditions(cond, common);
  } catch (const UsageError& e) {
    std::cerr << "admmq: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "admmq: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
