#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "admmq/discrete_sets.hpp"
#include "admmq/objectives.hpp"
#include "admmq/rng.hpp"
#include "admmq/solvers.hpp"

namespace admmq {

// ---------------------------------------------------------------------------
// Instances

struct InstanceSpec {
  std::size_t d = 16;
  double v = 8.0;
  double sigma_q_sq = 30.0;
  std::optional<double> b_scale;  // std-dev of b entries; default sqrt(d * sigma_q_sq)
  std::uint64_t seed = 0;

  double effective_b_scale() const {
    return b_scale ? *b_scale : std::sqrt(static_cast<double>(d) * sigma_q_sq);
  }

  void validate() const {
    if (d < 1) throw std::invalid_argument("InstanceSpec: d must be >= 1");
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("InstanceSpec: v must be positive");
    if (!(sigma_q_sq >= 0.0) || !std::isfinite(sigma_q_sq))
      throw std::invalid_argument("InstanceSpec: sigma_q_sq must be non-negative");
    if (b_scale && (!(*b_scale >= 0.0) || !std::isfinite(*b_scale)))
      throw std::invalid_argument("InstanceSpec: b_scale must be non-negative");
  }
};

struct Instance {
  InstanceSpec spec;
  QuadraticObjective objective;
  DiscreteProductSet set;
};

/// Q = Qt^T Qt + q q^T with Qt_ij ~ N(0,1), q_i ~ N(0, sigma_q_sq), b_i ~ N(0, b_scale^2),
/// over the unbounded lattice v*Z^d. Draw order: Qt row-major, then q, then b.
inline Instance generate_instance(const InstanceSpec& spec) {
  spec.validate();
  const auto d = static_cast<Eigen::Index>(spec.d);
  CounterRng rng(CounterRng::derive(spec.seed, 0x9E11));
  Matrix qt(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) qt(i, j) = rng.normal();
  Vector q(d);
  const double sq = std::sqrt(spec.sigma_q_sq);
  for (Eigen::Index i = 0; i < d; ++i) q[i] = rng.normal(0.0, sq);
  Vector b(d);
  const double bs = spec.effective_b_scale();
  for (Eigen::Index i = 0; i < d; ++i) b[i] = rng.normal(0.0, bs);

  Matrix Q = qt.transpose() * qt;
  Q.noalias() += q * q.transpose();
  Q = 0.5 * (Q + Q.transpose()).eval();
  return Instance{spec, QuadraticObjective(Q, b),
                  DiscreteProductSet::uniform(spec.d, CoordinateSet::lattice(spec.v))};
}

inline nlohmann::json to_json(const InstanceSpec& s) {
  nlohmann::json j{{"d", s.d}, {"v", s.v}, {"sigma_q_sq", s.sigma_q_sq}, {"seed", s.seed}};
  j["b_scale"] = s.b_scale ? nlohmann::json(*s.b_scale) : nlohmann::json(nullptr);
  return j;
}

inline InstanceSpec instance_spec_from_json(const nlohmann::json& j) {
  InstanceSpec s;
  s.d = j.value("d", s.d);
  s.v = j.value("v", s.v);
  s.sigma_q_sq = j.value("sigma_q_sq", s.sigma_q_sq);
  s.seed = j.value("seed", s.seed);
  if (j.contains("b_scale") && !j.at("b_scale").is_null()) s.b_scale = j.at("b_scale").get<double>();
  s.validate();
  return s;
}

/// {"Q": [[..]], "b": [..], "set": {...}, "spec": {...}}
inline nlohmann::json to_json(const Instance& inst) {
  nlohmann::json j = to_json(inst.objective);
  j["set"] = to_json(inst.set);
  j["spec"] = to_json(inst.spec);
  return j;
}

/// Accepts generated instances and hand-written ones ({Q, b, set}); "spec" is optional
/// and "set" defaults to the spec's lattice.
inline Instance instance_from_json(const nlohmann::json& j) {
  QuadraticObjective obj = quadratic_from_json(j);
  InstanceSpec spec;
  if (j.contains("spec")) spec = instance_spec_from_json(j.at("spec"));
  spec.d = obj.dim();
  std::optional<DiscreteProductSet> set;
  if (j.contains("set")) {
    set = discrete_set_from_json(j.at("set"));
  } else {
    set = DiscreteProductSet::uniform(obj.dim(), CoordinateSet::lattice(spec.v));
  }
  if (set->dim() != obj.dim()) throw std::invalid_argument("instance: set and objective dimensions differ");
  return Instance{spec, std::move(obj), std::move(*set)};
}

// ---------------------------------------------------------------------------
// Protocol

struct HyperParams {
  double rho = 1.0;
  double gamma = 0.0;
  double beta = 1.0;
  double mask_prob = 1.0;
};

/// Only the parameters the method reads.
inline nlohmann::json to_json(Method m, const HyperParams& h) {
  switch (m) {
    case Method::AdmmQ:
    case Method::Pgd: return {{"rho", h.rho}};
    case Method::IAdmmQ: return {{"rho", h.rho}, {"gamma", h.gamma}};
    case Method::AdmmR: return {{"rho", h.rho}, {"p", h.mask_prob}};
    case Method::AdmmS: return {{"rho", h.rho}, {"beta", h.beta}};
    case Method::GdProj: return nlohmann::json::object();
  }
  return nlohmann::json::object();
}

struct ProtocolSpec {
  std::int64_t n_inits = 50;
  std::int64_t iters_admm = 30000;
  std::int64_t iters_pgd = 100000;
  std::int64_t window = 50;
  std::vector<double> rho_grid;
  std::vector<double> beta_grid;
  std::vector<double> p_grid;
  std::vector<double> gamma_grid{0.1};
  std::uint64_t seed = 0;
  double init_scale = 0.0;
  DualInit dual_init = DualInit::NegativeGradient;
  unsigned threads = 0;  // 0: hardware concurrency

  static std::vector<double> default_rho_grid() {
    std::vector<double> g;
    for (int k = 2; k >= -6; --k) g.push_back(std::pow(10.0, -k));
    return g;
  }
  static std::vector<double> default_beta_grid() {
    std::vector<double> g;
    for (int h = -10; h <= 10; ++h) g.push_back(std::pow(10.0, 0.5 * h));
    return g;
  }
  static std::vector<double> default_p_grid() { return {0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99}; }

  static ProtocolSpec full() {
    ProtocolSpec p;
    p.rho_grid = default_rho_grid();
    p.beta_grid = default_beta_grid();
    p.p_grid = default_p_grid();
    return p;
  }

  static ProtocolSpec desk() {
    ProtocolSpec p = full();
    p.n_inits = 20;
    p.iters_admm = 3000;
    p.iters_pgd = 10000;
    return p;
  }

  void validate() const {
    if (n_inits < 1) throw std::invalid_argument("ProtocolSpec: n_inits must be >= 1");
    if (iters_admm < 0 || iters_pgd < 0) throw std::invalid_argument("ProtocolSpec: iteration budgets must be >= 0");
    if (window < 1) throw std::invalid_argument("ProtocolSpec: window must be >= 1");
    if (rho_grid.empty() || beta_grid.empty() || p_grid.empty() || gamma_grid.empty())
      throw std::invalid_argument("ProtocolSpec: grids must be non-empty");
  }

  /// Grid points for one method: rho x (gamma | beta | p) as applicable.
  std::vector<HyperParams> grid_for(Method m) const {
    std::vector<HyperParams> out;
    if (m == Method::GdProj) return {HyperParams{}};
    for (double rho : rho_grid) {
      HyperParams h;
      h.rho = rho;
      switch (m) {
        case Method::IAdmmQ:
          for (double g : gamma_grid) out.push_back({rho, g, 1.0, 1.0});
          break;
        case Method::AdmmR:
          for (double p : p_grid) out.push_back({rho, 0.0, 1.0, p});
          break;
        case Method::AdmmS:
          for (double b : beta_grid) out.push_back({rho, 0.0, b, 1.0});
          break;
        default: out.push_back(h);
      }
    }
    return out;
  }

  /// Seed of initialization `init` on instance `instance`; shared by every algorithm.
  std::uint64_t init_seed(std::size_t instance, std::int64_t init) const {
    return CounterRng::derive(CounterRng::derive(seed, instance), static_cast<std::uint64_t>(init));
  }
};

inline nlohmann::json to_json(const ProtocolSpec& p) {
  return {{"n_inits", p.n_inits},       {"iters_admm", p.iters_admm}, {"iters_pgd", p.iters_pgd},
          {"window", p.window},         {"rho_grid", p.rho_grid},     {"beta_grid", p.beta_grid},
          {"p_grid", p.p_grid},         {"gamma_grid", p.gamma_grid}, {"seed", p.seed},
          {"init_scale", p.init_scale}, {"threads", p.threads},
          {"dual_init", p.dual_init == DualInit::Zero ? "zero" : "negative-gradient"}};
}

/// Missing keys fall back to `base`.
inline ProtocolSpec protocol_from_json(const nlohmann::json& j, ProtocolSpec base = ProtocolSpec::desk()) {
  base.n_inits = j.value("n_inits", base.n_inits);
  base.iters_admm = j.value("iters_admm", base.iters_admm);
  base.iters_pgd = j.value("iters_pgd", base.iters_pgd);
  base.window = j.value("window", base.window);
  base.rho_grid = j.value("rho_grid", base.rho_grid);
  base.beta_grid = j.value("beta_grid", base.beta_grid);
  base.p_grid = j.value("p_grid", base.p_grid);
  base.gamma_grid = j.value("gamma_grid", base.gamma_grid);
  base.seed = j.value("seed", base.seed);
  base.init_scale = j.value("init_scale", base.init_scale);
  base.threads = j.value("threads", base.threads);
  if (j.contains("dual_init")) {
    const auto s = j.at("dual_init").get<std::string>();
    if (s == "zero") base.dual_init = DualInit::Zero;
    else if (s == "negative-gradient") base.dual_init = DualInit::NegativeGradient;
    else throw std::invalid_argument("protocol: unknown dual_init '" + s + "'");
  }
  base.validate();
  return base;
}

// ---------------------------------------------------------------------------
// Results

/// Linear-interpolation quantile (type 7) of a non-empty sample.
inline double quantile(std::vector<double> xs, double q) {
  if (xs.empty()) throw std::invalid_argument("quantile: empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile: q must lie in [0, 1]");
  std::sort(xs.begin(), xs.end());
  const double pos = q * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (pos - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

struct RunRow {
  std::size_t instance_id = 0;
  Method method = Method::AdmmQ;
  std::size_t grid_index = 0;
  HyperParams hyper;
  std::int64_t init = 0;
  double best_objective = std::numeric_limits<double>::quiet_NaN();
  bool diverged = false;
};

struct GridAggregate {
  std::size_t instance_id = 0;
  Method method = Method::AdmmQ;
  std::size_t grid_index = 0;
  HyperParams hyper;
  std::vector<double> values;  // per init; NaN where diverged
  std::int64_t diverged = 0;
  double median = std::numeric_limits<double>::quiet_NaN();
  double q25 = std::numeric_limits<double>::quiet_NaN();
  double q75 = std::numeric_limits<double>::quiet_NaN();

  bool infeasible() const { return 2 * diverged > static_cast<std::int64_t>(values.size()); }
};

/// Objective values keyed by (instance, init), for pairing two algorithms.
struct RunSet {
  std::vector<std::pair<std::size_t, std::int64_t>> keys;
  std::vector<double> values;
};

struct SweepResult {
  std::vector<RunRow> rows;               // ordered by task index
  std::vector<GridAggregate> aggregates;  // ordered by (instance, method, grid index)
  std::vector<Method> methods;
  std::size_t n_instances = 0;
  std::int64_t n_inits = 0;

  /// Grid point with the smallest median among feasible points; nullptr if none.
  const GridAggregate* best(std::size_t instance, Method m) const {
    const GridAggregate* out = nullptr;
    for (const auto& a : aggregates) {
      if (a.instance_id != instance || a.method != m || a.infeasible() || std::isnan(a.median)) continue;
      if (!out || a.median < out->median) out = &a;
    }
    return out;
  }

  /// Per-init values at each instance's best grid point, pooled over instances.
  RunSet best_runs(Method m) const {
    RunSet out;
    for (std::size_t i = 0; i < n_instances; ++i) {
      const GridAggregate* a = best(i, m);
      for (std::int64_t r = 0; r < n_inits; ++r) {
        out.keys.emplace_back(i, r);
        out.values.push_back(a ? a->values[static_cast<std::size_t>(r)] : std::numeric_limits<double>::quiet_NaN());
      }
    }
    return out;
  }
};

/// Run the protocol over `instances` for each method in `methods`.
/// Tasks are (instance, method, grid point, init); results are stored by task index.
inline SweepResult run_protocol(const std::vector<Instance>& instances, const std::vector<Method>& methods,
                                const ProtocolSpec& protocol,
                                const std::function<void(std::size_t, std::size_t)>& progress = {}) {
  protocol.validate();
  if (instances.empty()) throw std::invalid_argument("run_protocol: no instances");
  if (methods.empty()) throw std::invalid_argument("run_protocol: no algorithms");

  SweepResult result;
  result.methods = methods;
  result.n_instances = instances.size();
  result.n_inits = protocol.n_inits;

  std::vector<std::vector<Vector>> starts(instances.size());
  for (std::size_t i = 0; i < instances.size(); ++i)
    for (std::int64_t r = 0; r < protocol.n_inits; ++r)
      starts[i].push_back(initial_point(instances[i].set, protocol.init_seed(i, r), protocol.init_scale));

  for (std::size_t i = 0; i < instances.size(); ++i) {
    for (Method m : methods) {
      const auto grid = protocol.grid_for(m);
      for (std::size_t g = 0; g < grid.size(); ++g) {
        GridAggregate agg;
        agg.instance_id = i;
        agg.method = m;
        agg.grid_index = g;
        agg.hyper = grid[g];
        result.aggregates.push_back(std::move(agg));
        for (std::int64_t r = 0; r < protocol.n_inits; ++r) {
          RunRow row;
          row.instance_id = i;
          row.method = m;
          row.grid_index = g;
          row.hyper = grid[g];
          row.init = r;
          result.rows.push_back(row);
        }
      }
    }
  }

  const auto execute = [&](RunRow& row) {
    const Instance& inst = instances[row.instance_id];
    SolverConfig cfg;
    cfg.rho = row.hyper.rho;
    cfg.gamma = row.hyper.gamma;
    cfg.beta = row.hyper.beta;
    cfg.mask_prob = row.hyper.mask_prob;
    cfg.window = protocol.window;
    cfg.max_iters = row.method == Method::Pgd ? protocol.iters_pgd : protocol.iters_admm;
    cfg.seed = protocol.init_seed(row.instance_id, row.init);
    cfg.dual_init = protocol.dual_init;
    cfg.trace_stride = std::max<std::int64_t>(cfg.max_iters, 1);
    if (row.method == Method::GdProj) cfg.max_iters = std::max<std::int64_t>(protocol.iters_pgd, 1);
    try {
      const RunResult rr =
          run_from(row.method, inst.objective, inst.set, cfg, starts[row.instance_id][static_cast<std::size_t>(row.init)]);
      row.best_objective = rr.best_window_objective;
      row.diverged = !std::isfinite(row.best_objective);
    } catch (const DivergenceError&) {
      row.diverged = true;
    } catch (const LinearSolveError&) {
      row.diverged = true;
    } catch (const InnerSolverError&) {
      row.diverged = true;
    }
    if (row.diverged) row.best_objective = std::numeric_limits<double>::quiet_NaN();
  };

  const std::size_t n_tasks = result.rows.size();
  unsigned n_threads = protocol.threads ? protocol.threads : std::max(1u, std::thread::hardware_concurrency());
  n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, std::max<std::size_t>(n_tasks, 1)));
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  const auto worker = [&] {
    for (std::size_t t = next.fetch_add(1); t < n_tasks; t = next.fetch_add(1)) {
      execute(result.rows[t]);
      const std::size_t k = done.fetch_add(1) + 1;
      if (progress && n_threads == 1) progress(k, n_tasks);
    }
  };
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < n_threads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (progress) progress(n_tasks, n_tasks);
  }

  // Rows were laid out contiguously per aggregate, n_inits at a time.
  const auto n = static_cast<std::size_t>(protocol.n_inits);
  for (std::size_t a = 0; a < result.aggregates.size(); ++a) {
    GridAggregate& agg = result.aggregates[a];
    std::vector<double> ok;
    for (std::size_t r = 0; r < n; ++r) {
      const RunRow& row = result.rows[a * n + r];
      agg.values.push_back(row.best_objective);
      if (row.diverged) ++agg.diverged;
      else ok.push_back(row.best_objective);
    }
    if (!ok.empty()) {
      agg.median = quantile(ok, 0.5);
      agg.q25 = quantile(ok, 0.25);
      agg.q75 = quantile(ok, 0.75);
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Histograms

struct Histogram {
  std::vector<double> edges;  // size bins + 1
  std::vector<std::int64_t> counts;
  std::vector<double> differences;  // a - b per shared run, skipped pairs excluded
  std::int64_t skipped = 0;         // pairs where either run diverged
};

/// Histogram of a.values - b.values over shared (instance, init) keys.
/// Equal-width bins over [min, max]; a zero-width range collapses to one bin.
inline Histogram pairwise_histogram(const RunSet& a, const RunSet& b, std::size_t bins) {
  if (bins < 1) throw std::invalid_argument("pairwise_histogram: bins must be >= 1");
  if (a.keys != b.keys || a.values.size() != a.keys.size() || b.values.size() != b.keys.size())
    throw std::invalid_argument("pairwise_histogram: run sets do not cover the same (instance, init) pairs");
  Histogram h;
  for (std::size_t k = 0; k < a.values.size(); ++k) {
    const double d = a.values[k] - b.values[k];
    if (std::isfinite(d)) h.differences.push_back(d);
    else ++h.skipped;
  }
  if (h.differences.empty()) return h;
  const auto [mn, mx] = std::minmax_element(h.differences.begin(), h.differences.end());
  const double lo = *mn;
  const double hi = *mx;
  if (hi == lo) {
    h.edges = {lo, hi};
    h.counts = {static_cast<std::int64_t>(h.differences.size())};
    return h;
  }
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t k = 0; k <= bins; ++k) h.edges.push_back(lo + width * static_cast<double>(k));
  h.edges.back() = hi;
  h.counts.assign(bins, 0);
  for (double d : h.differences) {
    auto k = static_cast<std::size_t>((d - lo) / width);
    if (k >= bins) k = bins - 1;
    ++h.counts[k];
  }
  return h;
}

// ---------------------------------------------------------------------------
// Output

namespace detail {
inline std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}
}  // namespace detail

inline void write_sweep_csv(std::ostream& out, const SweepResult& res) {
  out.precision(17);
  out << "instance_id,algorithm,hyper_json,init,best_objective,diverged\n";
  for (const auto& row : res.rows) {
    out << row.instance_id << ',' << to_string(row.method) << ',' << detail::csv_quote(to_json(row.method, row.hyper).dump())
        << ',' << row.init << ',';
    if (row.diverged) out << "nan";
    else out << row.best_objective;
    out << ',' << (row.diverged ? 1 : 0) << '\n';
  }
}

inline nlohmann::json aggregate_json(const GridAggregate& a) {
  const auto num = [](double v) { return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v); };
  return {{"hyper", to_json(a.method, a.hyper)}, {"median", num(a.median)}, {"q25", num(a.q25)},
          {"q75", num(a.q75)},                   {"diverged", a.diverged},  {"infeasible", a.infeasible()}};
}

/// {"instances": [{"instance_id", "algorithms": {name: {"best": {...}|null, "grid": [...]}}}]}
inline nlohmann::json summary_json(const SweepResult& res) {
  nlohmann::json out;
  out["n_inits"] = res.n_inits;
  out["instances"] = nlohmann::json::array();
  for (std::size_t i = 0; i < res.n_instances; ++i) {
    nlohmann::json inst{{"instance_id", i}, {"algorithms", nlohmann::json::object()}};
    for (Method m : res.methods) {
      nlohmann::json alg{{"grid", nlohmann::json::array()}};
      for (const auto& a : res.aggregates)
        if (a.instance_id == i && a.method == m) alg["grid"].push_back(aggregate_json(a));
      const GridAggregate* best = res.best(i, m);
      alg["best"] = best ? aggregate_json(*best) : nlohmann::json(nullptr);
      inst["algorithms"][std::string(to_string(m))] = std::move(alg);
    }
    out["instances"].push_back(std::move(inst));
  }
  return out;
}

inline void write_histogram_csv(std::ostream& out, const Histogram& h) {
  out.precision(17);
  out << "bin_left,bin_right,count\n";
  for (std::size_t k = 0; k < h.counts.size(); ++k) out << h.edges[k] << ',' << h.edges[k + 1] << ',' << h.counts[k] << '\n';
}

}  // namespace admmq
