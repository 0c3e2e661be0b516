#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "admmq/discrete_sets.hpp"
#include "admmq/objectives.hpp"
#include "admmq/rng.hpp"

namespace admmq {

enum class Method { AdmmQ, IAdmmQ, AdmmR, AdmmS, Pgd, GdProj };

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::AdmmQ: return "admm-q";
    case Method::IAdmmQ: return "iadmm-q";
    case Method::AdmmR: return "admm-r";
    case Method::AdmmS: return "admm-s";
    case Method::Pgd: return "pgd";
    case Method::GdProj: return "gd-proj";
  }
  return "?";
}

inline Method method_from_string(std::string_view s) {
  for (Method m : {Method::AdmmQ, Method::IAdmmQ, Method::AdmmR, Method::AdmmS, Method::Pgd, Method::GdProj}) {
    if (to_string(m) == s) return m;
  }
  throw std::invalid_argument("unknown algorithm '" + std::string(s) + "'");
}

/// The x-subproblem is not strongly convex (rho <= mu) or its factorization failed.
class LinearSolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The inner gradient descent did not reach its acceptance test.
class InnerSolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterate became non-finite or exceeded the divergence bound.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::int64_t iteration, const std::string& what)
      : std::runtime_error("diverged at iteration " + std::to_string(iteration) + ": " + what),
        iteration_(iteration) {}
  std::int64_t iteration() const { return iteration_; }

 private:
  std::int64_t iteration_;
};

enum class InnerMode { ClosedForm, GradientDescent };

struct InnerSolverConfig {
  InnerMode mode = InnerMode::ClosedForm;
  std::optional<double> step_size;  // nullopt: 2 / (sigma(rho) + rho + L_f)
  int max_inner_iters = 100000;
  double abs_grad_tol = 1e-12;
};

/// How lambda^0 is chosen. NegativeGradient makes lambda^0 = -grad f(x^0), the
/// value every later exact x-update produces.
enum class DualInit { NegativeGradient, Zero };

struct SolverConfig {
  double rho = 1.0;
  double gamma = 0.1;
  double beta = 1.0;
  double mask_prob = 0.5;
  std::int64_t max_iters = 1000;
  std::int64_t window = 50;
  InnerSolverConfig inner;
  std::uint64_t seed = 0;
  double init_scale = 0.0;  // <= 0: per-coordinate default (lattice spacing, 1 otherwise)
  DualInit dual_init = DualInit::NegativeGradient;
  std::int64_t trace_stride = 1;
  double divergence_bound = 1e150;
  double gd_tol = 1e-10;  // gradient tolerance of the GD+Proj baseline

  void validate() const {
    if (!(rho > 0.0) || !std::isfinite(rho)) throw std::invalid_argument("rho must be positive");
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("gamma must be non-negative");
    if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
    if (!(mask_prob > 0.0 && mask_prob <= 1.0)) throw std::invalid_argument("mask probability must be in (0, 1]");
    if (max_iters < 0) throw std::invalid_argument("max_iters must be non-negative");
    if (window < 1) throw std::invalid_argument("window must be positive");
    if (trace_stride < 1) throw std::invalid_argument("trace stride must be positive");
    if (inner.max_inner_iters < 1) throw std::invalid_argument("max_inner_iters must be positive");
    if (!(inner.abs_grad_tol > 0.0)) throw std::invalid_argument("abs_grad_tol must be positive");
    if (inner.step_size && !(*inner.step_size > 0.0)) throw std::invalid_argument("inner step size must be positive");
  }
};

struct IterateState {
  Vector x;
  Vector y;
  Vector lambda;
  std::int64_t r = 0;
};

struct StepInfo {
  int inner_iters = 0;
  double grad_norm = 0.0;  // |grad_x L| at the accepted x
};

struct TraceRecord {
  std::int64_t r = 0;
  double lagrangian = 0.0;
  double f_y = 0.0;
  double residual = 0.0;
  int inner_iters = 0;

  bool operator==(const TraceRecord&) const = default;
};

struct RunTrace {
  std::int64_t stride = 1;
  std::vector<TraceRecord> records;

  bool operator==(const RunTrace&) const = default;

  void write_csv(std::ostream& out) const {
    out << "r,lagrangian,f_y,residual,inner_iters\n";
    out << std::setprecision(17);
    for (const auto& rec : records) {
      out << rec.r << ',' << rec.lagrangian << ',' << rec.f_y << ',' << rec.residual << ',' << rec.inner_iters
          << '\n';
    }
  }
};

/// f(x) + <lambda, x - y> + rho/2 |x - y|^2 (the indicator term is zero for y in A).
template <SmoothObjective F>
double augmented_lagrangian(const F& f, const Vector& x, const Vector& y, const Vector& lambda, double rho) {
  detail::require_dim(x, f.dim(), "augmented_lagrangian");
  detail::require_dim(y, f.dim(), "augmented_lagrangian");
  detail::require_dim(lambda, f.dim(), "augmented_lagrangian");
  const Vector diff = x - y;
  return f.value(x) + lambda.dot(diff) + 0.5 * rho * diff.squaredNorm();
}

/// Lagrangian of the soft-indicator splitting: adds beta * dist(y, A).
template <SmoothObjective F>
double soft_augmented_lagrangian(const F& f, const DiscreteProductSet& set, const Vector& x, const Vector& y,
                                 const Vector& lambda, double rho, double beta) {
  return augmented_lagrangian(f, x, y, lambda, rho) + beta * soft_indicator(set, y);
}

/// Minimizes L(., y, lambda) = f + <lambda, . - y> + rho/2 |. - y|^2.
///
/// For quadratics in closed-form mode (Q + rho I) is factored once; otherwise
/// gradient descent with the fixed step 2 / (sigma + rho + L_f).
template <SmoothObjective F>
class XMinimizer {
 public:
  XMinimizer(const F& f, double rho, InnerSolverConfig cfg) : f_(&f), rho_(rho), cfg_(cfg) {
    if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");
    sigma_ = rho - f.weak_convexity();
    if (cfg_.mode == InnerMode::ClosedForm) {
      if constexpr (is_quadratic<F>::value) {
        const auto d = static_cast<Eigen::Index>(f.dim());
        llt_.compute(f.Q() + rho * Matrix::Identity(d, d));
        if (llt_.info() != Eigen::Success) {
          throw LinearSolveError("Q + rho*I is not positive definite (rho <= mu)");
        }
      } else {
        throw std::invalid_argument("closed-form x-update requires a quadratic objective");
      }
    } else {
      if (!(sigma_ > 0.0)) throw LinearSolveError("x-subproblem not strongly convex: rho <= mu");
      step_ = cfg_.step_size.value_or(2.0 / (sigma_ + rho + f.lipschitz()));
    }
  }

  double rho() const { return rho_; }
  double sigma() const { return sigma_; }
  double step() const { return step_; }
  const InnerSolverConfig& config() const { return cfg_; }

  Vector lagrangian_gradient(const Vector& x, const Vector& y, const Vector& lambda) const {
    return f_->gradient(x) + lambda + rho_ * (x - y);
  }

  /// Exact minimizer (closed form, or GD driven to abs_grad_tol).
  Vector exact(const Vector& y, const Vector& lambda, const Vector& warm, StepInfo* info = nullptr) const {
    if constexpr (is_quadratic<F>::value) {
      if (cfg_.mode == InnerMode::ClosedForm) {
        Vector x = llt_.solve(rho_ * y - lambda - f_->b());
        if (info) {
          info->inner_iters = 0;
          info->grad_norm = lagrangian_gradient(x, y, lambda).norm();
        }
        return x;
      }
    }
    return descend(y, lambda, warm, 0.0, info);
  }

  /// GD from x_prev until |grad L| <= sigma * gamma * min(|x - y|, |x - x_prev|)
  /// or |grad L| <= abs_grad_tol. Strong convexity then gives
  /// |x - x_star| <= gamma * min(|x - y|, |x - x_prev|).
  Vector inexact(const Vector& y, const Vector& lambda, const Vector& x_prev, double gamma,
                 StepInfo* info = nullptr) const {
    if (cfg_.mode != InnerMode::GradientDescent) {
      throw std::invalid_argument("inexact x-update requires the gradient-descent inner solver");
    }
    return descend(y, lambda, x_prev, gamma, info);
  }

 private:
  Vector descend(const Vector& y, const Vector& lambda, const Vector& x_prev, double gamma, StepInfo* info) const {
    if (!(sigma_ > 0.0)) throw LinearSolveError("x-subproblem not strongly convex: rho <= mu");
    Vector x = x_prev;
    for (int k = 0; k <= cfg_.max_inner_iters; ++k) {
      const Vector g = lagrangian_gradient(x, y, lambda);
      const double gn = g.norm();
      if (!std::isfinite(gn)) break;
      const double rhs = sigma_ * gamma * std::min((x - y).norm(), (x - x_prev).norm());
      if (gn <= rhs || gn <= cfg_.abs_grad_tol) {
        if (info) {
          info->inner_iters = k;
          info->grad_norm = gn;
        }
        return x;
      }
      if (k == cfg_.max_inner_iters) break;
      x -= step_ * g;
    }
    throw InnerSolverError("inner gradient descent did not meet its acceptance test within " +
                           std::to_string(cfg_.max_inner_iters) + " iterations");
  }

  const F* f_;
  double rho_;
  InnerSolverConfig cfg_;
  double sigma_ = 0.0;
  double step_ = 0.0;
  Eigen::LLT<Matrix> llt_;
};

namespace detail {

inline void require_state(const IterateState& s, std::size_t dim) {
  require_dim(s.x, dim, "state.x");
  require_dim(s.y, dim, "state.y");
  require_dim(s.lambda, dim, "state.lambda");
}

inline IterateState finish_step(const IterateState& s, Vector y_next, Vector x_next, double rho) {
  IterateState out;
  out.lambda = s.lambda + rho * (x_next - y_next);
  out.x = std::move(x_next);
  out.y = std::move(y_next);
  out.r = s.r + 1;
  return out;
}

}  // namespace detail

/// y' = P_A(x + lambda/rho); x' = argmin L(., y', lambda); lambda' = lambda + rho (x' - y').
template <SmoothObjective F>
IterateState admm_q_step(const F& f, const DiscreteProductSet& set, const IterateState& s,
                         const XMinimizer<F>& xmin, StepInfo* info = nullptr) {
  detail::require_state(s, f.dim());
  const double rho = xmin.rho();
  Vector y_next = project(set, s.x + s.lambda / rho);
  Vector x_next = xmin.exact(y_next, s.lambda, s.x, info);
  return detail::finish_step(s, std::move(y_next), std::move(x_next), rho);
}

template <SmoothObjective F>
IterateState admm_q_step(const F& f, const DiscreteProductSet& set, const IterateState& s, double rho,
                         const InnerSolverConfig& inner) {
  return admm_q_step(f, set, s, XMinimizer<F>(f, rho, inner));
}

/// ADMM-Q with the x-update replaced by a certified gamma-approximate minimizer.
template <SmoothObjective F>
IterateState iadmm_q_step(const F& f, const DiscreteProductSet& set, const IterateState& s, double gamma,
                          const XMinimizer<F>& xmin, StepInfo* info = nullptr) {
  detail::require_state(s, f.dim());
  if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be non-negative");
  const double rho = xmin.rho();
  Vector y_next = project(set, s.x + s.lambda / rho);
  Vector x_next = xmin.inexact(y_next, s.lambda, s.x, gamma, info);
  return detail::finish_step(s, std::move(y_next), std::move(x_next), rho);
}

template <SmoothObjective F>
IterateState iadmm_q_step(const F& f, const DiscreteProductSet& set, const IterateState& s, double rho, double gamma,
                          const InnerSolverConfig& inner) {
  return iadmm_q_step(f, set, s, gamma, XMinimizer<F>(f, rho, inner));
}

/// Randomized y-update: coordinate i takes the projected value only when its
/// Bernoulli(mask_prob) coin comes up 1. Coins are drawn in coordinate order.
template <SmoothObjective F>
IterateState admm_r_step(const F& f, const DiscreteProductSet& set, const IterateState& s, double mask_prob,
                         CounterRng& rng, const XMinimizer<F>& xmin, StepInfo* info = nullptr) {
  detail::require_state(s, f.dim());
  if (!(mask_prob > 0.0 && mask_prob <= 1.0)) throw std::invalid_argument("mask probability must be in (0, 1]");
  const double rho = xmin.rho();
  const Vector y_hat = project(set, s.x + s.lambda / rho);
  Vector y_next = s.y;
  for (Eigen::Index i = 0; i < y_next.size(); ++i) {
    if (rng.bernoulli(mask_prob)) y_next[i] = y_hat[i];
  }
  Vector x_next = xmin.exact(y_next, s.lambda, s.x, info);
  return detail::finish_step(s, std::move(y_next), std::move(x_next), rho);
}

/// Same as admm_r_step with an explicit 0/1 mask.
template <SmoothObjective F>
IterateState admm_r_step_masked(const F& f, const DiscreteProductSet& set, const IterateState& s,
                                const std::vector<bool>& mask, const XMinimizer<F>& xmin, StepInfo* info = nullptr) {
  detail::require_state(s, f.dim());
  if (mask.size() != f.dim()) throw std::invalid_argument("mask: dimension mismatch");
  const double rho = xmin.rho();
  const Vector y_hat = project(set, s.x + s.lambda / rho);
  Vector y_next = s.y;
  for (Eigen::Index i = 0; i < y_next.size(); ++i) {
    if (mask[static_cast<std::size_t>(i)]) y_next[i] = y_hat[i];
  }
  Vector x_next = xmin.exact(y_next, s.lambda, s.x, info);
  return detail::finish_step(s, std::move(y_next), std::move(x_next), rho);
}

/// Soft-projection y-update: the minimizer of 1/2 |y - z|^2 + (beta/rho) dist(y, A)
/// with z = x + lambda/rho.
inline Vector soft_projection(const DiscreteProductSet& set, const Vector& z, double rho, double beta) {
  const Vector z_proj = project(set, z);
  const Vector z_d = z_proj - z;
  const double gap = z_d.norm();
  const double radius = beta / rho;
  if (gap == 0.0 || radius > gap) return z_proj;
  return z + (radius / gap) * z_d;
}

template <SmoothObjective F>
IterateState admm_s_step(const F& f, const DiscreteProductSet& set, const IterateState& s, double beta,
                         const XMinimizer<F>& xmin, StepInfo* info = nullptr) {
  detail::require_state(s, f.dim());
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  const double rho = xmin.rho();
  Vector y_next = soft_projection(set, s.x + s.lambda / rho, rho, beta);
  Vector x_next = xmin.exact(y_next, s.lambda, s.x, info);
  return detail::finish_step(s, std::move(y_next), std::move(x_next), rho);
}

template <SmoothObjective F>
IterateState admm_s_step(const F& f, const DiscreteProductSet& set, const IterateState& s, double rho, double beta,
                         const InnerSolverConfig& inner) {
  return admm_s_step(f, set, s, beta, XMinimizer<F>(f, rho, inner));
}

/// x' = P_A(x - grad f(x) / rho).
template <SmoothObjective F>
Vector pgd_step(const F& f, const DiscreteProductSet& set, const Vector& x, double rho) {
  detail::require_dim(x, f.dim(), "pgd_step");
  if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");
  return project(set, x - f.gradient(x) / rho);
}

struct GdProjResult {
  Vector unconstrained;
  Vector x;
  std::int64_t iterations = 0;
  bool converged = true;  // false: iteration cap hit before the gradient tolerance
};

/// Minimize f without constraints, then project once. Nonsingular quadratics are
/// solved directly; anything else runs gradient descent with step 1/L_f.
template <SmoothObjective F>
GdProjResult gd_then_project(const F& f, const DiscreteProductSet& set, const Vector& x0, double tol,
                             std::int64_t max_iters) {
  detail::require_dim(x0, f.dim(), "gd_then_project");
  GdProjResult out;
  if constexpr (is_quadratic<F>::value) {
    const double scale = std::max(1.0, f.lipschitz());
    if (std::min(std::abs(f.lambda_min()), std::abs(f.lambda_max())) > 1e-12 * scale &&
        f.lambda_min() * f.lambda_max() > 0.0) {
      Eigen::LDLT<Matrix> ldlt(f.Q());
      out.unconstrained = ldlt.solve(-f.b());
      if (out.unconstrained.allFinite()) {
        out.x = project(set, out.unconstrained);
        return out;
      }
    }
  }
  Vector x = x0;
  const double step = f.lipschitz() > 0.0 ? 1.0 / f.lipschitz() : 1.0;
  out.converged = false;
  for (std::int64_t k = 0; k < max_iters; ++k) {
    const Vector g = f.gradient(x);
    if (!g.allFinite() || !x.allFinite()) break;
    if (g.norm() <= tol) {
      out.converged = true;
      out.iterations = k;
      break;
    }
    x -= step * g;
    out.iterations = k + 1;
  }
  if (!out.converged && f.gradient(x).allFinite() && f.gradient(x).norm() <= tol) out.converged = true;
  out.unconstrained = x;
  if (!x.allFinite()) {
    out.x = x;
    return out;
  }
  out.x = project(set, x);
  return out;
}

/// Random feasible start: z_i ~ N(0, s_i^2), x0 = P_A(z), with s_i the lattice
/// spacing (1 for other coordinate kinds) unless `scale` > 0 overrides it.
inline Vector initial_point(const DiscreteProductSet& set, std::uint64_t seed, double scale = 0.0) {
  CounterRng rng(CounterRng::derive(seed, 0x1417));
  Vector z(static_cast<Eigen::Index>(set.dim()));
  for (std::size_t i = 0; i < set.dim(); ++i) {
    double s = scale;
    if (!(s > 0.0)) {
      s = 1.0;
      if (const auto* l = std::get_if<ScaledLattice>(&set.coord(i).kind())) s = l->spacing;
    }
    z[static_cast<Eigen::Index>(i)] = rng.normal(0.0, s);
  }
  return project(set, z);
}

struct RunResult {
  RunTrace trace;
  IterateState final_state;
  double best_window_objective = 0.0;
  double final_objective = 0.0;   // feasible objective at the last iterate
  double last_x_change = 0.0;     // |x^T - x^{T-1}|
  std::int64_t y_stable_iters = 0;  // trailing iterations with y unchanged
  std::int64_t total_inner_iters = 0;
  bool gd_converged = true;       // GD+Proj only

  /// x has stopped moving and y has been constant long enough to treat the
  /// final iterate as a limit point.
  bool converged(double x_tol = 1e-10, std::int64_t min_stable = 50) const {
    return last_x_change <= x_tol && y_stable_iters >= min_stable;
  }
};

/// Called with every iterate, including the initial state (r = 0).
using IterateObserver = std::function<void(const IterateState&, const StepInfo&)>;

/// Drive `method` for config.max_iters steps from x0 = y0 = x0_feasible.
template <SmoothObjective F>
RunResult run_from(Method method, const F& f, const DiscreteProductSet& set, const SolverConfig& config,
              const Vector& x0_feasible, const IterateObserver& observer = {}) {
  config.validate();
  if (set.dim() != f.dim()) throw std::invalid_argument("run: objective and set dimensions differ");
  detail::require_dim(x0_feasible, f.dim(), "run: x0");
  if (!contains(set, x0_feasible, 1e-12)) throw std::invalid_argument("run: x0 must be a member of the set");

  const double rho = config.rho;
  RunResult result;
  result.trace.stride = config.trace_stride;

  IterateState state;
  state.x = x0_feasible;
  state.y = x0_feasible;
  state.lambda = (config.dual_init == DualInit::NegativeGradient && method != Method::Pgd &&
                  method != Method::GdProj)
                     ? Vector(-f.gradient(x0_feasible))
                     : Vector(Vector::Zero(x0_feasible.size()));
  state.r = 0;

  const auto lagrangian_of = [&](const IterateState& s) {
    switch (method) {
      case Method::Pgd:
      case Method::GdProj: return f.value(s.x);
      case Method::AdmmS: return soft_augmented_lagrangian(f, set, s.x, s.y, s.lambda, rho, config.beta);
      default: return augmented_lagrangian(f, s.x, s.y, s.lambda, rho);
    }
  };
  // Objective used for the best-window statistic; always evaluated on a member of A.
  const auto feasible_objective = [&](const IterateState& s) {
    if (method == Method::AdmmS) return f.value(project(set, s.y));
    return f.value(s.y);
  };

  std::deque<double> window;
  const auto push_window = [&](double v) {
    window.push_back(v);
    if (static_cast<std::int64_t>(window.size()) > config.window) window.pop_front();
  };
  const auto record = [&](const IterateState& s, double residual, int inner) {
    result.trace.records.push_back({s.r, lagrangian_of(s), f.value(s.y), residual, inner});
  };
  const auto check_finite = [&](const IterateState& s) {
    const double bound = config.divergence_bound;
    const auto ok = [bound](const Vector& v) { return v.allFinite() && v.lpNorm<Eigen::Infinity>() <= bound; };
    if (!ok(s.x) || !ok(s.y) || !ok(s.lambda)) throw DivergenceError(s.r, "iterate is non-finite or unbounded");
    const double fy = f.value(s.y);
    if (!std::isfinite(fy)) throw DivergenceError(s.r, "objective is non-finite");
  };

  push_window(feasible_objective(state));
  record(state, 0.0, 0);
  if (observer) observer(state, StepInfo{});

  if (method == Method::GdProj) {
    GdProjResult gp = gd_then_project(f, set, x0_feasible, config.gd_tol, std::max<std::int64_t>(config.max_iters, 1));
    result.gd_converged = gp.converged;
    if (!gp.x.allFinite()) throw DivergenceError(gp.iterations, "gradient descent diverged");
    IterateState s{gp.x, gp.x, Vector::Zero(gp.x.size()), 1};
    result.last_x_change = (gp.x - state.x).norm();
    state = std::move(s);
    check_finite(state);
    window.clear();
    push_window(feasible_objective(state));
    record(state, 0.0, 0);
    if (observer) observer(state, StepInfo{});
    result.final_state = state;
    result.best_window_objective = window.back();
    result.final_objective = window.back();
    return result;
  }

  std::optional<XMinimizer<F>> xmin;
  if (method != Method::Pgd) {
    InnerSolverConfig inner = config.inner;
    if (method == Method::IAdmmQ) inner.mode = InnerMode::GradientDescent;
    xmin.emplace(f, rho, inner);
  }
  CounterRng mask_rng(CounterRng::derive(config.seed, 0x3A5C));

  for (std::int64_t r = 0; r < config.max_iters; ++r) {
    StepInfo info;
    IterateState next;
    switch (method) {
      case Method::AdmmQ: next = admm_q_step(f, set, state, *xmin, &info); break;
      case Method::IAdmmQ: next = iadmm_q_step(f, set, state, config.gamma, *xmin, &info); break;
      case Method::AdmmR: next = admm_r_step(f, set, state, config.mask_prob, mask_rng, *xmin, &info); break;
      case Method::AdmmS: next = admm_s_step(f, set, state, config.beta, *xmin, &info); break;
      case Method::Pgd: {
        Vector x = pgd_step(f, set, state.x, rho);
        next.y = x;
        next.x = std::move(x);
        next.lambda = state.lambda;
        next.r = state.r + 1;
        break;
      }
      case Method::GdProj: break;
    }
    check_finite(next);
    result.total_inner_iters += info.inner_iters;
    result.last_x_change = (next.x - state.x).norm();
    result.y_stable_iters = (next.y == state.y) ? result.y_stable_iters + 1 : 0;
    const double residual = method == Method::Pgd ? result.last_x_change : (next.x - next.y).norm();
    state = std::move(next);
    push_window(feasible_objective(state));
    if (state.r % config.trace_stride == 0 || r + 1 == config.max_iters) record(state, residual, info.inner_iters);
    if (observer) observer(state, info);
  }

  result.final_state = state;
  result.final_objective = window.back();
  double best = std::numeric_limits<double>::infinity();
  for (double v : window) best = std::min(best, v);
  result.best_window_objective = best;
  return result;
}

/// Same as above with the initial point drawn from config.seed.
template <SmoothObjective F>
RunResult run(Method method, const F& f, const DiscreteProductSet& set, const SolverConfig& config,
              const IterateObserver& observer = {}) {
  return run_from(method, f, set, config, initial_point(set, config.seed, config.init_scale), observer);
}

inline nlohmann::json to_json(const IterateState& s) {
  const auto vec = [](const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  return {{"r", s.r}, {"x", vec(s.x)}, {"y", vec(s.y)}, {"lambda", vec(s.lambda)}};
}

}  // namespace admmq
