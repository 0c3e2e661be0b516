#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

#include "admmq/discrete_sets.hpp"
#include "admmq/objectives.hpp"

namespace admmq {

inline constexpr std::uint64_t kDefaultEnumerationLimit = 10'000'000;

struct StationarityReport {
  bool is_stationary = false;
  Vector candidate;  // P_A(x - grad f(x) / rho)
  double slack = 0.0;  // max_i (|x_i - t_i| - dist(t_i, A_i)); <= tol iff stationary
  double tolerance = 0.0;
};

/// x is rho-stationary when it belongs to argmin_{a in A} |a - (x - grad f(x)/rho)|.
/// For product sets the argmin is the product of per-coordinate argmins, so the
/// test is: each |x_i - t_i| is within tol of the nearest-member distance of t_i.
template <SmoothObjective F>
StationarityReport is_rho_stationary(const F& f, const DiscreteProductSet& set, const Vector& x, double rho,
                                     double tol = 1e-9) {
  detail::require_dim(x, set.dim(), "is_rho_stationary");
  if (!(rho > 0.0)) throw std::invalid_argument("is_rho_stationary: rho must be positive");
  if (!contains(set, x, 1e-12)) throw std::invalid_argument("is_rho_stationary: point is not a member of the set");
  const Vector target = x - f.gradient(x) / rho;
  StationarityReport rep;
  rep.tolerance = tol;
  rep.candidate = project(set, target);
  rep.slack = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < set.dim(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    const double gap = std::abs(x[k] - target[k]) - std::abs(rep.candidate[k] - target[k]);
    rep.slack = std::max(rep.slack, gap);
  }
  rep.is_stationary = rep.slack <= tol;
  return rep;
}

struct BruteForceResult {
  Vector argmin;
  double value = std::numeric_limits<double>::infinity();
  std::uint64_t evaluated = 0;
};

/// Exhaustive minimum over a finite set; ties keep the lexicographically smallest point.
template <SmoothObjective F>
BruteForceResult brute_force_minimize(const F& f, const DiscreteProductSet& set,
                                      std::uint64_t limit = kDefaultEnumerationLimit) {
  if (set.dim() != f.dim()) throw std::invalid_argument("brute_force_minimize: dimension mismatch");
  BruteForceResult out;
  for_each_member(set, limit, [&](const Vector& a) {
    const double v = f.value(a);
    ++out.evaluated;
    if (v < out.value) {
      out.value = v;
      out.argmin = a;
    }
  });
  return out;
}

/// All rho-stationary members of a finite set, in lexicographic order.
template <SmoothObjective F>
std::vector<Vector> enumerate_stationary_points(const F& f, const DiscreteProductSet& set, double rho,
                                                double tol = 1e-9, std::uint64_t limit = kDefaultEnumerationLimit) {
  if (set.dim() != f.dim()) throw std::invalid_argument("enumerate_stationary_points: dimension mismatch");
  std::vector<Vector> out;
  for_each_member(set, limit, [&](const Vector& a) {
    if (is_rho_stationary(f, set, a, rho, tol).is_stationary) out.push_back(a);
  });
  return out;
}

/// rho^-1 L_f^2 - sigma(rho)/2 with sigma(rho) = rho - mu; negative means the
/// augmented Lagrangian decreases every ADMM-Q iteration.
inline double decrease_condition_value(double lipschitz, double mu, double rho) {
  return lipschitz * lipschitz / rho - 0.5 * (rho - mu);
}

inline bool check_decrease_condition(double lipschitz, double mu, double rho) {
  return decrease_condition_value(lipschitz, mu, rho) < 0.0;
}

/// (2 L^2 + 8 (rho + L)^2 gamma^2) / rho + (gamma^2 (rho + L) - (1 - gamma)^2 sigma(rho)) / 2,
/// the parameter expression of the inexact-ADMM convergence result.
inline double iadmm_condition_value(double lipschitz, double mu, double rho, double gamma) {
  const double sigma = rho - mu;
  const double rl = rho + lipschitz;
  return (2.0 * lipschitz * lipschitz + 8.0 * rl * rl * gamma * gamma) / rho +
         0.5 * (gamma * gamma * rl - (1.0 - gamma) * (1.0 - gamma) * sigma);
}

inline bool check_iadmm_condition(double lipschitz, double mu, double rho, double gamma) {
  return iadmm_condition_value(lipschitz, mu, rho, gamma) < 0.0;
}

inline nlohmann::json to_json(const StationarityReport& rep) {
  return {{"is_stationary", rep.is_stationary},
          {"candidate", std::vector<double>(rep.candidate.data(), rep.candidate.data() + rep.candidate.size())},
          {"slack", rep.slack},
          {"tolerance", rep.tolerance}};
}

inline nlohmann::json to_json(const BruteForceResult& res) {
  return {{"argmin", std::vector<double>(res.argmin.data(), res.argmin.data() + res.argmin.size())},
          {"value", res.value},
          {"evaluated", res.evaluated}};
}

inline void write_points_csv(std::ostream& out, const std::vector<Vector>& points) {
  out.precision(17);
  for (const auto& p : points) {
    for (Eigen::Index i = 0; i < p.size(); ++i) out << (i ? "," : "") << p[i];
    out << '\n';
  }
}

}  // namespace admmq
