#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <concepts>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "admmq/discrete_sets.hpp"
#include "admmq/rng.hpp"

namespace admmq {

/// Smoothness constants of an objective: gradient Lipschitz constant L_f and
/// weak-convexity modulus mu (f + mu/2 |x|^2 convex).
struct ObjectiveConstants {
  double lipschitz = 0.0;
  double weak_convexity = 0.0;
};

template <class F>
concept SmoothObjective = requires(const F& f, const Vector& x) {
  { f.value(x) } -> std::convertible_to<double>;
  { f.gradient(x) } -> std::convertible_to<Vector>;
  { f.lipschitz() } -> std::convertible_to<double>;
  { f.weak_convexity() } -> std::convertible_to<double>;
  { f.dim() } -> std::convertible_to<std::size_t>;
};

class EigenSolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// f(x) = 1/2 x'Qx + b'x + c with symmetric Q.
class QuadraticObjective {
 public:
  QuadraticObjective(Matrix q, Vector b, double c = 0.0) : q_(std::move(q)), b_(std::move(b)), c_(c) {
    if (q_.rows() != q_.cols() || q_.rows() != b_.size() || q_.rows() == 0) {
      throw std::invalid_argument("quadratic objective: Q must be square and match b");
    }
    if (!q_.allFinite() || !b_.allFinite() || !std::isfinite(c_)) {
      throw std::invalid_argument("quadratic objective: non-finite coefficients");
    }
    const double asym = (q_ - q_.transpose()).norm();
    if (asym > 1e-10 * (1.0 + q_.norm())) throw std::invalid_argument("quadratic objective: Q not symmetric");
    q_ = 0.5 * (q_ + q_.transpose()).eval();

    Eigen::SelfAdjointEigenSolver<Matrix> eig(q_, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success) throw EigenSolverError("quadratic objective: eigensolver did not converge");
    lambda_min_ = eig.eigenvalues().minCoeff();
    lambda_max_ = eig.eigenvalues().maxCoeff();
    constants_.lipschitz = std::max(std::abs(lambda_min_), std::abs(lambda_max_));
    constants_.weak_convexity = std::max(0.0, -lambda_min_);
  }

  std::size_t dim() const { return static_cast<std::size_t>(b_.size()); }

  double value(const Vector& x) const {
    detail::require_dim(x, dim(), "quadratic value");
    return 0.5 * x.dot(q_ * x) + b_.dot(x) + c_;
  }

  Vector gradient(const Vector& x) const {
    detail::require_dim(x, dim(), "quadratic gradient");
    return q_ * x + b_;
  }

  double lipschitz() const { return constants_.lipschitz; }
  double weak_convexity() const { return constants_.weak_convexity; }
  const ObjectiveConstants& constants() const { return constants_; }
  double lambda_min() const { return lambda_min_; }
  double lambda_max() const { return lambda_max_; }

  const Matrix& Q() const { return q_; }
  const Vector& b() const { return b_; }
  double c() const { return c_; }

 private:
  Matrix q_;
  Vector b_;
  double c_;
  double lambda_min_ = 0.0;
  double lambda_max_ = 0.0;
  ObjectiveConstants constants_;
};

/// Mean logistic loss (1/N) sum log(1 + exp(-y_i <w, x_i>)) of a linear model.
class LogisticObjective {
 public:
  LogisticObjective(Matrix features, Vector labels) : x_(std::move(features)), y_(std::move(labels)) {
    if (x_.rows() != y_.size() || x_.rows() == 0 || x_.cols() == 0) {
      throw std::invalid_argument("logistic objective: features and labels disagree in size");
    }
    for (Eigen::Index i = 0; i < y_.size(); ++i) {
      if (y_[i] != 1.0 && y_[i] != -1.0) throw std::invalid_argument("logistic objective: labels must be +1 or -1");
    }
    if (!x_.allFinite()) throw std::invalid_argument("logistic objective: non-finite features");
    const Matrix gram = x_.transpose() * x_;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success) throw EigenSolverError("logistic objective: eigensolver did not converge");
    constants_.lipschitz = eig.eigenvalues().maxCoeff() / (4.0 * static_cast<double>(x_.rows()));
    constants_.weak_convexity = 0.0;
  }

  std::size_t dim() const { return static_cast<std::size_t>(x_.cols()); }
  std::size_t samples() const { return static_cast<std::size_t>(x_.rows()); }

  /// log(1 + exp(-t)) without overflow.
  static double softplus_neg(double t) {
    return t >= 0.0 ? std::log1p(std::exp(-t)) : -t + std::log1p(std::exp(t));
  }

  /// 1 / (1 + exp(t)), i.e. sigma(-t).
  static double sigmoid_neg(double t) {
    if (t >= 0.0) {
      const double e = std::exp(-t);
      return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(t));
  }

  double value(const Vector& w) const {
    detail::require_dim(w, dim(), "logistic value");
    const Vector margins = y_.cwiseProduct(x_ * w);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < margins.size(); ++i) sum += softplus_neg(margins[i]);
    return sum / static_cast<double>(samples());
  }

  Vector gradient(const Vector& w) const {
    detail::require_dim(w, dim(), "logistic gradient");
    const Vector margins = y_.cwiseProduct(x_ * w);
    Vector coeff(margins.size());
    for (Eigen::Index i = 0; i < margins.size(); ++i) coeff[i] = -y_[i] * sigmoid_neg(margins[i]);
    return x_.transpose() * coeff / static_cast<double>(samples());
  }

  /// Fraction of samples with y_i <w, x_i> > 0.
  double accuracy(const Vector& w) const {
    const Vector margins = y_.cwiseProduct(x_ * w);
    return static_cast<double>((margins.array() > 0.0).count()) / static_cast<double>(samples());
  }

  double lipschitz() const { return constants_.lipschitz; }
  double weak_convexity() const { return 0.0; }
  const ObjectiveConstants& constants() const { return constants_; }
  const Matrix& features() const { return x_; }
  const Vector& labels() const { return y_; }

 private:
  Matrix x_;
  Vector y_;
  ObjectiveConstants constants_;
};

/// User-supplied objective; the caller declares L_f and mu.
class FunctionObjective {
 public:
  using ValueFn = std::function<double(const Vector&)>;
  using GradientFn = std::function<Vector(const Vector&)>;

  FunctionObjective(std::size_t dim, ValueFn value, GradientFn gradient, ObjectiveConstants constants)
      : dim_(dim), value_(std::move(value)), gradient_(std::move(gradient)), constants_(constants) {
    if (dim_ == 0) throw std::invalid_argument("function objective: dim must be positive");
    if (!(constants_.lipschitz >= 0.0) || !(constants_.weak_convexity >= 0.0)) {
      throw std::invalid_argument("function objective: constants must be non-negative");
    }
  }

  std::size_t dim() const { return dim_; }
  double value(const Vector& x) const {
    detail::require_dim(x, dim_, "function value");
    return value_(x);
  }
  Vector gradient(const Vector& x) const {
    detail::require_dim(x, dim_, "function gradient");
    return gradient_(x);
  }
  double lipschitz() const { return constants_.lipschitz; }
  double weak_convexity() const { return constants_.weak_convexity; }

 private:
  std::size_t dim_;
  ValueFn value_;
  GradientFn gradient_;
  ObjectiveConstants constants_;
};

inline ObjectiveConstants estimate_constants(const QuadraticObjective& f) { return f.constants(); }
inline ObjectiveConstants estimate_constants(const LogisticObjective& f) { return f.constants(); }

template <class F>
struct is_quadratic : std::false_type {};
template <>
struct is_quadratic<QuadraticObjective> : std::true_type {};

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const QuadraticObjective& f) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < f.Q().rows(); ++i) {
    std::vector<double> row(f.Q().cols());
    for (Eigen::Index j = 0; j < f.Q().cols(); ++j) row[j] = f.Q()(i, j);
    rows.push_back(row);
  }
  nlohmann::json j{{"Q", rows}, {"b", std::vector<double>(f.b().data(), f.b().data() + f.b().size())}};
  if (f.c() != 0.0) j["c"] = f.c();
  return j;
}

/// Accepts Q either as nested rows or as a flat row-major array.
inline QuadraticObjective quadratic_from_json(const nlohmann::json& j) {
  const auto b = j.at("b").get<std::vector<double>>();
  const auto d = static_cast<Eigen::Index>(b.size());
  Matrix q(d, d);
  const auto& jq = j.at("Q");
  if (jq.size() == static_cast<std::size_t>(d * d) && (d == 0 || !jq[0].is_array())) {
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index k = 0; k < d; ++k) q(i, k) = jq[static_cast<std::size_t>(i * d + k)].get<double>();
  } else {
    if (jq.size() != static_cast<std::size_t>(d)) throw std::invalid_argument("quadratic json: Q has wrong row count");
    for (Eigen::Index i = 0; i < d; ++i) {
      const auto row = jq[static_cast<std::size_t>(i)].get<std::vector<double>>();
      if (row.size() != b.size()) throw std::invalid_argument("quadratic json: Q row has wrong length");
      for (Eigen::Index k = 0; k < d; ++k) q(i, k) = row[static_cast<std::size_t>(k)];
    }
  }
  const double c = j.contains("c") ? j["c"].get<double>() : 0.0;
  return QuadraticObjective(std::move(q), Eigen::Map<const Vector>(b.data(), d), c);
}

/// CSV with the +-1 label in the first column and features after it. A
/// non-numeric first line is treated as a header.
inline LogisticObjective logistic_from_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (first) {
        first = false;
        continue;
      }
      throw std::invalid_argument("logistic csv: non-numeric cell in '" + line + "'");
    }
    first = false;
    if (!rows.empty() && row.size() != rows.front().size()) throw std::invalid_argument("logistic csv: ragged rows");
    rows.push_back(std::move(row));
  }
  if (rows.empty() || rows.front().size() < 2) throw std::invalid_argument("logistic csv: need a label and features");
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto d = static_cast<Eigen::Index>(rows.front().size() - 1);
  Matrix x(n, d);
  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    y[i] = rows[static_cast<std::size_t>(i)][0];
    for (Eigen::Index k = 0; k < d; ++k) x(i, k) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k + 1)];
  }
  return LogisticObjective(std::move(x), std::move(y));
}

inline void write_logistic_csv(std::ostream& out, const LogisticObjective& f) {
  out.precision(17);
  for (Eigen::Index i = 0; i < f.features().rows(); ++i) {
    out << f.labels()[i];
    for (Eigen::Index k = 0; k < f.features().cols(); ++k) out << ',' << f.features()(i, k);
    out << '\n';
  }
}

/// Two Gaussian classes with means +-mean_shift * u (u a random unit vector)
/// and identity covariance; labels balanced at random.
inline LogisticObjective synthetic_logistic(std::size_t samples, std::size_t dim, double mean_shift,
                                            std::uint64_t seed) {
  CounterRng rng(seed);
  Vector direction(static_cast<Eigen::Index>(dim));
  for (auto& v : direction) v = rng.normal();
  direction.normalize();
  Matrix x(static_cast<Eigen::Index>(samples), static_cast<Eigen::Index>(dim));
  Vector y(static_cast<Eigen::Index>(samples));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    y[i] = rng.bernoulli(0.5) ? 1.0 : -1.0;
    for (Eigen::Index k = 0; k < x.cols(); ++k) x(i, k) = y[i] * mean_shift * direction[k] + rng.normal();
  }
  return LogisticObjective(std::move(x), std::move(y));
}

}  // namespace admmq
