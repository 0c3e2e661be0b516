#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace admmq {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Thrown when a finite enumeration is requested on an unbounded set or the
/// product cardinality exceeds the caller's limit.
class EnumerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require_dim(const Vector& x, std::size_t dim, const char* what) {
  if (static_cast<std::size_t>(x.size()) != dim) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (expected " +
                                std::to_string(dim) + ", got " + std::to_string(x.size()) + ")");
  }
}

inline void require_finite(const Vector& x, const char* what) {
  if (!x.allFinite()) throw std::invalid_argument(std::string(what) + ": non-finite input");
}

}  // namespace detail

/// {-1, +1}. A coordinate at exactly 0 projects to +1 (sign convention).
struct BinarySet {};

/// {v*k : k integer, lower <= v*k <= upper}; bounds may be infinite.
struct ScaledLattice {
  double spacing = 1.0;
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();

  double k_min() const { return std::ceil(lower / spacing); }
  double k_max() const { return std::floor(upper / spacing); }
  bool bounded() const { return std::isfinite(lower) && std::isfinite(upper); }
};

/// Sorted, strictly increasing finite list of reals.
struct ExplicitGrid {
  std::vector<double> values;
};

/// One factor of a Cartesian-product discrete set.
class CoordinateSet {
 public:
  using Kind = std::variant<BinarySet, ScaledLattice, ExplicitGrid>;

  static CoordinateSet binary() { return CoordinateSet(BinarySet{}); }

  static CoordinateSet lattice(double spacing,
                               double lower = -std::numeric_limits<double>::infinity(),
                               double upper = std::numeric_limits<double>::infinity()) {
    if (!(spacing > 0.0) || !std::isfinite(spacing)) {
      throw std::invalid_argument("lattice spacing must be positive and finite");
    }
    if (std::isnan(lower) || std::isnan(upper) || lower == std::numeric_limits<double>::infinity() ||
        upper == -std::numeric_limits<double>::infinity()) {
      throw std::invalid_argument("lattice bounds must be reals or open-ended");
    }
    ScaledLattice l{spacing, lower, upper};
    if (l.k_min() > l.k_max()) throw std::invalid_argument("lattice has no members within bounds");
    return CoordinateSet(l);
  }

  static CoordinateSet grid(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("grid must have at least one value");
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!std::isfinite(values[i])) throw std::invalid_argument("grid values must be finite");
      if (i > 0 && !(values[i - 1] < values[i])) {
        throw std::invalid_argument("grid values must be strictly increasing");
      }
    }
    return CoordinateSet(ExplicitGrid{std::move(values)});
  }

  const Kind& kind() const { return kind_; }

  bool finite() const {
    if (const auto* l = std::get_if<ScaledLattice>(&kind_)) return l->bounded();
    return true;
  }

  /// Nearest member; ties go to the smaller member, except Binary where 0 maps to +1.
  double project(double x) const {
    return std::visit(
        [x](const auto& s) -> double {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, BinarySet>) {
            return x >= 0.0 ? 1.0 : -1.0;
          } else if constexpr (std::is_same_v<T, ScaledLattice>) {
            // ceil(t - 1/2) is round-half-down.
            double k = std::ceil(x / s.spacing - 0.5);
            k = std::clamp(k, s.k_min(), s.k_max());
            return s.spacing * k + 0.0;  // +0.0 folds -0 into 0
          } else {
            const auto& v = s.values;
            auto it = std::lower_bound(v.begin(), v.end(), x);
            if (it == v.begin()) return v.front();
            if (it == v.end()) return v.back();
            const double hi = *it;
            const double lo = *(it - 1);
            return (hi - x) < (x - lo) ? hi : lo;
          }
        },
        kind_);
  }

  /// Distance from x to the nearest member.
  double distance(double x) const { return std::abs(x - project(x)); }

  /// Largest distance any real can have to the set (half the widest gap);
  /// infinite when the set is bounded.
  double covering_radius() const {
    return std::visit(
        [](const auto& s) -> double {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, ScaledLattice>) {
            if (std::isfinite(s.lower) || std::isfinite(s.upper)) {
              return std::numeric_limits<double>::infinity();
            }
            return 0.5 * s.spacing;
          } else {
            return std::numeric_limits<double>::infinity();
          }
        },
        kind_);
  }

  /// Number of members; infinite for an unbounded lattice.
  double count() const {
    return std::visit(
        [](const auto& s) -> double {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, BinarySet>) {
            return 2.0;
          } else if constexpr (std::is_same_v<T, ScaledLattice>) {
            if (!s.bounded()) return std::numeric_limits<double>::infinity();
            return s.k_max() - s.k_min() + 1.0;
          } else {
            return static_cast<double>(s.values.size());
          }
        },
        kind_);
  }

  /// Members in increasing order; requires a finite set.
  std::vector<double> members(std::uint64_t limit = std::numeric_limits<std::uint64_t>::max()) const {
    return std::visit(
        [limit](const auto& s) -> std::vector<double> {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, BinarySet>) {
            return {-1.0, 1.0};
          } else if constexpr (std::is_same_v<T, ScaledLattice>) {
            if (!s.bounded()) throw EnumerationError("cannot enumerate an unbounded lattice");
            const double count = s.k_max() - s.k_min() + 1.0;
            if (count > static_cast<double>(limit)) throw EnumerationError("coordinate set exceeds limit");
            std::vector<double> out;
            out.reserve(static_cast<std::size_t>(count));
            for (double k = s.k_min(); k <= s.k_max(); k += 1.0) out.push_back(s.spacing * k + 0.0);
            return out;
          } else {
            return s.values;
          }
        },
        kind_);
  }

  /// Exact membership up to a relative tolerance on the lattice multiple.
  bool contains(double x, double tol = 0.0) const {
    if (!std::isfinite(x)) return false;
    return std::abs(project(x) - x) <= tol * (1.0 + std::abs(x));
  }

 private:
  explicit CoordinateSet(Kind k) : kind_(std::move(k)) {}
  Kind kind_;
};

/// Cartesian product of per-coordinate finite scalar sets.
class DiscreteProductSet {
 public:
  explicit DiscreteProductSet(std::vector<CoordinateSet> coords) : coords_(std::move(coords)) {
    if (coords_.empty()) throw std::invalid_argument("discrete set needs at least one coordinate");
  }

  static DiscreteProductSet uniform(std::size_t dim, const CoordinateSet& c) {
    if (dim == 0) throw std::invalid_argument("discrete set needs at least one coordinate");
    return DiscreteProductSet(std::vector<CoordinateSet>(dim, c));
  }

  std::size_t dim() const { return coords_.size(); }
  const CoordinateSet& coord(std::size_t i) const { return coords_[i]; }
  std::span<const CoordinateSet> coords() const { return coords_; }

  bool finite() const {
    return std::all_of(coords_.begin(), coords_.end(), [](const auto& c) { return c.finite(); });
  }

  /// Product cardinality, saturating at `cap + 1` so callers can test against a limit.
  std::uint64_t cardinality(std::uint64_t cap = std::numeric_limits<std::uint64_t>::max() - 1) const {
    if (!finite()) throw EnumerationError("set has an unbounded coordinate");
    double total = 1.0;
    for (const auto& c : coords_) {
      total *= c.count();
      if (total > static_cast<double>(cap)) return cap + 1;
    }
    return static_cast<std::uint64_t>(total);
  }

  double covering_radius() const {
    double sq = 0.0;
    for (const auto& c : coords_) {
      const double r = c.covering_radius();
      if (!std::isfinite(r)) return r;
      sq += r * r;
    }
    return std::sqrt(sq);
  }

 private:
  std::vector<CoordinateSet> coords_;
};

/// Coordinate-wise nearest member of the set.
inline Vector project(const DiscreteProductSet& set, const Vector& x) {
  detail::require_dim(x, set.dim(), "project");
  detail::require_finite(x, "project");
  Vector out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = set.coord(static_cast<std::size_t>(i)).project(x[i]);
  return out;
}

/// Euclidean distance to the set.
inline double soft_indicator(const DiscreteProductSet& set, const Vector& x) {
  return (x - project(set, x)).norm();
}

inline bool contains(const DiscreteProductSet& set, const Vector& x, double tol = 0.0) {
  if (static_cast<std::size_t>(x.size()) != set.dim()) return false;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!set.coord(static_cast<std::size_t>(i)).contains(x[i], tol)) return false;
  }
  return true;
}

/// Visit every member of a finite set in lexicographic order (first coordinate
/// most significant) without materializing the list. The visitor may return
/// false to stop early.
template <class Visitor>
void for_each_member(const DiscreteProductSet& set, std::uint64_t limit, Visitor&& visit) {
  if (!set.finite()) throw EnumerationError("cannot enumerate a set with an unbounded coordinate");
  if (set.cardinality(limit) > limit) {
    throw EnumerationError("set cardinality exceeds limit " + std::to_string(limit));
  }
  const std::size_t d = set.dim();
  std::vector<std::vector<double>> values(d);
  for (std::size_t i = 0; i < d; ++i) values[i] = set.coord(i).members();
  std::vector<std::size_t> idx(d, 0);
  Vector point(static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < d; ++i) point[static_cast<Eigen::Index>(i)] = values[i][0];
  while (true) {
    if constexpr (std::is_same_v<std::invoke_result_t<Visitor, const Vector&>, bool>) {
      if (!visit(static_cast<const Vector&>(point))) return;
    } else {
      visit(static_cast<const Vector&>(point));
    }
    std::size_t pos = d;
    while (pos > 0) {
      --pos;
      if (++idx[pos] < values[pos].size()) {
        point[static_cast<Eigen::Index>(pos)] = values[pos][idx[pos]];
        break;
      }
      idx[pos] = 0;
      point[static_cast<Eigen::Index>(pos)] = values[pos][0];
      if (pos == 0) return;
    }
  }
}

/// All members in lexicographic order.
inline std::vector<Vector> enumerate(const DiscreteProductSet& set, std::uint64_t limit) {
  if (limit == 0) throw std::invalid_argument("enumerate: limit must be positive");
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(set.cardinality(limit)));
  for_each_member(set, limit, [&](const Vector& p) { out.push_back(p); });
  return out;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const CoordinateSet& c) {
  return std::visit(
      [](const auto& s) -> nlohmann::json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, BinarySet>) {
          return {{"kind", "binary"}};
        } else if constexpr (std::is_same_v<T, ScaledLattice>) {
          nlohmann::json j{{"kind", "lattice"}, {"v", s.spacing}};
          j["a"] = std::isfinite(s.lower) ? nlohmann::json(s.lower) : nlohmann::json(nullptr);
          j["b"] = std::isfinite(s.upper) ? nlohmann::json(s.upper) : nlohmann::json(nullptr);
          return j;
        } else {
          return {{"kind", "grid"}, {"values", s.values}};
        }
      },
      c.kind());
}

inline nlohmann::json to_json(const DiscreteProductSet& set) {
  nlohmann::json coords = nlohmann::json::array();
  for (const auto& c : set.coords()) coords.push_back(to_json(c));
  return {{"coords", coords}};
}

inline CoordinateSet coordinate_set_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "binary") return CoordinateSet::binary();
  if (kind == "lattice") {
    constexpr double inf = std::numeric_limits<double>::infinity();
    const double a = (j.contains("a") && !j["a"].is_null()) ? j["a"].get<double>() : -inf;
    const double b = (j.contains("b") && !j["b"].is_null()) ? j["b"].get<double>() : inf;
    return CoordinateSet::lattice(j.at("v").get<double>(), a, b);
  }
  if (kind == "grid") return CoordinateSet::grid(j.at("values").get<std::vector<double>>());
  throw std::invalid_argument("unknown coordinate set kind '" + kind + "'");
}

inline DiscreteProductSet discrete_set_from_json(const nlohmann::json& j) {
  std::vector<CoordinateSet> coords;
  for (const auto& c : j.at("coords")) coords.push_back(coordinate_set_from_json(c));
  return DiscreteProductSet(std::move(coords));
}

}  // namespace admmq
