#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "admmq/admmq.hpp"

namespace admmq::fixtures {

inline Matrix random_matrix(CounterRng& rng, Eigen::Index rows, Eigen::Index cols) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

inline Vector random_vector(CounterRng& rng, Eigen::Index n, double sd = 1.0) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.normal(0.0, sd);
  return v;
}

/// PSD quadratic G^T G / d + shift*I with a random linear term.
inline QuadraticObjective random_psd_quadratic(CounterRng& rng, Eigen::Index d, double b_sd = 1.0, double shift = 0.0) {
  const Matrix g = random_matrix(rng, d, d);
  Matrix q = g.transpose() * g / static_cast<double>(d);
  q += shift * Matrix::Identity(d, d);
  return QuadraticObjective(q, random_vector(rng, d, b_sd));
}

/// Symmetric, possibly indefinite quadratic.
inline QuadraticObjective random_symmetric_quadratic(CounterRng& rng, Eigen::Index d, double b_sd = 1.0) {
  const Matrix g = random_matrix(rng, d, d);
  return QuadraticObjective(0.5 * (g + g.transpose()), random_vector(rng, d, b_sd));
}

/// One random finite coordinate set: binary, bounded lattice or explicit grid.
inline CoordinateSet random_finite_coordinate(CounterRng& rng, int max_members = 9) {
  const auto pick = static_cast<int>(rng.next_u64() % 3);
  if (pick == 0) return CoordinateSet::binary();
  if (pick == 1) {
    const double v = 0.25 * static_cast<double>(1 + rng.next_u64() % 8);
    const auto lo = -static_cast<double>(rng.next_u64() % 4);
    const auto span = static_cast<double>(rng.next_u64() % static_cast<std::uint64_t>(max_members));
    return CoordinateSet::lattice(v, v * lo, v * (lo + span));
  }
  const auto m = 1 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(max_members));
  std::vector<double> vals;
  double x = rng.normal(0.0, 2.0);
  for (int k = 0; k < m; ++k) {
    vals.push_back(x);
    // Quarter-integer gaps make exact midpoints reachable from random probes.
    x += 0.25 * static_cast<double>(1 + rng.next_u64() % 8);
  }
  return CoordinateSet::grid(vals);
}

inline DiscreteProductSet random_finite_set(CounterRng& rng, std::size_t dim, int max_members = 9) {
  std::vector<CoordinateSet> coords;
  for (std::size_t i = 0; i < dim; ++i) coords.push_back(random_finite_coordinate(rng, max_members));
  return DiscreteProductSet(std::move(coords));
}

inline Vector central_difference(const auto& f, const Vector& x, double h = 1e-6) {
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vector xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (f.value(xp) - f.value(xm)) / (2.0 * h);
  }
  return g;
}

inline Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

}  // namespace admmq::fixtures
