#pragma once

// Finite atomic measures on R^d and their box-count sequences.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "renyi/error.hpp"
#include "renyi/summation.hpp"

namespace renyi {

inline constexpr std::size_t kDefaultAtomCap = std::size_t{1} << 22;

/// A finite sum of weighted point masses. Immutable once built.
///
/// Coordinates are stored flat: atom i occupies coords()[i*dim, (i+1)*dim).
class DiscreteMeasure {
 public:
  DiscreteMeasure(int dim, std::vector<double> coords, std::vector<double> weights)
      : dim_(dim), coords_(std::move(coords)), weights_(std::move(weights)) {
    detail::require(dim_ >= 1, "measure dimension must be >= 1");
    detail::require(!weights_.empty(), "measure needs at least one atom");
    detail::require(coords_.size() == weights_.size() * static_cast<std::size_t>(dim_),
                    "coordinate count does not match dim * atoms");
    for (double w : weights_) {
      detail::require(std::isfinite(w) && w > 0.0, "atom weights must be finite and > 0");
    }
    for (double x : coords_) {
      detail::require(std::isfinite(x), "atom coordinates must be finite");
    }
  }

  int dim() const { return dim_; }
  std::size_t size() const { return weights_.size(); }

  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }
  double weight(std::size_t i) const { return weights_[i]; }

  std::span<const double> coords() const { return coords_; }
  std::span<const double> weights() const { return weights_; }

  /// The measure c * mu.
  DiscreteMeasure scaled(double c) const {
    detail::require(std::isfinite(c) && c > 0.0, "scale factor must be > 0");
    std::vector<double> w = weights_;
    for (double& v : w) v *= c;
    return {dim_, coords_, std::move(w)};
  }

 private:
  int dim_;
  std::vector<double> coords_;
  std::vector<double> weights_;
};

inline double total_mass(const DiscreteMeasure& mu) { return pairwise_sum(mu.weights()); }

/// Smallest R with every atom inside the closed ball |y| <= R.
inline double support_radius(const DiscreteMeasure& mu) {
  double r2 = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    double s = 0.0;
    for (double x : mu.point(i)) s += x * x;
    r2 = std::max(r2, s);
  }
  return std::sqrt(r2);
}

/// Probability measure with the same atoms.
inline DiscreteMeasure normalized(const DiscreteMeasure& mu) { return mu.scaled(1.0 / total_mass(mu)); }

inline DiscreteMeasure make_point_masses(const std::vector<std::vector<double>>& points,
                                         const std::vector<double>& weights) {
  detail::require(!points.empty(), "point list is empty");
  detail::require(points.size() == weights.size(), "points and weights differ in length");
  const std::size_t dim = points.front().size();
  detail::require(dim >= 1, "points must have at least one coordinate");
  std::vector<double> coords;
  coords.reserve(points.size() * dim);
  for (const auto& p : points) {
    detail::require(p.size() == dim, "points have mismatched dimensions");
    coords.insert(coords.end(), p.begin(), p.end());
  }
  return {static_cast<int>(dim), std::move(coords), weights};
}

/// Depth-`depth` approximant of the self-similar Cantor measure on [0,1]:
/// one atom at the left endpoint of every surviving interval, weighted by
/// the product of branch probabilities (p for the left map, 1-p for the right).
inline DiscreteMeasure make_cantor(int depth, double ratio = 1.0 / 3.0, double p = 0.5,
                                   std::size_t atom_cap = kDefaultAtomCap) {
  detail::require(depth >= 0, "cantor depth must be >= 0");
  detail::require(ratio > 0.0 && ratio <= 0.5, "cantor ratio must lie in (0, 1/2]");
  detail::require(p > 0.0 && p < 1.0, "cantor probability must lie in (0, 1)");
  detail::require(depth < 63 && (std::size_t{1} << depth) <= atom_cap,
                  "cantor depth " + std::to_string(depth) + " exceeds the atom cap");
  std::vector<double> x{0.0};
  std::vector<double> w{1.0};
  for (int level = 0; level < depth; ++level) {
    const double shift = 1.0 - ratio;
    std::vector<double> nx;
    std::vector<double> nw;
    nx.reserve(2 * x.size());
    nw.reserve(2 * x.size());
    // Apply the maps to the existing approximant: S0(y) = r*y, S1(y) = r*y + (1-r).
    for (std::size_t i = 0; i < x.size(); ++i) {
      nx.push_back(ratio * x[i]);
      nw.push_back(p * w[i]);
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
      nx.push_back(ratio * x[i] + shift);
      nw.push_back((1.0 - p) * w[i]);
    }
    x = std::move(nx);
    w = std::move(nw);
  }
  return {1, std::move(x), std::move(w)};
}

/// N^dim atoms at the cell centres of [0,1]^dim, each of weight N^-dim.
inline DiscreteMeasure make_uniform_grid(int dim, int per_axis,
                                         std::size_t atom_cap = kDefaultAtomCap) {
  detail::require(dim >= 1, "grid dimension must be >= 1");
  detail::require(per_axis >= 1, "grid needs at least one point per axis");
  double count = std::pow(static_cast<double>(per_axis), dim);
  detail::require(count <= static_cast<double>(atom_cap), "uniform grid exceeds the atom cap");
  const auto n = static_cast<std::size_t>(count);
  const double w = 1.0 / count;
  std::vector<double> coords(n * static_cast<std::size_t>(dim));
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t rest = i;
    // Axis 0 varies slowest.
    for (int a = dim - 1; a >= 0; --a) {
      const std::size_t k = rest % static_cast<std::size_t>(per_axis);
      rest /= static_cast<std::size_t>(per_axis);
      coords[i * dim + a] = (static_cast<double>(k) + 0.5) / per_axis;
    }
  }
  return {dim, std::move(coords), std::vector<double>(n, w)};
}

/// Masses of the half-open cells eps*k + eps*[0,1)^d that carry mass.
struct BoxCounts {
  double scale = 0.0;
  int dim = 0;
  std::vector<std::int64_t> indices;  // dim entries per cell, lexicographically sorted
  std::vector<double> masses;

  std::size_t size() const { return masses.size(); }
  std::span<const std::int64_t> index(std::size_t cell) const {
    return {indices.data() + cell * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
};

namespace detail {

/// floor(x / eps), except that ratios within 1e-10 (relative) of an integer snap
/// to it. Generated atoms meant to sit on a cell boundary (Cantor endpoints
/// at eps = 3^-k) then land in the higher cell as the half-open rule says.
inline std::int64_t cell_index(double x, double eps) {
  const double r = x / eps;
  const double nearest = std::nearbyint(r);
  if (std::abs(r - nearest) <= 1e-10 * std::max(1.0, std::abs(r))) {
    return static_cast<std::int64_t>(nearest);
  }
  return static_cast<std::int64_t>(std::floor(r));
}

}  // namespace detail

inline BoxCounts box_counts(const DiscreteMeasure& mu, double eps) {
  detail::require(std::isfinite(eps) && eps > 0.0, "box scale must be > 0");
  const int d = mu.dim();
  const std::size_t n = mu.size();
  std::vector<std::int64_t> keys(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    auto p = mu.point(i);
    for (int a = 0; a < d; ++a) keys[i * d + a] = detail::cell_index(p[a], eps);
  }
  auto key_less = [&](std::size_t i, std::size_t j) {
    return std::lexicographical_compare(keys.begin() + i * d, keys.begin() + (i + 1) * d,
                                        keys.begin() + j * d, keys.begin() + (j + 1) * d);
  };
  auto key_equal = [&](std::size_t i, std::size_t j) {
    return std::equal(keys.begin() + i * d, keys.begin() + (i + 1) * d, keys.begin() + j * d);
  };
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), key_less);

  BoxCounts out;
  out.scale = eps;
  out.dim = d;
  std::vector<double> run;
  for (std::size_t s = 0; s < n;) {
    std::size_t e = s;
    run.clear();
    while (e < n && key_equal(order[s], order[e])) {
      run.push_back(mu.weight(order[e]));
      ++e;
    }
    out.indices.insert(out.indices.end(), keys.begin() + order[s] * d,
                       keys.begin() + (order[s] + 1) * d);
    out.masses.push_back(pairwise_sum(run));
    s = e;
  }
  return out;
}

}  // namespace renyi
