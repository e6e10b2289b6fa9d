#pragma once

// Bucketed atom lookup, and the two traversal patterns built on it: sums
// over a (sparse) regular grid of evaluation points and per-atom sums over
// neighbouring atoms. Both only visit points within a cutoff radius of the
// support, and both reduce in an order fixed by the bucket keys.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <unordered_map>
#include <vector>

#include "renyi/measure.hpp"
#include "renyi/summation.hpp"

namespace renyi::detail {

struct KeyHash {
  std::size_t operator()(const std::vector<std::int64_t>& key) const noexcept {
    std::uint64_t h = 0x9E3779B97F4A7C15ull;
    for (std::int64_t v : key) {
      h ^= static_cast<std::uint64_t>(v) + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

/// Atoms grouped into cubes of side `width` anchored at `origin`.
class BucketIndex {
 public:
  BucketIndex(const DiscreteMeasure& mu, std::vector<double> origin, double width)
      : dim_(mu.dim()), origin_(std::move(origin)), width_(width) {
    const std::size_t n = mu.size();
    const int d = dim_;
    std::vector<std::int64_t> keys(n * d);
    for (std::size_t i = 0; i < n; ++i) {
      auto p = mu.point(i);
      for (int a = 0; a < d; ++a) {
        keys[i * d + a] = static_cast<std::int64_t>(std::floor((p[a] - origin_[a]) / width_));
      }
    }
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(), [&](std::uint32_t i, std::uint32_t j) {
      return std::lexicographical_compare(keys.begin() + i * d, keys.begin() + (i + 1) * d,
                                          keys.begin() + j * d, keys.begin() + (j + 1) * d);
    });
    coords_.reserve(n * d);
    weights_.reserve(n);
    for (std::size_t s = 0; s < n;) {
      std::size_t e = s;
      while (e < n && std::equal(keys.begin() + order[s] * d, keys.begin() + (order[s] + 1) * d,
                                 keys.begin() + order[e] * d)) {
        ++e;
      }
      std::vector<std::int64_t> key(keys.begin() + order[s] * d, keys.begin() + (order[s] + 1) * d);
      lookup_.emplace(key, starts_.size());
      keys_.insert(keys_.end(), key.begin(), key.end());
      starts_.push_back(s);
      for (std::size_t t = s; t < e; ++t) {
        auto p = mu.point(order[t]);
        coords_.insert(coords_.end(), p.begin(), p.end());
        weights_.push_back(mu.weight(order[t]));
        atom_ids_.push_back(order[t]);
      }
      s = e;
    }
    starts_.push_back(n);
  }

  int dim() const { return dim_; }
  double width() const { return width_; }
  std::size_t bucket_count() const { return starts_.size() - 1; }
  std::span<const std::int64_t> key(std::size_t b) const {
    return {keys_.data() + b * dim_, static_cast<std::size_t>(dim_)};
  }
  std::span<const std::uint32_t> atoms(std::size_t b) const {
    return {atom_ids_.data() + starts_[b], starts_[b + 1] - starts_[b]};
  }

  /// Appends coordinates and weights of every atom in the 3^d block of
  /// buckets around `center`, in key order.
  void gather_neighbors(std::span<const std::int64_t> center, std::vector<double>& coords,
                        std::vector<double>& weights) const {
    coords.clear();
    weights.clear();
    std::vector<std::int64_t> probe(center.begin(), center.end());
    std::vector<int> offset(dim_, -1);
    while (true) {
      for (int a = 0; a < dim_; ++a) probe[a] = center[a] + offset[a];
      auto it = lookup_.find(probe);
      if (it != lookup_.end()) {
        const std::size_t b = it->second;
        coords.insert(coords.end(), coords_.begin() + starts_[b] * dim_,
                      coords_.begin() + starts_[b + 1] * dim_);
        weights.insert(weights.end(), weights_.begin() + starts_[b], weights_.begin() + starts_[b + 1]);
      }
      int a = dim_ - 1;
      while (a >= 0 && offset[a] == 1) offset[a--] = -1;
      if (a < 0) break;
      ++offset[a];
    }
  }

  /// Every key within one bucket of an occupied bucket, sorted and unique.
  std::vector<std::int64_t> dilated_keys() const {
    const int d = dim_;
    std::vector<std::vector<std::int64_t>> all;
    std::vector<int> offset(d);
    for (std::size_t b = 0; b < bucket_count(); ++b) {
      std::fill(offset.begin(), offset.end(), -1);
      while (true) {
        std::vector<std::int64_t> k(d);
        for (int a = 0; a < d; ++a) k[a] = keys_[b * d + a] + offset[a];
        all.push_back(std::move(k));
        int a = d - 1;
        while (a >= 0 && offset[a] == 1) offset[a--] = -1;
        if (a < 0) break;
        ++offset[a];
      }
    }
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    std::vector<std::int64_t> flat;
    flat.reserve(all.size() * d);
    for (const auto& k : all) flat.insert(flat.end(), k.begin(), k.end());
    return flat;
  }

 private:
  int dim_;
  std::vector<double> origin_;
  double width_;
  std::vector<std::int64_t> keys_;
  std::vector<std::size_t> starts_;
  std::vector<double> coords_;
  std::vector<double> weights_;
  std::vector<std::uint32_t> atom_ids_;
  std::unordered_map<std::vector<std::int64_t>, std::size_t, KeyHash> lookup_;
};

/// Regular grid x_i = origin + (i + offset) * spacing, i in Z^d.
struct GridFrame {
  std::vector<double> origin;
  double spacing = 1.0;
  double offset = 0.5;
};

/// Sum over all grid points within `radius` of an atom of fn(x, coords,
/// weights, out), where coords/weights hold every atom that could be within
/// `radius` of x (a superset; fn does the exact distance test). Grid points
/// farther than `radius` from every atom are skipped; fn must be zero there.
template <std::size_t K, class PointFn>
std::array<double, K> sparse_grid_sum(const DiscreteMeasure& mu, const GridFrame& frame,
                                      double radius, PointFn&& fn) {
  const int d = mu.dim();
  const double h = frame.spacing;
  // Bucket side m*h strictly exceeds the radius.
  const auto m = static_cast<std::int64_t>(std::floor(radius / h)) + 1;
  std::vector<double> bucket_origin(d);
  for (int a = 0; a < d; ++a) bucket_origin[a] = frame.origin[a] + frame.offset * h;
  BucketIndex index(mu, bucket_origin, static_cast<double>(m) * h);
  const std::vector<std::int64_t> active = index.dilated_keys();
  const std::size_t n_active = active.size() / d;

  std::vector<std::array<double, K>> partial(n_active);
  parallel_for(n_active, [&](std::size_t begin, std::size_t end) {
    std::vector<double> cand_x;
    std::vector<double> cand_w;
    std::array<std::vector<double>, K> values;
    std::vector<double> x(d);
    std::vector<std::int64_t> idx(d);
    std::array<double, K> out{};
    for (std::size_t b = begin; b < end; ++b) {
      std::span<const std::int64_t> key(active.data() + b * d, d);
      index.gather_neighbors(key, cand_x, cand_w);
      for (auto& v : values) v.clear();
      if (!cand_w.empty()) {
        for (int a = 0; a < d; ++a) idx[a] = key[a] * m;
        while (true) {
          for (int a = 0; a < d; ++a) {
            x[a] = frame.origin[a] + (static_cast<double>(idx[a]) + frame.offset) * h;
          }
          out.fill(0.0);
          fn(std::span<const double>(x), std::span<const double>(cand_x),
             std::span<const double>(cand_w), out);
          for (std::size_t c = 0; c < K; ++c) values[c].push_back(out[c]);
          int a = d - 1;
          while (a >= 0 && idx[a] == (key[a] + 1) * m - 1) {
            idx[a] = key[a] * m;
            --a;
          }
          if (a < 0) break;
          ++idx[a];
        }
      }
      for (std::size_t c = 0; c < K; ++c) partial[b][c] = pairwise_sum(values[c]);
    }
  });
  std::array<double, K> total{};
  std::vector<double> column(n_active);
  for (std::size_t c = 0; c < K; ++c) {
    for (std::size_t b = 0; b < n_active; ++b) column[b] = partial[b][c];
    total[c] = pairwise_sum(column);
  }
  return total;
}

/// Calls fn(j, coords, weights) once per atom j, where coords/weights cover
/// every atom within `radius` of atom j (a superset, in a fixed order). An
/// infinite radius hands every atom to every call. Calls may run
/// concurrently; fn must only write to slots owned by j.
template <class AtomFn>
void for_each_atom_neighborhood(const DiscreteMeasure& mu, double radius, AtomFn&& fn) {
  const int d = mu.dim();
  const std::size_t n = mu.size();
  std::vector<double> lo(d, std::numeric_limits<double>::infinity());
  std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < n; ++i) {
    auto p = mu.point(i);
    for (int a = 0; a < d; ++a) {
      lo[a] = std::min(lo[a], p[a]);
      hi[a] = std::max(hi[a], p[a]);
    }
  }
  double extent = 0.0;
  for (int a = 0; a < d; ++a) extent = std::max(extent, hi[a] - lo[a]);
  if (!(radius < extent)) {
    std::span<const double> all_x = mu.coords();
    std::span<const double> all_w = mu.weights();
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
      for (std::size_t j = begin; j < end; ++j) fn(j, all_x, all_w);
    });
    return;
  }
  BucketIndex index(mu, lo, radius * (1.0 + 1e-9) + std::numeric_limits<double>::min());
  const std::size_t n_buckets = index.bucket_count();
  parallel_for(n_buckets, [&](std::size_t begin, std::size_t end) {
    std::vector<double> cand_x;
    std::vector<double> cand_w;
    for (std::size_t b = begin; b < end; ++b) {
      index.gather_neighbors(index.key(b), cand_x, cand_w);
      for (std::uint32_t j : index.atoms(b)) {
        fn(static_cast<std::size_t>(j), std::span<const double>(cand_x),
           std::span<const double>(cand_w));
      }
    }
  });
}

}  // namespace renyi::detail
