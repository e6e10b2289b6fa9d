#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "renyi/measure.hpp"

namespace renyi::fixtures {

/// Seeded random measure in [0,1]^dim with weights in [0.1, 1].
inline DiscreteMeasure random_measure(std::uint32_t seed, int dim, int atoms) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(0.0, 1.0);
  std::uniform_real_distribution<double> wt(0.1, 1.0);
  std::vector<double> coords(static_cast<std::size_t>(dim) * atoms);
  std::vector<double> weights(atoms);
  for (auto& c : coords) c = pos(rng);
  for (auto& w : weights) w = wt(rng);
  return {dim, std::move(coords), std::move(weights)};
}

inline DiscreteMeasure point_mass(int dim = 1, double w = 1.0) {
  return {dim, std::vector<double>(dim, 0.0), {w}};
}

inline DiscreteMeasure two_atoms() { return make_point_masses({{0.0}, {1.0}}, {0.5, 0.5}); }

inline std::vector<double> geometric_scales(double base, int a, int b) {
  std::vector<double> out;
  for (int k = a; k <= b; ++k) out.push_back(std::pow(base, -k));
  return out;
}

}  // namespace renyi::fixtures
