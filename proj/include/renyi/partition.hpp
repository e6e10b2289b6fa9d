#pragma once

// The standard partition function S(eps) = sum_k mu(eps k + eps I)^q and six
// partition functions P(eps), each of which has ln P / ln eps -> D_q as
// eps -> 0. Every P is returned in its 1/(q-1)-power form.

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "renyi/error.hpp"
#include "renyi/filter.hpp"
#include "renyi/kernel.hpp"
#include "renyi/measure.hpp"
#include "renyi/spatial.hpp"
#include "renyi/summation.hpp"

namespace renyi {

enum class PartitionTag {
  raw_sum,            // S(eps)
  box_sum,            // S(eps)^(1/(q-1))
  ball_correlation,   // (int mu(x + eps B)^(q-1) dmu)^(1/(q-1)), closed ball
  ball_lebesgue,      // (int mu(x + eps B)^q eps^-d dm)^(1/(q-1))
  kernel_lattice_sum, // (sum_j (int g(j - y/eps) dmu)^q)^(1/(q-1))
  kernel_correlation, // (int (int g((x-y)/eps) dmu(y))^(q-1) dmu(x))^(1/(q-1))
  kernel_lebesgue,    // eps^d ||g_eps*mu||_q^(q/(q-1))
};

class PartitionKind {
 public:
  static PartitionKind raw_sum() { return PartitionKind(PartitionTag::raw_sum, std::nullopt); }
  static PartitionKind box_sum() { return PartitionKind(PartitionTag::box_sum, std::nullopt); }
  static PartitionKind ball_correlation() {
    return PartitionKind(PartitionTag::ball_correlation, std::nullopt);
  }
  static PartitionKind ball_lebesgue() {
    return PartitionKind(PartitionTag::ball_lebesgue, std::nullopt);
  }
  static PartitionKind kernel_lattice_sum(RadialKernel k) {
    return PartitionKind(PartitionTag::kernel_lattice_sum, k);
  }
  static PartitionKind kernel_correlation(RadialKernel k) {
    return PartitionKind(PartitionTag::kernel_correlation, k);
  }
  static PartitionKind kernel_lebesgue(RadialKernel k) {
    return PartitionKind(PartitionTag::kernel_lebesgue, k);
  }

  /// Builds a kind from its CLI name; `kernel` is attached to kernel kinds only.
  static PartitionKind from_name(std::string_view name, const RadialKernel& kernel) {
    if (name == "raw") return raw_sum();
    if (name == "box") return box_sum();
    if (name == "ball-corr") return ball_correlation();
    if (name == "ball-leb") return ball_lebesgue();
    if (name == "kernel-sum") return kernel_lattice_sum(kernel);
    if (name == "kernel-corr") return kernel_correlation(kernel);
    if (name == "kernel-leb") return kernel_lebesgue(kernel);
    throw ValidationError("unknown partition kind '" + std::string(name) + "'");
  }

  PartitionTag tag() const { return tag_; }
  const std::optional<RadialKernel>& kernel() const { return kernel_; }

  bool uses_kernel() const {
    return tag_ == PartitionTag::kernel_lattice_sum || tag_ == PartitionTag::kernel_correlation ||
           tag_ == PartitionTag::kernel_lebesgue;
  }

  std::string name() const {
    switch (tag_) {
      case PartitionTag::raw_sum: return "raw";
      case PartitionTag::box_sum: return "box";
      case PartitionTag::ball_correlation: return "ball-corr";
      case PartitionTag::ball_lebesgue: return "ball-leb";
      case PartitionTag::kernel_lattice_sum: return "kernel-sum";
      case PartitionTag::kernel_correlation: return "kernel-corr";
      case PartitionTag::kernel_lebesgue: return "kernel-leb";
    }
    return "?";
  }

 private:
  PartitionKind(PartitionTag tag, std::optional<RadialKernel> kernel)
      : tag_(tag), kernel_(std::move(kernel)) {}

  PartitionTag tag_;
  std::optional<RadialKernel> kernel_;
};

inline const std::vector<std::string>& partition_kind_names() {
  static const std::vector<std::string> names{"raw",        "box",         "ball-corr", "ball-leb",
                                              "kernel-sum", "kernel-corr", "kernel-leb"};
  return names;
}

namespace detail {

inline void require_renyi_index(double q) {
  require(std::isfinite(q) && q > 0.0 && q != 1.0, "q must satisfy 0 < q < inf, q != 1");
}

}  // namespace detail

/// S(eps) = sum over cells of mu(cell)^q.
inline double raw_sum(const DiscreteMeasure& mu, double eps, double q) {
  detail::require_renyi_index(q);
  const BoxCounts boxes = box_counts(mu, eps);
  std::vector<double> terms(boxes.size());
  for (std::size_t c = 0; c < boxes.size(); ++c) terms[c] = std::pow(boxes.masses[c], q);
  return pairwise_sum(terms);
}

/// int mu(x + eps B)^(q-1) dmu(x) with B the closed unit ball.
inline double ball_correlation_integral(const DiscreteMeasure& mu, double eps, double q) {
  detail::require_scale(eps);
  const int d = mu.dim();
  const double eps2 = eps * eps;
  std::vector<double> ball(mu.size());
  detail::for_each_atom_neighborhood(
      mu, eps, [&](std::size_t j, std::span<const double> cx, std::span<const double> cw) {
        auto y = mu.point(j);
        double mass = 0.0;
        for (std::size_t c = 0; c < cw.size(); ++c) {
          double r2 = 0.0;
          for (int a = 0; a < d; ++a) {
            const double diff = y[a] - cx[c * d + a];
            r2 += diff * diff;
          }
          if (r2 <= eps2) mass += cw[c];
        }
        ball[j] = mass;
      });
  return detail::weighted_atom_sum(mu, [&](std::size_t j) { return std::pow(ball[j], q - 1.0); });
}

/// int mu(x + eps B)^q eps^-d dm(x), midpoint rule on a grid of spacing
/// eps / points_per_scale. The integrand is piecewise constant, so this
/// converges only at first order in the spacing.
inline double ball_lebesgue_integral(const DiscreteMeasure& mu, double eps, double q,
                                     const QuadratureSpec& quad = {}) {
  quad.validate();
  detail::require_scale(eps);
  const int d = mu.dim();
  const double h = eps / quad.points_per_scale;
  const double eps2 = eps * eps;
  detail::GridFrame frame{detail::lower_corner(mu), h, 0.5};
  auto sums = detail::sparse_grid_sum<1>(
      mu, frame, eps,
      [&](std::span<const double> x, std::span<const double> cx, std::span<const double> cw,
          std::array<double, 1>& out) {
        double mass = 0.0;
        for (std::size_t c = 0; c < cw.size(); ++c) {
          double r2 = 0.0;
          for (int a = 0; a < d; ++a) {
            const double diff = x[a] - cx[c * d + a];
            r2 += diff * diff;
          }
          if (r2 <= eps2) mass += cw[c];
        }
        out[0] = mass > 0.0 ? std::pow(mass, q) : 0.0;
      });
  return sums[0] * std::pow(h / eps, d);
}

/// sum_{j in Z^d} (sum_k w_k G(|j - y_k/eps|))^q, keeping lattice points and
/// atoms within `unit_radius` lattice units of each other.
inline double kernel_lattice_sum(const DiscreteMeasure& mu, const RadialKernel& k, double eps,
                                 double q, double unit_radius) {
  detail::require_renyi_index(q);
  detail::require_scale(eps);
  detail::require(unit_radius > 0.0, "lattice truncation radius must be > 0");
  const int d = mu.dim();
  const double cutoff_sq = unit_radius * unit_radius;
  detail::GridFrame frame{std::vector<double>(d, 0.0), eps, 0.0};
  auto sums = detail::sparse_grid_sum<1>(
      mu, frame, unit_radius * eps,
      [&](std::span<const double> x, std::span<const double> cx, std::span<const double> cw,
          std::array<double, 1>& out) {
        auto [g, unused] = detail::kernel_sums_at(k, eps, cutoff_sq, x, cx, cw, false);
        (void)unused;
        out[0] = g > 0.0 ? std::pow(g, q) : 0.0;
      });
  return sums[0];
}

inline double kernel_lattice_sum(const DiscreteMeasure& mu, const RadialKernel& k, double eps,
                                 double q, const QuadratureSpec& quad = {}) {
  return kernel_lattice_sum(mu, k, eps, q, k.unit_truncation_radius(quad.tail_tolerance));
}

/// P(eps) for the given kind.
inline double evaluate(const PartitionKind& kind, const DiscreteMeasure& mu, double eps, double q,
                       const QuadratureSpec& quad = {}) {
  detail::require_scale(eps);
  detail::require_renyi_index(q);
  const auto tag = kind.tag();
  const bool allows_small_q = tag == PartitionTag::raw_sum || tag == PartitionTag::box_sum ||
                              tag == PartitionTag::kernel_lattice_sum;
  detail::require(allows_small_q || q > 1.0, "partition kind " + kind.name() + " needs q > 1");
  if (kind.uses_kernel()) {
    detail::require(kind.kernel().has_value(), "partition kind " + kind.name() + " needs a kernel");
  }
  const double inv = 1.0 / (q - 1.0);
  const int d = mu.dim();
  switch (tag) {
    case PartitionTag::raw_sum:
      return raw_sum(mu, eps, q);
    case PartitionTag::box_sum:
      return std::pow(raw_sum(mu, eps, q), inv);
    case PartitionTag::ball_correlation:
      return std::pow(ball_correlation_integral(mu, eps, q), inv);
    case PartitionTag::ball_lebesgue:
      return std::pow(ball_lebesgue_integral(mu, eps, q, quad), inv);
    case PartitionTag::kernel_lattice_sum:
      return std::pow(kernel_lattice_sum(mu, *kind.kernel(), eps, q, quad), inv);
    case PartitionTag::kernel_correlation:
      // eps^d ||g_eps*mu||_{mu,q-1}
      return std::pow(eps, d) * mu_norm(mu, *kind.kernel(), eps, q - 1.0);
    case PartitionTag::kernel_lebesgue:
      return std::pow(eps, d) * std::pow(lq_norm(mu, *kind.kernel(), eps, q, quad), q * inv);
  }
  return 0.0;
}

/// eps^d ||g_eps*mu||_{mu,q-1} / S(eps)^(1/(q-1)) at each eps. Bounded above
/// and below for kernels with G(0) > 0.
inline std::vector<double> ratio_correlation_vs_boxes(const DiscreteMeasure& mu,
                                                      const RadialKernel& k,
                                                      std::span<const double> eps_list, double q) {
  detail::require(std::isfinite(q) && q > 1.0, "ratio needs q > 1");
  detail::require(k.peak() > 0.0, "ratio needs G(0) > 0");
  std::vector<double> out;
  out.reserve(eps_list.size());
  for (double eps : eps_list) {
    const double num = std::pow(eps, mu.dim()) * mu_norm(mu, k, eps, q - 1.0);
    out.push_back(num / std::pow(raw_sum(mu, eps, q), 1.0 / (q - 1.0)));
  }
  return out;
}

/// sum_j (int g(j - y/eps) dmu)^q / S(eps) at each eps.
inline std::vector<double> ratio_kernel_sum_vs_boxes(const DiscreteMeasure& mu,
                                                     const RadialKernel& k,
                                                     std::span<const double> eps_list, double q,
                                                     const QuadratureSpec& quad = {}) {
  detail::require_renyi_index(q);
  detail::require(k.peak() > 0.0, "ratio needs G(0) > 0");
  std::vector<double> out;
  out.reserve(eps_list.size());
  for (double eps : eps_list) {
    out.push_back(kernel_lattice_sum(mu, k, eps, q, quad) / raw_sum(mu, eps, q));
  }
  return out;
}

/// Refinement test for continuity of a sampled function of eps.
struct JumpTest {
  double max_jump = 0.0;          // largest |f(x_{i+1}) - f(x_i)| at `samples` points
  double refined_max_jump = 0.0;  // same at 2*samples points
  double worst_jump_x = 0.0;      // left end of the largest jump
  bool local_ok = false;          // every jump <= 5 * neighbouring jump (local slope * step)
  bool refines = false;           // refined_max_jump <= 0.75 * max_jump
  bool passed() const { return local_ok && refines; }
};

namespace detail {

struct JumpScan {
  double max_jump = 0.0;
  double worst_x = 0.0;
  bool local_ok = true;
};

inline JumpScan scan_jumps(const std::function<double(double)>& f, double a, double b, int samples) {
  std::vector<double> xs(samples);
  std::vector<double> fs(samples);
  const double step = (b - a) / (samples - 1);
  double scale = 0.0;
  for (int i = 0; i < samples; ++i) {
    xs[i] = a + step * i;
    fs[i] = f(xs[i]);
    scale = std::max(scale, std::abs(fs[i]));
  }
  std::vector<double> jumps(samples - 1);
  for (int i = 0; i + 1 < samples; ++i) jumps[i] = std::abs(fs[i + 1] - fs[i]);
  JumpScan out;
  const double floor = 1e-12 * std::max(1.0, scale);
  for (std::size_t i = 0; i < jumps.size(); ++i) {
    if (jumps[i] > out.max_jump) {
      out.max_jump = jumps[i];
      out.worst_x = xs[i];
    }
    // The neighbouring intervals estimate the local slope times the step.
    const double left = i > 0 ? jumps[i - 1] : 0.0;
    const double right = i + 1 < jumps.size() ? jumps[i + 1] : 0.0;
    if (jumps[i] > 5.0 * std::max(left, right) + floor) out.local_ok = false;
  }
  return out;
}

}  // namespace detail

inline JumpTest jump_test(const std::function<double(double)>& f, double a, double b,
                          int samples = 1000) {
  detail::require(b > a && samples >= 4, "jump test needs b > a and at least 4 samples");
  const auto coarse = detail::scan_jumps(f, a, b, samples);
  const auto fine = detail::scan_jumps(f, a, b, 2 * samples);
  JumpTest t;
  t.max_jump = coarse.max_jump;
  t.refined_max_jump = fine.max_jump;
  t.worst_jump_x = coarse.worst_x;
  t.local_ok = coarse.local_ok && fine.local_ok;
  t.refines = fine.max_jump <= 0.75 * coarse.max_jump;
  return t;
}

}  // namespace renyi
