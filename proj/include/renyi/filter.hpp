#pragma once

// Norms of filtered measures g_eps * mu, their scale derivatives, and the
// bound checks on those derivatives.
//
//   ||f||_q      = (int f^q dm)^(1/q)       Lebesgue norm, by quadrature
//   ||f||_{mu,s} = (int f^s dmu)^(1/s)      mu-norm, an exact atom sum
//
// For the derivative in lambda = ln(eps):
//   d/dl ln||g_eps*mu||_q        = int (g*mu)^(q-1) (h*mu) dm / int (g*mu)^q dm - d
//   d/dl ln||g_eps*mu||_{mu,q-1} = int (g*mu)^(q-2) (h*mu) dmu / int (g*mu)^(q-1) dmu - d

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "renyi/error.hpp"
#include "renyi/kernel.hpp"
#include "renyi/measure.hpp"
#include "renyi/spatial.hpp"
#include "renyi/summation.hpp"

namespace renyi {

/// Midpoint tensor-grid quadrature with spacing eps / points_per_scale. The
/// grid covers the support padded by truncation_radius(kernel, eps,
/// tail_tolerance); points beyond that reach are never visited.
struct QuadratureSpec {
  int points_per_scale = 8;
  double tail_tolerance = 1e-12;

  void validate() const {
    detail::require(points_per_scale >= 4, "quadrature needs at least 4 points per scale");
    detail::require(tail_tolerance > 0.0 && tail_tolerance <= 1e-6,
                    "quadrature tail tolerance must lie in (0, 1e-6]");
  }
};

/// Cutoff used by exact atom-pair sums. Pairs beyond it contribute less than
/// this fraction of the kernel peak.
inline constexpr double kPairTailTolerance = 1e-15;

/// Norms below this are reported as ScaleOutOfRange.
inline constexpr double kNormFloor = 1e-300;

namespace detail {

inline void require_scale(double eps) {
  require(std::isfinite(eps) && eps > 0.0, "scale eps must be finite and > 0");
}

inline std::vector<double> lower_corner(const DiscreteMeasure& mu) {
  std::vector<double> lo(mu.dim(), std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    auto p = mu.point(i);
    for (int a = 0; a < mu.dim(); ++a) lo[a] = std::min(lo[a], p[a]);
  }
  return lo;
}

/// Unscaled kernel sums at x: sum_k w_k G(|x-y_k|/eps) and the same with H.
/// Candidates beyond `cutoff_sq` (in units of eps^2) are skipped.
inline std::array<double, 2> kernel_sums_at(const RadialKernel& k, double eps, double cutoff_sq,
                                            std::span<const double> x,
                                            std::span<const double> cand_x,
                                            std::span<const double> cand_w, bool want_h) {
  const std::size_t d = x.size();
  const double inv_eps2 = 1.0 / (eps * eps);
  double g = 0.0;
  double h = 0.0;
  for (std::size_t c = 0; c < cand_w.size(); ++c) {
    double r2 = 0.0;
    for (std::size_t a = 0; a < d; ++a) {
      const double diff = x[a] - cand_x[c * d + a];
      r2 += diff * diff;
    }
    r2 *= inv_eps2;
    if (r2 > cutoff_sq) continue;
    g += cand_w[c] * k.profile_sq(r2);
    if (want_h) h += cand_w[c] * k.negderiv_sq(r2);
  }
  return {g, h};
}

/// Lebesgue integrals of the filtered measure on the quadrature grid:
///   [0] int (g_eps*mu)^q dm
///   [1] int (g_eps*mu)^(q-1) (h_eps*mu) dm
///   [2] int (h_eps*mu)^q dm
/// Entries 1 and 2 are only computed when want_h is set.
inline std::array<double, 3> lebesgue_moments(const DiscreteMeasure& mu, const RadialKernel& k,
                                              double eps, double q, const QuadratureSpec& quad,
                                              bool want_h) {
  quad.validate();
  require_scale(eps);
  const int d = mu.dim();
  const double rho = truncation_radius(k, eps, quad.tail_tolerance);
  const double cutoff_sq = (rho / eps) * (rho / eps);
  const double h_grid = eps / quad.points_per_scale;
  const double scale = std::pow(eps, -d);
  GridFrame frame{lower_corner(mu), h_grid, 0.5};
  auto sums = sparse_grid_sum<3>(
      mu, frame, rho,
      [&](std::span<const double> x, std::span<const double> cx, std::span<const double> cw,
          std::array<double, 3>& out) {
        auto [g, h] = kernel_sums_at(k, eps, cutoff_sq, x, cx, cw, want_h);
        g *= scale;
        h *= scale;
        if (g <= 0.0) return;
        const double gq1 = std::pow(g, q - 1.0);
        out[0] = gq1 * g;
        if (want_h) {
          out[1] = gq1 * h;
          out[2] = h > 0.0 ? std::pow(h, q) : 0.0;
        }
      });
  const double cell = std::pow(h_grid, d);
  return {sums[0] * cell, sums[1] * cell, sums[2] * cell};
}

inline std::string format_scale(double eps) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", eps);
  return buf;
}

inline double checked_norm(double value, double eps) {
  if (!(value >= kNormFloor) || !std::isfinite(value)) {
    throw ScaleOutOfRange("filtered norm out of floating range at eps = " + format_scale(eps));
  }
  return value;
}

/// Per-atom kernel sums (g_eps*mu)(y_j) and (h_eps*mu)(y_j).
struct AtomConvolutions {
  std::vector<double> g;
  std::vector<double> h;
};

inline AtomConvolutions atom_convolutions(const DiscreteMeasure& mu, const RadialKernel& k,
                                          double eps, bool want_h) {
  require_scale(eps);
  const double rho = truncation_radius(k, eps, kPairTailTolerance);
  const double cutoff_sq = (rho / eps) * (rho / eps);
  const double scale = std::pow(eps, -mu.dim());
  AtomConvolutions out;
  out.g.resize(mu.size());
  if (want_h) out.h.resize(mu.size());
  for_each_atom_neighborhood(
      mu, rho, [&](std::size_t j, std::span<const double> cx, std::span<const double> cw) {
        auto [g, h] = kernel_sums_at(k, eps, cutoff_sq, mu.point(j), cx, cw, want_h);
        out.g[j] = scale * g;
        if (want_h) out.h[j] = scale * h;
      });
  return out;
}

/// sum_j w_j f(j), reduced pairwise.
template <class Fn>
double weighted_atom_sum(const DiscreteMeasure& mu, Fn&& f) {
  std::vector<double> terms(mu.size());
  for (std::size_t j = 0; j < mu.size(); ++j) terms[j] = mu.weight(j) * f(j);
  return pairwise_sum(terms);
}

}  // namespace detail

/// (g_eps * mu)(x) = sum_i w_i g_eps(x - y_i).
inline double convolve_at(const DiscreteMeasure& mu, const RadialKernel& k, double eps,
                          std::span<const double> x) {
  detail::require_scale(eps);
  detail::require(static_cast<int>(x.size()) == mu.dim(), "evaluation point has wrong dimension");
  std::vector<double> terms(mu.size());
  std::vector<double> diff(x.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    auto y = mu.point(i);
    for (std::size_t a = 0; a < x.size(); ++a) diff[a] = x[a] - y[a];
    terms[i] = mu.weight(i) * eval_scaled(k, eps, diff);
  }
  return pairwise_sum(terms);
}

/// ||g_eps * mu||_q by midpoint quadrature.
inline double lq_norm(const DiscreteMeasure& mu, const RadialKernel& k, double eps, double q,
                      const QuadratureSpec& quad = {}) {
  detail::require(std::isfinite(q) && q > 1.0, "Lebesgue norm needs q > 1");
  const auto m = detail::lebesgue_moments(mu, k, eps, q, quad, false);
  return detail::checked_norm(std::pow(m[0], 1.0 / q), eps);
}

/// ||g_eps * mu||_q for the gaussian kernel and integer q >= 2, with no
/// quadrature. Expands the q-th power into a sum over q-tuples of atoms and
/// integrates each product of gaussians in closed form:
///   int prod_k exp(-|x-y_k|^2/eps^2) dx
///     = (pi eps^2 / q)^(d/2) exp(-sum_k |y_k - ybar|^2 / eps^2).
/// Cost is atoms^q.
inline double lq_norm_oracle_gaussian(const DiscreteMeasure& mu, double eps, int q) {
  detail::require_scale(eps);
  detail::require(q >= 2, "oracle needs integer q >= 2");
  const std::size_t n = mu.size();
  const double tuples = std::pow(static_cast<double>(n), q);
  const bool within_cap = (q == 2 && n <= 2000) || (q == 3 && n <= 200) || (q > 3 && tuples <= 8e6);
  detail::require(within_cap, "oracle atom/q cap exceeded");
  const int d = mu.dim();
  const double inv_eps2 = 1.0 / (eps * eps);
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(tuples));
  if (q == 2) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        double r2 = 0.0;
        auto yi = mu.point(i);
        auto yj = mu.point(j);
        for (int a = 0; a < d; ++a) r2 += (yi[a] - yj[a]) * (yi[a] - yj[a]);
        terms.push_back(mu.weight(i) * mu.weight(j) * std::exp(-0.5 * r2 * inv_eps2));
      }
    }
  } else {
    std::vector<std::size_t> tuple(q, 0);
    std::vector<double> mean(d);
    while (true) {
      std::fill(mean.begin(), mean.end(), 0.0);
      double w = 1.0;
      for (std::size_t t : tuple) {
        w *= mu.weight(t);
        auto y = mu.point(t);
        for (int a = 0; a < d; ++a) mean[a] += y[a];
      }
      for (double& v : mean) v /= q;
      double spread = 0.0;
      for (std::size_t t : tuple) {
        auto y = mu.point(t);
        for (int a = 0; a < d; ++a) spread += (y[a] - mean[a]) * (y[a] - mean[a]);
      }
      terms.push_back(w * std::exp(-spread * inv_eps2));
      int pos = q - 1;
      while (pos >= 0 && tuple[pos] == n - 1) tuple[pos--] = 0;
      if (pos < 0) break;
      ++tuple[pos];
    }
  }
  const double prefactor =
      std::pow(eps, -static_cast<double>(q) * d) * std::pow(std::numbers::pi * eps * eps / q, 0.5 * d);
  const double power = prefactor * pairwise_sum(terms);
  return detail::checked_norm(std::pow(power, 1.0 / q), eps);
}

/// ||g_eps * mu||_{mu,s} = (sum_j w_j ((g_eps*mu)(y_j))^s)^(1/s).
inline double mu_norm(const DiscreteMeasure& mu, const RadialKernel& k, double eps, double s) {
  detail::require(std::isfinite(s) && s > 0.0, "mu-norm exponent must be > 0");
  const auto conv = detail::atom_convolutions(mu, k, eps, false);
  const double integral =
      detail::weighted_atom_sum(mu, [&](std::size_t j) { return std::pow(conv.g[j], s); });
  return detail::checked_norm(std::pow(integral, 1.0 / s), eps);
}

/// int (g_eps*mu)^(q-1) dmu, the kernel correlation integral.
inline double correlation_integral(const DiscreteMeasure& mu, const RadialKernel& k, double eps,
                                   double q) {
  detail::require(std::isfinite(q) && q > 1.0, "correlation integral needs q > 1");
  const auto conv = detail::atom_convolutions(mu, k, eps, false);
  return detail::weighted_atom_sum(mu, [&](std::size_t j) { return std::pow(conv.g[j], q - 1.0); });
}

struct NormDerivativeReport {
  double eps = 0.0;
  int dim = 0;
  double norm = 0.0;          // ||g_eps*mu||_q
  double d_deps = 0.0;        // d/deps ||g_eps*mu||_q
  double loglog_slope = 0.0;  // d/dlambda ln ||g_{e^lambda}*mu||_q at lambda = ln eps
  double lower = 0.0;         // -d
  double upper = 0.0;         // ||h_eps*mu||_q / ||g_eps*mu||_q - d
};

inline NormDerivativeReport norm_derivative(const DiscreteMeasure& mu, const RadialKernel& k,
                                            double eps, double q, const QuadratureSpec& quad = {}) {
  detail::require(std::isfinite(q) && q > 1.0, "norm derivative needs q > 1");
  const auto m = detail::lebesgue_moments(mu, k, eps, q, quad, true);
  const int d = mu.dim();
  NormDerivativeReport r;
  r.eps = eps;
  r.dim = d;
  r.norm = detail::checked_norm(std::pow(m[0], 1.0 / q), eps);
  // Numerator and denominator share the grid, so grid bias mostly cancels.
  r.loglog_slope = m[1] / m[0] - d;
  r.d_deps = r.loglog_slope * r.norm / eps;
  r.lower = -static_cast<double>(d);
  r.upper = std::pow(m[2] / m[0], 1.0 / q) - d;
  return r;
}

struct CorrelationDerivativeReport {
  double eps = 0.0;
  double value = 0.0;  // d/dlambda ln ||g_{e^lambda}*mu||_{mu,q-1}
  double lower = 0.0;  // -d
  double upper = 0.0;  // ||h_eps*mu||_{mu,q-1} / ||g_eps*mu||_{mu,q-1} - d
};

/// Log-derivative of the mu-norm of order q-1. Requires q >= 2.
inline CorrelationDerivativeReport correlation_derivative(const DiscreteMeasure& mu,
                                                          const RadialKernel& k, double eps,
                                                          double q) {
  detail::require(std::isfinite(q) && q >= 2.0, "correlation derivative needs q >= 2");
  const auto conv = detail::atom_convolutions(mu, k, eps, true);
  const double num = detail::weighted_atom_sum(
      mu, [&](std::size_t j) { return std::pow(conv.g[j], q - 2.0) * conv.h[j]; });
  const double den =
      detail::weighted_atom_sum(mu, [&](std::size_t j) { return std::pow(conv.g[j], q - 1.0); });
  const double hpow =
      detail::weighted_atom_sum(mu, [&](std::size_t j) { return std::pow(conv.h[j], q - 1.0); });
  if (!(den >= kNormFloor)) {
    throw ScaleOutOfRange("correlation integral underflow at eps = " + detail::format_scale(eps));
  }
  const int d = mu.dim();
  CorrelationDerivativeReport r;
  r.eps = eps;
  r.value = num / den - d;
  r.lower = -static_cast<double>(d);
  r.upper = std::pow(hpow / den, 1.0 / (q - 1.0)) - d;
  return r;
}

inline double correlation_log_derivative(const DiscreteMeasure& mu, const RadialKernel& k,
                                         double eps, double q) {
  return correlation_derivative(mu, k, eps, q).value;
}

struct SlopeBoundCheck {
  bool passed = false;
  double lower_margin = 0.0;     // slope - (-d); must be >= -tol
  double upper_margin = 0.0;     // (||h||/||g|| - d) - slope; must be >= -tol
  double gaussian_margin = 0.0;  // -slope; only enforced for the gaussian
  bool gaussian_applied = false;
};

/// -d <= slope <= ||h_eps*mu||_q/||g_eps*mu||_q - d always, and slope <= 0
/// for the gaussian kernel, each to `tol` absolute.
inline SlopeBoundCheck check_slope_bounds(const NormDerivativeReport& r, const RadialKernel& k,
                                          double tol = 1e-6) {
  SlopeBoundCheck c;
  c.lower_margin = r.loglog_slope - r.lower;
  c.upper_margin = r.upper - r.loglog_slope;
  c.gaussian_applied = k.is_gaussian();
  c.gaussian_margin = -r.loglog_slope;
  c.passed = c.lower_margin >= -tol && c.upper_margin >= -tol &&
             (!c.gaussian_applied || c.gaussian_margin >= -tol);
  return c;
}

}  // namespace renyi
