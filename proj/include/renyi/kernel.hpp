#pragma once

// Radial filter kernels g(x) = G(|x|), their rescalings
// g_eps(x) = eps^-d G(|x|/eps), and the negative radial derivative
// h(x) = -x . grad g(x) = H(|x|) with H(r) = -r G'(r).

#include <algorithm>
#include <cmath>
#include <span>
#include <string>

#include "renyi/error.hpp"

namespace renyi {

enum class KernelKind { gaussian, smooth_bump };

class RadialKernel {
 public:
  static RadialKernel gaussian() { return RadialKernel(KernelKind::gaussian, 0.0, 0.0); }

  /// Equal to 1 on [0, inner], 0 beyond outer, cubic smoothstep between. C^1.
  static RadialKernel smooth_bump(double inner, double outer) {
    detail::require(std::isfinite(inner) && std::isfinite(outer) && inner > 0.0 && inner < outer,
                    "smooth_bump needs 0 < inner < outer");
    return RadialKernel(KernelKind::smooth_bump, inner, outer);
  }

  KernelKind kind() const { return kind_; }
  double inner() const { return inner_; }
  double outer() const { return outer_; }
  bool is_gaussian() const { return kind_ == KernelKind::gaussian; }

  /// G(r).
  double profile(double r) const {
    switch (kind_) {
      case KernelKind::gaussian:
        return std::exp(-r * r);
      case KernelKind::smooth_bump: {
        if (r <= inner_) return 1.0;
        if (r >= outer_) return 0.0;
        const double s = (r - inner_) / (outer_ - inner_);
        return 1.0 - s * s * (3.0 - 2.0 * s);
      }
    }
    return 0.0;
  }

  /// G as a function of r^2; avoids a sqrt on the gaussian hot path.
  double profile_sq(double r2) const {
    if (kind_ == KernelKind::gaussian) return std::exp(-r2);
    return profile(std::sqrt(r2));
  }

  /// H(r) = -r G'(r).
  double negderiv(double r) const {
    switch (kind_) {
      case KernelKind::gaussian:
        return 2.0 * r * r * std::exp(-r * r);
      case KernelKind::smooth_bump: {
        if (r <= inner_ || r >= outer_) return 0.0;
        const double width = outer_ - inner_;
        const double s = (r - inner_) / width;
        return r * 6.0 * s * (1.0 - s) / width;
      }
    }
    return 0.0;
  }

  double negderiv_sq(double r2) const {
    if (kind_ == KernelKind::gaussian) return 2.0 * r2 * std::exp(-r2);
    return negderiv(std::sqrt(r2));
  }

  double peak() const { return profile(0.0); }

  /// sup_r H(r).
  double negderiv_peak() const {
    if (kind_ == KernelKind::gaussian) return 2.0 / std::exp(1.0);
    // H is a cubic in r on (inner, outer); a dense scan is plenty for a
    // normalising constant.
    double best = 0.0;
    constexpr int kSteps = 4096;
    for (int i = 0; i <= kSteps; ++i) {
      best = std::max(best, negderiv(inner_ + (outer_ - inner_) * i / kSteps));
    }
    return best;
  }

  /// Radius (in units of the unscaled kernel) beyond which
  /// max(G, H) <= tau * max(G(0), sup H).
  double unit_truncation_radius(double tau) const {
    detail::require(tau > 0.0 && tau < 1.0, "truncation tolerance must lie in (0, 1)");
    if (kind_ == KernelKind::smooth_bump) return outer_;
    const double level = tau * std::max(peak(), negderiv_peak());
    // Both G and H decrease for r >= 1, and G decreases everywhere. The
    // predicate "max over [r, inf) of max(G, H) <= level" is monotone in r.
    auto tail_ok = [&](double r) {
      return profile(r) <= level && negderiv(std::max(r, 1.0)) <= level;
    };
    double lo = 0.0;
    double hi = 1.0;
    while (!tail_ok(hi)) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (tail_ok(mid) ? hi : lo) = mid;
    }
    return hi;
  }

  std::string describe() const {
    if (kind_ == KernelKind::gaussian) return "gaussian";
    return "bump:" + std::to_string(inner_) + "," + std::to_string(outer_);
  }

 private:
  RadialKernel(KernelKind kind, double inner, double outer)
      : kind_(kind), inner_(inner), outer_(outer) {}

  KernelKind kind_;
  double inner_;
  double outer_;
};

inline RadialKernel gaussian() { return RadialKernel::gaussian(); }
inline RadialKernel smooth_bump(double inner, double outer) {
  return RadialKernel::smooth_bump(inner, outer);
}

namespace detail {

inline double norm_sq(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

}  // namespace detail

/// g_eps(x) = eps^-d G(|x|/eps) with d = x.size().
inline double eval_scaled(const RadialKernel& k, double eps, std::span<const double> x) {
  const auto d = static_cast<double>(x.size());
  return std::pow(eps, -d) * k.profile_sq(detail::norm_sq(x) / (eps * eps));
}

/// h_eps(x) = eps^-d H(|x|/eps).
inline double eval_scaled_negderiv(const RadialKernel& k, double eps, std::span<const double> x) {
  const auto d = static_cast<double>(x.size());
  return std::pow(eps, -d) * k.negderiv_sq(detail::norm_sq(x) / (eps * eps));
}

/// Physical radius rho with max(G, H)(r) <= tau * max(G(0), sup H) for r >= rho/eps.
inline double truncation_radius(const RadialKernel& k, double eps, double tau) {
  detail::require(std::isfinite(eps) && eps > 0.0, "scale must be > 0");
  return eps * k.unit_truncation_radius(tau);
}

}  // namespace renyi
