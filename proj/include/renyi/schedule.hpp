#pragma once

// Scale schedules eps_n and the growth of adjacent-scale norm differences
//   Delta_n = | ||g_{eps_n}*mu||_q - ||g_{eps_{n-1}}*mu||_q |.
//
// With eps_n = n^-t the differences grow slower than every power of n
// exactly when t <= q / ((q-1)(d - D_q^-)). With eps_n = 2^-n they grow
// exponentially at rate ln2 (q-1)/q (d - D_q^-) whenever D_q^- < d.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "renyi/dimension.hpp"
#include "renyi/error.hpp"
#include "renyi/filter.hpp"
#include "renyi/kernel.hpp"
#include "renyi/measure.hpp"

namespace renyi {

enum class ScheduleKind { power, geometric };

struct ScaleSchedule {
  ScheduleKind kind = ScheduleKind::power;
  double t = 1.0;  // power exponent; unused for geometric
  int n0 = 2;
  int n1 = 2;

  static ScaleSchedule power(double t, int n0, int n1) {
    detail::require(std::isfinite(t) && t > 0.0, "power schedule exponent must be > 0");
    ScaleSchedule s{ScheduleKind::power, t, n0, n1};
    s.validate();
    return s;
  }
  static ScaleSchedule geometric(int n0, int n1) {
    ScaleSchedule s{ScheduleKind::geometric, 0.0, n0, n1};
    s.validate();
    return s;
  }

  void validate() const {
    // ln(1) = 0 would make ln(Delta_n)/ln(n) undefined at n = 1.
    detail::require(n0 >= 2, "schedules start at n >= 2");
    detail::require(n1 > n0, "schedule range must contain at least two indices");
  }

  double eps(int n) const {
    return kind == ScheduleKind::power ? std::pow(static_cast<double>(n), -t)
                                       : std::ldexp(1.0, -n);
  }

  std::string name() const { return kind == ScheduleKind::power ? "power" : "geometric"; }
};

/// In-I_q decisions allow m_hat up to this value; finite-n bias is upward.
inline constexpr double kMembershipSlack = 0.1;

struct ScheduleReport {
  ScaleSchedule schedule;
  double q = 2.0;
  std::vector<int> n;             // n0..n1
  std::vector<double> eps;
  std::vector<double> norms;
  std::vector<double> diffs;      // diffs[i] = Delta at n[i+1]
  std::vector<double> ln_diffs;   // -inf where Delta = 0
  std::vector<double> ratios;     // ln Delta_n / ln n
  double growth_stat = 0.0;       // m_hat
  double ratio_upper = 0.0;       // tail max of ratios (power schedules)
  std::size_t zero_diffs = 0;
  std::optional<double> critical_t;  // +inf when D_q^- = d
  bool in_I_q = false;
};

/// t* = q / ((q-1)(d - D)). Infinite when D = d.
inline double critical_exponent(double q, int dim, double d_lower, double tolerance = 0.1) {
  detail::require(std::isfinite(q) && q > 1.0, "critical exponent needs q > 1");
  detail::require(dim >= 1, "dimension must be >= 1");
  detail::require(std::isfinite(d_lower) && d_lower >= -tolerance && d_lower <= dim + tolerance,
                  "lower dimension estimate must lie in [0, d]");
  const double d = std::clamp(d_lower, 0.0, static_cast<double>(dim));
  const double gap = dim - d;
  if (gap <= 1e-9) return std::numeric_limits<double>::infinity();
  return q / ((q - 1.0) * gap);
}

namespace detail {

inline void fill_growth_stat(ScheduleReport& r) {
  std::vector<double> xs;
  std::vector<double> ys;
  std::vector<double> tail_ratios;
  for (std::size_t i = 0; i < r.diffs.size(); ++i) {
    if (!std::isfinite(r.ln_diffs[i])) continue;
    const int n = r.n[i + 1];
    xs.push_back(r.schedule.kind == ScheduleKind::power ? std::log(static_cast<double>(n))
                                                        : static_cast<double>(n));
    ys.push_back(r.ln_diffs[i]);
    tail_ratios.push_back(r.ratios[i]);
  }
  if (xs.size() < 3) throw NumericError("fewer than 3 nonzero schedule differences");
  if (r.schedule.kind == ScheduleKind::geometric) {
    r.growth_stat = least_squares(xs, ys).slope;
    r.ratio_upper = *std::max_element(tail_ratios.begin(), tail_ratios.end());
    return;
  }
  // Power schedules: order of n -> Delta_n, estimated on the final 60%.
  auto tail = static_cast<std::size_t>(std::ceil(0.6 * xs.size()));
  tail = std::clamp<std::size_t>(tail, 3, xs.size());
  const std::size_t first = xs.size() - tail;
  std::span<const double> tx(xs.data() + first, tail);
  std::span<const double> ty(ys.data() + first, tail);
  r.growth_stat = least_squares(tx, ty).slope;
  r.ratio_upper = *std::max_element(tail_ratios.begin() + first, tail_ratios.end());
}

}  // namespace detail

/// Norms along the schedule, their adjacent differences, and m_hat. For power
/// schedules m_hat estimates the order of n -> Delta_n, which should be close
/// to t (q-1)/q (d - D_q^-) - 1; for geometric ones it is the slope of
/// ln Delta_n against n. `d_lower`, when given, fills critical_t.
inline ScheduleReport run_schedule(const DiscreteMeasure& mu, const RadialKernel& k,
                                   const ScaleSchedule& schedule, double q,
                                   const QuadratureSpec& quad = {},
                                   std::optional<double> d_lower = std::nullopt) {
  schedule.validate();
  detail::require(std::isfinite(q) && q > 1.0, "schedule needs q > 1");
  ScheduleReport r;
  r.schedule = schedule;
  r.q = q;
  for (int n = schedule.n0; n <= schedule.n1; ++n) {
    r.n.push_back(n);
    r.eps.push_back(schedule.eps(n));
    r.norms.push_back(lq_norm(mu, k, r.eps.back(), q, quad));
  }
  for (std::size_t i = 1; i < r.norms.size(); ++i) {
    const double diff = std::abs(r.norms[i] - r.norms[i - 1]);
    r.diffs.push_back(diff);
    const double ln_diff = diff > 0.0 ? std::log(diff) : -std::numeric_limits<double>::infinity();
    r.ln_diffs.push_back(ln_diff);
    r.ratios.push_back(ln_diff / std::log(static_cast<double>(r.n[i])));
    if (diff == 0.0) ++r.zero_diffs;
  }
  detail::fill_growth_stat(r);
  if (d_lower) r.critical_t = critical_exponent(q, mu.dim(), *d_lower);
  r.in_I_q = r.growth_stat <= kMembershipSlack;
  return r;
}

/// Slope of ln Delta_n against n for a geometric schedule.
inline double geometric_blowup_stat(const ScheduleReport& r) {
  detail::require(r.schedule.kind == ScheduleKind::geometric,
                  "blow-up statistic needs a geometric schedule");
  std::size_t finite = 0;
  for (double v : r.ln_diffs) finite += std::isfinite(v) ? 1 : 0;
  if (finite < 8) throw NumericError("blow-up statistic needs at least 8 nonzero differences");
  return r.growth_stat;
}

}  // namespace renyi
