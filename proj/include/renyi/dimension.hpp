#pragma once

// Upper and lower orders of sampled functions, and Renyi dimension
// estimates built from them.
//
// For a function f sampled at arguments x_i the upper and lower orders are
// limsup and liminf of ln f(x) / ln x. With finitely many samples we report
//   upper, lower : max and min of ln f(x_i) / ln x_i over the tail window
//   slope        : least-squares slope of ln f against ln x over that window
// The ratio is the definition itself but converges like ln(C)/ln(x) when f
// carries a multiplicative constant C; the slope does not see C.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "renyi/error.hpp"
#include "renyi/filter.hpp"
#include "renyi/kernel.hpp"
#include "renyi/measure.hpp"
#include "renyi/partition.hpp"

namespace renyi {

/// Samples (ln x_i, ln f(x_i)). x is a scale eps (decreasing) or an inverse
/// scale (increasing); log_value may be -inf where f = 0.
struct LogLogSeries {
  std::vector<double> arg;
  std::vector<double> log_arg;
  std::vector<double> log_value;

  std::size_t size() const { return arg.size(); }

  void push(double x, double value) {
    arg.push_back(x);
    log_arg.push_back(std::log(x));
    log_value.push_back(value > 0.0 ? std::log(value) : -std::numeric_limits<double>::infinity());
  }

  std::size_t finite_count() const {
    return static_cast<std::size_t>(
        std::count_if(log_value.begin(), log_value.end(), [](double v) { return std::isfinite(v); }));
  }
};

struct OrderEstimate {
  double upper = 0.0;
  double lower = 0.0;
  double slope = 0.0;
  std::size_t window_begin = 0;  // indices into the series, [begin, end)
  std::size_t window_end = 0;
  double residual = 0.0;         // max |fit - data| over the window
  std::size_t excluded = 0;      // samples with f = 0
  bool low_confidence = false;   // log-argument range under one decade
};

struct EstimateOptions {
  double tail_fraction = 0.6;
};

namespace detail {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
};

inline LineFit least_squares(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit fit;
  fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  for (std::size_t i = 0; i < x.size(); ++i) {
    fit.residual = std::max(fit.residual, std::abs(fit.intercept + fit.slope * x[i] - y[i]));
  }
  return fit;
}

inline void require_strictly_monotone(std::span<const double> v, const std::string& what) {
  if (v.size() < 2) return;
  const bool up = v[1] > v[0];
  for (std::size_t i = 1; i < v.size(); ++i) {
    const bool ok = up ? v[i] > v[i - 1] : v[i] < v[i - 1];
    require(ok, what + " must be strictly monotone");
  }
}

}  // namespace detail

inline OrderEstimate estimate_orders(const LogLogSeries& series, const EstimateOptions& opts = {}) {
  detail::require(opts.tail_fraction > 0.0 && opts.tail_fraction <= 1.0,
                  "tail fraction must lie in (0, 1]");
  detail::require_strictly_monotone(series.log_arg, "series arguments");
  std::vector<std::size_t> finite;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (std::isfinite(series.log_value[i])) finite.push_back(i);
  }
  if (finite.size() < 3) {
    throw NumericError("order estimate needs at least 3 finite samples, got " +
                       std::to_string(finite.size()));
  }
  OrderEstimate est;
  est.excluded = series.size() - finite.size();
  auto tail = static_cast<std::size_t>(std::ceil(opts.tail_fraction * finite.size()));
  tail = std::clamp<std::size_t>(tail, 3, finite.size());
  const std::size_t first = finite.size() - tail;
  est.window_begin = finite[first];
  est.window_end = finite.back() + 1;

  std::vector<double> xs;
  std::vector<double> ys;
  est.upper = -std::numeric_limits<double>::infinity();
  est.lower = std::numeric_limits<double>::infinity();
  for (std::size_t f = first; f < finite.size(); ++f) {
    const std::size_t i = finite[f];
    xs.push_back(series.log_arg[i]);
    ys.push_back(series.log_value[i]);
    if (series.log_arg[i] != 0.0) {
      const double r = series.log_value[i] / series.log_arg[i];
      est.upper = std::max(est.upper, r);
      est.lower = std::min(est.lower, r);
    }
  }
  const auto fit = detail::least_squares(xs, ys);
  est.slope = fit.slope;
  est.residual = fit.residual;
  const double range = std::abs(series.log_arg[finite.back()] - series.log_arg[finite.front()]);
  est.low_confidence = range < std::log(10.0);
  return est;
}

/// ln P(eps) over a strictly decreasing scale list.
inline LogLogSeries sample_series(const PartitionKind& kind, const DiscreteMeasure& mu, double q,
                                  std::span<const double> eps_list,
                                  const QuadratureSpec& quad = {}) {
  for (double eps : eps_list) detail::require_scale(eps);
  for (std::size_t i = 1; i < eps_list.size(); ++i) {
    detail::require(eps_list[i] < eps_list[i - 1], "scale list must be strictly decreasing");
  }
  std::vector<double> values(eps_list.size());
  for (std::size_t i = 0; i < eps_list.size(); ++i) values[i] = evaluate(kind, mu, eps_list[i], q, quad);
  LogLogSeries s;
  for (std::size_t i = 0; i < eps_list.size(); ++i) s.push(eps_list[i], values[i]);
  if (s.finite_count() < 3) throw NumericError("fewer than 3 finite partition samples");
  return s;
}

/// D_q estimate from the P-series of `kind`. P already carries the
/// 1/(q-1) power, except for the raw sum whose slope is (q-1) D_q.
inline OrderEstimate renyi_dimension(const PartitionKind& kind, const DiscreteMeasure& mu, double q,
                                     std::span<const double> eps_list,
                                     const QuadratureSpec& quad = {},
                                     const EstimateOptions& opts = {}) {
  return estimate_orders(sample_series(kind, mu, q, eps_list, quad), opts);
}

/// Both sides of
///   limsup_{x->inf} ln ||g_{1/x}*mu||_q / ln x = (q-1)/q (d - D_q^-(mu)).
struct GuerinCheck {
  double lhs = 0.0;        // least-squares order of x -> ||g_{1/x}*mu||_q over the tail
  double lhs_ratio = 0.0;  // tail max of ln ||g_{1/x}*mu||_q / ln x (definitional, biased)
  double rhs = 0.0;        // (q-1)/q (d - lower BoxSum dimension)
  double d_lower = 0.0;
  LogLogSeries norms;
};

inline GuerinCheck guerin_exponent_check(const DiscreteMeasure& mu, const RadialKernel& k, double q,
                                         std::span<const double> x_list,
                                         const QuadratureSpec& quad = {},
                                         const EstimateOptions& opts = {}) {
  detail::require(std::isfinite(q) && q > 1.0, "Guerin check needs q > 1");
  for (std::size_t i = 1; i < x_list.size(); ++i) {
    detail::require(x_list[i] > x_list[i - 1], "x list must be strictly increasing");
  }
  GuerinCheck out;
  std::vector<double> eps_list;
  for (double x : x_list) {
    detail::require(std::isfinite(x) && x > 0.0, "x values must be > 0");
    out.norms.push(x, lq_norm(mu, k, 1.0 / x, q, quad));
    eps_list.push_back(1.0 / x);
  }
  const auto lhs = estimate_orders(out.norms, opts);
  out.lhs = lhs.slope;
  out.lhs_ratio = lhs.upper;
  const auto box = renyi_dimension(PartitionKind::box_sum(), mu, q, eps_list, quad, opts);
  out.d_lower = box.lower;
  out.rhs = (q - 1.0) / q * (mu.dim() - out.d_lower);
  return out;
}

}  // namespace renyi
