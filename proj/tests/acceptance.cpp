// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "renyi/renyi.hpp"
#include "test_support.hpp"

using namespace renyi;
using renyi::fixtures::geometric_scales;
using renyi::fixtures::point_mass;
using renyi::fixtures::random_measure;
using renyi::fixtures::two_atoms;

namespace {

const double kCantorDim = std::log(2.0) / std::log(3.0);

struct Outcome {
  bool passed = true;
  std::string detail;
};

struct Criterion {
  int id;
  const char* title;
  double time_limit_s;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

void note(Outcome& o, bool ok, const std::string& text) {
  o.passed = o.passed && ok;
  if (!o.detail.empty()) o.detail += "; ";
  o.detail += text + (ok ? "" : " [x]");
}

/// The measures, indices and scales shared by the two derivative criteria.
struct DerivativeSuite {
  struct Case {
    DiscreteMeasure mu;
    int dim;
  };
  std::vector<Case> cases;
  std::vector<double> q_values{1.5, 2.0, 3.0};
  std::vector<double> eps;  // 12 points over [1e-3, 1]

  DerivativeSuite() {
    for (std::uint32_t seed = 0; seed < 20; ++seed) {
      const int dim = 1 + static_cast<int>(seed % 2);
      cases.push_back({random_measure(1000 + seed, dim, 10 + 2 * static_cast<int>(seed)), dim});
    }
    for (int i = 0; i < 12; ++i) eps.push_back(std::pow(10.0, -3.0 + 3.0 * i / 11));
  }
};

double fd_log_slope(const std::function<double(double)>& f, double eps) {
  const double step = 1e-3;
  return (std::log(f(eps * std::exp(step))) - std::log(f(eps * std::exp(-step)))) / (2 * step);
}

Outcome gaussian_slope_bounds() {
  DerivativeSuite suite;
  auto g = gaussian();
  double worst_low = INFINITY;
  double worst_high = -INFINITY;
  for (const auto& c : suite.cases) {
    for (double q : suite.q_values) {
      for (double eps : suite.eps) {
        const double s = norm_derivative(c.mu, g, eps, q).loglog_slope;
        worst_low = std::min(worst_low, s + c.dim);
        worst_high = std::max(worst_high, s);
      }
    }
  }
  Outcome o;
  note(o, worst_low >= -1e-8, fmt("min(slope + d) = %.3g", worst_low));
  note(o, worst_high <= 1e-8, fmt("max slope = %.3g", worst_high));
  return o;
}

Outcome derivative_vs_finite_differences() {
  DerivativeSuite suite;
  auto g = gaussian();
  double worst_norm = 0.0;
  double worst_mu = 0.0;
  for (const auto& c : suite.cases) {
    for (double q : suite.q_values) {
      for (double eps : suite.eps) {
        const double analytic = norm_derivative(c.mu, g, eps, q).loglog_slope;
        const double fd = fd_log_slope([&](double e) { return lq_norm(c.mu, g, e, q); }, eps);
        worst_norm = std::max(worst_norm, std::abs(analytic - fd));
      }
    }
    for (double q : {2.0, 3.0}) {
      for (double eps : suite.eps) {
        const double analytic = correlation_log_derivative(c.mu, g, eps, q);
        const double fd = fd_log_slope([&](double e) { return mu_norm(c.mu, g, e, q - 1); }, eps);
        worst_mu = std::max(worst_mu, std::abs(analytic - fd));
      }
    }
  }
  Outcome o;
  note(o, worst_norm <= 1e-4, fmt("Lq residual %.2e", worst_norm));
  note(o, worst_mu <= 1e-4, fmt("mu-norm residual %.2e", worst_mu));
  return o;
}

Outcome quadrature_vs_oracle() {
  auto g = gaussian();
  double worst = 0.0;
  for (std::uint32_t seed = 0; seed < 20; ++seed) {
    auto mu = random_measure(2000 + seed, 1 + static_cast<int>(seed % 2), 10 + 2 * static_cast<int>(seed));
    for (double eps : {0.05, 0.2, 1.0}) {
      const double oracle = lq_norm_oracle_gaussian(mu, eps, 2);
      worst = std::max(worst, std::abs(lq_norm(mu, g, eps, 2.0) / oracle - 1));
    }
  }
  Outcome o;
  note(o, worst <= 1e-6, fmt("max relative error %.2e", worst));
  return o;
}

Outcome dimension_recovery() {
  Outcome o;
  auto g = gaussian();
  auto cantor = make_cantor(10);
  auto cantor_eps = geometric_scales(3.0, 2, 7);
  const double box = renyi_dimension(PartitionKind::box_sum(), cantor, 2.0, cantor_eps).slope;
  note(o, std::abs(box - kCantorDim) <= 1e-3, fmt("cantor box %.6f", box));
  double worst_kind = 0.0;
  for (const auto& name : partition_kind_names()) {
    if (name == "raw") continue;
    const double s = renyi_dimension(PartitionKind::from_name(name, g), cantor, 2.0, cantor_eps).slope;
    worst_kind = std::max(worst_kind, std::abs(s - kCantorDim));
  }
  note(o, worst_kind <= 0.03, fmt("cantor worst kind offset %.4f", worst_kind));

  const double u1 =
      renyi_dimension(PartitionKind::box_sum(), make_uniform_grid(1, 256), 2.0, geometric_scales(2.0, 2, 7)).slope;
  note(o, std::abs(u1 - 1.0) <= 0.05, fmt("uniform 256 %.4f", u1));
  const double u2 =
      renyi_dimension(PartitionKind::box_sum(), make_uniform_grid(2, 64), 2.0, geometric_scales(2.0, 1, 6)).slope;
  note(o, std::abs(u2 - 2.0) <= 0.05, fmt("uniform 64^2 %.4f", u2));

  double worst_point = 0.0;
  for (const auto& name : partition_kind_names()) {
    const double s =
        renyi_dimension(PartitionKind::from_name(name, g), point_mass(), 2.0, geometric_scales(2.0, 4, 10)).slope;
    worst_point = std::max(worst_point, std::abs(s));
  }
  note(o, worst_point <= 0.02, fmt("point mass worst |slope| %.2e", worst_point));
  return o;
}

Outcome guerin_identity() {
  Outcome o;
  auto g = gaussian();
  auto xs = [](double base, int a, int b) {
    std::vector<double> out;
    for (int k = a; k <= b; ++k) out.push_back(std::pow(base, k));
    return out;
  };
  const auto p = guerin_exponent_check(point_mass(), g, 2.0, xs(2.0, 4, 10));
  note(o, std::abs(p.lhs - p.rhs) <= 0.05, fmt("point %.4f", p.lhs) + fmt(" vs %.4f", p.rhs));
  const auto c = guerin_exponent_check(make_cantor(10), g, 2.0, xs(3.0, 2, 7));
  note(o, std::abs(c.lhs - c.rhs) <= 0.05, fmt("cantor %.4f", c.lhs) + fmt(" vs %.4f", c.rhs));
  const auto u = guerin_exponent_check(make_uniform_grid(1, 256), g, 2.0, xs(2.0, 2, 7));
  note(o, std::abs(u.lhs - u.rhs) <= 0.05, fmt("uniform %.4f", u.lhs) + fmt(" vs %.4f", u.rhs));
  return o;
}

Outcome power_regime() {
  Outcome o;
  auto g = gaussian();
  auto m_hat = [&](const DiscreteMeasure& mu, double t, int n1) {
    return run_schedule(mu, g, ScaleSchedule::power(t, 2, n1), 2.0).growth_stat;
  };
  const double p1 = m_hat(point_mass(), 1.0, 64);
  const double p2 = m_hat(point_mass(), 2.0, 64);
  const double p4 = m_hat(point_mass(), 4.0, 64);
  note(o, p1 <= -0.4, fmt("point t=1 %.4f", p1));
  note(o, std::abs(p2) <= 0.1, fmt("point t=2 %.4f", p2));
  note(o, p4 >= 0.8, fmt("point t=4 %.4f", p4));
  // n runs until eps_n approaches the atom spacing 3^-depth.
  const double c2 = m_hat(make_cantor(14), 2.0, 200);
  note(o, std::abs(c2 - (-0.63)) <= 0.15, fmt("cantor t=2 %.4f", c2));
  const double c_star = m_hat(make_cantor(20), 5.419, 36);
  note(o, std::abs(c_star) <= 0.15, fmt("cantor t=5.419 %.4f", c_star));
  return o;
}

Outcome geometric_regime() {
  Outcome o;
  auto g = gaussian();
  const double expected = 0.5 * (1 - kCantorDim) * std::log(2.0);
  const double c = geometric_blowup_stat(
      run_schedule(make_cantor(10), g, ScaleSchedule::geometric(2, 12), 2.0));
  note(o, std::abs(c - expected) <= 0.5 * expected && c > 0.03, fmt("cantor %.4f", c));
  // Scales stay at or above the grid spacing 2^-10.
  const double u = geometric_blowup_stat(
      run_schedule(make_uniform_grid(1, 1024), g, ScaleSchedule::geometric(2, 10), 2.0));
  note(o, std::abs(u) <= 0.05, fmt("uniform %.4f", u));
  return o;
}

Outcome bounded_ratios() {
  Outcome o;
  auto g = gaussian();
  auto cantor = make_cantor(10);
  auto eps = geometric_scales(3.0, 1, 7);
  auto spread = [](const std::vector<double>& v) {
    auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi / *lo;
  };
  const double corr = spread(ratio_correlation_vs_boxes(cantor, g, eps, 2.0));
  const double sum = spread(ratio_kernel_sum_vs_boxes(cantor, g, eps, 2.0));
  note(o, corr <= 10.0, fmt("correlation spread %.3f", corr));
  note(o, sum <= 10.0, fmt("lattice spread %.3f", sum));
  double theta = 0.0;
  for (int j = -20; j <= 20; ++j) theta += std::exp(-2.0 * j * j);
  double worst = 0.0;
  for (double r : ratio_kernel_sum_vs_boxes(point_mass(), g, eps, 2.0)) {
    worst = std::max(worst, std::abs(r - theta));
  }
  note(o, worst <= 1e-9, fmt("theta sum %.9f", theta) + fmt(" max error %.1e", worst));
  return o;
}

Outcome continuity_contrast() {
  Outcome o;
  auto g = gaussian();
  auto mu = two_atoms();
  auto at = [&](const PartitionKind& kind) {
    return [&mu, kind](double e) { return evaluate(kind, mu, e, 2.0); };
  };
  const auto ball = jump_test(at(PartitionKind::ball_correlation()), 0.5, 1.5);
  note(o, ball.max_jump >= 0.4, fmt("ball jump %.3f", ball.max_jump) + fmt(" at %.3f", ball.worst_jump_x));
  const auto corr = jump_test(at(PartitionKind::kernel_correlation(g)), 0.5, 1.5);
  note(o, corr.passed(), fmt("kernel-corr jump %.2e", corr.max_jump));
  const auto sum = jump_test(at(PartitionKind::kernel_lattice_sum(g)), 0.5, 1.5);
  note(o, sum.passed(), fmt("kernel-sum jump %.2e", sum.max_jump));
  return o;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "gaussian slope bounds", 120, gaussian_slope_bounds},
      {2, "analytic vs finite-difference derivatives", 120, derivative_vs_finite_differences},
      {3, "quadrature vs closed-form oracle", 60, quadrature_vs_oracle},
      {4, "dimension recovery", 300, dimension_recovery},
      {5, "order of the filtered norm vs lower dimension", 120, guerin_identity},
      {6, "power schedule regime", 300, power_regime},
      {7, "geometric schedule regime", 120, geometric_regime},
      {8, "bounded partition ratios", 60, bounded_ratios},
      {9, "ball vs kernel continuity", 60, continuity_contrast},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    note(o, secs <= c.time_limit_s, fmt("%.1fs", secs) + fmt(" (limit %.0fs)", c.time_limit_s));
    if (!o.passed) ++failed;
    std::printf("%s  criterion %d: %s | %s\n", o.passed ? "PASS" : "FAIL", c.id, c.title, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
