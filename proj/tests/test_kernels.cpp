#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "renyi/filter.hpp"
#include "renyi/kernel.hpp"

using namespace renyi;

TEST(Gaussian, ProfileValues) {
  auto g = gaussian();
  EXPECT_EQ(g.profile(0.0), 1.0);
  EXPECT_EQ(g.negderiv(0.0), 0.0);
  EXPECT_NEAR(g.negderiv(1.0), 0.735758882342885, 1e-15);
  EXPECT_NEAR(g.profile(2.0), 0.0183156388887342, 1e-16);
  EXPECT_NEAR(g.negderiv_peak(), 2.0 / std::exp(1.0), 1e-15);
}

TEST(SmoothBump, ProfileValues) {
  auto b = smooth_bump(0.5, 1.0);
  EXPECT_EQ(b.profile(0.25), 1.0);
  EXPECT_EQ(b.negderiv(0.25), 0.0);
  EXPECT_EQ(b.profile(1.0), 0.0);
  EXPECT_EQ(b.negderiv(1.0), 0.0);
  EXPECT_EQ(b.profile(3.0), 0.0);
  EXPECT_DOUBLE_EQ(b.profile(0.75), 0.5);
  EXPECT_THROW(smooth_bump(0.5, 0.5), ValidationError);
  EXPECT_THROW(smooth_bump(0.0, 1.0), ValidationError);
}

TEST(SmoothBump, NegDerivMatchesFiniteDifference) {
  auto b = smooth_bump(0.4, 0.9);
  for (double r = 0.41; r < 0.9; r += 0.037) {
    const double step = 1e-6;
    const double dG = (b.profile(r + step) - b.profile(r - step)) / (2 * step);
    EXPECT_NEAR(b.negderiv(r), -r * dG, 1e-8) << r;
  }
}

TEST(Gaussian, NegDerivMatchesFiniteDifference) {
  auto g = gaussian();
  for (double r = 0.05; r < 4.0; r += 0.13) {
    const double step = 1e-6;
    const double dG = (g.profile(r + step) - g.profile(r - step)) / (2 * step);
    EXPECT_NEAR(g.negderiv(r), -r * dG, 1e-8) << r;
  }
}

TEST(Scaled, Examples) {
  auto g = gaussian();
  const std::vector<double> origin{0.0};
  const std::vector<double> two{2.0};
  const std::vector<double> unit2{1.0, 0.0};
  EXPECT_EQ(eval_scaled(g, 1.0, origin), 1.0);
  EXPECT_NEAR(eval_scaled(g, 2.0, two), 0.5 * std::exp(-1.0), 1e-16);
  EXPECT_NEAR(eval_scaled_negderiv(g, 1.0, unit2), 2.0 * std::exp(-1.0), 1e-15);
}

TEST(Scaled, ScalingIdentity) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_real_distribution<double> le(-4.0, 1.0);
  for (const auto& k : {gaussian(), smooth_bump(0.3, 1.7)}) {
    for (int trial = 0; trial < 200; ++trial) {
      const int d = 1 + trial % 3;
      const double eps = std::exp(le(rng));
      std::vector<double> x(d);
      std::vector<double> x_unit(d);
      for (int a = 0; a < d; ++a) {
        x[a] = u(rng) * eps;
        x_unit[a] = x[a] / eps;
      }
      const double lhs = eval_scaled(k, eps, x);
      const double rhs = std::pow(eps, -d) * eval_scaled(k, 1.0, x_unit);
      EXPECT_NEAR(lhs, rhs, 1e-14 * std::abs(rhs) + 1e-300);
    }
  }
}

TEST(Scaled, RadialDerivativeIdentity) {
  // d/deps g_eps(x) = eps^-1 (h_eps(x) - d g_eps(x))
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  std::uniform_real_distribution<double> le(-3.0, 1.0);
  for (const auto& k : {gaussian(), smooth_bump(0.3, 1.7)}) {
    for (int trial = 0; trial < 200; ++trial) {
      const int d = 1 + trial % 3;
      const double eps = std::exp(le(rng));
      std::vector<double> x(d);
      for (auto& c : x) c = u(rng) * eps;
      const double step = 1e-5 * eps;
      const double fd = (eval_scaled(k, eps + step, x) - eval_scaled(k, eps - step, x)) / (2 * step);
      const double analytic = (eval_scaled_negderiv(k, eps, x) - d * eval_scaled(k, eps, x)) / eps;
      EXPECT_NEAR(fd, analytic, 1e-6 * std::abs(analytic) + 1e-9 * std::pow(eps, -d - 1));
    }
  }
}

TEST(NegDeriv, NonNegativeOnLogGrid) {
  for (const auto& k : {gaussian(), smooth_bump(0.5, 1.0), smooth_bump(0.01, 50.0)}) {
    for (double lr = -6.0; lr <= 3.0; lr += 0.01) {
      EXPECT_GE(k.negderiv(std::pow(10.0, lr)), 0.0);
    }
  }
}

TEST(Normalization, IntegralIndependentOfScale) {
  // Midpoint rule of g_eps over a wide interval, d = 1 and d = 2.
  for (const auto& k : {gaussian(), smooth_bump(0.4, 1.2)}) {
    for (int d : {1, 2}) {
      std::vector<double> integrals;
      for (double eps : {0.3, 2.0}) {
        const double reach = 8.0 * eps;
        const int n = 1600;
        const double h = 2 * reach / n;
        double total = 0.0;
        std::vector<double> x(d);
        if (d == 1) {
          for (int i = 0; i < n; ++i) {
            x[0] = -reach + (i + 0.5) * h;
            total += eval_scaled(k, eps, x) * h;
          }
        } else {
          for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
              x[0] = -reach + (i + 0.5) * h;
              x[1] = -reach + (j + 0.5) * h;
              total += eval_scaled(k, eps, x) * h * h;
            }
          }
        }
        integrals.push_back(total);
      }
      EXPECT_NEAR(integrals[0], integrals[1], 1e-8 * integrals[1]) << k.describe() << " d=" << d;
      if (k.is_gaussian()) {
        EXPECT_NEAR(integrals[0], std::pow(M_PI, d / 2.0), 1e-10);
      }
    }
  }
}

TEST(Truncation, GaussianRadiusSatisfiesPostcondition) {
  auto g = gaussian();
  const double ref = std::max(g.peak(), g.negderiv_peak());
  for (double tau : {1e-3, 1e-6, 2 * std::exp(1.0) * std::exp(-9.0), 1e-12, 1e-15}) {
    const double rho = g.unit_truncation_radius(tau);
    for (double r = rho; r < rho + 5; r += 0.01) {
      EXPECT_LE(std::max(g.profile(r), g.negderiv(r)), tau * ref * (1 + 1e-12));
    }
    // Minimality to bisection accuracy.
    const double r = rho * (1 - 1e-6);
    EXPECT_GT(std::max(g.profile(r), g.negderiv(r)), tau * ref * (1 - 1e-4));
  }
}

TEST(Truncation, GaussianWorkedExample) {
  // tau = 2e * e^-9: the cutoff relative to max(G(0), sup H) = 1 is 2e^-8,
  // and both G and H must fall below it.
  const double rho = truncation_radius(gaussian(), 1.0, 2 * std::exp(1.0) * std::exp(-9.0));
  EXPECT_GT(rho, 3.0);
  EXPECT_LT(rho, 3.3);
  const double cut = 2 * std::exp(1.0) * std::exp(-9.0);
  EXPECT_LE(gaussian().profile(rho), cut);
  EXPECT_LE(gaussian().negderiv(rho), cut * (1 + 1e-12));
}

TEST(Truncation, BumpUsesSupportAndScalesLinearly) {
  auto b = smooth_bump(0.5, 1.0);
  EXPECT_EQ(truncation_radius(b, 1.0, 1e-3), 1.0);
  EXPECT_EQ(truncation_radius(b, 0.2, 1e-12), 0.2);
  auto g = gaussian();
  EXPECT_NEAR(truncation_radius(g, 0.1, 1e-9), 0.1 * truncation_radius(g, 1.0, 1e-9), 1e-15);
  EXPECT_THROW(truncation_radius(g, 1.0, 0.0), ValidationError);
  EXPECT_THROW(truncation_radius(g, 1.0, 1.0), ValidationError);
  EXPECT_THROW(truncation_radius(g, 0.0, 1e-3), ValidationError);
}
