#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "graphon_rds/distortion.hpp"
#include "graphon_rds/quadrature.hpp"

using namespace graphon_rds;

namespace {

BlockParams random_params(CounterStream& rng) {
  const double g = 0.02 + 0.96 * rng.uniform();
  return {0.001 + 0.999 * rng.uniform(), 0.001 + 0.999 * rng.uniform(), 0.001 + 0.999 * rng.uniform(), g};
}

// Degree-density CDF at gamma by adaptive quadrature of d(x) = integral of kappa(x, .).
double markov_oracle(const BlockParams& p) {
  const auto k = StandardKernel::block(p);
  auto deg = [&](double x) {
    return integrate([&](double y) { return k(x, y); }, 0.0, p.gamma) +
           integrate([&](double y) { return k(x, y); }, p.gamma, 1.0);
  };
  const double a = integrate(deg, 0.0, p.gamma);
  return a / (a + integrate(deg, p.gamma, 1.0));
}

// Block mass of the leading eigenvector of the 2x2 reproduction matrix.
double branching_oracle(const BlockParams& p) {
  const double m11 = p.alpha * p.gamma, m12 = p.delta * (1 - p.gamma);
  const double m21 = p.delta * p.gamma, m22 = p.beta * (1 - p.gamma);
  const double tr = m11 + m22, det = m11 * m22 - m12 * m21;
  const double rho = 0.5 * (tr + std::sqrt(tr * tr - 4 * det));
  // (m11 - rho) vA + m12 vB = 0
  const double va = m12, vb = rho - m11;
  return p.gamma * va / (p.gamma * va + (1 - p.gamma) * vb);
}

}  // namespace

TEST(TauM, MatchesQuadratureOracle) {
  CounterStream rng(RngKey{101, 0});
  for (int i = 0; i < 100; ++i) {
    const auto p = random_params(rng);
    EXPECT_NEAR(tau_m(p), markov_oracle(p), 1e-9) << p.alpha << ' ' << p.beta << ' ' << p.delta << ' ' << p.gamma;
  }
}

TEST(TauP, MatchesEigenvectorOracle) {
  CounterStream rng(RngKey{102, 0});
  for (int i = 0; i < 100; ++i) {
    const auto p = random_params(rng);
    EXPECT_NEAR(tau_p(p), branching_oracle(p), 1e-9) << p.alpha << ' ' << p.beta << ' ' << p.delta << ' ' << p.gamma;
  }
}

TEST(Tau, ReferenceValues) {
  EXPECT_NEAR(tau_m({0.2, 0.2, 0.005, 0.25}), 0.10591133004926107, 1e-15);
  EXPECT_NEAR(tau_p({0.2, 0.2, 0.005, 0.25}), 0.01233996873929084, 1e-15);
}

TEST(Tau, BlockSwapSymmetry) {
  CounterStream rng(RngKey{103, 0});
  for (int i = 0; i < 50; ++i) {
    const auto p = random_params(rng);
    const BlockParams q{p.beta, p.alpha, p.delta, 1 - p.gamma};
    EXPECT_NEAR(tau_m(p), 1 - tau_m(q), 1e-12);
    EXPECT_NEAR(tau_p(p), 1 - tau_p(q), 1e-12);
  }
}

TEST(Tau, ConstantKernelHasNoDistortion) {
  for (double g : {0.1, 0.33, 0.5, 0.9}) {
    EXPECT_NEAR(tau_m({0.4, 0.4, 0.4, g}), g, 1e-15);
    EXPECT_NEAR(tau_p({0.4, 0.4, 0.4, g}), g, 1e-14);
  }
}

TEST(Tau, Validation) {
  EXPECT_THROW(tau_m({0.2, 0.2, 0.005, 0.0}), DomainError);
  EXPECT_THROW(tau_p({0.2, 0.2, 0.005, 1.0}), DomainError);
  EXPECT_THROW(tau_m({1.2, 0.2, 0.005, 0.5}), DomainError);
}

TEST(Tau, SymmetricFigureFixedPoint) {
  const BlockParams p{0.2, 0.2, 0.005, 0.5};
  EXPECT_NEAR(tau_m(p), 0.5, 1e-12);
  EXPECT_NEAR(tau_p(p), 0.5, 1e-12);
}

TEST(Tau, FigureOrderings) {
  const auto grid = uniform_gamma_grid();
  const auto c2 = distortion_curve(0.2, 0.2, 0.005, grid);
  const auto c3 = distortion_curve(0.2, 0.005, 0.2, grid);
  const auto c4 = distortion_curve(0.2, 0.005, 0.005, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double g = grid[i];
    if (g < 0.5) {
      EXPECT_LT(c2.tau_p[i], c2.tau_m[i]) << g;
      EXPECT_LT(c2.tau_m[i], g) << g;
    } else if (g > 0.5) {
      EXPECT_LT(g, c2.tau_m[i]) << g;
      EXPECT_LT(c2.tau_m[i], c2.tau_p[i]) << g;
    }
    EXPECT_LT(g, c3.tau_p[i]) << g;
    EXPECT_LT(c3.tau_p[i], c3.tau_m[i]) << g;
    EXPECT_LT(g, c4.tau_m[i]) << g;
    EXPECT_LT(c4.tau_m[i], c4.tau_p[i]) << g;
  }
}

TEST(Tau, ContinuousInGamma) {
  const auto grid = uniform_gamma_grid(999);
  const auto c = distortion_curve(0.3, 0.1, 0.02, grid);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    EXPECT_LT(std::abs(c.tau_m[i] - c.tau_m[i - 1]), 0.02);
    EXPECT_LT(std::abs(c.tau_p[i] - c.tau_p[i - 1]), 0.02);
  }
}

TEST(DistortionMaps, PiecewiseLinear) {
  const BlockParams p{0.2, 0.005, 0.2, 0.3};
  const auto m = markov_distortion_map(p);
  EXPECT_NEAR(m(p.gamma), tau_m(p), 1e-15);
  EXPECT_NEAR(m(p.gamma / 2), tau_m(p) / 2, 1e-15);
  EXPECT_NEAR(branching_distortion_map(p)(1.0), 1.0, 1e-15);
  EXPECT_NEAR(m.inverse(tau_m(p)), p.gamma, 1e-12);
}

TEST(DistortionCurveOutput, CsvAndSvg) {
  const auto c = distortion_curve(0.2, 0.2, 0.005, uniform_gamma_grid());
  ASSERT_EQ(c.gammas.size(), 99u);
  EXPECT_EQ(c.gammas.front(), 0.01);
  std::ostringstream csv;
  write_curve_csv(c, csv);
  const auto text = csv.str();
  EXPECT_EQ(text.rfind("gamma,identity,tau_m,tau_p\n", 0), 0u);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 100);
  std::ostringstream svg;
  write_curve_svg(c, svg, "test");
  const auto s = svg.str();
  EXPECT_EQ(s.rfind("<svg", 0), 0u);
  std::size_t lines = 0;
  for (auto pos = s.find("<polyline"); pos != std::string::npos; pos = s.find("<polyline", pos + 1)) ++lines;
  EXPECT_EQ(lines, 3u);
  EXPECT_NE(s.find("Poisson model"), std::string::npos);
  EXPECT_THROW(distortion_curve(0.2, 0.2, 0.005, {0.0}), DomainError);
}

TEST(FigureSets, Parameters) {
  EXPECT_STREQ(kFigureSets[0].name, "fig2");
  EXPECT_EQ(kFigureSets[1].beta, 0.005);
  EXPECT_EQ(kFigureSets[1].delta, 0.2);
  EXPECT_EQ(kFigureSets[2].delta, 0.005);
}
