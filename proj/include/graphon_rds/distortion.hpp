#pragma once

// Distortion maps tau(x) = pi([0,x]) of the two sampling schemes on the
// two-block kernel, in closed form, and the curves tau(gamma) over gamma.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "graphon_rds/errors.hpp"
#include "graphon_rds/kernel.hpp"
#include "graphon_rds/rds.hpp"

namespace graphon_rds {

inline double tau_from_measure(const StationaryMeasure& pi, double x) {
  require_unit(x, "x");
  return pi.cdf(x);
}

/// pi([0,gamma]) for the one-referral chain: the degree-weighted mass of the
/// first block.
inline double tau_m(const BlockParams& p) {
  p.validate_strict();
  const double a = p.alpha, b = p.beta, d = p.delta, g = p.gamma;
  const double num = (a * g - d * g + d) * g;
  const double den = a * g * g - 2.0 * g * g * d + b * g * g + 2.0 * d * g - 2.0 * b * g + b;
  if (!(den > 0.0)) throw DomainError("degenerate denominator in tau_m");
  return num / den;
}

/// pi([0,gamma]) for the Poisson branching process, from the leading
/// eigenvector of the 2x2 reproduction matrix.
inline double tau_p(const BlockParams& p) {
  p.validate_strict();
  const double a = p.alpha, b = p.beta, d = p.delta, g = p.gamma;
  const double radicand = g * g * ((a + b) * (a + b) - 4.0 * d * d) +
                          2.0 * g * (2.0 * d * d - a * b - b * b) + b * b;
  if (radicand < 0.0) throw DomainError("negative radicand in tau_p");
  const double s = std::sqrt(radicand);
  const double num = (a + b) * g - b + s;
  const double den = 2.0 * d + g * (a - 2.0 * d + b) - b + s;
  if (!(den > 0.0)) throw DomainError("degenerate denominator in tau_p");
  return num / den;
}

/// Full tau: densities are constant on each block, so tau is linear on
/// [0,gamma] and on [gamma,1] with knot (gamma, tau(gamma)).
inline DistortionMap markov_distortion_map(const BlockParams& p) {
  return DistortionMap::block(p.gamma, tau_m(p));
}

inline DistortionMap branching_distortion_map(const BlockParams& p) {
  return DistortionMap::block(p.gamma, tau_p(p));
}

struct DistortionCurve {
  double alpha = 0.0;
  double beta = 0.0;
  double delta = 0.0;
  std::vector<double> gammas;
  std::vector<double> identity;
  std::vector<double> tau_m;
  std::vector<double> tau_p;
};

/// gamma_i = i / (points + 1), i = 1..points.
inline std::vector<double> uniform_gamma_grid(std::size_t points = 99) {
  std::vector<double> g(points);
  for (std::size_t i = 0; i < points; ++i) {
    g[i] = static_cast<double>(i + 1) / static_cast<double>(points + 1);
  }
  return g;
}

inline DistortionCurve distortion_curve(double alpha, double beta, double delta,
                                        const std::vector<double>& gammas) {
  DistortionCurve c{alpha, beta, delta, gammas, gammas, {}, {}};
  c.tau_m.reserve(gammas.size());
  c.tau_p.reserve(gammas.size());
  for (double g : gammas) {
    if (!(g > 0.0 && g < 1.0)) throw DomainError("gamma grid must lie inside (0,1)");
    const BlockParams p{alpha, beta, delta, g};
    c.tau_m.push_back(tau_m(p));
    c.tau_p.push_back(tau_p(p));
  }
  return c;
}

/// The three parameter sets (alpha, beta, delta) of the reference figures.
struct FigureSet {
  const char* name;
  double alpha;
  double beta;
  double delta;
  const char* title;
};

inline constexpr FigureSet kFigureSets[] = {
    {"fig2", 0.2, 0.2, 0.005, "Two large groups"},
    {"fig3", 0.2, 0.005, 0.2, "Secondary group well-connected to the primary group"},
    {"fig4", 0.2, 0.005, 0.005, "Secondary group isolated and sparse"},
};

inline void write_curve_csv(const DistortionCurve& c, std::ostream& os) {
  os << "gamma,identity,tau_m,tau_p\n";
  char buf[128];
  for (std::size_t i = 0; i < c.gammas.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", c.gammas[i], c.identity[i],
                  c.tau_m[i], c.tau_p[i]);
    os << buf;
  }
}

/// Self-contained SVG line plot of the three series over the unit square.
inline void write_curve_svg(const DistortionCurve& c, std::ostream& os,
                            const std::string& title = "") {
  constexpr double kSize = 400.0, kLeft = 60.0, kTop = 40.0;
  auto px = [&](double x) { return kLeft + x * kSize; };
  auto py = [&](double y) { return kTop + (1.0 - y) * kSize; };
  auto polyline = [&](const std::vector<double>& ys, const char* colour, const char* dash) {
    os << "  <polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"2\"";
    if (*dash) os << " stroke-dasharray=\"" << dash << '"';
    os << " points=\"";
    char buf[64];
    for (std::size_t i = 0; i < c.gammas.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%s%.3f,%.3f", i ? " " : "", px(c.gammas[i]), py(ys[i]));
      os << buf;
    }
    os << "\"/>\n";
  };
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kSize + 220 << "\" height=\""
     << kSize + 100 << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "  <rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kSize << "\" height=\""
     << kSize << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double v = t / 4.0;
    os << "  <text x=\"" << px(v) << "\" y=\"" << kTop + kSize + 18
       << "\" text-anchor=\"middle\">" << v << "</text>\n";
    os << "  <text x=\"" << kLeft - 8 << "\" y=\"" << py(v) + 4 << "\" text-anchor=\"end\">" << v
       << "</text>\n";
  }
  os << "  <text x=\"" << px(0.5) << "\" y=\"" << kTop + kSize + 40
     << "\" text-anchor=\"middle\">gamma</text>\n";
  os << "  <text x=\"" << kLeft - 40 << "\" y=\"" << py(0.5)
     << "\" text-anchor=\"middle\" transform=\"rotate(-90 " << kLeft - 40 << ' ' << py(0.5)
     << ")\">tau(gamma)</text>\n";
  if (!title.empty()) {
    os << "  <text x=\"" << px(0.5) << "\" y=\"" << kTop - 14 << "\" text-anchor=\"middle\">"
       << title << "</text>\n";
  }
  polyline(c.identity, "#555555", "4 3");
  polyline(c.tau_m, "#1f77b4", "");
  polyline(c.tau_p, "#d62728", "");
  const struct {
    const char* label;
    const char* colour;
    const char* dash;
  } legend[] = {{"unbiased", "#555555", "4 3"},
                {"Markov model", "#1f77b4", ""},
                {"Poisson model", "#d62728", ""}};
  for (int i = 0; i < 3; ++i) {
    const double y = kTop + 20.0 + 20.0 * i;
    os << "  <line x1=\"" << kLeft + kSize + 20 << "\" y1=\"" << y << "\" x2=\""
       << kLeft + kSize + 50 << "\" y2=\"" << y << "\" stroke=\"" << legend[i].colour
       << "\" stroke-width=\"2\"";
    if (*legend[i].dash) os << " stroke-dasharray=\"" << legend[i].dash << '"';
    os << "/>\n";
    os << "  <text x=\"" << kLeft + kSize + 58 << "\" y=\"" << y + 4 << "\">" << legend[i].label
       << "</text>\n";
  }
  os << "</svg>\n";
}

}  // namespace graphon_rds
