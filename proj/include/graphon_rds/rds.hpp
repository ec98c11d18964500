#pragma once

// Respondent-driven sampling: the one-referral Markov chain and the Poisson
// branching process on the type space [0,1], their invariant measures, and
// the trace file that hands sampled labels and referral edges to graph
// completion.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <queue>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "graphon_rds/errors.hpp"
#include "graphon_rds/graph.hpp"
#include "graphon_rds/kernel.hpp"
#include "graphon_rds/kernel_io.hpp"
#include "graphon_rds/quadrature.hpp"
#include "graphon_rds/rng.hpp"

namespace graphon_rds {

enum class SamplerKind { kMarkov, kBranching, kIidUniform };

inline const char* to_string(SamplerKind s) {
  switch (s) {
    case SamplerKind::kMarkov: return "markov";
    case SamplerKind::kBranching: return "poisson";
    case SamplerKind::kIidUniform: return "iid-uniform";
  }
  return "?";
}

enum class BranchingOutcome { kReachedTarget, kExtinct, kHorizon };

inline const char* to_string(BranchingOutcome o) {
  switch (o) {
    case BranchingOutcome::kReachedTarget: return "reached_target";
    case BranchingOutcome::kExtinct: return "extinct";
    case BranchingOutcome::kHorizon: return "horizon";
  }
  return "?";
}

struct TraceMeta {
  SamplerKind sampler = SamplerKind::kMarkov;
  std::uint64_t kernel_hash = 0;
  RngKey key{};
  std::vector<std::pair<std::string, std::string>> params;
  std::optional<BranchingOutcome> outcome;
  std::size_t discarded_runs = 0;
  /// Set when a branching trace was obtained by restarting until target_n;
  /// a finite-n surrogate for conditioning on survival.
  bool conditioned = false;
};

/// Sampled labels X_1..X_n with the referral graph H_n.
/// parents[i] is the 0-based index of the recruiter of i, or -1 for a root.
struct SampleTrace {
  std::vector<double> labels;
  std::vector<std::int64_t> parents;
  SeedGraph seed_graph;
  TraceMeta meta;

  [[nodiscard]] std::size_t size() const { return labels.size(); }
};

inline SeedGraph seed_graph_from_parents(std::span<const std::int64_t> parents) {
  SeedGraph h{parents.size(), {}};
  for (std::size_t i = 0; i < parents.size(); ++i) {
    if (parents[i] < 0) continue;
    if (static_cast<std::size_t>(parents[i]) >= i) throw FormatError("parent must precede child");
    h.edges.emplace_back(static_cast<Vertex>(parents[i]), static_cast<Vertex>(i));
  }
  return h;
}

/// Where the first label comes from: a fixed type, or uniform on [0,1].
struct InitialSpec {
  std::optional<double> fixed;
};

// --- sampling from K(x, dy) = kernel(x,y) dy / d(x) ----------------------------

enum class StepMethod { kAuto, kRejection };

/// Draws from the Markov kernel K(x, dy) = kernel(x, y) dy / d(x). Step-form
/// kernels pick a cell with probability value * width / d(x) and then a
/// uniform point in it; other kernels use rejection from Uniform[0,1] with
/// envelope sup_bound.
class MarkovSampler {
 public:
  static constexpr std::size_t kRejectionCheckInterval = 1'000'000;

  explicit MarkovSampler(StandardKernel k, StepMethod method = StepMethod::kAuto)
      : kernel_(std::move(k)) {
    if (method == StepMethod::kAuto) steps_ = step_form(kernel_);
    if (steps_) {
      const std::size_t m = steps_->cells();
      cumulative_.assign(m * m, 0.0);
      degree_.assign(m, 0.0);
      for (std::size_t i = 0; i < m; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
          acc += steps_->value(i, j) * steps_->width(j);
          cumulative_[i * m + j] = acc;
        }
        degree_[i] = acc;
      }
    }
  }

  [[nodiscard]] const StandardKernel& kernel() const { return kernel_; }

  [[nodiscard]] double degree(double x) const {
    if (steps_) return degree_[steps_->cell(x)];
    return degree_function(kernel_, x);
  }

  double step(double x, CounterStream& rng) const {
    require_unit(x, "x");
    if (steps_) {
      const std::size_t m = steps_->cells();
      const std::size_t i = steps_->cell(x);
      if (!(degree_[i] > 0.0)) throw PositivityError("zero degree at x = " + std::to_string(x));
      const double target = rng.uniform() * degree_[i];
      const double* row = &cumulative_[i * m];
      std::size_t j = static_cast<std::size_t>(std::upper_bound(row, row + m, target) - row);
      j = std::min(j, m - 1);
      while (steps_->width(j) <= 0.0 && j > 0) --j;
      return steps_->breaks[j] + rng.uniform_pos() * steps_->width(j);
    }
    const double sup = kernel_.sup_bound();
    for (std::size_t attempt = 1;; ++attempt) {
      const double y = rng.uniform();
      if (rng.uniform() * sup < kernel_.eval(x, y)) return y;
      if (attempt % kRejectionCheckInterval == 0 && !(degree_function(kernel_, x) > 0.0)) {
        throw PositivityError("zero degree at x = " + std::to_string(x));
      }
    }
  }

 private:
  StandardKernel kernel_;
  std::optional<StepForm> steps_;
  std::vector<double> cumulative_;
  std::vector<double> degree_;
};

inline double markov_step(const StandardKernel& k, double x, CounterStream& rng,
                          StepMethod method = StepMethod::kAuto) {
  return MarkovSampler(k, method).step(x, rng);
}

namespace detail {
inline double initial_label(const InitialSpec& init, CounterStream& rng) {
  if (init.fixed) {
    require_unit(*init.fixed, "initial label");
    return *init.fixed;
  }
  return rng.uniform();
}
}  // namespace detail

/// One-referral chain X_1, ..., X_n with X_{i+1} ~ K(X_i, .), seed graph the
/// path 1-2-...-n. `burn_in` steps are discarded before X_1.
inline SampleTrace sample_markov_chain(const StandardKernel& k, std::size_t n,
                                       const InitialSpec& init, const RngKey& key,
                                       std::size_t burn_in = 0) {
  if (n < 1) throw PreconditionError("chain length must be at least 1");
  const MarkovSampler sampler(k);
  if (step_form(k) && !check_positive(k)) throw PositivityError("kernel is not positive");
  CounterStream rng(key.child("markov"));
  double x = detail::initial_label(init, rng);
  for (std::size_t b = 0; b < burn_in; ++b) x = sampler.step(x, rng);

  SampleTrace t;
  t.labels.reserve(n);
  t.parents.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) x = sampler.step(x, rng);
    t.labels.push_back(x);
    t.parents.push_back(static_cast<std::int64_t>(i) - 1);
  }
  t.seed_graph = SeedGraph::path(n);
  t.meta.sampler = SamplerKind::kMarkov;
  t.meta.kernel_hash = kernel_hash(k);
  t.meta.key = key;
  t.meta.params = {{"n", std::to_string(n)}, {"burn_in", std::to_string(burn_in)}};
  if (init.fixed) t.meta.params.emplace_back("x0", std::to_string(*init.fixed));
  return t;
}

/// i.i.d. uniform labels with an empty seed graph.
inline SampleTrace sample_iid_uniform(std::size_t n, const RngKey& key) {
  SampleTrace t;
  t.labels = uniform_labels(n, key);
  t.parents.assign(n, -1);
  t.seed_graph = SeedGraph::empty(n);
  t.meta.sampler = SamplerKind::kIidUniform;
  t.meta.key = key;
  t.meta.params = {{"n", std::to_string(n)}};
  return t;
}

// --- invariant measures -------------------------------------------------------

/// Non-atomic probability measure on [0,1] with density and CDF tau(x) = pi([0,x]).
class StationaryMeasure {
 public:
  StationaryMeasure(std::function<double(double)> density, DistortionMap cdf,
                    double normalization_error)
      : density_(std::move(density)), cdf_(std::move(cdf)), norm_error_(normalization_error) {}

  /// Piecewise-constant density dens[i] on (breaks[i], breaks[i+1]].
  static StationaryMeasure piecewise_constant(std::vector<double> breaks, std::vector<double> dens) {
    const std::size_t m = dens.size();
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) total += dens[i] * (breaks[i + 1] - breaks[i]);
    if (!(total > 0.0)) throw PositivityError("stationary density has zero mass");
    for (auto& d : dens) d /= total;
    // CDF knots at the positive-width cell boundaries.
    std::vector<double> xs{0.0}, ys{0.0};
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double w = breaks[i + 1] - breaks[i];
      if (w <= 0.0) continue;
      acc += dens[i] * w;
      xs.push_back(breaks[i + 1]);
      ys.push_back(std::min(acc, 1.0));
    }
    xs.back() = 1.0;
    ys.back() = 1.0;
    double norm_error = std::abs(acc - 1.0);
    DistortionMap cdf = xs.size() == 3 ? DistortionMap::block(xs[1], ys[1])
                                       : DistortionMap::from_knots(std::move(xs), std::move(ys));
    StepForm cells{std::move(breaks), {}};
    auto density = [cells, dens](double x) { return dens[cells.cell(x)]; };
    return StationaryMeasure(std::move(density), std::move(cdf), norm_error);
  }

  [[nodiscard]] double density(double x) const {
    require_unit(x, "x");
    return density_(x);
  }
  [[nodiscard]] double cdf(double x) const { return cdf_(x); }
  [[nodiscard]] const DistortionMap& cdf_map() const { return cdf_; }
  /// |integral of density - 1| as computed when the measure was built.
  [[nodiscard]] double normalization_error() const { return norm_error_; }

 private:
  std::function<double(double)> density_;
  DistortionMap cdf_;
  double norm_error_;
};

inline constexpr std::size_t kStationaryGridPoints = DistortionMap::kDefaultGridPoints;

/// pi(dx)/dx = d(x) / integral of d. Exact for step-form kernels; otherwise
/// degrees are computed by quadrature on a 4097-point grid and integrated with
/// the trapezoid rule (the certificate compares against Simpson's rule).
inline StationaryMeasure markov_stationary(const StandardKernel& k) {
  if (auto s = step_form(k)) {
    std::vector<double> dens(s->cells());
    for (std::size_t i = 0; i < s->cells(); ++i) {
      for (std::size_t j = 0; j < s->cells(); ++j) dens[i] += s->value(i, j) * s->width(j);
    }
    return StationaryMeasure::piecewise_constant(std::move(s->breaks), std::move(dens));
  }
  const std::size_t m = kStationaryGridPoints;
  const double h = 1.0 / static_cast<double>(m - 1);
  std::vector<double> deg(m);
  for (std::size_t i = 0; i < m; ++i) deg[i] = degree_function(k, static_cast<double>(i) * h);
  std::vector<double> cum(m, 0.0);
  for (std::size_t i = 1; i < m; ++i) cum[i] = cum[i - 1] + 0.5 * h * (deg[i - 1] + deg[i]);
  const double total = cum.back();
  if (!(total > 0.0)) throw PositivityError("kernel has zero total degree");
  double simpson = deg.front() + deg.back();
  for (std::size_t i = 1; i + 1 < m; ++i) simpson += (i % 2 ? 4.0 : 2.0) * deg[i];
  simpson *= h / 3.0;
  for (auto& c : cum) c /= total;
  cum.back() = 1.0;
  auto density = [deg, total, h, m](double x) {
    const double pos = x / h;
    const auto i = std::min(static_cast<std::size_t>(pos), m - 2);
    const double t = pos - static_cast<double>(i);
    return ((1.0 - t) * deg[i] + t * deg[i + 1]) / total;
  };
  return StationaryMeasure(std::move(density), DistortionMap::from_grid_values(std::move(cum)),
                           std::abs(simpson / total - 1.0));
}

struct BranchingStationary {
  double rho = 0.0;         // leading eigenvalue of the reproduction operator
  double malthusian = 0.0;  // alpha* = lambda * rho - 1
  StationaryMeasure pi;
  /// max over cells of |nu - (lambda / (1 + alpha*)) * integral kernel(., u) nu(u) du|.
  double residual = 0.0;
  std::size_t iterations = 0;
};

namespace detail {

// Leading eigenpair of an entrywise-positive matrix by power iteration.
// Stops when the estimated distance to the fixed point, diff * r / (1 - r)
// with r the observed contraction ratio, falls below `tolerance`.
inline std::pair<double, std::vector<double>> power_iteration(const std::vector<double>& a,
                                                              std::size_t m, double tolerance,
                                                              std::size_t& iterations) {
  std::vector<double> v(m, 1.0 / static_cast<double>(m)), next(m);
  double rho = 0.0;
  double prev_diff = std::numeric_limits<double>::infinity();
  constexpr std::size_t kMaxIterations = 10'000'000;
  for (iterations = 1; iterations <= kMaxIterations; ++iterations) {
    double norm = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < m; ++j) acc += a[i * m + j] * v[j];
      next[i] = acc;
      norm += acc;
    }
    if (!(norm > 0.0)) throw PositivityError("reproduction operator is zero");
    double diff = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      next[i] /= norm;
      diff = std::max(diff, std::abs(next[i] - v[i]));
    }
    rho = norm;  // v has unit 1-norm, so ||A v||_1 -> rho
    std::swap(v, next);
    const double ratio = prev_diff > 0.0 && std::isfinite(prev_diff) ? std::min(diff / prev_diff, 0.999999) : 0.5;
    if (diff == 0.0 || diff * ratio / (1.0 - ratio) < tolerance) break;
    prev_diff = diff;
  }
  return {rho, v};
}

inline BranchingStationary solve_branching(const StepForm& s, double lambda) {
  if (!(lambda > 0.0)) throw PreconditionError("lambda must be positive");
  const std::size_t m = s.cells();
  // (M nu)_i = sum_j value(i,j) width(j) nu_j acting on cell densities.
  std::vector<double> a(m * m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) a[i * m + j] = s.value(i, j) * s.width(j);
  }
  std::size_t iterations = 0;
  auto [rho, v] = power_iteration(a, m, 1e-13, iterations);
  double mass = 0.0;
  for (std::size_t i = 0; i < m; ++i) mass += v[i] * s.width(i);
  for (auto& x : v) x /= mass;
  double residual = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (s.width(i) <= 0.0) continue;
    double acc = 0.0;
    for (std::size_t j = 0; j < m; ++j) acc += a[i * m + j] * v[j];
    residual = std::max(residual, std::abs(v[i] - acc / rho));
  }
  return {rho, lambda * rho - 1.0, StationaryMeasure::piecewise_constant(s.breaks, v), residual,
          iterations};
}

}  // namespace detail

/// Invariant measure of the branching process for a two-block kernel: the
/// normalised leading eigenvector of [[a g, d (1-g)], [d g, b (1-g)]] on the
/// per-block densities. Independent of lambda; alpha* = lambda * rho - 1.
inline BranchingStationary branching_stationary_block(const BlockParams& p, double lambda) {
  p.validate();
  if (!(p.alpha > 0.0 && p.beta > 0.0 && p.delta > 0.0)) {
    throw PreconditionError("branching invariant measure needs positive block values");
  }
  return detail::solve_branching(StepForm{{0.0, p.gamma, 1.0}, {p.alpha, p.delta, p.delta, p.beta}},
                                 lambda);
}

inline constexpr std::size_t kBranchingGridCells = 1024;

/// General kernels: exact on step-form cells; otherwise a 1024-cell
/// piecewise-constant discretisation using cell-midpoint values, which is
/// approximate (see `residual` and the discretisation error).
inline BranchingStationary branching_stationary(const StandardKernel& k, double lambda,
                                                std::size_t cells = kBranchingGridCells) {
  if (auto s = step_form(k)) return detail::solve_branching(*s, lambda);
  StepForm grid;
  grid.breaks.resize(cells + 1);
  for (std::size_t i = 0; i <= cells; ++i) {
    grid.breaks[i] = static_cast<double>(i) / static_cast<double>(cells);
  }
  grid.values.resize(cells * cells);
  for (std::size_t i = 0; i < cells; ++i) {
    for (std::size_t j = 0; j < cells; ++j) {
      grid.values[i * cells + j] = k.eval((static_cast<double>(i) + 0.5) / static_cast<double>(cells),
                                          (static_cast<double>(j) + 0.5) / static_cast<double>(cells));
    }
  }
  return detail::solve_branching(grid, lambda);
}

// --- branching sampler --------------------------------------------------------

struct BranchingOptions {
  double lambda = 1.0;
  std::size_t target_n = 1000;
  double horizon = std::numeric_limits<double>::infinity();
  InitialSpec root{};
};

namespace detail {
struct Particle {
  double type;
  double birth;
  double death;
  std::int64_t parent;
  double birth_rate;  // lambda * d(type)
};

struct BirthEvent {
  double time;
  std::size_t parent;
  bool operator>(const BirthEvent& o) const {
    return time != o.time ? time > o.time : parent > o.parent;
  }
};
}  // namespace detail

/// Continuous-time Poisson branching process: a type-x particle lives Exp(1)
/// and gives birth at rate lambda * d(x), each child's type drawn from
/// K(x, .). Runs until target_n particles have been born, the horizon passes
/// or the population dies out. Labels are types in birth order and the seed
/// graph is the parent-child forest.
inline SampleTrace sample_branching(const StandardKernel& k, const BranchingOptions& opt,
                                    const RngKey& key) {
  if (!(opt.lambda > 0.0)) throw PreconditionError("lambda must be positive");
  if (opt.target_n < 1) throw PreconditionError("target_n must be at least 1");
  const MarkovSampler sampler(k);
  CounterStream rng(key.child("branching"));

  std::vector<detail::Particle> particles;
  std::priority_queue<detail::BirthEvent, std::vector<detail::BirthEvent>, std::greater<>> events;
  auto spawn = [&](double type, double birth, std::int64_t parent) {
    const double death = birth + rng.exponential();
    const double rate = opt.lambda * sampler.degree(type);
    particles.push_back({type, birth, death, parent, rate});
    const std::size_t id = particles.size() - 1;
    if (rate > 0.0) {
      const double next = birth + rng.exponential(rate);
      if (next < death) events.push({next, id});
    }
  };

  spawn(detail::initial_label(opt.root, rng), 0.0, -1);
  BranchingOutcome outcome = BranchingOutcome::kReachedTarget;
  double clock = 0.0;
  while (particles.size() < opt.target_n) {
    if (events.empty()) {
      outcome = BranchingOutcome::kExtinct;
      break;
    }
    const auto ev = events.top();
    if (ev.time >= opt.horizon) {
      outcome = BranchingOutcome::kHorizon;
      break;
    }
    events.pop();
    clock = ev.time;
    const auto& parent = particles[ev.parent];
    const double child_type = sampler.step(parent.type, rng);
    const double parent_rate = parent.birth_rate;
    const double parent_death = parent.death;
    spawn(child_type, ev.time, static_cast<std::int64_t>(ev.parent));
    const double next = ev.time + rng.exponential(parent_rate);
    if (next < parent_death) events.push({next, ev.parent});
  }

  SampleTrace t;
  t.labels.reserve(particles.size());
  t.parents.reserve(particles.size());
  for (const auto& p : particles) {
    t.labels.push_back(p.type);
    t.parents.push_back(p.parent);
  }
  t.seed_graph = seed_graph_from_parents(t.parents);
  t.meta.sampler = SamplerKind::kBranching;
  t.meta.kernel_hash = kernel_hash(k);
  t.meta.key = key;
  t.meta.outcome = outcome;
  std::ostringstream lam;
  lam << std::setprecision(17) << opt.lambda;
  t.meta.params = {{"lambda", lam.str()},
                   {"target_n", std::to_string(opt.target_n)},
                   {"final_time", std::to_string(clock)}};
  if (std::isfinite(opt.horizon)) t.meta.params.emplace_back("horizon", std::to_string(opt.horizon));
  return t;
}

/// Restarts sample_branching with streams key.child("attempt").child(a) until
/// a run reaches target_n; at most `max_restarts` runs are discarded.
inline SampleTrace sample_branching_conditioned(const StandardKernel& k, const BranchingOptions& opt,
                                                const RngKey& key, std::size_t max_restarts = 100) {
  const RngKey attempts = key.child("attempt");
  for (std::size_t a = 0; a <= max_restarts; ++a) {
    auto t = sample_branching(k, opt, attempts.child(a));
    if (t.meta.outcome == BranchingOutcome::kReachedTarget) {
      t.meta.discarded_runs = a;
      t.meta.conditioned = true;
      t.meta.key = key;
      return t;
    }
  }
  throw RestartBudgetError("no branching run reached target_n within " +
                           std::to_string(max_restarts) + " restarts");
}

/// (1/n) * sum f(X_i).
template <typename F>
double ergodic_average(const SampleTrace& trace, F&& f) {
  if (trace.labels.empty()) throw PreconditionError("ergodic average of an empty trace");
  double s = 0.0;
  for (double x : trace.labels) s += f(x);
  return s / static_cast<double>(trace.labels.size());
}

// --- trace files --------------------------------------------------------------

/// Header lines "# key value", then "index,label,parent_index" rows with
/// 1-based indices (parent -1 for roots).
inline void write_trace(const SampleTrace& t, std::ostream& os) {
  os << "# graphon-rds trace v1\n";
  os << "# sampler " << to_string(t.meta.sampler) << '\n';
  os << "# kernel_hash " << std::hex << std::setw(16) << std::setfill('0') << t.meta.kernel_hash
     << std::dec << std::setfill(' ') << '\n';
  os << "# seed " << t.meta.key.seed << '\n';
  os << "# stream " << t.meta.key.stream << '\n';
  for (const auto& [k, v] : t.meta.params) os << "# param " << k << '=' << v << '\n';
  if (t.meta.outcome) os << "# outcome " << to_string(*t.meta.outcome) << '\n';
  os << "# discarded_runs " << t.meta.discarded_runs << '\n';
  os << "# conditioned " << (t.meta.conditioned ? 1 : 0) << '\n';
  os << "index,label,parent_index\n";
  char buf[64];
  for (std::size_t i = 0; i < t.labels.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", t.labels[i]);
    os << i + 1 << ',' << buf << ',' << (t.parents[i] < 0 ? -1 : t.parents[i] + 1) << '\n';
  }
}

inline SampleTrace read_trace(std::istream& is) {
  SampleTrace t;
  std::string line;
  bool header_done = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line.starts_with('#')) {
      std::istringstream ls(line.substr(1));
      std::string key;
      ls >> key;
      std::string value;
      std::getline(ls >> std::ws, value);
      if (key == "sampler") {
        if (value == "markov") t.meta.sampler = SamplerKind::kMarkov;
        else if (value == "poisson") t.meta.sampler = SamplerKind::kBranching;
        else if (value == "iid-uniform") t.meta.sampler = SamplerKind::kIidUniform;
        else throw FormatError("unknown sampler \"" + value + "\"");
      } else if (key == "kernel_hash") {
        t.meta.kernel_hash = std::stoull(value, nullptr, 16);
      } else if (key == "seed") {
        t.meta.key.seed = std::stoull(value);
      } else if (key == "stream") {
        t.meta.key.stream = std::stoull(value);
      } else if (key == "param") {
        const auto eq = value.find('=');
        if (eq == std::string::npos) throw FormatError("trace param needs key=value");
        t.meta.params.emplace_back(value.substr(0, eq), value.substr(eq + 1));
      } else if (key == "outcome") {
        if (value == "reached_target") t.meta.outcome = BranchingOutcome::kReachedTarget;
        else if (value == "extinct") t.meta.outcome = BranchingOutcome::kExtinct;
        else if (value == "horizon") t.meta.outcome = BranchingOutcome::kHorizon;
      } else if (key == "discarded_runs") {
        t.meta.discarded_runs = std::stoull(value);
      } else if (key == "conditioned") {
        t.meta.conditioned = value == "1";
      }
      continue;
    }
    if (!header_done) {
      if (line != "index,label,parent_index") throw FormatError("trace is missing its column header");
      header_done = true;
      continue;
    }
    std::istringstream ls(line);
    std::string a, b, c;
    if (!std::getline(ls, a, ',') || !std::getline(ls, b, ',') || !std::getline(ls, c)) {
      throw FormatError("malformed trace row: " + line);
    }
    const auto index = std::stoll(a);
    if (index != static_cast<long long>(t.labels.size()) + 1) throw FormatError("trace rows out of order");
    const double label = std::stod(b);
    require_unit(label, "trace label");
    const auto parent = std::stoll(c);
    t.labels.push_back(label);
    t.parents.push_back(parent < 0 ? -1 : parent - 1);
  }
  if (!header_done) throw FormatError("trace is missing its column header");
  t.seed_graph = seed_graph_from_parents(t.parents);
  return t;
}

}  // namespace graphon_rds
