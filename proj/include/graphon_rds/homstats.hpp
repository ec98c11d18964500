#pragma once

// Subgraph statistics: injective homomorphism densities of motifs in graphs
// and kernels, the label U-statistic mu_F, the subgraph distance, and the
// concentration bound for G(x, H, kernel).

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "graphon_rds/errors.hpp"
#include "graphon_rds/graph.hpp"
#include "graphon_rds/kernel.hpp"
#include "graphon_rds/motif.hpp"
#include "graphon_rds/parallel.hpp"
#include "graphon_rds/rng.hpp"

namespace graphon_rds {

inline constexpr double kDefaultExactBudget = 1e9;
inline constexpr std::size_t kDefaultMcSamples = 1'000'000;

/// A value with its Monte Carlo standard error (0 for exact values).
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// (n)_k = n (n-1) ... (n-k+1).
inline long double falling_factorial(std::uint64_t n, std::size_t k) {
  long double r = 1.0L;
  for (std::size_t i = 0; i < k; ++i) r *= static_cast<long double>(n - i);
  return r;
}

namespace detail {

// Matching order for backtracking: each vertex after the first is chosen to
// maximise its edges to already placed vertices.
struct MatchPlan {
  std::vector<int> order;
  std::vector<std::vector<int>> back;  // back[j]: positions < j adjacent to order[j]
};

inline MatchPlan plan_motif(const Motif& f) {
  const int k = static_cast<int>(f.k());
  std::vector<int> degree(static_cast<std::size_t>(k), 0);
  for (auto [a, b] : f.edges()) {
    ++degree[static_cast<std::size_t>(a)];
    ++degree[static_cast<std::size_t>(b)];
  }
  MatchPlan plan;
  std::vector<bool> placed(static_cast<std::size_t>(k), false);
  for (int step = 0; step < k; ++step) {
    int best = -1;
    int best_links = -1;
    for (int v = 0; v < k; ++v) {
      if (placed[static_cast<std::size_t>(v)]) continue;
      int links = 0;
      for (int u : plan.order) links += f.adjacent(u, v) ? 1 : 0;
      if (links > best_links ||
          (links == best_links && degree[static_cast<std::size_t>(v)] > degree[static_cast<std::size_t>(best)])) {
        best = v;
        best_links = links;
      }
    }
    placed[static_cast<std::size_t>(best)] = true;
    std::vector<int> back;
    for (int pos = 0; pos < static_cast<int>(plan.order.size()); ++pos) {
      if (f.adjacent(plan.order[static_cast<std::size_t>(pos)], best)) back.push_back(pos);
    }
    plan.order.push_back(best);
    plan.back.push_back(std::move(back));
  }
  return plan;
}

}  // namespace detail

/// Predicted backtracking nodes above the (popcount) leaf level, assuming
/// each constrained candidate set has size n * p^(back edges).
inline double exact_count_work(const Motif& f, const DenseGraph& g) {
  const double n = static_cast<double>(g.n());
  const double p = g.n() > 1 ? static_cast<double>(g.edge_count()) / static_cast<double>(pair_count(g.n())) : 0.0;
  const auto plan = detail::plan_motif(f);
  double nodes = 1.0;
  double total = 0.0;
  for (std::size_t j = 0; j + 1 < f.k(); ++j) {
    nodes *= std::max(1.0, n * std::pow(p, static_cast<double>(plan.back[j].size())));
    total += nodes;
  }
  return total;
}

/// |inj(F, G)|: injective maps V(F) -> V(G) sending edges to edges.
inline std::uint64_t count_injective(const Motif& f, const DenseGraph& g,
                                     double budget = kDefaultExactBudget) {
  const std::size_t n = g.n();
  const std::size_t k = f.k();
  if (n < k) throw DomainError("graph has fewer vertices than the motif");
  const double work = exact_count_work(f, g);
  if (work > budget) {
    throw ComplexityError("exact count needs ~" + std::to_string(work) +
                          " node visits (budget " + std::to_string(budget) + ")");
  }
  const auto plan = detail::plan_motif(f);
  const std::size_t words = g.words_per_row();
  std::vector<std::uint64_t> all(words, ~std::uint64_t{0});
  if (n % 64) all.back() = (std::uint64_t{1} << (n % 64)) - 1;

  std::vector<std::uint64_t> per_root(n, 0);
  parallel_for(n, [&](std::size_t root) {
    std::vector<std::size_t> mapped(k);
    std::vector<std::vector<std::uint64_t>> scratch(k, std::vector<std::uint64_t>(words));
    mapped[0] = root;

    auto candidates = [&](std::size_t j) -> const std::uint64_t* {
      const auto& back = plan.back[j];
      if (back.empty()) return all.data();
      if (back.size() == 1) return g.row(mapped[static_cast<std::size_t>(back[0])]).data();
      auto& out = scratch[j];
      const auto first = g.row(mapped[static_cast<std::size_t>(back[0])]);
      std::copy(first.begin(), first.end(), out.begin());
      for (std::size_t b = 1; b < back.size(); ++b) {
        const auto r = g.row(mapped[static_cast<std::size_t>(back[b])]);
        for (std::size_t w = 0; w < words; ++w) out[w] &= r[w];
      }
      return out.data();
    };
    auto used_in = [&](const std::uint64_t* cand, std::size_t depth, std::size_t v) {
      if (!((cand[v / 64] >> (v % 64)) & 1u)) return true;
      for (std::size_t u = 0; u < depth; ++u) {
        if (mapped[u] == v) return true;
      }
      return false;
    };

    // Leaf level: popcount of the AND of the constraining rows, fused.
    auto leaf = [&](std::size_t j) -> std::uint64_t {
      const auto& back = plan.back[j];
      const std::uint64_t* rows[kMaxMotifVertices];
      std::size_t r = 0;
      for (int pos : back) rows[r++] = g.row(mapped[static_cast<std::size_t>(pos)]).data();
      if (r == 0) rows[r++] = all.data();
      auto word = [&](std::size_t w) {
        std::uint64_t acc = rows[0][w];
        for (std::size_t q = 1; q < r; ++q) acc &= rows[q][w];
        return acc;
      };
      std::uint64_t c = 0;
      for (std::size_t w = 0; w < words; ++w) c += static_cast<std::uint64_t>(std::popcount(word(w)));
      for (std::size_t u = 0; u < j; ++u) c -= (word(mapped[u] / 64) >> (mapped[u] % 64)) & 1u;
      return c;
    };

    auto descend = [&](auto&& self, std::size_t j) -> std::uint64_t {
      if (j + 1 == k) return leaf(j);
      const std::uint64_t* cand = candidates(j);
      std::uint64_t total = 0;
      for (std::size_t w = 0; w < words; ++w) {
        std::uint64_t bits = cand[w];
        while (bits) {
          const std::size_t v = w * 64 + static_cast<std::size_t>(std::countr_zero(bits));
          bits &= bits - 1;
          if (used_in(cand, j, v)) continue;
          mapped[j] = v;
          total += self(self, j + 1);
        }
      }
      return total;
    };
    per_root[root] = k == 1 ? 1 : descend(descend, 1);
  });
  std::uint64_t total = 0;
  for (auto c : per_root) total += c;
  return total;
}

/// t(F, G) = |inj(F, G)| / (n)_k.
inline double t_exact(const Motif& f, const DenseGraph& g, double budget = kDefaultExactBudget) {
  const auto count = count_injective(f, g, budget);
  return static_cast<double>(static_cast<long double>(count) / falling_factorial(g.n(), f.k()));
}

namespace detail {

inline constexpr std::size_t kMcBlock = 4096;

// Uniform ordered k-tuple of distinct indices below n, by rejection.
inline void sample_distinct(CounterStream& rng, std::size_t n, std::span<std::size_t> out) {
  for (;;) {
    for (auto& v : out) v = static_cast<std::size_t>(rng.below(n));
    bool distinct = true;
    for (std::size_t a = 0; a < out.size() && distinct; ++a) {
      for (std::size_t b = a + 1; b < out.size(); ++b) {
        if (out[a] == out[b]) {
          distinct = false;
          break;
        }
      }
    }
    if (distinct) return;
  }
}

// Mean and standard error from per-block (sum, sum of squares), reduced in
// block order.
template <typename BlockFn>
Estimate mc_estimate(std::size_t samples, BlockFn&& block_fn) {
  const std::size_t blocks = (samples + kMcBlock - 1) / kMcBlock;
  std::vector<std::pair<double, double>> sums(blocks);
  parallel_for(blocks, [&](std::size_t b) {
    const std::size_t count = std::min(kMcBlock, samples - b * kMcBlock);
    sums[b] = block_fn(b, count);
  });
  double s = 0.0, s2 = 0.0;
  for (auto [a, q] : sums) {
    s += a;
    s2 += q;
  }
  const double m = static_cast<double>(samples);
  const double mean = s / m;
  double se = 0.0;
  if (samples > 1) {
    const double var = std::max(0.0, (s2 - m * mean * mean) / (m - 1.0));
    se = std::sqrt(var / m);
  }
  return {mean, se};
}

}  // namespace detail

/// Monte Carlo estimate of t(F, G) from uniform ordered k-tuples of distinct
/// vertices. Blocks of 4096 samples use streams key.child(block index).
inline Estimate t_mc(const Motif& f, const DenseGraph& g, std::size_t samples, const RngKey& key) {
  if (g.n() < f.k()) throw DomainError("graph has fewer vertices than the motif");
  if (samples < 1) throw PreconditionError("t_mc needs at least one sample");
  return detail::mc_estimate(samples, [&](std::size_t b, std::size_t count) {
    CounterStream rng(key.child(b));
    std::size_t tuple[kMaxMotifVertices];
    const std::span<std::size_t> t(tuple, f.k());
    double hits = 0.0;
    for (std::size_t s = 0; s < count; ++s) {
      detail::sample_distinct(rng, g.n(), t);
      bool ok = true;
      for (auto [a, c] : f.edges()) {
        if (!g.has_edge(tuple[a], tuple[c])) {
          ok = false;
          break;
        }
      }
      hits += ok ? 1.0 : 0.0;
    }
    return std::pair{hits, hits};
  });
}

/// T_F(z) = product over edges {i,j} of F of kernel(z_i, z_j).
inline double motif_product(const Motif& f, const StandardKernel& k, std::span<const double> z) {
  double prod = 1.0;
  for (auto [a, b] : f.edges()) {
    prod *= k.eval(z[static_cast<std::size_t>(a)], z[static_cast<std::size_t>(b)]);
    if (prod == 0.0) break;
  }
  return prod;
}

namespace detail {

// Sum over cell assignments c: V(F) -> cells of weight(c) * prod_edges value.
// weight(v_count) gets the number of motif vertices assigned to each cell.
template <typename Weight>
double step_assignment_sum(const Motif& f, const StepForm& s, Weight&& weight) {
  const std::size_t k = f.k();
  const std::size_t m = s.cells();
  std::vector<std::size_t> assign(k, 0);
  std::vector<std::size_t> per_cell(m, 0);
  double total = 0.0;
  auto rec = [&](auto&& self, std::size_t v, double edge_prod) -> void {
    if (edge_prod == 0.0) return;
    if (v == k) {
      total += edge_prod * weight(per_cell);
      return;
    }
    for (std::size_t c = 0; c < m; ++c) {
      assign[v] = c;
      double p = edge_prod;
      for (auto [a, b] : f.edges()) {
        const auto ua = static_cast<std::size_t>(a);
        const auto ub = static_cast<std::size_t>(b);
        if (ub == v && ua < v) p *= s.value(assign[ua], c);
      }
      ++per_cell[c];
      self(self, v + 1, p);
      --per_cell[c];
    }
  };
  rec(rec, 0, 1.0);
  return total;
}

inline constexpr double kMaxStepAssignments = 1e8;

inline bool step_sum_feasible(const Motif& f, const StepForm& s) {
  return std::pow(static_cast<double>(s.cells()), static_cast<double>(f.k())) <= kMaxStepAssignments;
}

}  // namespace detail

/// t(F, kernel) for step-form kernels: sum over cell assignments of
/// prod_v width(c(v)) * prod_edges value.
inline double t_step_closed_form(const Motif& f, const StepForm& s) {
  return detail::step_assignment_sum(f, s, [&](const std::vector<std::size_t>& per_cell) {
    double w = 1.0;
    for (std::size_t c = 0; c < per_cell.size(); ++c) {
      if (per_cell[c]) w *= std::pow(s.width(c), static_cast<double>(per_cell[c]));
    }
    return w;
  });
}

struct ClosedFormBlock {};
struct MonteCarlo {
  std::size_t samples = kDefaultMcSamples;
  RngKey key{};
};
using DensityMethod = std::variant<ClosedFormBlock, MonteCarlo>;

/// t(F, kernel). ClosedFormBlock is exact and accepts any kernel with a step
/// form (block, grid, and their transforms); MonteCarlo integrates over
/// uniform points in [0,1]^k.
inline Estimate t_kernel(const Motif& f, const StandardKernel& k, const DensityMethod& method) {
  if (std::holds_alternative<ClosedFormBlock>(method)) {
    const auto s = step_form(k);
    if (!s) throw UnsupportedKernelError("closed-form density needs a block or grid kernel");
    if (!detail::step_sum_feasible(f, *s)) {
      throw ComplexityError("too many cell assignments for closed-form density");
    }
    return {t_step_closed_form(f, *s), 0.0};
  }
  const auto& mc = std::get<MonteCarlo>(method);
  if (mc.samples < 1) throw PreconditionError("Monte Carlo needs at least one sample");
  return detail::mc_estimate(mc.samples, [&](std::size_t b, std::size_t count) {
    CounterStream rng(mc.key.child(b));
    double z[kMaxMotifVertices];
    double s = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      for (std::size_t v = 0; v < f.k(); ++v) z[v] = rng.uniform();
      const double t = motif_product(f, k, {z, f.k()});
      s += t;
      s2 += t * t;
    }
    return std::pair{s, s2};
  });
}

/// t(F, block kernel with its boundary moved to tau_gamma).
inline double t_transformed_block(const Motif& f, const BlockParams& p, double tau_gamma) {
  require_unit(tau_gamma, "tau(gamma)");
  const StepForm s{{0.0, tau_gamma, 1.0}, {p.alpha, p.delta, p.delta, p.beta}};
  return t_step_closed_form(f, s);
}

/// Exact: step-form kernels use cell occupancy counts; other kernels
/// enumerate all (n)_k ordered tuples, refused above `budget`.
struct ExactSum {
  double budget = kDefaultExactBudget;
};
using MuMethod = std::variant<ExactSum, MonteCarlo>;

/// mu_F(x) = (1/(n)_k) * sum over ordered k-tuples of distinct indices of
/// T_F(x_{i_1}, ..., x_{i_k}).
inline Estimate mu_F(const Motif& f, std::span<const double> x, const StandardKernel& k,
                     const MuMethod& method) {
  const std::size_t n = x.size();
  const std::size_t kk = f.k();
  if (n < kk) throw DomainError("label vector shorter than the motif");
  for (double xi : x) require_unit(xi, "label");
  if (const auto* mc = std::get_if<MonteCarlo>(&method)) {
    if (mc->samples < 1) throw PreconditionError("Monte Carlo needs at least one sample");
    return detail::mc_estimate(mc->samples, [&](std::size_t b, std::size_t count) {
      CounterStream rng(mc->key.child(b));
      std::size_t idx[kMaxMotifVertices];
      double z[kMaxMotifVertices];
      double s = 0.0, s2 = 0.0;
      for (std::size_t i = 0; i < count; ++i) {
        detail::sample_distinct(rng, n, {idx, kk});
        for (std::size_t v = 0; v < kk; ++v) z[v] = x[idx[v]];
        const double t = motif_product(f, k, {z, kk});
        s += t;
        s2 += t * t;
      }
      return std::pair{s, s2};
    });
  }
  const double budget = std::get<ExactSum>(method).budget;
  const long double tuples = falling_factorial(n, kk);
  if (const auto s = step_form(k); s && detail::step_sum_feasible(f, *s)) {
    std::vector<std::uint64_t> occupancy(s->cells(), 0);
    for (double xi : x) ++occupancy[s->cell(xi)];
    const double sum = detail::step_assignment_sum(f, *s, [&](const std::vector<std::size_t>& per_cell) {
      long double w = 1.0L;
      for (std::size_t c = 0; c < per_cell.size(); ++c) {
        if (occupancy[c] < per_cell[c]) return 0.0;
        w *= falling_factorial(occupancy[c], per_cell[c]);
      }
      return static_cast<double>(w);
    });
    return {static_cast<double>(static_cast<long double>(sum) / tuples), 0.0};
  }
  if (static_cast<double>(tuples) > budget) {
    throw ComplexityError("mu_F enumeration of " + std::to_string(static_cast<double>(tuples)) +
                          " tuples exceeds budget");
  }
  std::vector<double> per_root(n, 0.0);
  parallel_for(n, [&](std::size_t root) {
    std::size_t idx[kMaxMotifVertices];
    double z[kMaxMotifVertices];
    idx[0] = root;
    z[0] = x[root];
    auto rec = [&](auto&& self, std::size_t depth) -> double {
      if (depth == kk) return motif_product(f, k, {z, kk});
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        bool used = false;
        for (std::size_t d = 0; d < depth; ++d) used = used || idx[d] == i;
        if (used) continue;
        idx[depth] = i;
        z[depth] = x[i];
        acc += self(self, depth + 1);
      }
      return acc;
    };
    per_root[root] = rec(rec, 1);
  });
  long double total = 0.0L;
  for (double v : per_root) total += v;
  return {static_cast<double>(total / tuples), 0.0};
}

// --- subgraph distance -------------------------------------------------------

using DensityOperand = std::variant<const DenseGraph*, const StandardKernel*>;

struct DsubOptions {
  double exact_budget = kDefaultExactBudget;
  std::size_t mc_samples = kDefaultMcSamples;
  RngKey key{};
};

struct DsubResult {
  double value = 0.0;
  double truncation_bound = 0.0;          // weighted tail beyond the catalog, 2^-K
  std::vector<double> abs_differences;    // |t(F_i, a) - t(F_i, b)|
};

/// t(F, operand): exact count for graphs within budget, else Monte Carlo;
/// closed form for step-form kernels, else Monte Carlo.
inline Estimate density(const Motif& f, const DensityOperand& operand, const DsubOptions& opt) {
  if (const auto* g = std::get_if<const DenseGraph*>(&operand)) {
    if (exact_count_work(f, **g) <= opt.exact_budget) return {t_exact(f, **g, opt.exact_budget), 0.0};
    return t_mc(f, **g, opt.mc_samples, opt.key);
  }
  const auto& k = *std::get<const StandardKernel*>(operand);
  if (const auto s = step_form(k); s && detail::step_sum_feasible(f, *s)) {
    return t_kernel(f, k, ClosedFormBlock{});
  }
  return t_kernel(f, k, MonteCarlo{opt.mc_samples, opt.key});
}

/// Truncated d_sub(a, b) = sum_i 2^-i |t(F_i, a) - t(F_i, b)|.
inline DsubResult d_sub(const DensityOperand& a, const DensityOperand& b, const MotifCatalog& catalog,
                        const DsubOptions& opt = {}) {
  DsubResult r;
  r.truncation_bound = catalog.truncation_bound();
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    DsubOptions oa = opt, ob = opt;
    oa.key = opt.key.child(2 * i);
    ob.key = opt.key.child(2 * i + 1);
    const double diff = std::abs(density(catalog[i], a, oa).value - density(catalog[i], b, ob).value);
    r.abs_differences.push_back(diff);
    r.value += MotifCatalog::weight(i) * diff;
  }
  return r;
}

// --- concentration -----------------------------------------------------------

namespace detail {
inline double lipschitz_constant(std::uint64_t n, std::uint64_t k) {
  return static_cast<double>(k * (k - 1)) / (static_cast<double>(n) * static_cast<double>(n - 1));
}
}  // namespace detail

/// Tail bound P[|t(F, G(x,H,kernel)) - mu_F(x)| > eps] <=
/// 2 exp(-2 (eps - m c)^2 / ((C(n,2) - m) c^2)), c = k(k-1)/(n(n-1)),
/// valid for eps > m c.
inline double mcdiarmid_bound(std::uint64_t n, std::uint64_t k, std::uint64_t m, double eps) {
  if (n < 2 || k < 2 || k > n) throw PreconditionError("mcdiarmid_bound needs 2 <= k <= n");
  if (m > pair_count(n)) throw PreconditionError("seed graph has more edges than pairs");
  const double c = detail::lipschitz_constant(n, k);
  const double shift = static_cast<double>(m) * c;
  if (!(eps > shift)) {
    throw PreconditionError("mcdiarmid_bound requires eps > m k(k-1)/(n(n-1))");
  }
  const double free_pairs = static_cast<double>(pair_count(n) - m);
  if (free_pairs == 0.0) return 0.0;
  const double d = eps - shift;
  return 2.0 * std::exp(-2.0 * d * d / (free_pairs * c * c));
}

/// The eps at which mcdiarmid_bound equals `probability` (0 < probability < 2).
inline double mcdiarmid_epsilon(std::uint64_t n, std::uint64_t k, std::uint64_t m, double probability) {
  if (!(probability > 0.0 && probability < 2.0)) throw PreconditionError("probability outside (0,2)");
  const double c = detail::lipschitz_constant(n, k);
  const double free_pairs = static_cast<double>(pair_count(n) - m);
  return static_cast<double>(m) * c + c * std::sqrt(free_pairs * std::log(2.0 / probability) / 2.0);
}

}  // namespace graphon_rds
