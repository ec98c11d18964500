#pragma once

// Experiment harness: configs, convergence and U-statistic runs over an
// n-schedule, distortion figures, result tables and run manifests.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "graphon_rds/distortion.hpp"
#include "graphon_rds/errors.hpp"
#include "graphon_rds/graph.hpp"
#include "graphon_rds/homstats.hpp"
#include "graphon_rds/kernel.hpp"
#include "graphon_rds/kernel_io.hpp"
#include "graphon_rds/motif.hpp"
#include "graphon_rds/parallel.hpp"
#include "graphon_rds/rds.hpp"
#include "graphon_rds/rng.hpp"
#include "graphon_rds/version.hpp"

namespace graphon_rds {

// --- configuration ------------------------------------------------------------

struct SamplerSpec {
  SamplerKind kind = SamplerKind::kMarkov;
  double lambda = 20.0;
  std::size_t max_restarts = 100;
  double horizon = std::numeric_limits<double>::infinity();
  std::size_t burn_in = 0;
  std::optional<double> x0;
};

inline const std::vector<std::string>& default_motifs() {
  static const std::vector<std::string> m{"edge", "path3", "triangle", "star4", "cycle4", "clique4"};
  return m;
}

struct ExperimentConfig {
  nlohmann::json kernel = {{"kind", "block"}, {"alpha", 0.2}, {"beta", 0.2},
                           {"delta", 0.005}, {"gamma", 0.3}};
  SamplerSpec sampler;
  std::vector<std::size_t> n_schedule{500, 2000, 8000};
  std::size_t replications = 20;
  std::vector<std::string> motifs = default_motifs();
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  std::size_t mc_samples = kDefaultMcSamples;
  double exact_budget = kDefaultExactBudget;

  void validate() const {
    if (n_schedule.empty()) throw PreconditionError("n_schedule must not be empty");
    for (std::size_t i = 0; i < n_schedule.size(); ++i) {
      if (n_schedule[i] < 1) throw PreconditionError("n_schedule entries must be positive");
      if (i > 0 && n_schedule[i] <= n_schedule[i - 1]) {
        throw PreconditionError("n_schedule must be strictly increasing");
      }
    }
    if (replications < 1) throw PreconditionError("replications must be at least 1");
    if (motifs.empty()) throw PreconditionError("at least one motif is required");
    if (mc_samples < 1) throw PreconditionError("mc_samples must be at least 1");
    if (sampler.kind == SamplerKind::kBranching && !(sampler.lambda > 0.0)) {
      throw PreconditionError("lambda must be positive");
    }
  }

  [[nodiscard]] StandardKernel make_kernel() const { return kernel_from_json(kernel); }
  [[nodiscard]] MotifCatalog catalog() const {
    std::vector<Motif> m;
    for (const auto& s : motifs) m.push_back(parse_motif(s));
    return MotifCatalog(std::move(m));
  }
};

inline nlohmann::json to_json(const SamplerSpec& s) {
  nlohmann::json j{{"kind", to_string(s.kind)}};
  if (s.kind == SamplerKind::kMarkov) {
    j["burn_in"] = s.burn_in;
    if (s.x0) j["x0"] = *s.x0;
  } else if (s.kind == SamplerKind::kBranching) {
    j["lambda"] = s.lambda;
    j["max_restarts"] = s.max_restarts;
    if (std::isfinite(s.horizon)) j["horizon"] = s.horizon;
    if (s.x0) j["x0"] = *s.x0;
  }
  return j;
}

inline SamplerSpec sampler_from_json(const nlohmann::json& j) {
  SamplerSpec s;
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "markov") s.kind = SamplerKind::kMarkov;
  else if (kind == "poisson") s.kind = SamplerKind::kBranching;
  else if (kind == "iid-uniform") s.kind = SamplerKind::kIidUniform;
  else throw FormatError("unknown sampler \"" + kind + "\"");
  s.lambda = j.value("lambda", s.lambda);
  s.max_restarts = j.value("max_restarts", s.max_restarts);
  if (j.contains("horizon") && !j.at("horizon").is_null()) s.horizon = j.at("horizon").get<double>();
  s.burn_in = j.value("burn_in", s.burn_in);
  if (j.contains("x0") && !j.at("x0").is_null()) s.x0 = j.at("x0").get<double>();
  return s;
}

inline nlohmann::json to_json(const ExperimentConfig& c) {
  return {{"kernel", c.kernel},
          {"sampler", to_json(c.sampler)},
          {"n_schedule", c.n_schedule},
          {"replications", c.replications},
          {"motifs", c.motifs},
          {"seed", c.seed},
          {"output_dir", c.output_dir},
          {"mc_samples", c.mc_samples},
          {"exact_budget", c.exact_budget}};
}

/// Accepts a config object or a run manifest (whose "config" member is used).
inline ExperimentConfig config_from_json(const nlohmann::json& root) {
  const nlohmann::json& j = root.contains("config") ? root.at("config") : root;
  ExperimentConfig c;
  try {
    if (j.contains("kernel")) c.kernel = j.at("kernel");
    if (j.contains("sampler")) c.sampler = sampler_from_json(j.at("sampler"));
    if (j.contains("n_schedule")) c.n_schedule = j.at("n_schedule").get<std::vector<std::size_t>>();
    c.replications = j.value("replications", c.replications);
    if (j.contains("motifs")) c.motifs = j.at("motifs").get<std::vector<std::string>>();
    c.seed = j.value("seed", c.seed);
    c.output_dir = j.value("output_dir", c.output_dir);
    c.mc_samples = j.value("mc_samples", c.mc_samples);
    c.exact_budget = j.value("exact_budget", c.exact_budget);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

// --- tables -------------------------------------------------------------------

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Rectangular result table; cells are stored already formatted.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) {
    if (row.size() != columns.size()) throw PreconditionError("table row has the wrong width");
    rows.push_back(std::move(row));
  }
  [[nodiscard]] std::size_t column(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (columns[i] == name) return i;
    }
    throw PreconditionError("no column " + std::string(name));
  }
  [[nodiscard]] double number(std::size_t row, std::string_view name) const {
    return std::stod(rows.at(row).at(column(name)));
  }
};

enum class TableFormat { kCsv, kJson };

inline void write_table(const Table& t, std::ostream& os, TableFormat format = TableFormat::kCsv) {
  if (format == TableFormat::kCsv) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << '\n';
    for (const auto& r : t.rows) {
      for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
      os << '\n';
    }
    return;
  }
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& r : t.rows) {
    nlohmann::ordered_json obj;
    for (std::size_t i = 0; i < r.size(); ++i) {
      char* end = nullptr;
      const double v = std::strtod(r[i].c_str(), &end);
      if (!r[i].empty() && end == r[i].c_str() + r[i].size() && std::isfinite(v)) {
        obj[t.columns[i]] = v;
      } else {
        obj[t.columns[i]] = r[i];
      }
    }
    out.push_back(std::move(obj));
  }
  os << out.dump(2) << '\n';
}

// --- manifests ----------------------------------------------------------------

inline std::uint64_t file_hash(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw FormatError("cannot read " + p.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return fnv1a64(bytes);
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

/// Everything needed to rerun an experiment, plus content hashes of its
/// outputs. Wall-clock timings are informational and not part of any output.
struct RunManifest {
  std::string command;
  nlohmann::json config;
  nlohmann::json seeds = nlohmann::json::array();
  std::string catalog_manifest;
  std::vector<std::pair<std::string, double>> wall_clock;
  std::vector<std::pair<std::string, std::string>> outputs;  // file name, fnv1a64 hex

  [[nodiscard]] nlohmann::json to_json() const {
    nlohmann::json j{{"tool", "graphon-rds"},
                     {"version", kVersion},
                     {"command", command},
                     {"config", config},
                     {"seeds", seeds}};
    if (!catalog_manifest.empty()) {
      j["catalog_manifest"] = catalog_manifest;
      j["catalog_hash"] = hex64(fnv1a64(catalog_manifest));
    }
    nlohmann::json wc = nlohmann::json::object();
    for (const auto& [stage, s] : wall_clock) wc[stage] = s;
    j["wall_clock_seconds"] = wc;
    nlohmann::json out = nlohmann::json::object();
    for (const auto& [file, h] : outputs) out[file] = h;
    j["outputs"] = out;
    return j;
  }

  void record_output(const std::filesystem::path& p) {
    outputs.emplace_back(p.filename().string(), hex64(file_hash(p)));
  }

  void write(const std::filesystem::path& p) const {
    std::ofstream out(p);
    if (!out) throw FormatError("cannot write " + p.string());
    out << to_json().dump(2) << '\n';
  }
};

class StageTimer {
 public:
  StageTimer(RunManifest& m, std::string stage)
      : manifest_(m), stage_(std::move(stage)), start_(std::chrono::steady_clock::now()) {}
  StageTimer(const StageTimer&) = delete;
  StageTimer& operator=(const StageTimer&) = delete;
  ~StageTimer() {
    const std::chrono::duration<double> d = std::chrono::steady_clock::now() - start_;
    manifest_.wall_clock.emplace_back(stage_, d.count());
  }

 private:
  RunManifest& manifest_;
  std::string stage_;
  std::chrono::steady_clock::time_point start_;
};

// --- limit kernels and trace sampling -------------------------------------------

/// The distortion map of a sampler on kernel k: closed form for block kernels
/// with interior parameters, otherwise the CDF of the numerically computed
/// invariant measure. The identity for i.i.d. uniform labels.
inline DistortionMap sampler_distortion(const StandardKernel& k, const SamplerSpec& s) {
  const BlockParams* bp = k.block_params();
  const bool closed = bp != nullptr && bp->alpha > 0.0 && bp->alpha < 1.0 && bp->beta > 0.0 &&
                      bp->beta < 1.0 && bp->delta > 0.0 && bp->delta < 1.0;
  switch (s.kind) {
    case SamplerKind::kIidUniform:
      return DistortionMap::identity();
    case SamplerKind::kMarkov:
      return closed ? markov_distortion_map(*bp) : markov_stationary(k).cdf_map();
    case SamplerKind::kBranching:
      return closed ? branching_distortion_map(*bp) : branching_stationary(k, s.lambda).pi.cdf_map();
  }
  return DistortionMap::identity();
}

inline StandardKernel limit_kernel(const StandardKernel& k, const SamplerSpec& s) {
  if (s.kind == SamplerKind::kIidUniform) return k;
  return transform_kernel(k, sampler_distortion(k, s));
}

inline SampleTrace sample_trace(const StandardKernel& k, const SamplerSpec& s, std::size_t n,
                                const RngKey& key) {
  switch (s.kind) {
    case SamplerKind::kIidUniform:
      return sample_iid_uniform(n, key);
    case SamplerKind::kMarkov:
      return sample_markov_chain(k, n, InitialSpec{s.x0}, key, s.burn_in);
    case SamplerKind::kBranching: {
      BranchingOptions o;
      o.lambda = s.lambda;
      o.target_n = n;
      o.horizon = s.horizon;
      o.root = InitialSpec{s.x0};
      return sample_branching_conditioned(k, o, key, s.max_restarts);
    }
  }
  throw PreconditionError("unknown sampler");
}

/// Stream of replication r at schedule size n.
inline RngKey replication_key(std::uint64_t seed, std::string_view experiment, std::size_t n,
                              std::size_t r) {
  return RngKey{seed, 0}.child(experiment).child(n).child(r);
}

// --- convergence --------------------------------------------------------------

struct ReplicationResult {
  std::size_t n = 0;
  std::size_t replication = 0;
  bool ok = false;
  std::string status;
  std::size_t discarded_runs = 0;
  std::size_t seed_edges = 0;
  std::vector<double> t_graph;
  std::vector<double> abs_diff;
  std::vector<double> mu;         // mu_F(labels); NaN when not computed
  double d_sub = 0.0;
};

struct SizeSummary {
  std::size_t n = 0;
  std::size_t successes = 0;
  std::vector<double> mean_abs_diff;
  std::vector<double> stderr_abs_diff;
  double mean_d_sub = 0.0;
  double stderr_d_sub = 0.0;
};

struct ConvergenceResult {
  std::vector<double> t_limit;  // t(F_i, limit kernel)
  std::vector<ReplicationResult> replications;
  std::vector<SizeSummary> summary;
  /// For consecutive sizes: replications whose d_sub decreased / compared.
  std::vector<std::pair<std::size_t, std::size_t>> paired_decreases;
  double truncation_bound = 0.0;
};

namespace detail {
inline std::pair<double, double> mean_stderr(const std::vector<double>& v) {
  if (v.empty()) return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
  double s = 0.0;
  for (double x : v) s += x;
  const double mean = s / static_cast<double>(v.size());
  if (v.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()))};
}
}  // namespace detail

/// For each n and replication: sample a trace, complete it to G(X_n, H_n, k),
/// and compare t(F_i, G) with t(F_i, k^tau) for the configured motifs.
/// Replications run concurrently; results are stored by index.
inline ConvergenceResult run_convergence(const ExperimentConfig& cfg, RunManifest* manifest = nullptr) {
  cfg.validate();
  const StandardKernel k = cfg.make_kernel();
  const MotifCatalog catalog = cfg.catalog();
  const StandardKernel limit = limit_kernel(k, cfg.sampler);
  const std::size_t nm = catalog.size();

  ConvergenceResult res;
  res.truncation_bound = catalog.truncation_bound();
  DsubOptions kernel_opt{cfg.exact_budget, cfg.mc_samples, RngKey{cfg.seed, 0}.child("limit")};
  for (std::size_t i = 0; i < nm; ++i) {
    kernel_opt.key = RngKey{cfg.seed, 0}.child("limit").child(i);
    res.t_limit.push_back(density(catalog[i], &limit, kernel_opt).value);
  }

  const std::size_t reps = cfg.replications;
  res.replications.resize(cfg.n_schedule.size() * reps);
  parallel_for(res.replications.size(), [&](std::size_t cell) {
    const std::size_t n = cfg.n_schedule[cell / reps];
    const std::size_t r = cell % reps;
    auto& out = res.replications[cell];
    out.n = n;
    out.replication = r;
    const RngKey key = replication_key(cfg.seed, "converge", n, r);
    SampleTrace trace;
    try {
      trace = sample_trace(k, cfg.sampler, n, key.child("trace"));
    } catch (const RestartBudgetError&) {
      out.status = "restart_budget_exhausted";
      out.discarded_runs = cfg.sampler.max_restarts + 1;
      return;
    }
    out.discarded_runs = trace.meta.discarded_runs;
    out.seed_edges = trace.seed_graph.edge_count();
    const DenseGraph g = generate_gxhk(trace.labels, trace.seed_graph, k, key.child("graph"));
    for (std::size_t i = 0; i < nm; ++i) {
      const DsubOptions opt{cfg.exact_budget, cfg.mc_samples, key.child("density").child(i)};
      const double t = n >= catalog[i].k() ? density(catalog[i], &g, opt).value : 0.0;
      out.t_graph.push_back(t);
      out.abs_diff.push_back(std::abs(t - res.t_limit[i]));
      out.d_sub += MotifCatalog::weight(i) * out.abs_diff.back();
      double mu = std::numeric_limits<double>::quiet_NaN();
      if (n >= catalog[i].k()) {
        try {
          mu = mu_F(catalog[i], trace.labels, k, ExactSum{cfg.exact_budget}).value;
        } catch (const ComplexityError&) {
        }
      }
      out.mu.push_back(mu);
    }
    out.ok = true;
    out.status = "ok";
  });

  for (std::size_t s = 0; s < cfg.n_schedule.size(); ++s) {
    SizeSummary sum;
    sum.n = cfg.n_schedule[s];
    std::vector<std::vector<double>> diffs(nm);
    std::vector<double> dsubs;
    for (std::size_t r = 0; r < reps; ++r) {
      const auto& rr = res.replications[s * reps + r];
      if (!rr.ok) continue;
      ++sum.successes;
      for (std::size_t i = 0; i < nm; ++i) diffs[i].push_back(rr.abs_diff[i]);
      dsubs.push_back(rr.d_sub);
    }
    for (std::size_t i = 0; i < nm; ++i) {
      const auto [m, se] = detail::mean_stderr(diffs[i]);
      sum.mean_abs_diff.push_back(m);
      sum.stderr_abs_diff.push_back(se);
    }
    std::tie(sum.mean_d_sub, sum.stderr_d_sub) = detail::mean_stderr(dsubs);
    res.summary.push_back(std::move(sum));
    if (s > 0) {
      std::size_t dec = 0, cmp = 0;
      for (std::size_t r = 0; r < reps; ++r) {
        const auto& a = res.replications[(s - 1) * reps + r];
        const auto& b = res.replications[s * reps + r];
        if (!a.ok || !b.ok) continue;
        ++cmp;
        if (b.d_sub < a.d_sub) ++dec;
      }
      res.paired_decreases.emplace_back(dec, cmp);
    }
  }

  if (manifest) {
    for (std::size_t cell = 0; cell < res.replications.size(); ++cell) {
      const auto& rr = res.replications[cell];
      const RngKey key = replication_key(cfg.seed, "converge", rr.n, rr.replication);
      manifest->seeds.push_back({{"n", rr.n}, {"replication", rr.replication},
                                 {"seed", key.seed}, {"stream", key.stream}});
    }
    manifest->catalog_manifest = catalog.manifest();
  }
  return res;
}

inline Table replication_table(const ConvergenceResult& res, const ExperimentConfig& cfg) {
  Table t;
  t.columns = {"n", "replication", "status", "discarded_runs", "seed_edges"};
  for (const auto& m : cfg.motifs) {
    t.columns.push_back("t_graph[" + m + "]");
    t.columns.push_back("abs_diff[" + m + "]");
    t.columns.push_back("mu[" + m + "]");
  }
  t.columns.push_back("d_sub");
  for (const auto& rr : res.replications) {
    std::vector<std::string> row{std::to_string(rr.n), std::to_string(rr.replication), rr.status,
                                 std::to_string(rr.discarded_runs), std::to_string(rr.seed_edges)};
    for (std::size_t i = 0; i < cfg.motifs.size(); ++i) {
      if (rr.ok) {
        row.push_back(format_double(rr.t_graph[i]));
        row.push_back(format_double(rr.abs_diff[i]));
        row.push_back(format_double(rr.mu[i]));
      } else {
        row.insert(row.end(), {"nan", "nan", "nan"});
      }
    }
    row.push_back(rr.ok ? format_double(rr.d_sub) : "nan");
    t.add(std::move(row));
  }
  return t;
}

inline Table summary_table(const ConvergenceResult& res, const ExperimentConfig& cfg) {
  Table t;
  t.columns = {"n", "successes"};
  for (const auto& m : cfg.motifs) {
    t.columns.push_back("t_limit[" + m + "]");
    t.columns.push_back("mean_abs_diff[" + m + "]");
    t.columns.push_back("stderr_abs_diff[" + m + "]");
  }
  t.columns.insert(t.columns.end(), {"mean_d_sub", "stderr_d_sub", "truncation_bound",
                                     "paired_decreases", "paired_comparisons"});
  for (std::size_t s = 0; s < res.summary.size(); ++s) {
    const auto& sum = res.summary[s];
    std::vector<std::string> row{std::to_string(sum.n), std::to_string(sum.successes)};
    for (std::size_t i = 0; i < cfg.motifs.size(); ++i) {
      row.push_back(format_double(res.t_limit[i]));
      row.push_back(format_double(sum.mean_abs_diff[i]));
      row.push_back(format_double(sum.stderr_abs_diff[i]));
    }
    row.push_back(format_double(sum.mean_d_sub));
    row.push_back(format_double(sum.stderr_d_sub));
    row.push_back(format_double(res.truncation_bound));
    if (s == 0) {
      row.insert(row.end(), {"", ""});
    } else {
      row.push_back(std::to_string(res.paired_decreases[s - 1].first));
      row.push_back(std::to_string(res.paired_decreases[s - 1].second));
    }
    t.add(std::move(row));
  }
  return t;
}

// --- U-statistic check ----------------------------------------------------------

struct ErgodicRow {
  std::size_t n = 0;
  std::size_t replication = 0;
  std::vector<double> mu;
  std::vector<double> abs_diff;
  double block_mass = std::numeric_limits<double>::quiet_NaN();  // fraction of labels <= gamma
};

struct ErgodicResult {
  std::vector<double> t_limit;
  double tau_gamma = std::numeric_limits<double>::quiet_NaN();  // for block kernels
  std::vector<ErgodicRow> rows;
  std::vector<std::string> status;
};

/// mu_F(X_n) on sampled labels against t(F, k^tau), and for block kernels the
/// label mass of [0,gamma] against tau(gamma).
inline ErgodicResult run_ergodic_check(const ExperimentConfig& cfg, RunManifest* manifest = nullptr) {
  cfg.validate();
  const StandardKernel k = cfg.make_kernel();
  const MotifCatalog catalog = cfg.catalog();
  const StandardKernel limit = limit_kernel(k, cfg.sampler);
  const DistortionMap tau = sampler_distortion(k, cfg.sampler);
  ErgodicResult res;
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    const DsubOptions opt{cfg.exact_budget, cfg.mc_samples, RngKey{cfg.seed, 0}.child("limit").child(i)};
    res.t_limit.push_back(density(catalog[i], &limit, opt).value);
  }
  const BlockParams* bp = k.block_params();
  if (bp) res.tau_gamma = tau(bp->gamma);

  const std::size_t reps = cfg.replications;
  res.rows.resize(cfg.n_schedule.size() * reps);
  res.status.resize(res.rows.size());
  parallel_for(res.rows.size(), [&](std::size_t cell) {
    auto& row = res.rows[cell];
    row.n = cfg.n_schedule[cell / reps];
    row.replication = cell % reps;
    const RngKey key = replication_key(cfg.seed, "ergodic", row.n, row.replication);
    SampleTrace trace;
    try {
      trace = sample_trace(k, cfg.sampler, row.n, key.child("trace"));
    } catch (const RestartBudgetError&) {
      res.status[cell] = "restart_budget_exhausted";
      return;
    }
    for (std::size_t i = 0; i < catalog.size(); ++i) {
      double mu = std::numeric_limits<double>::quiet_NaN();
      if (row.n >= catalog[i].k()) {
        try {
          mu = mu_F(catalog[i], trace.labels, k, ExactSum{cfg.exact_budget}).value;
        } catch (const ComplexityError&) {
          mu = mu_F(catalog[i], trace.labels, k, MonteCarlo{cfg.mc_samples, key.child("mu").child(i)}).value;
        }
      }
      row.mu.push_back(mu);
      row.abs_diff.push_back(std::abs(mu - res.t_limit[i]));
    }
    if (bp) {
      const double g = bp->gamma;
      row.block_mass = ergodic_average(trace, [g](double x) { return x <= g ? 1.0 : 0.0; });
    }
    res.status[cell] = "ok";
  });
  if (manifest) {
    for (const auto& row : res.rows) {
      const RngKey key = replication_key(cfg.seed, "ergodic", row.n, row.replication);
      manifest->seeds.push_back({{"n", row.n}, {"replication", row.replication},
                                 {"seed", key.seed}, {"stream", key.stream}});
    }
    manifest->catalog_manifest = catalog.manifest();
  }
  return res;
}

inline Table ergodic_table(const ErgodicResult& res, const ExperimentConfig& cfg) {
  Table t;
  t.columns = {"n", "replication", "status"};
  for (const auto& m : cfg.motifs) {
    t.columns.push_back("mu[" + m + "]");
    t.columns.push_back("t_limit[" + m + "]");
    t.columns.push_back("abs_diff[" + m + "]");
  }
  t.columns.insert(t.columns.end(), {"block_mass", "tau_gamma"});
  for (std::size_t c = 0; c < res.rows.size(); ++c) {
    const auto& row = res.rows[c];
    std::vector<std::string> cells{std::to_string(row.n), std::to_string(row.replication), res.status[c]};
    for (std::size_t i = 0; i < cfg.motifs.size(); ++i) {
      const bool ok = i < row.mu.size();
      cells.push_back(ok ? format_double(row.mu[i]) : "nan");
      cells.push_back(format_double(res.t_limit[i]));
      cells.push_back(ok ? format_double(row.abs_diff[i]) : "nan");
    }
    cells.push_back(format_double(row.block_mass));
    cells.push_back(format_double(res.tau_gamma));
    t.add(std::move(cells));
  }
  return t;
}

// --- distortion figures ---------------------------------------------------------

/// Writes <name>.csv and <name>.svg for each reference parameter set and any
/// extra sets into `dir`; returns the written paths.
inline std::vector<std::filesystem::path> run_distortion_figures(
    const std::filesystem::path& dir, const std::vector<FigureSet>& extra = {},
    const std::vector<double>& gammas = uniform_gamma_grid()) {
  std::filesystem::create_directories(dir);
  std::vector<FigureSet> sets(std::begin(kFigureSets), std::end(kFigureSets));
  sets.insert(sets.end(), extra.begin(), extra.end());
  std::vector<std::filesystem::path> written;
  for (const auto& s : sets) {
    const auto curve = distortion_curve(s.alpha, s.beta, s.delta, gammas);
    const auto csv = dir / (std::string(s.name) + ".csv");
    const auto svg = dir / (std::string(s.name) + ".svg");
    {
      std::ofstream out(csv);
      if (!out) throw FormatError("cannot write " + csv.string());
      write_curve_csv(curve, out);
    }
    {
      std::ofstream out(svg);
      if (!out) throw FormatError("cannot write " + svg.string());
      std::ostringstream title;
      title << s.title << " (alpha=" << s.alpha << ", beta=" << s.beta << ", delta=" << s.delta << ")";
      write_curve_svg(curve, out, title.str());
    }
    written.push_back(csv);
    written.push_back(svg);
  }
  return written;
}

}  // namespace graphon_rds
