#pragma once

// Command-line front end: subcommands generate, sample, tsub, dsub,
// stationary, distortion, converge and ergodic. Exit codes: 0 success,
// 1 usage error, 2 runtime failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "graphon_rds/graphon_rds.hpp"

namespace graphon_rds {

namespace fs = std::filesystem;

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

namespace cli_detail {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  unsigned threads = 0;
  std::string format = "csv";
};

// Loaded config plus the "arguments" echo of a manifest, if one was given.
struct Context {
  ExperimentConfig cfg;
  nlohmann::json arguments = nlohmann::json::object();
  fs::path out_dir;
  bool explicit_out = false;
  TableFormat format = TableFormat::kCsv;
};

inline Context make_context(const Common& c) {
  Context ctx;
  if (!c.config.empty()) {
    std::ifstream in(c.config);
    if (!in) throw FormatError("cannot open config " + c.config);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(c.config + ": " + e.what());
    }
    ctx.cfg = config_from_json(j);
    if (j.contains("arguments")) ctx.arguments = j.at("arguments");
  }
  if (c.seed) ctx.cfg.seed = *c.seed;
  if (!c.out.empty()) {
    ctx.cfg.output_dir = c.out;
    ctx.explicit_out = true;
  }
  ctx.out_dir = ctx.cfg.output_dir;
  ctx.format = c.format == "json" ? TableFormat::kJson : TableFormat::kCsv;
  set_thread_count(c.threads);
  return ctx;
}

// Fills `value` from the manifest's argument echo unless given on the command line.
template <typename T>
void default_from(const Context& ctx, const CLI::Option* opt, const char* name, T& value) {
  if (opt->count() == 0 && ctx.arguments.contains(name)) value = ctx.arguments.at(name).get<T>();
}

inline const char* table_ext(TableFormat f) { return f == TableFormat::kJson ? ".json" : ".csv"; }

inline fs::path write_table_file(const Context& ctx, const Table& t, const std::string& stem) {
  fs::create_directories(ctx.out_dir);
  const fs::path p = ctx.out_dir / (stem + table_ext(ctx.format));
  std::ofstream out(p);
  if (!out) throw FormatError("cannot write " + p.string());
  write_table(t, out, ctx.format);
  return p;
}

inline void finish_manifest(const Context& ctx, RunManifest& m, const std::string& command,
                            const nlohmann::json& arguments) {
  m.command = command;
  m.config = to_json(ctx.cfg);
  nlohmann::json j = m.to_json();
  j["arguments"] = arguments;
  fs::create_directories(ctx.out_dir);
  std::ofstream out(ctx.out_dir / "manifest.json");
  if (!out) throw FormatError("cannot write manifest");
  out << j.dump(2) << '\n';
}

inline RngKey cli_key(const Context& ctx) { return RngKey{ctx.cfg.seed, 0}.child("cli"); }

inline DenseGraph load_graph(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open graph " + path);
  if (path.ends_with(".txt") || path.ends_with(".edges")) return materialize(read_seed_graph(in));
  return read_graph_binary(in);
}

inline std::string number(double v) { return format_double(v); }

}  // namespace cli_detail

/// Runs the command line `args` (program name first). Output goes to `out`,
/// diagnostics and usage text to `err`.
inline int cli_dispatch(const std::vector<std::string>& args, std::ostream& out = std::cout,
                        std::ostream& err = std::cerr) {
  using namespace cli_detail;
  CLI::App app{"Graphon sampling, subgraph densities and distortion experiments", "graphon-rds"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--config", common.config, "Experiment config or run manifest (JSON)");
  app.add_option("--seed", common.seed, "Master seed (overrides the config)");
  app.add_option("--out", common.out, "Output directory (overrides the config)");
  app.add_option("--threads", common.threads, "Worker threads, 0 = auto")->capture_default_str();
  app.add_option("--format", common.format, "Table format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();

  int status = kExitOk;

  // generate ------------------------------------------------------------------
  auto* gen = app.add_subcommand("generate", "Sample labels and complete them to G(x, H, kernel)");
  std::size_t gen_n = 0;
  std::string gen_trace;
  bool gen_edges = false;
  auto* gen_n_opt = gen->add_option("--n", gen_n, "Graph size (default: last n_schedule entry)");
  auto* gen_trace_opt = gen->add_option("--trace", gen_trace, "Use labels and seed graph from a trace file");
  auto* gen_edges_opt = gen->add_flag("--edge-list", gen_edges, "Also write edges.txt");
  gen->callback([&] {
    auto ctx = make_context(common);
    default_from(ctx, gen_n_opt, "n", gen_n);
    default_from(ctx, gen_trace_opt, "trace", gen_trace);
    default_from(ctx, gen_edges_opt, "edge_list", gen_edges);
    const auto k = ctx.cfg.make_kernel();
    const RngKey key = cli_key(ctx);
    RunManifest m;
    SampleTrace trace;
    {
      StageTimer timer(m, "sample");
      if (!gen_trace.empty()) {
        std::ifstream in(gen_trace);
        if (!in) throw FormatError("cannot open trace " + gen_trace);
        trace = read_trace(in);
      } else {
        if (gen_n == 0) gen_n = ctx.cfg.n_schedule.back();
        trace = sample_trace(k, ctx.cfg.sampler, gen_n, key.child("trace"));
      }
    }
    fs::create_directories(ctx.out_dir);
    DenseGraph g = [&] {
      StageTimer timer(m, "generate");
      return generate_gxhk(trace.labels, trace.seed_graph, k, key.child("graph"));
    }();
    const fs::path bin = ctx.out_dir / "graph.bin";
    {
      std::ofstream os(bin, std::ios::binary);
      write_graph_binary(g, os);
    }
    m.record_output(bin);
    if (gen_edges) {
      const fs::path txt = ctx.out_dir / "edges.txt";
      {
        std::ofstream os(txt);
        write_edge_list(g, os);
      }
      m.record_output(txt);
    }
    m.seeds.push_back({{"seed", key.seed}, {"stream", key.stream}});
    nlohmann::json a{{"n", trace.size()}, {"edge_list", gen_edges}};
    if (!gen_trace.empty()) a["trace"] = gen_trace;
    finish_manifest(ctx, m, "generate", a);
    out << "n=" << g.n() << " edges=" << g.edge_count() << " seed_edges="
        << trace.seed_graph.edge_count() << " -> " << bin.string() << '\n';
  });

  // sample --------------------------------------------------------------------
  auto* smp = app.add_subcommand("sample", "Write a sampling trace (labels and referral edges)");
  std::size_t smp_n = 0;
  auto* smp_n_opt = smp->add_option("--n", smp_n, "Sample size (default: last n_schedule entry)");
  smp->callback([&] {
    auto ctx = make_context(common);
    default_from(ctx, smp_n_opt, "n", smp_n);
    if (smp_n == 0) smp_n = ctx.cfg.n_schedule.back();
    const auto k = ctx.cfg.make_kernel();
    const RngKey key = cli_key(ctx);
    RunManifest m;
    SampleTrace trace;
    {
      StageTimer timer(m, "sample");
      trace = sample_trace(k, ctx.cfg.sampler, smp_n, key.child("trace"));
    }
    fs::create_directories(ctx.out_dir);
    const fs::path p = ctx.out_dir / "trace.csv";
    {
      std::ofstream os(p);
      write_trace(trace, os);
    }
    m.record_output(p);
    m.seeds.push_back({{"seed", key.seed}, {"stream", key.stream}});
    finish_manifest(ctx, m, "sample", {{"n", smp_n}});
    out << "n=" << trace.size() << " seed_edges=" << trace.seed_graph.edge_count()
        << " discarded_runs=" << trace.meta.discarded_runs << " -> " << p.string() << '\n';
  });

  // tsub ----------------------------------------------------------------------
  auto* tsub = app.add_subcommand("tsub", "Injective homomorphism density of one motif");
  std::string tsub_graph, tsub_motif;
  bool tsub_exact = false;
  std::size_t tsub_mc = 0;
  tsub->add_option("--graph", tsub_graph, "Graph file (binary, or .txt edge list); default: limit kernel");
  tsub->add_option("--motif", tsub_motif, "Motif alias or \"k=..; edges=..\"")->required();
  auto* exact_flag = tsub->add_flag("--exact", tsub_exact, "Exact count (fails above the budget)");
  tsub->add_option("--mc", tsub_mc, "Monte Carlo samples")->excludes(exact_flag);
  tsub->callback([&] {
    auto ctx = make_context(common);
    const Motif f = parse_motif(tsub_motif);
    Estimate e;
    if (!tsub_graph.empty()) {
      const DenseGraph g = load_graph(tsub_graph);
      if (tsub_exact) {
        e = {t_exact(f, g, ctx.cfg.exact_budget), 0.0};
      } else if (tsub_mc > 0) {
        e = t_mc(f, g, tsub_mc, cli_key(ctx).child("tsub"));
      } else {
        e = density(f, &g, {ctx.cfg.exact_budget, ctx.cfg.mc_samples, cli_key(ctx).child("tsub")});
      }
    } else {
      const auto limit = limit_kernel(ctx.cfg.make_kernel(), ctx.cfg.sampler);
      if (tsub_mc > 0) {
        e = t_kernel(f, limit, MonteCarlo{tsub_mc, cli_key(ctx).child("tsub")});
      } else if (tsub_exact) {
        e = t_kernel(f, limit, ClosedFormBlock{});
      } else {
        e = density(f, &limit, {ctx.cfg.exact_budget, ctx.cfg.mc_samples, cli_key(ctx).child("tsub")});
      }
    }
    if (ctx.format == TableFormat::kJson) {
      out << nlohmann::json{{"motif", f.to_string()}, {"value", e.value}, {"std_error", e.std_error}}.dump()
          << '\n';
    } else {
      out << number(e.value) << '\n';
    }
  });

  // dsub ----------------------------------------------------------------------
  auto* dsub = app.add_subcommand("dsub", "Truncated subgraph distance over the configured motifs");
  std::string dsub_graph, dsub_other;
  dsub->add_option("--graph", dsub_graph, "First graph file")->required();
  dsub->add_option("--other", dsub_other, "Second graph file; default: the limit kernel");
  dsub->callback([&] {
    auto ctx = make_context(common);
    const MotifCatalog catalog = ctx.cfg.catalog();
    const DenseGraph a = load_graph(dsub_graph);
    const DsubOptions opt{ctx.cfg.exact_budget, ctx.cfg.mc_samples, cli_key(ctx).child("dsub")};
    DsubResult r;
    if (!dsub_other.empty()) {
      const DenseGraph b = load_graph(dsub_other);
      r = d_sub(&a, &b, catalog, opt);
    } else {
      const auto limit = limit_kernel(ctx.cfg.make_kernel(), ctx.cfg.sampler);
      r = d_sub(&a, &limit, catalog, opt);
    }
    if (ctx.format == TableFormat::kJson) {
      out << nlohmann::json{{"d_sub", r.value},
                            {"truncation_bound", r.truncation_bound},
                            {"abs_differences", r.abs_differences},
                            {"motifs", ctx.cfg.motifs}}
                 .dump()
          << '\n';
    } else {
      out << number(r.value) << '\n';
    }
  });

  // stationary ----------------------------------------------------------------
  auto* stat = app.add_subcommand("stationary", "Invariant measure of the configured sampler");
  std::size_t stat_points = 101;
  auto* stat_points_opt = stat->add_option("--points", stat_points, "Evaluation grid size")->capture_default_str();
  stat->callback([&] {
    auto ctx = make_context(common);
    default_from(ctx, stat_points_opt, "points", stat_points);
    if (stat_points < 2) throw PreconditionError("--points must be at least 2");
    const auto k = ctx.cfg.make_kernel();
    RunManifest m;
    Table t;
    t.columns = {"x", "density", "cdf"};
    std::optional<StationaryMeasure> pi;
    std::optional<BranchingStationary> br;
    {
      StageTimer timer(m, "solve");
      switch (ctx.cfg.sampler.kind) {
        case SamplerKind::kMarkov: pi = markov_stationary(k); break;
        case SamplerKind::kBranching:
          br = branching_stationary(k, ctx.cfg.sampler.lambda);
          pi = br->pi;
          break;
        case SamplerKind::kIidUniform:
          pi = StationaryMeasure::piecewise_constant({0.0, 1.0}, {1.0});
          break;
      }
    }
    for (std::size_t i = 0; i < stat_points; ++i) {
      const double x = static_cast<double>(i) / static_cast<double>(stat_points - 1);
      t.add({number(x), number(pi->density(x)), number(pi->cdf(x))});
    }
    const auto p = write_table_file(ctx, t, "stationary");
    m.record_output(p);
    finish_manifest(ctx, m, "stationary", {{"points", stat_points}});
    if (const auto* bp = k.block_params()) out << "tau(gamma)=" << number(pi->cdf(bp->gamma)) << ' ';
    if (br) out << "rho=" << number(br->rho) << " malthusian=" << number(br->malthusian) << ' ';
    out << "-> " << p.string() << '\n';
  });

  // distortion ----------------------------------------------------------------
  auto* dist = app.add_subcommand("distortion", "Distortion curves tau(gamma) for the reference parameter sets");
  std::size_t dist_points = 99;
  std::optional<double> da, db, dd;
  auto* dist_points_opt = dist->add_option("--points", dist_points, "Interior grid points")->capture_default_str();
  auto* da_opt = dist->add_option("--alpha", da, "Extra set: alpha");
  auto* db_opt = dist->add_option("--beta", db, "Extra set: beta");
  auto* dd_opt = dist->add_option("--delta", dd, "Extra set: delta");
  da_opt->needs(db_opt)->needs(dd_opt);
  db_opt->needs(da_opt);
  dd_opt->needs(da_opt);
  dist->callback([&] {
    auto ctx = make_context(common);
    default_from(ctx, dist_points_opt, "points", dist_points);
    if (da_opt->count() == 0 && ctx.arguments.contains("alpha")) {
      da = ctx.arguments.at("alpha").get<double>();
      db = ctx.arguments.at("beta").get<double>();
      dd = ctx.arguments.at("delta").get<double>();
    }
    if (dist_points < 1) throw PreconditionError("--points must be at least 1");
    std::vector<FigureSet> extra;
    if (da) extra.push_back({"custom", *da, *db, *dd, "User parameters"});
    RunManifest m;
    std::vector<fs::path> files;
    {
      StageTimer timer(m, "curves");
      files = run_distortion_figures(ctx.out_dir, extra, uniform_gamma_grid(dist_points));
    }
    for (const auto& f : files) m.record_output(f);
    nlohmann::json a{{"points", dist_points}};
    if (da) {
      a["alpha"] = *da;
      a["beta"] = *db;
      a["delta"] = *dd;
    }
    finish_manifest(ctx, m, "distortion", a);
    for (const auto& f : files) out << f.string() << '\n';
  });

  // converge ------------------------------------------------------------------
  auto* conv = app.add_subcommand("converge", "Convergence of t(F, G) to t(F, kernel^tau) over the n-schedule");
  conv->callback([&] {
    auto ctx = make_context(common);
    RunManifest m;
    ConvergenceResult res;
    {
      StageTimer timer(m, "replications");
      res = run_convergence(ctx.cfg, &m);
    }
    const Table reps = replication_table(res, ctx.cfg);
    const Table sum = summary_table(res, ctx.cfg);
    m.record_output(write_table_file(ctx, reps, "replications"));
    m.record_output(write_table_file(ctx, sum, "summary"));
    finish_manifest(ctx, m, "converge", nlohmann::json::object());
    write_table(sum, out, ctx.format);
    for (const auto& rr : res.replications) {
      if (!rr.ok) {
        err << "warning: n=" << rr.n << " replication " << rr.replication << ": " << rr.status << '\n';
      }
    }
  });

  // ergodic -------------------------------------------------------------------
  auto* ergo = app.add_subcommand("ergodic", "U-statistics mu_F of sampled labels against t(F, kernel^tau)");
  ergo->callback([&] {
    auto ctx = make_context(common);
    RunManifest m;
    ErgodicResult res;
    {
      StageTimer timer(m, "replications");
      res = run_ergodic_check(ctx.cfg, &m);
    }
    const Table t = ergodic_table(res, ctx.cfg);
    m.record_output(write_table_file(ctx, t, "ergodic"));
    finish_manifest(ctx, m, "ergodic", nlohmann::json::object());
    write_table(t, out, ctx.format);
  });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::Success&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    status = kExitRuntime;
  }
  return status;
}

inline int cli_dispatch(int argc, char** argv) {
  return cli_dispatch(std::vector<std::string>(argv, argv + argc));
}

}  // namespace graphon_rds
