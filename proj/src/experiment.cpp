#include "cmf/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>

#include "cmf/errors.hpp"
#include "cmf/graphs.hpp"
#include "cmf/io.hpp"
#include "cmf/meanfield.hpp"
#include "cmf/pool.hpp"
#include "cmf/stats.hpp"
#include "cmf/version.hpp"
#include "json.hpp"

namespace cmf {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(hash));
  return hex;
}

// Writes manifest_<command>.json and returns the full file list.
std::vector<std::string> finish_manifest(const ExperimentConfig& config,
                                         const std::string& command,
                                         std::vector<std::string> files,
                                         const std::map<std::string, double>& timings) {
  std::sort(files.begin(), files.end());
  nlohmann::ordered_json j;
  j["command"] = command;
  j["config_hash"] = config_hash(config);
  j["seed"] = config.model.seed;
  j["version"] = kVersion;
  nlohmann::ordered_json inv = nlohmann::ordered_json::object();
  for (const auto& f : files) inv[f] = file_checksum(config.output_dir / f);
  j["files"] = inv;
  nlohmann::ordered_json tm = nlohmann::ordered_json::object();
  for (const auto& [stage, secs] : timings) tm[stage] = secs;
  j["timings"] = tm;

  const std::string name = "manifest_" + command + ".json";
  std::ofstream out(config.output_dir / name, std::ios::trunc);
  if (!out) throw ConfigError("cannot write file: " + (config.output_dir / name).string());
  out << j.dump(2) << "\n";
  if (!out) throw ConfigError("write failed: " + (config.output_dir / name).string());
  files.push_back(name);
  return files;
}

void ensure_output_dir(const ExperimentConfig& config) {
  std::error_code ec;
  std::filesystem::create_directories(config.output_dir, ec);
  if (ec) throw ConfigError("cannot create output dir: " + config.output_dir.string());
}

ReferenceMeasure load_reference(const ExperimentConfig& config) {
  const std::filesystem::path path = config.output_dir / "reference.cmfr";
  if (!std::filesystem::exists(path))
    throw ConfigError("missing reference measure " + path.string() +
                      " (run the meanfield command first)");
  ReferenceMeasure ref = read_reference_binary(path);
  if (ref.d != config.model.d || ref.T < config.model.T)
    throw ConfigError("reference measure " + path.string() + " does not match the config");
  return ref;
}

std::string subset_label(const std::vector<int>& subset) {
  std::string s;
  for (std::size_t i = 0; i < subset.size(); ++i) {
    if (i > 0) s += "+";
    s += std::to_string(subset[i]);
  }
  return s;
}

// The built-in layer-subset family: final time, midpoint, and the two
// size-2 persistence subsets, deduplicated and kept well-formed for tiny T.
std::vector<std::vector<int>> graphon_subsets(int T) {
  std::vector<std::vector<int>> subsets;
  auto add = [&](std::vector<int> s) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    if (std::find(subsets.begin(), subsets.end(), s) == subsets.end()) subsets.push_back(s);
  };
  const int mid = (T + 1) / 2;
  add({T});
  add({mid});
  add({mid, T});
  if (T >= 1) add({T - 1, T});
  return subsets;
}

}  // namespace

std::string config_hash(const ExperimentConfig& config) {
  return fnv1a_hex(serialize_config(config));
}

std::vector<std::string> run_simulate(const ExperimentConfig& config, int workers) {
  config.validate();
  ensure_output_dir(config);
  const auto start = Clock::now();
  WorkerPool pool(workers);

  const int G = static_cast<int>(config.n_grid.size());
  const int M = config.replicates;
  std::vector<std::vector<std::string>> cell_files(static_cast<std::size_t>(G) * M);
  pool.run(G * M, [&](int cell) {
    const int gi = cell / M;
    const int r = cell % M;
    ModelConfig model = config.model;
    model.n = config.n_grid[static_cast<std::size_t>(gi)];
    auto [z, a] = simulate(model, static_cast<std::uint64_t>(r));
    const std::string base = "run_n" + std::to_string(model.n) + "_r" + std::to_string(r);
    write_trajectory_csv(config.output_dir / (base + ".csv"), z);
    cell_files[static_cast<std::size_t>(cell)].push_back(base + ".csv");
    if (config.binary_dumps) {
      write_run_binary(config.output_dir / (base + ".cmf1"), z, a);
      cell_files[static_cast<std::size_t>(cell)].push_back(base + ".cmf1");
    }
  });

  std::vector<std::string> files;
  for (auto& cf : cell_files) files.insert(files.end(), cf.begin(), cf.end());
  return finish_manifest(config, "simulate", std::move(files),
                         {{"simulate", seconds_since(start)}});
}

std::vector<std::string> run_meanfield(const ExperimentConfig& config, int workers) {
  config.validate();
  ensure_output_dir(config);
  const auto start = Clock::now();
  WorkerPool pool(workers);

  const ReferenceOptions options{config.fresh_iteration_noise};
  ReferenceSampleResult result = reference_sample(config.model, config.reference_samples,
                                                  config.iterations, options, &pool);
  if (result.diagnostics.warned_not_decreasing)
    std::cerr << "warning: reference iteration discrepancy not decreasing over the last "
                 "iterations; consider more iterations or larger N\n";

  write_reference_binary(config.output_dir / "reference.cmfr", result.measure);
  write_convergence_csv(config.output_dir / "convergence.csv", result.diagnostics);
  return finish_manifest(config, "meanfield", {"reference.cmfr", "convergence.csv"},
                         {{"meanfield", seconds_since(start)}});
}

std::vector<std::string> run_couple_stats(const ExperimentConfig& config, int workers) {
  config.validate();
  ensure_output_dir(config);
  const auto start = Clock::now();
  WorkerPool pool(workers);
  const ReferenceMeasure ref = load_reference(config);

  std::vector<std::string> coupled;  // the four series statistics, fixed order
  for (const char* s : {"mse", "symdiff", "triangle", "lambda2"})
    if (config.statistics.contains(s)) coupled.push_back(s);
  const bool want_hydro = config.statistics.contains("hydro");
  const bool want_chaos = config.statistics.contains("cond_chaos");

  const int G = static_cast<int>(config.n_grid.size());
  const int M = config.replicates;
  const int T = config.model.T;
  const auto traj_panel = make_trajectory_panel(config.model.d, T);
  const auto pair_panel = make_pair_panel(config.model.d, T);

  // series[stat][gi][r] = per-time values; gap panels per (gi, r).
  std::map<std::string, std::vector<std::vector<std::vector<double>>>> series;
  for (const auto& s : coupled)
    series[s].assign(static_cast<std::size_t>(G),
                     std::vector<std::vector<double>>(static_cast<std::size_t>(M)));
  std::vector<std::vector<std::vector<double>>> hydro(
      static_cast<std::size_t>(G), std::vector<std::vector<double>>(static_cast<std::size_t>(M)));
  auto chaos = hydro;

  pool.run(G * M, [&](int cell) {
    const int gi = cell / M;
    const int r = cell % M;
    ModelConfig model = config.model;
    model.n = config.n_grid[static_cast<std::size_t>(gi)];
    const CoupledRun run = couple(model, ref, static_cast<std::uint64_t>(r), nullptr);
    for (const auto& s : coupled) {
      auto& slot = series.at(s)[static_cast<std::size_t>(gi)][static_cast<std::size_t>(r)];
      if (s == "mse")
        slot = mse_series(run);
      else if (s == "symdiff")
        slot = symdiff_series(run);
      else if (s == "triangle")
        slot = triangle_series(run);
      else
        slot = eig_series(run);
    }
    if (want_hydro)
      hydro[static_cast<std::size_t>(gi)][static_cast<std::size_t>(r)] =
          hydro_gap(run.particle_z, ref, traj_panel);
    if (want_chaos)
      chaos[static_cast<std::size_t>(gi)][static_cast<std::size_t>(r)] =
          cond_chaos_gap(run.particle_z, run.particle_a, 0, T, ref, config.model.kernel,
                         pair_panel);
  });

  std::vector<std::string> files;
  for (const auto& stat : coupled) {
    std::vector<StatSeries> per_n;
    per_n.reserve(static_cast<std::size_t>(G));
    for (int gi = 0; gi < G; ++gi)
      per_n.push_back(make_series(stat, series[stat][static_cast<std::size_t>(gi)]));

    // Combined time series across the n grid: (T+1)*|n_grid| data rows.
    {
      const std::string name = "series_" + stat + ".csv";
      std::ofstream out(config.output_dir / name, std::ios::trunc);
      if (!out) throw ConfigError("cannot write file: " + name);
      out << "n,time,mean,stderr,replicate_count\n";
      for (int gi = 0; gi < G; ++gi) {
        const auto mean = per_n[static_cast<std::size_t>(gi)].mean();
        const auto se = per_n[static_cast<std::size_t>(gi)].std_error();
        for (int t = 0; t <= T; ++t)
          out << config.n_grid[static_cast<std::size_t>(gi)] << "," << t << ","
              << format_double(mean[static_cast<std::size_t>(t)]) << ","
              << format_double(se[static_cast<std::size_t>(t)]) << "," << M << "\n";
      }
      files.push_back(name);
    }
    {
      const std::string name = "series_" + stat + "_long.csv";
      std::ofstream out(config.output_dir / name, std::ios::trunc);
      if (!out) throw ConfigError("cannot write file: " + name);
      out << "n,replicate,time,value\n";
      for (int gi = 0; gi < G; ++gi)
        for (int r = 0; r < M; ++r)
          for (int t = 0; t <= T; ++t)
            out << config.n_grid[static_cast<std::size_t>(gi)] << "," << r << "," << t << ","
                << format_double(series[stat][static_cast<std::size_t>(gi)]
                                       [static_cast<std::size_t>(r)][static_cast<std::size_t>(t)])
                << "\n";
      files.push_back(name);
    }
    {
      // Burn-in averages: per-replicate time average, mean +- SE across
      // replicates, one row per n.
      const std::string name = "burnin_" + stat + ".csv";
      std::ofstream out(config.output_dir / name, std::ios::trunc);
      if (!out) throw ConfigError("cannot write file: " + name);
      out << "n,mean,stderr,replicate_count\n";
      for (int gi = 0; gi < G; ++gi) {
        double acc = 0.0, acc2 = 0.0;
        for (int r = 0; r < M; ++r) {
          const auto& vals =
              series[stat][static_cast<std::size_t>(gi)][static_cast<std::size_t>(r)];
          double bav = 0.0;
          for (int t = config.burn_in; t <= T; ++t) bav += vals[static_cast<std::size_t>(t)];
          bav /= (T - config.burn_in + 1);
          acc += bav;
          acc2 += bav * bav;
        }
        const double mean = acc / M;
        const double var = M > 1 ? std::max(0.0, (acc2 - acc * acc / M) / (M - 1)) : 0.0;
        out << config.n_grid[static_cast<std::size_t>(gi)] << "," << format_double(mean) << ","
            << format_double(std::sqrt(var / M)) << "," << M << "\n";
      }
      files.push_back(name);
    }
  }

  auto write_gaps = [&](const char* name_cstr, const std::vector<std::string>& names,
                        const std::vector<std::vector<std::vector<double>>>& gaps) {
    std::vector<std::pair<int, std::vector<double>>> rows;
    for (int gi = 0; gi < G; ++gi) {
      std::vector<double> mean(names.size(), 0.0);
      for (int r = 0; r < M; ++r)
        for (std::size_t f = 0; f < names.size(); ++f)
          mean[f] += gaps[static_cast<std::size_t>(gi)][static_cast<std::size_t>(r)][f];
      for (double& v : mean) v /= M;
      rows.emplace_back(config.n_grid[static_cast<std::size_t>(gi)], std::move(mean));
    }
    write_panel_gaps_csv(config.output_dir / name_cstr, names, rows);
    files.push_back(name_cstr);
  };
  if (want_hydro) {
    std::vector<std::string> names;
    for (const auto& f : traj_panel) names.push_back(f.name);
    write_gaps("hydro_gaps.csv", names, hydro);
  }
  if (want_chaos) {
    std::vector<std::string> names;
    for (const auto& f : pair_panel) names.push_back(f.name);
    write_gaps("cond_chaos_gaps.csv", names, chaos);
  }

  return finish_manifest(config, "couple_stats", std::move(files),
                         {{"couple_stats", seconds_since(start)}});
}

std::vector<std::string> run_graphon(const ExperimentConfig& config, int workers) {
  config.validate();
  ensure_output_dir(config);
  const auto start = Clock::now();
  WorkerPool pool(workers);
  const ReferenceMeasure ref = load_reference(config);

  const int T = config.model.T;
  const int layer_count = T + 1;
  const auto subsets = graphon_subsets(T);
  const std::vector<std::pair<std::string, PatternGraph>> patterns = {
      {"edge", pattern_edge()}, {"triangle", pattern_triangle()}};

  // Limit estimates do not depend on n; one Monte-Carlo estimate per row.
  const KeyedRng rng(config.model.seed);
  std::vector<McEstimate> limits;
  std::uint64_t context = 0;
  for (const auto& [pname, pat] : patterns) {
    for (const auto& subset : subsets) {
      const PatternMultiplex h = pattern_at_layers(pat, subset, layer_count);
      limits.push_back(limit_multigraphon_density(h, ref, config.model.kernel,
                                                  config.reference_samples, rng, context));
      ++context;
    }
  }

  // Particle side: one realization (replicate 0) per n.
  const int G = static_cast<int>(config.n_grid.size());
  std::vector<std::vector<double>> particle(static_cast<std::size_t>(G));
  pool.run(G, [&](int gi) {
    ModelConfig model = config.model;
    model.n = config.n_grid[static_cast<std::size_t>(gi)];
    auto [z, net] = simulate(model, 0);
    (void)z;
    const MultiplexGraph m = MultiplexGraph::from_network(net);
    auto& out = particle[static_cast<std::size_t>(gi)];
    for (const auto& [pname, pat] : patterns)
      for (const auto& subset : subsets)
        out.push_back(hom_density_multiplex(pattern_at_layers(pat, subset, layer_count), m));
  });

  const std::string name = "graphon.csv";
  std::ofstream out(config.output_dir / name, std::ios::trunc);
  if (!out) throw ConfigError("cannot write file: " + name);
  out << "n,pattern,subset,particle_density,limit_estimate,limit_stderr,limit_samples\n";
  for (int gi = 0; gi < G; ++gi) {
    std::size_t row = 0;
    for (const auto& [pname, pat] : patterns) {
      for (const auto& subset : subsets) {
        const McEstimate& est = limits[row];
        out << config.n_grid[static_cast<std::size_t>(gi)] << "," << pname << ","
            << subset_label(subset) << ","
            << format_double(particle[static_cast<std::size_t>(gi)][row]) << ","
            << format_double(est.value) << "," << format_double(est.std_error) << ","
            << est.samples << "\n";
        ++row;
      }
    }
  }
  if (!out) throw ConfigError("write failed: " + name);

  return finish_manifest(config, "graphon", {name}, {{"graphon", seconds_since(start)}});
}

std::vector<std::string> run_report(const ExperimentConfig& config, int workers) {
  (void)workers;
  config.validate();
  ensure_output_dir(config);
  const auto start = Clock::now();

  // Deterministic concatenation of whatever summary files exist.
  std::vector<std::string> sources;
  for (const auto& entry : std::filesystem::directory_iterator(config.output_dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string f = entry.path().filename().string();
    const bool summary = f == "convergence.csv" || f == "graphon.csv" ||
                         f.starts_with("burnin_") || f.ends_with("_gaps.csv");
    if (summary) sources.push_back(f);
  }
  std::sort(sources.begin(), sources.end());

  const std::string name = "report.txt";
  std::ofstream out(config.output_dir / name, std::ios::trunc);
  if (!out) throw ConfigError("cannot write file: " + name);
  out << "experiment summary (config " << config_hash(config) << ", seed " << config.model.seed
      << ")\n";
  if (sources.empty()) out << "\nno summary files found; run the other commands first\n";
  for (const auto& f : sources) {
    out << "\n== " << f << " ==\n";
    std::ifstream in(config.output_dir / f);
    out << in.rdbuf();
  }
  if (!out) throw ConfigError("write failed: " + name);

  return finish_manifest(config, "report", {name}, {{"report", seconds_since(start)}});
}

}  // namespace cmf
