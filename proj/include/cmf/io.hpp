#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "cmf/meanfield.hpp"
#include "cmf/particle.hpp"
#include "cmf/stats.hpp"

namespace cmf {

inline constexpr std::uint32_t kBinaryFormatVersion = 1;

// Shortest round-trip decimal representation (std::to_chars); the single
// formatter used by every CSV so reruns are byte-stable.
std::string format_double(double v);

// Binary run dump. Layout, all little-endian: magic "CMF1", version u32,
// n u32, d u32, T u32, then (T+1)*n*d float64 latent states in time-major
// order, then T+1 network layers as packed bits (row-major, LSB-first,
// each row padded to a whole byte).
void write_run_binary(const std::filesystem::path& path, const LatentTrajectory& z,
                      const NetworkTrajectory& a);
std::pair<LatentTrajectory, NetworkTrajectory> read_run_binary(const std::filesystem::path& path);

// Reference-measure dump: magic "CMFR", version u32, N u32, d u32, T u32,
// then N*(T+1)*d float64 in sample-major order.
void write_reference_binary(const std::filesystem::path& path, const ReferenceMeasure& ref);
ReferenceMeasure read_reference_binary(const std::filesystem::path& path);

// CSV with header "t,i,z0,...,z{d-1}"; one row per (time, agent).
void write_trajectory_csv(const std::filesystem::path& path, const LatentTrajectory& z);

// Edge-list text: header-free rows "t i j" for every off-diagonal edge i<j
// of every layer, ascending (t, i, j).
void write_edges_text(const std::filesystem::path& path, const NetworkTrajectory& a);
NetworkTrajectory read_edges_text(const std::filesystem::path& path, int n, int T,
                                  bool unit_diagonal = true);

// Aggregate CSV "time,mean,stderr,replicate_count" and long-format CSV
// "replicate,time,value".
void write_series_csv(const std::filesystem::path& path, const StatSeries& series);
void write_series_long_csv(const std::filesystem::path& path, const StatSeries& series);

// Fixed-point diagnostics: "iteration,disc,<one delta column per panel fn>".
void write_convergence_csv(const std::filesystem::path& path, const ReferenceDiagnostics& diag);

// Panel gaps: "function_name,n,gap"; one block of rows per (n, gaps) entry.
void write_panel_gaps_csv(const std::filesystem::path& path,
                          const std::vector<std::string>& function_names,
                          const std::vector<std::pair<int, std::vector<double>>>& gaps_per_n);

// FNV-1a 64 of the file bytes, lower-case hex; used by the run manifest.
std::string file_checksum(const std::filesystem::path& path);

}  // namespace cmf
