#pragma once

#include <string>
#include <vector>

#include "cmf/meanfield.hpp"
#include "cmf/panel.hpp"
#include "cmf/particle.hpp"

namespace cmf {

// A named per-replicate time series plus across-replicate aggregates.
struct StatSeries {
  std::string name;
  std::vector<std::vector<double>> values;  // [replicate][time 0..T]

  int replicate_count() const { return static_cast<int>(values.size()); }
  int horizon() const { return values.empty() ? -1 : static_cast<int>(values[0].size()) - 1; }

  // Per-time mean across replicates; fixed-order summation.
  std::vector<double> mean() const;
  // Per-time standard error of the mean (0 for a single replicate).
  std::vector<double> std_error() const;
};

// Validates rectangular shape and finiteness.
StatSeries make_series(std::string name, std::vector<std::vector<double>> values);

// Single-replicate series from one coupled run (replicate averaging happens
// in the aggregators below, or incrementally via make_series).
std::vector<double> mse_series(const CoupledRun& run);       // mean over agents of |dZ|^2
std::vector<double> symdiff_series(const CoupledRun& run);   // disagreeing off-diag pair fraction
std::vector<double> triangle_series(const CoupledRun& run);  // t(C3, mf) - t(C3, particle)
std::vector<double> eig_series(const CoupledRun& run);       // lambda2/n difference, mf - particle

StatSeries mse_stat(const std::vector<CoupledRun>& runs);
StatSeries symdiff_density(const std::vector<CoupledRun>& runs);
StatSeries triangle_error(const std::vector<CoupledRun>& runs);
StatSeries eig_error(const std::vector<CoupledRun>& runs);

// Mean over t in [burn_in, T] of the across-replicate mean.
double burnin_average(const StatSeries& series, int burn_in);

// Per-function |<empirical measure over the n particle paths, f> -
// <reference measure, f>|. Horizons and dimensions must match.
std::vector<double> hydro_gap(const LatentTrajectory& particle, const ReferenceMeasure& ref,
                              const std::vector<PanelFunction>& panel);

// Pair-empirical measure around one agent at a given time (self pair j = i
// included, with its unit-diagonal edge bit) against the reference-measure
// conditional law, the edge integrated out with conditional weight b_s:
//   (1/n) sum_j f(Z_i[0..t], Z_j[0..t], A_ij(t))
//   vs (1/N) sum_j [ b*f(Z_i, Y_j, 1) + (1-b)*f(Z_i, Y_j, 0) ].
// Returns per-function absolute gaps; gaps of x-only functions vanish
// identically.
std::vector<double> cond_chaos_gap(const LatentTrajectory& particle_z,
                                   const NetworkTrajectory& particle_a, int agent, int time,
                                   const ReferenceMeasure& ref, const KernelSpec& kernel,
                                   const std::vector<PairPanelFunction>& panel);

}  // namespace cmf
