#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cmf/kernels.hpp"
#include "cmf/panel.hpp"
#include "cmf/particle.hpp"
#include "cmf/rng.hpp"

namespace cmf {

class WorkerPool;

// Guard for the weighted-mean denominator in mf_drift.
inline constexpr double kEpsDen = 1e-12;

// N equally weighted sampled trajectories standing in for the mean-field law.
// Sample-major storage: samples[j*(T+1)*d + t*d + c].
struct ReferenceMeasure {
  int N = 0, d = 0, T = 0;
  std::vector<double> samples;

  ReferenceMeasure() = default;
  ReferenceMeasure(int N_, int d_, int T_)
      : N(N_), d(d_), T(T_),
        samples(static_cast<std::size_t>(N_) * (T_ + 1) * d_, 0.0) {}

  TrajView traj(int j) const {
    return {samples.data() + static_cast<std::size_t>(j) * (T + 1) * d, T + 1, d};
  }
  std::span<const double> state(int j, int t) const {
    return {samples.data() + (static_cast<std::size_t>(j) * (T + 1) + t) * d,
            static_cast<std::size_t>(d)};
  }

  static ReferenceMeasure from_latent(const LatentTrajectory& lat);
};

// k mean-field trajectories plus the drift values L^(i)(s) actually used.
// Sample-major: z[i*(T+1)*d + t*d + c]; drift[i*T*d + s*d + c] for s = 0..T-1.
struct MeanFieldTrajectory {
  int k = 0, d = 0, T = 0;
  std::vector<double> z;
  std::vector<double> drift;

  MeanFieldTrajectory() = default;
  MeanFieldTrajectory(int k_, int d_, int T_)
      : k(k_), d(d_), T(T_),
        z(static_cast<std::size_t>(k_) * (T_ + 1) * d_, 0.0),
        drift(static_cast<std::size_t>(k_) * T_ * d_, 0.0) {}

  TrajView traj(int i) const {
    return {z.data() + static_cast<std::size_t>(i) * (T + 1) * d, T + 1, d};
  }
  std::span<const double> at(int t, int i) const {
    return {z.data() + (static_cast<std::size_t>(i) * (T + 1) + t) * d,
            static_cast<std::size_t>(d)};
  }
  std::span<const double> drift_at(int s, int i) const {
    return {drift.data() + (static_cast<std::size_t>(i) * T + s) * d,
            static_cast<std::size_t>(d)};
  }
};

// Weighted empirical drift at time s = own.len-1: the B_s-weighted mean of
// reference states at s. Throws DegenerateDenominator if the weight sum
// falls below kEpsDen (possible for finite-range kernels).
std::vector<double> mf_drift(TrajView own, const ReferenceMeasure& ref, const KernelSpec& kernel,
                             int who = -1);

// k independent mean-field trajectories against a fixed reference measure.
// Noise and (absent an override) initial draws use the same keyed streams as
// a particle run with the same replicate id, which realizes the coupling.
// initial_states, when given, supplies k*d doubles copied verbatim into t=0.
MeanFieldTrajectory mean_field_sample(const ModelConfig& config, const ReferenceMeasure& ref,
                                      int k, std::uint64_t replicate,
                                      const double* initial_states = nullptr,
                                      WorkerPool* pool = nullptr);

struct ReferenceOptions {
  // When true, every iteration draws fresh noise/init keys (independent
  // across iterations). Default reuses the bootstrap keys — common random
  // numbers — which turns the iteration into a deterministic fixed-point map
  // and makes the disc diagnostic measure genuine contraction instead of
  // Monte-Carlo noise.
  bool fresh_iteration_noise = false;
};

struct ReferenceDiagnostics {
  std::vector<std::string> panel_names;
  std::vector<double> disc;                      // disc[i-1] for iteration i = 1..m
  std::vector<std::vector<double>> deltas;       // [iteration-1][function]
  bool warned_not_decreasing = false;
};

struct ReferenceSampleResult {
  ReferenceMeasure measure;
  ReferenceDiagnostics diagnostics;
};

// Algorithm: iterate 0 is the empirical measure of an N-particle run;
// iterate i+1 is the empirical law of N mean_field_sample trajectories
// against iterate i; returns iterate m with per-iteration disc diagnostics.
ReferenceSampleResult reference_sample(const ModelConfig& config, int N, int m,
                                       const ReferenceOptions& options = {},
                                       WorkerPool* pool = nullptr);

// Samples the k×k conditional network: for each pair i<j independently given
// the trajectories, walks the edge chain with keyed uniforms (the same keys a
// particle run would consume). Runs strictly after the trajectories are
// complete — the latent side never reads the sampled network.
NetworkTrajectory generate_limit_network(const MeanFieldTrajectory& trajs,
                                         const KernelSpec& kernel, const KeyedRng& rng,
                                         std::uint64_t replicate);

struct CoupledRun {
  int n = 0, d = 0, T = 0;
  LatentTrajectory particle_z;
  NetworkTrajectory particle_a;
  MeanFieldTrajectory mf_z;
  NetworkTrajectory mf_a;
};

// Couples an n-particle run with an n-trajectory mean-field run: identical
// initial states, identical noise draws, identical edge uniforms.
CoupledRun couple(const ModelConfig& config, const ReferenceMeasure& ref, std::uint64_t replicate,
                  WorkerPool* pool = nullptr);

}  // namespace cmf
