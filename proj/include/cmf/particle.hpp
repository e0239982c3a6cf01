#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "cmf/bitmatrix.hpp"
#include "cmf/kernels.hpp"
#include "cmf/rng.hpp"

namespace cmf {

struct NoiseSpec {
  enum class Kind { kGaussian, kZero };
  Kind kind = Kind::kGaussian;
  double sigma = 1.0;  // per-coordinate standard deviation (Gaussian only)
};

// I.i.d. Gaussian initial law; empty mean means the origin.
struct InitialLaw {
  std::vector<double> mean;
  double sigma = 1.0;
};

struct ModelConfig {
  int n = 100;
  int d = 2;
  int T = 20;  // horizon: trajectories cover t = 0..T
  double gamma = 0.3;
  NoiseSpec noise;
  InitialLaw init;
  KernelSpec kernel;
  std::uint64_t seed = 0;

  void validate() const;
};

// Latent states, time-major: values[t*n*d + i*d + c].
struct LatentTrajectory {
  int n = 0, d = 0, T = 0;
  std::vector<double> values;

  LatentTrajectory() = default;
  LatentTrajectory(int n_, int d_, int T_)
      : n(n_), d(d_), T(T_),
        values(static_cast<std::size_t>(T_ + 1) * n_ * d_, 0.0) {}

  double* state(int t) { return values.data() + static_cast<std::size_t>(t) * n * d; }
  const double* state(int t) const { return values.data() + static_cast<std::size_t>(t) * n * d; }
  std::span<const double> at(int t, int i) const {
    return {state(t) + static_cast<std::size_t>(i) * d, static_cast<std::size_t>(d)};
  }
  // Strided view of agent i's full path (no copy).
  TrajView agent_path(int i) const {
    return {values.data() + static_cast<std::size_t>(i) * d, T + 1, d,
            static_cast<std::size_t>(n) * d};
  }
};

// One symmetric unit-diagonal layer per time t = 0..T.
struct NetworkTrajectory {
  int n = 0, T = 0;
  std::vector<BitMatrix> layers;

  NetworkTrajectory() = default;
  NetworkTrajectory(int n_, int T_) : n(n_), T(T_), layers(T_ + 1, BitMatrix(n_)) {}
};

// Draws Z(0) i.i.d. from the initial law and A(0) with independent
// Bernoulli(B0(Z_i(0), Z_j(0))) above the diagonal, unit diagonal.
// Returns the t=0 latent snapshot (n*d doubles) and network layer.
std::pair<std::vector<double>, BitMatrix> init_state(const ModelConfig& config,
                                                     std::uint64_t replicate);

// Z_i(t+1) = (1-gamma)Z_i(t) + gamma*L_i(t) + xi_i(t), with L_i the
// degree-normalized neighbor average (self-loop inclusive). noise may be
// empty for zero noise; otherwise n*d draws.
std::vector<double> step_latent(const std::vector<double>& z, const BitMatrix& a, int d,
                                double gamma, const std::vector<double>& noise);

// A_{ij}(t+1) = 1{U < B(A_{ij}(t), Z_i(t+1), Z_j(t+1))} independently for
// i < j; symmetric; unit diagonal. time keys the edge uniforms.
BitMatrix step_network(const BitMatrix& a, const std::vector<double>& z_next, int d,
                       const KernelSpec& kernel, const KeyedRng& rng, std::uint64_t replicate,
                       std::uint64_t time);

// Full run: alternates step_latent / step_network from init_state. A pure
// function of (config, replicate); schedule-independent by keyed randomness.
std::pair<LatentTrajectory, NetworkTrajectory> simulate(const ModelConfig& config,
                                                        std::uint64_t replicate);

}  // namespace cmf
