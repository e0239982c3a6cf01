#include "cmf/particle.hpp"

#include <bit>
#include <cassert>
#include <cmath>
#include <stdexcept>

#include "cmf/errors.hpp"

namespace cmf {

void ModelConfig::validate() const {
  if (n < 1) throw ConfigError("model: n must be >= 1");
  if (d < 1) throw ConfigError("model: d must be >= 1");
  if (T < 0) throw ConfigError("model: horizon must be >= 0");
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("model: gamma must lie in (0,1)");
  if (noise.kind == NoiseSpec::Kind::kGaussian && noise.sigma < 0.0)
    throw ConfigError("model: noise sigma must be >= 0");
  if (!init.mean.empty() && static_cast<int>(init.mean.size()) != d)
    throw ConfigError("model: init mean dimension mismatch");
  if (init.sigma < 0.0) throw ConfigError("model: init sigma must be >= 0");
}

namespace {

std::vector<double> draw_initial(const ModelConfig& config, std::uint64_t replicate) {
  const KeyedRng rng(config.seed);
  std::vector<double> z(static_cast<std::size_t>(config.n) * config.d);
  for (int i = 0; i < config.n; ++i) {
    for (int c = 0; c < config.d; ++c) {
      const double mean = config.init.mean.empty() ? 0.0 : config.init.mean[c];
      z[static_cast<std::size_t>(i) * config.d + c] =
          mean + config.init.sigma *
                     rng.normal(Stream::kInitLatent, replicate, 0, static_cast<std::uint64_t>(i),
                                static_cast<std::uint64_t>(c));
    }
  }
  return z;
}

std::vector<double> draw_noise(const ModelConfig& config, std::uint64_t replicate,
                               std::uint64_t step) {
  if (config.noise.kind == NoiseSpec::Kind::kZero || config.noise.sigma == 0.0) return {};
  const KeyedRng rng(config.seed);
  std::vector<double> xi(static_cast<std::size_t>(config.n) * config.d);
  for (int i = 0; i < config.n; ++i) {
    for (int c = 0; c < config.d; ++c) {
      xi[static_cast<std::size_t>(i) * config.d + c] =
          config.noise.sigma * rng.normal(Stream::kLatentNoise, replicate, step,
                                          static_cast<std::uint64_t>(i),
                                          static_cast<std::uint64_t>(c));
    }
  }
  return xi;
}

}  // namespace

std::pair<std::vector<double>, BitMatrix> init_state(const ModelConfig& config,
                                                     std::uint64_t replicate) {
  config.validate();
  std::vector<double> z = draw_initial(config, replicate);
  const KeyedRng rng(config.seed);
  BitMatrix a(config.n);
  for (int i = 0; i < config.n; ++i) {
    a.set(i, i, true);
    const std::span<const double> zi{z.data() + static_cast<std::size_t>(i) * config.d,
                                     static_cast<std::size_t>(config.d)};
    for (int j = i + 1; j < config.n; ++j) {
      const std::span<const double> zj{z.data() + static_cast<std::size_t>(j) * config.d,
                                       static_cast<std::size_t>(config.d)};
      const double p = config.kernel.b0(zi, zj);
      const double u = rng.uniform(Stream::kEdgeUniform, replicate, 0,
                                   static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j));
      a.set_sym(i, j, u < p);
    }
  }
  return {std::move(z), std::move(a)};
}

std::vector<double> step_latent(const std::vector<double>& z, const BitMatrix& a, int d,
                                double gamma, const std::vector<double>& noise) {
  const int n = a.size();
  if (static_cast<std::size_t>(n) * d != z.size())
    throw std::invalid_argument("step_latent: shape mismatch");
  if (!noise.empty() && noise.size() != z.size())
    throw std::invalid_argument("step_latent: noise shape mismatch");
  std::vector<double> out(z.size());
  std::vector<double> acc(static_cast<std::size_t>(d));
  for (int i = 0; i < n; ++i) {
    const int deg = a.degree(i);
    assert(deg >= 1);  // unit diagonal guarantees a self-loop
    std::fill(acc.begin(), acc.end(), 0.0);
    const std::uint64_t* row = a.row(i);
    for (int w = 0; w < a.words_per_row(); ++w) {
      std::uint64_t bits = row[w];
      while (bits != 0) {
        const int j = w * 64 + std::countr_zero(bits);
        bits &= bits - 1;
        const double* zj = z.data() + static_cast<std::size_t>(j) * d;
        for (int c = 0; c < d; ++c) acc[static_cast<std::size_t>(c)] += zj[c];
      }
    }
    const double* zi = z.data() + static_cast<std::size_t>(i) * d;
    double* oi = out.data() + static_cast<std::size_t>(i) * d;
    for (int c = 0; c < d; ++c) {
      const double li = acc[static_cast<std::size_t>(c)] / deg;
      oi[c] = (1.0 - gamma) * zi[c] + gamma * li + (noise.empty() ? 0.0 : noise[static_cast<std::size_t>(i) * d + c]);
    }
  }
  return out;
}

BitMatrix step_network(const BitMatrix& a, const std::vector<double>& z_next, int d,
                       const KernelSpec& kernel, const KeyedRng& rng, std::uint64_t replicate,
                       std::uint64_t time) {
  const int n = a.size();
  if (static_cast<std::size_t>(n) * d != z_next.size())
    throw std::invalid_argument("step_network: shape mismatch");
  BitMatrix next(n);
  for (int i = 0; i < n; ++i) {
    next.set(i, i, true);
    const std::span<const double> zi{z_next.data() + static_cast<std::size_t>(i) * d,
                                     static_cast<std::size_t>(d)};
    for (int j = i + 1; j < n; ++j) {
      const std::span<const double> zj{z_next.data() + static_cast<std::size_t>(j) * d,
                                       static_cast<std::size_t>(d)};
      const double p = kernel.b(a.get(i, j) ? 1 : 0, zi, zj);
      const double u = rng.uniform(Stream::kEdgeUniform, replicate, time,
                                   static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j));
      next.set_sym(i, j, u < p);
    }
  }
  return next;
}

std::pair<LatentTrajectory, NetworkTrajectory> simulate(const ModelConfig& config,
                                                        std::uint64_t replicate) {
  config.validate();
  const KeyedRng rng(config.seed);
  LatentTrajectory lat(config.n, config.d, config.T);
  NetworkTrajectory net(config.n, config.T);

  auto [z0, a0] = init_state(config, replicate);
  std::copy(z0.begin(), z0.end(), lat.state(0));
  net.layers[0] = std::move(a0);

  std::vector<double> z = std::move(z0);
  for (int t = 0; t < config.T; ++t) {
    const std::vector<double> xi = draw_noise(config, replicate, static_cast<std::uint64_t>(t));
    z = step_latent(z, net.layers[static_cast<std::size_t>(t)], config.d, config.gamma, xi);
    std::copy(z.begin(), z.end(), lat.state(t + 1));
    net.layers[static_cast<std::size_t>(t + 1)] =
        step_network(net.layers[static_cast<std::size_t>(t)], z, config.d, config.kernel, rng,
                     replicate, static_cast<std::uint64_t>(t + 1));
  }
  return {std::move(lat), std::move(net)};
}

}  // namespace cmf
