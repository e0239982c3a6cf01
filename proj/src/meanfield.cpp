#include "cmf/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cmf/errors.hpp"
#include "cmf/pool.hpp"

namespace cmf {

namespace {

// Flattened kernel parameters for the sampler hot loop: evaluates B(0|.)
// and B(1|.) with a single exp for the logistic variant.
struct FastKernel {
  enum class Tag { kLogistic, kBoundedConfidence, kConstant, kCustom } tag;
  double intercept = 0.0, slope = 0.0, exp_neg_pers = 1.0;
  double radius = 0.0;
  double value = 0.0;
  const KernelSpec* spec = nullptr;

  explicit FastKernel(const KernelSpec& k) : spec(&k) {
    if (const auto* lk = std::get_if<LogisticKernel>(&k.variant())) {
      tag = Tag::kLogistic;
      intercept = lk->intercept;
      slope = lk->distance_slope;
      exp_neg_pers = std::exp(-lk->persistence);
    } else if (const auto* bc = std::get_if<BoundedConfidenceKernel>(&k.variant())) {
      tag = Tag::kBoundedConfidence;
      radius = bc->radius;
    } else if (const auto* ck = std::get_if<ConstantKernel>(&k.variant())) {
      tag = Tag::kConstant;
      value = ck->value;
    } else {
      tag = Tag::kCustom;
    }
  }

  void b01(std::span<const double> z1, std::span<const double> z2, double& b0v,
           double& b1v) const {
    switch (tag) {
      case Tag::kLogistic: {
        const double t = std::exp(slope * euclidean_distance(z1, z2) - intercept);
        b0v = 1.0 / (1.0 + t);
        b1v = 1.0 / (1.0 + t * exp_neg_pers);
        return;
      }
      case Tag::kBoundedConfidence: {
        const double in = euclidean_distance(z1, z2) <= radius ? 1.0 : 0.0;
        b0v = in;
        b1v = in;
        return;
      }
      case Tag::kConstant:
        b0v = value;
        b1v = value;
        return;
      case Tag::kCustom:
        b0v = spec->b(0, z1, z2);
        b1v = spec->b(1, z1, z2);
        return;
    }
  }

  double initial(std::span<const double> z1, std::span<const double> z2) const {
    return spec->b0(z1, z2);
  }
};

}  // namespace

ReferenceMeasure ReferenceMeasure::from_latent(const LatentTrajectory& lat) {
  ReferenceMeasure ref(lat.n, lat.d, lat.T);
  for (int j = 0; j < lat.n; ++j) {
    for (int t = 0; t <= lat.T; ++t) {
      const auto src = lat.at(t, j);
      std::copy(src.begin(), src.end(),
                ref.samples.begin() + (static_cast<std::size_t>(j) * (lat.T + 1) + t) * lat.d);
    }
  }
  return ref;
}

std::vector<double> mf_drift(TrajView own, const ReferenceMeasure& ref, const KernelSpec& kernel,
                             int who) {
  if (own.dim != ref.d) throw std::invalid_argument("mf_drift: dimension mismatch");
  const int s = own.len - 1;
  if (s < 0 || s > ref.T) throw std::invalid_argument("mf_drift: reference horizon too short");
  std::vector<double> num(static_cast<std::size_t>(ref.d), 0.0);
  double den = 0.0;
  for (int j = 0; j < ref.N; ++j) {
    const double w = b_s(kernel, own, ref.traj(j).prefix(own.len));
    const auto zj = ref.state(j, s);
    for (int c = 0; c < ref.d; ++c) num[static_cast<std::size_t>(c)] += w * zj[c];
    den += w;
  }
  if (den < kEpsDen) throw DegenerateDenominator(who, s, den);
  for (double& v : num) v /= den;
  return num;
}

MeanFieldTrajectory mean_field_sample(const ModelConfig& config, const ReferenceMeasure& ref,
                                      int k, std::uint64_t replicate,
                                      const double* initial_states, WorkerPool* pool) {
  config.validate();
  if (k < 0) throw std::invalid_argument("mean_field_sample: negative count");
  if (ref.N < 1) throw std::invalid_argument("mean_field_sample: empty reference");
  if (ref.d != config.d) throw std::invalid_argument("mean_field_sample: dimension mismatch");
  if (ref.T < config.T) throw std::invalid_argument("mean_field_sample: reference horizon too short");

  const int d = config.d;
  const int T = config.T;
  MeanFieldTrajectory out(k, d, T);
  if (k == 0) return out;

  const KeyedRng rng(config.seed);
  const FastKernel fast(config.kernel);
  const double sigma =
      config.noise.kind == NoiseSpec::Kind::kZero ? 0.0 : config.noise.sigma;

  auto one_trajectory = [&](int i) {
    double* zi = out.z.data() + static_cast<std::size_t>(i) * (T + 1) * d;
    double* di = out.drift.data() + static_cast<std::size_t>(i) * T * d;
    if (initial_states != nullptr) {
      std::copy(initial_states + static_cast<std::size_t>(i) * d,
                initial_states + static_cast<std::size_t>(i + 1) * d, zi);
    } else {
      for (int c = 0; c < d; ++c) {
        const double mean = config.init.mean.empty() ? 0.0 : config.init.mean[c];
        zi[c] = mean + config.init.sigma *
                           rng.normal(Stream::kInitLatent, replicate, 0,
                                      static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(c));
      }
    }
    std::vector<double> w(static_cast<std::size_t>(ref.N));  // B_s cache per reference sample
    for (int t = 0; t < T; ++t) {
      const std::span<const double> own{zi + static_cast<std::size_t>(t) * d,
                                        static_cast<std::size_t>(d)};
      if (t == 0) {
        for (int j = 0; j < ref.N; ++j)
          w[static_cast<std::size_t>(j)] = fast.initial(own, ref.state(j, 0));
      } else {
        for (int j = 0; j < ref.N; ++j) {
          double b0v = 0.0, b1v = 0.0;
          fast.b01(own, ref.state(j, t), b0v, b1v);
          const double p = w[static_cast<std::size_t>(j)];
          w[static_cast<std::size_t>(j)] = p * b1v + (1.0 - p) * b0v;
        }
      }
      double den = 0.0;
      double* drift = di + static_cast<std::size_t>(t) * d;
      std::fill(drift, drift + d, 0.0);
      for (int j = 0; j < ref.N; ++j) {
        const double wj = w[static_cast<std::size_t>(j)];
        const auto zj = ref.state(j, t);
        for (int c = 0; c < d; ++c) drift[c] += wj * zj[c];
        den += wj;
      }
      if (den < kEpsDen) throw DegenerateDenominator(i, t, den);
      double* znext = zi + static_cast<std::size_t>(t + 1) * d;
      for (int c = 0; c < d; ++c) {
        drift[c] /= den;
        const double xi =
            sigma == 0.0 ? 0.0
                         : sigma * rng.normal(Stream::kLatentNoise, replicate,
                                              static_cast<std::uint64_t>(t),
                                              static_cast<std::uint64_t>(i),
                                              static_cast<std::uint64_t>(c));
        znext[c] = (1.0 - config.gamma) * zi[static_cast<std::size_t>(t) * d + c] +
                   config.gamma * drift[c] + xi;
      }
    }
  };

  if (pool != nullptr) {
    pool->run(k, one_trajectory);
  } else {
    for (int i = 0; i < k; ++i) one_trajectory(i);
  }
  return out;
}

ReferenceSampleResult reference_sample(const ModelConfig& config, int N, int m,
                                       const ReferenceOptions& options, WorkerPool* pool) {
  if (N < 2) throw std::invalid_argument("reference_sample: N must be >= 2");
  if (m < 0) throw std::invalid_argument("reference_sample: m must be >= 0");

  ModelConfig boot = config;
  boot.n = N;
  auto [lat, net] = simulate(boot, kReferenceReplicate);
  (void)net;
  ReferenceMeasure ref = ReferenceMeasure::from_latent(lat);

  const auto panel = make_trajectory_panel(config.d, config.T);
  ReferenceDiagnostics diag;
  for (const auto& f : panel) diag.panel_names.push_back(f.name);

  std::vector<double> prev =
      panel_means(panel, [&](int j) { return ref.traj(j); }, N);

  for (int iter = 1; iter <= m; ++iter) {
    const std::uint64_t rep =
        kReferenceReplicate + (options.fresh_iteration_noise ? static_cast<std::uint64_t>(iter) : 0);
    MeanFieldTrajectory mf;
    try {
      mf = mean_field_sample(config, ref, N, rep, nullptr, pool);
    } catch (const DegenerateDenominator& e) {
      throw NumericError("reference iteration " + std::to_string(iter) + ": " + e.what());
    }
    ReferenceMeasure next(N, config.d, config.T);
    next.samples = std::move(mf.z);
    ref = std::move(next);

    std::vector<double> cur =
        panel_means(panel, [&](int j) { return ref.traj(j); }, N);
    std::vector<double> delta(panel.size());
    double disc = 0.0;
    for (std::size_t f = 0; f < panel.size(); ++f) {
      delta[f] = cur[f] - prev[f];
      disc = std::max(disc, std::abs(delta[f]));
    }
    diag.disc.push_back(disc);
    diag.deltas.push_back(std::move(delta));
    prev = std::move(cur);
  }

  // Indicator-box panel means are quantized in units of 1/N, so "decreasing"
  // is judged up to that measurement granularity.
  const double tie = 1.0 / N;
  if (m >= 3) {
    const std::size_t last = diag.disc.size() - 1;
    if (diag.disc[last] > diag.disc[last - 1] + tie ||
        diag.disc[last - 1] > diag.disc[last - 2] + tie)
      diag.warned_not_decreasing = true;
  }

  return {std::move(ref), std::move(diag)};
}

NetworkTrajectory generate_limit_network(const MeanFieldTrajectory& trajs,
                                         const KernelSpec& kernel, const KeyedRng& rng,
                                         std::uint64_t replicate) {
  const int k = trajs.k;
  if (k < 1) throw std::invalid_argument("generate_limit_network: need at least one trajectory");
  NetworkTrajectory net(k, trajs.T);
  const FastKernel fast(kernel);
  for (int t = 0; t <= trajs.T; ++t) net.layers[static_cast<std::size_t>(t)].fill_diagonal(true);
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      const TrajView ti = trajs.traj(i);
      const TrajView tj = trajs.traj(j);
      int a = rng.uniform(Stream::kEdgeUniform, replicate, 0, static_cast<std::uint64_t>(i),
                          static_cast<std::uint64_t>(j)) < fast.initial(ti.at(0), tj.at(0))
                  ? 1
                  : 0;
      net.layers[0].set_sym(i, j, a != 0);
      for (int s = 1; s <= trajs.T; ++s) {
        double b0v = 0.0, b1v = 0.0;
        fast.b01(ti.at(s), tj.at(s), b0v, b1v);
        const double p = a ? b1v : b0v;
        a = rng.uniform(Stream::kEdgeUniform, replicate, static_cast<std::uint64_t>(s),
                        static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j)) < p
                ? 1
                : 0;
        net.layers[static_cast<std::size_t>(s)].set_sym(i, j, a != 0);
      }
    }
  }
  return net;
}

CoupledRun couple(const ModelConfig& config, const ReferenceMeasure& ref, std::uint64_t replicate,
                  WorkerPool* pool) {
  CoupledRun run;
  run.n = config.n;
  run.d = config.d;
  run.T = config.T;
  auto [lat, net] = simulate(config, replicate);
  run.particle_z = std::move(lat);
  run.particle_a = std::move(net);
  run.mf_z = mean_field_sample(config, ref, config.n, replicate, run.particle_z.state(0), pool);
  run.mf_a = generate_limit_network(run.mf_z, config.kernel, KeyedRng(config.seed), replicate);
  return run;
}

}  // namespace cmf
