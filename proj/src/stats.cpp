#include "cmf/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cmf/graphs.hpp"

namespace cmf {

namespace {

double clamp_unit(double x) { return std::clamp(x, -1.0, 1.0); }

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double dist2(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) s += (a[c] - b[c]) * (a[c] - b[c]);
  return std::sqrt(s);
}

void check_coupled(const CoupledRun& run) {
  if (run.n < 1 || run.T < 0) throw std::invalid_argument("stats: empty coupled run");
  if (run.particle_z.n != run.n || run.mf_z.k != run.n || run.particle_z.T != run.T ||
      run.mf_z.T != run.T || run.particle_a.n != run.n || run.mf_a.n != run.n)
    throw std::invalid_argument("stats: coupled run shape mismatch");
}

StatSeries aggregate(std::string name, const std::vector<CoupledRun>& runs,
                     std::vector<double> (*per_run)(const CoupledRun&)) {
  if (runs.empty()) throw std::invalid_argument("stats: need at least one replicate");
  std::vector<std::vector<double>> values;
  values.reserve(runs.size());
  for (const auto& run : runs) values.push_back(per_run(run));
  return make_series(std::move(name), std::move(values));
}

}  // namespace

std::vector<double> StatSeries::mean() const {
  const int len = horizon() + 1;
  std::vector<double> m(static_cast<std::size_t>(len), 0.0);
  for (const auto& rep : values)
    for (int t = 0; t < len; ++t) m[static_cast<std::size_t>(t)] += rep[static_cast<std::size_t>(t)];
  for (double& v : m) v /= static_cast<double>(values.size());
  return m;
}

std::vector<double> StatSeries::std_error() const {
  const int len = horizon() + 1;
  const int reps = replicate_count();
  std::vector<double> se(static_cast<std::size_t>(len), 0.0);
  if (reps < 2) return se;
  const std::vector<double> m = mean();
  for (const auto& rep : values)
    for (int t = 0; t < len; ++t) {
      const double dev = rep[static_cast<std::size_t>(t)] - m[static_cast<std::size_t>(t)];
      se[static_cast<std::size_t>(t)] += dev * dev;
    }
  for (double& v : se) v = std::sqrt(v / (reps - 1) / reps);
  return se;
}

StatSeries make_series(std::string name, std::vector<std::vector<double>> values) {
  if (values.empty()) throw std::invalid_argument("StatSeries: need at least one replicate");
  const std::size_t len = values[0].size();
  if (len == 0) throw std::invalid_argument("StatSeries: empty time axis");
  for (const auto& rep : values) {
    if (rep.size() != len) throw std::invalid_argument("StatSeries: ragged replicate lengths");
    for (double v : rep)
      if (!std::isfinite(v)) throw std::invalid_argument("StatSeries: non-finite value");
  }
  StatSeries s;
  s.name = std::move(name);
  s.values = std::move(values);
  return s;
}

std::vector<double> mse_series(const CoupledRun& run) {
  check_coupled(run);
  std::vector<double> out(static_cast<std::size_t>(run.T) + 1, 0.0);
  for (int t = 0; t <= run.T; ++t) {
    double acc = 0.0;
    for (int i = 0; i < run.n; ++i) {
      const auto p = run.particle_z.at(t, i);
      const auto q = run.mf_z.at(t, i);
      for (int c = 0; c < run.d; ++c) acc += (p[c] - q[c]) * (p[c] - q[c]);
    }
    out[static_cast<std::size_t>(t)] = acc / run.n;
  }
  return out;
}

std::vector<double> symdiff_series(const CoupledRun& run) {
  check_coupled(run);
  std::vector<double> out(static_cast<std::size_t>(run.T) + 1, 0.0);
  const double pairs = static_cast<double>(run.n) * (run.n - 1);
  for (int t = 0; t <= run.T; ++t) {
    const BitMatrix& a = run.particle_a.layers[static_cast<std::size_t>(t)];
    const BitMatrix& b = run.mf_a.layers[static_cast<std::size_t>(t)];
    std::uint64_t diff = 0;
    for (int i = 0; i < run.n; ++i) {
      const std::uint64_t* ra = a.row(i);
      const std::uint64_t* rb = b.row(i);
      for (int w = 0; w < a.words_per_row(); ++w) diff += std::popcount(ra[w] ^ rb[w]);
    }
    // Both diagonals are unit, so diff counts ordered off-diagonal pairs.
    out[static_cast<std::size_t>(t)] = static_cast<double>(diff) / pairs;
  }
  return out;
}

std::vector<double> triangle_series(const CoupledRun& run) {
  check_coupled(run);
  const PatternGraph c3 = pattern_triangle();
  std::vector<double> out(static_cast<std::size_t>(run.T) + 1, 0.0);
  for (int t = 0; t <= run.T; ++t) {
    const double mf =
        hom_density_graph(c3, SimpleGraph::from_layer(run.mf_a.layers[static_cast<std::size_t>(t)]));
    const double pt = hom_density_graph(
        c3, SimpleGraph::from_layer(run.particle_a.layers[static_cast<std::size_t>(t)]));
    out[static_cast<std::size_t>(t)] = mf - pt;
  }
  return out;
}

std::vector<double> eig_series(const CoupledRun& run) {
  check_coupled(run);
  std::vector<double> out(static_cast<std::size_t>(run.T) + 1, 0.0);
  for (int t = 0; t <= run.T; ++t) {
    out[static_cast<std::size_t>(t)] =
        scaled_lambda2(run.mf_a.layers[static_cast<std::size_t>(t)]) -
        scaled_lambda2(run.particle_a.layers[static_cast<std::size_t>(t)]);
  }
  return out;
}

StatSeries mse_stat(const std::vector<CoupledRun>& runs) { return aggregate("mse", runs, &mse_series); }

StatSeries symdiff_density(const std::vector<CoupledRun>& runs) {
  return aggregate("symdiff", runs, &symdiff_series);
}

StatSeries triangle_error(const std::vector<CoupledRun>& runs) {
  return aggregate("triangle", runs, &triangle_series);
}

StatSeries eig_error(const std::vector<CoupledRun>& runs) {
  return aggregate("lambda2", runs, &eig_series);
}

double burnin_average(const StatSeries& series, int burn_in) {
  const int T = series.horizon();
  if (burn_in < 0 || burn_in > T) throw std::invalid_argument("burnin_average: burn_in out of range");
  const std::vector<double> m = series.mean();
  double acc = 0.0;
  for (int t = burn_in; t <= T; ++t) acc += m[static_cast<std::size_t>(t)];
  return acc / (T - burn_in + 1);
}

std::vector<double> hydro_gap(const LatentTrajectory& particle, const ReferenceMeasure& ref,
                              const std::vector<PanelFunction>& panel) {
  if (particle.T != ref.T || particle.d != ref.d)
    throw std::invalid_argument("hydro_gap: horizon or dimension mismatch");
  if (particle.n < 1 || ref.N < 1) throw std::invalid_argument("hydro_gap: empty measure");
  const std::vector<double> mp =
      panel_means(panel, [&](int i) { return particle.agent_path(i); }, particle.n);
  const std::vector<double> mr = panel_means(panel, [&](int j) { return ref.traj(j); }, ref.N);
  std::vector<double> gaps(panel.size());
  for (std::size_t f = 0; f < panel.size(); ++f) gaps[f] = std::abs(mp[f] - mr[f]);
  return gaps;
}

std::vector<double> cond_chaos_gap(const LatentTrajectory& particle_z,
                                   const NetworkTrajectory& particle_a, int agent, int time,
                                   const ReferenceMeasure& ref, const KernelSpec& kernel,
                                   const std::vector<PairPanelFunction>& panel) {
  if (particle_z.d != ref.d) throw std::invalid_argument("cond_chaos_gap: dimension mismatch");
  if (time < 0 || time > particle_z.T || time > ref.T)
    throw std::invalid_argument("cond_chaos_gap: time out of range");
  if (agent < 0 || agent >= particle_z.n) throw std::invalid_argument("cond_chaos_gap: bad agent");
  const int n = particle_z.n;
  const TrajView own = particle_z.agent_path(agent).prefix(time + 1);
  const BitMatrix& layer = particle_a.layers[static_cast<std::size_t>(time)];

  std::vector<double> particle_side(panel.size(), 0.0);
  for (int j = 0; j < n; ++j) {
    const TrajView other = particle_z.agent_path(j).prefix(time + 1);
    const int a = layer.get(agent, j) ? 1 : 0;  // j = agent hits the unit diagonal
    for (std::size_t f = 0; f < panel.size(); ++f)
      particle_side[f] += panel[f].eval(own, other, a);
  }
  for (double& v : particle_side) v /= n;

  std::vector<double> mf_side(panel.size(), 0.0);
  for (int j = 0; j < ref.N; ++j) {
    const TrajView other = ref.traj(j).prefix(time + 1);
    const double b = b_s(kernel, own, other);
    for (std::size_t f = 0; f < panel.size(); ++f)
      mf_side[f] += b * panel[f].eval(own, other, 1) + (1.0 - b) * panel[f].eval(own, other, 0);
  }
  for (double& v : mf_side) v /= ref.N;

  std::vector<double> gaps(panel.size());
  for (std::size_t f = 0; f < panel.size(); ++f) gaps[f] = std::abs(particle_side[f] - mf_side[f]);
  return gaps;
}

// ---------------------------------------------------------------------------
// Test-function panels (version 1). The composition is part of the artifact
// contract: exactly 20 functions for every (d, T), all bounded by 1,
// deterministic order and names.

std::vector<PanelFunction> make_trajectory_panel(int d, int T) {
  if (d < 1 || T < 0) throw std::invalid_argument("panel: need d >= 1, T >= 0");
  std::vector<PanelFunction> panel;
  const int ncoord = std::min(d, 2);
  std::vector<int> times{T};
  const int mid = (T + 1) / 2;
  if (mid != T) times.push_back(mid);

  panel.push_back({"const_one", 1.0, [](TrajView) { return 1.0; }});
  for (int t : times)
    for (int c = 0; c < ncoord; ++c)
      panel.push_back({"mean_c" + std::to_string(c) + "_t" + std::to_string(t), 1.0,
                       [t, c](TrajView z) { return clamp_unit(z.at(t)[static_cast<std::size_t>(c)] / 4.0); }});
  for (int t : times)
    for (int c = 0; c < ncoord; ++c)
      panel.push_back({"m2_c" + std::to_string(c) + "_t" + std::to_string(t), 1.0,
                       [t, c](TrajView z) {
                         const double v = z.at(t)[static_cast<std::size_t>(c)];
                         return std::min(v * v / 16.0, 1.0);
                       }});
  for (int t : times)
    for (int r : {1, 2, 4})
      panel.push_back({"radial_le" + std::to_string(r) + "_t" + std::to_string(t), 1.0,
                       [t, r](TrajView z) { return norm2(z.at(t)) <= r ? 1.0 : 0.0; }});
  for (int c = 0; c < ncoord; ++c)
    panel.push_back({"box_c" + std::to_string(c) + "_t" + std::to_string(T), 1.0,
                     [T, c](TrajView z) {
                       return std::abs(z.at(T)[static_cast<std::size_t>(c)]) <= 2.0 ? 1.0 : 0.0;
                     }});
  panel.push_back({"disp_le2", 1.0, [T](TrajView z) { return dist2(z.at(T), z.at(0)) <= 2.0 ? 1.0 : 0.0; }});

  // Pad with further dyadic radial boxes at T up to exactly 20.
  for (int r = 8; panel.size() < 20; r *= 2)
    panel.push_back({"radial_le" + std::to_string(r) + "_t" + std::to_string(T), 1.0,
                     [T, r](TrajView z) { return norm2(z.at(T)) <= r ? 1.0 : 0.0; }});
  if (panel.size() != 20) throw std::logic_error("panel: composition bug");
  return panel;
}

std::vector<PairPanelFunction> make_pair_panel(int d, int T) {
  if (d < 1 || T < 0) throw std::invalid_argument("panel: need d >= 1, T >= 0");
  std::vector<PairPanelFunction> panel;
  const int ncoord = std::min(d, 2);
  // Functions read the final state of whatever prefix they are handed, so the
  // same panel serves every evaluation time.
  auto last = [](TrajView z) { return z.at(z.len - 1); };

  panel.push_back({"const_one", 1.0, [](TrajView, TrajView, int) { return 1.0; }});
  panel.push_back({"edge", 1.0, [](TrajView, TrajView, int a) { return static_cast<double>(a); }});
  for (int c = 0; c < ncoord; ++c)
    panel.push_back({"x_mean_c" + std::to_string(c), 1.0,
                     [last, c](TrajView x, TrajView, int) {
                       return clamp_unit(last(x)[static_cast<std::size_t>(c)] / 4.0);
                     }});
  panel.push_back({"x_radial_le2", 1.0,
                   [last](TrajView x, TrajView, int) { return norm2(last(x)) <= 2.0 ? 1.0 : 0.0; }});
  for (int c = 0; c < ncoord; ++c)
    panel.push_back({"y_mean_c" + std::to_string(c), 1.0,
                     [last, c](TrajView, TrajView y, int) {
                       return clamp_unit(last(y)[static_cast<std::size_t>(c)] / 4.0);
                     }});
  for (int c = 0; c < ncoord; ++c)
    panel.push_back({"y_m2_c" + std::to_string(c), 1.0,
                     [last, c](TrajView, TrajView y, int) {
                       const double v = last(y)[static_cast<std::size_t>(c)];
                       return std::min(v * v / 16.0, 1.0);
                     }});
  for (int r : {1, 2, 4})
    panel.push_back({"prox_le" + std::to_string(r), 1.0,
                     [last, r](TrajView x, TrajView y, int) {
                       return dist2(last(x), last(y)) <= r ? 1.0 : 0.0;
                     }});
  for (int r : {1, 2})
    panel.push_back({"edge_prox_le" + std::to_string(r), 1.0,
                     [last, r](TrajView x, TrajView y, int a) {
                       return a && dist2(last(x), last(y)) <= r ? 1.0 : 0.0;
                     }});
  panel.push_back({"edge_y_mean_c0", 1.0,
                   [last](TrajView, TrajView y, int a) {
                     return a * clamp_unit(last(y)[0] / 4.0);
                   }});
  panel.push_back({"edge_x_mean_c0", 1.0,
                   [last](TrajView x, TrajView, int a) {
                     return a * clamp_unit(last(x)[0] / 4.0);
                   }});
  for (int r : {1, 2, 4})
    panel.push_back({"y_radial_le" + std::to_string(r), 1.0,
                     [last, r](TrajView, TrajView y, int) { return norm2(last(y)) <= r ? 1.0 : 0.0; }});
  panel.push_back({"y_disp_le2", 1.0,
                   [last](TrajView, TrajView y, int) { return dist2(last(y), y.at(0)) <= 2.0 ? 1.0 : 0.0; }});

  for (int r = 8; panel.size() < 20; r *= 2)
    panel.push_back({"y_radial_le" + std::to_string(r), 1.0,
                     [last, r](TrajView, TrajView y, int) { return norm2(last(y)) <= r ? 1.0 : 0.0; }});
  if (panel.size() != 20) throw std::logic_error("pair panel: composition bug");
  return panel;
}

std::vector<double> panel_means(const std::vector<PanelFunction>& panel,
                                const std::function<TrajView(int)>& traj_at, int count) {
  if (count < 1) throw std::invalid_argument("panel_means: need at least one trajectory");
  std::vector<double> means(panel.size(), 0.0);
  for (int i = 0; i < count; ++i) {
    const TrajView z = traj_at(i);
    for (std::size_t f = 0; f < panel.size(); ++f) means[f] += panel[f].eval(z);
  }
  for (double& v : means) v /= count;
  return means;
}

}  // namespace cmf
