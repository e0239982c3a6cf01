#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "cmf/kernels.hpp"
#include "cmf/meanfield.hpp"
#include "cmf/panel.hpp"
#include "cmf/particle.hpp"
#include "cmf/rng.hpp"
#include "cmf/stats.hpp"
#include "doctest.h"

using cmf::CoupledRun;
using cmf::LatentTrajectory;
using cmf::MeanFieldTrajectory;
using cmf::NetworkTrajectory;
using cmf::StatSeries;
using cmf::TrajView;

namespace {

CoupledRun empty_run(int n, int d, int T) {
  CoupledRun run;
  run.n = n;
  run.d = d;
  run.T = T;
  run.particle_z = LatentTrajectory(n, d, T);
  run.particle_a = NetworkTrajectory(n, T);
  run.mf_z = MeanFieldTrajectory(n, d, T);
  run.mf_a = NetworkTrajectory(n, T);
  for (int t = 0; t <= T; ++t)
    for (int i = 0; i < n; ++i) {
      run.particle_a.layers[t].set(i, i, true);
      run.mf_a.layers[t].set(i, i, true);
    }
  return run;
}

void set_mf(CoupledRun& run, int t, int i, int c, double v) {
  run.mf_z.z[(static_cast<std::size_t>(i) * (run.T + 1) + t) * run.d + c] = v;
}

void set_particle(CoupledRun& run, int t, int i, int c, double v) {
  run.particle_z.values[(static_cast<std::size_t>(t) * run.n + i) * run.d + c] = v;
}

CoupledRun random_run(std::uint64_t id, int n, int d, int T) {
  const cmf::KeyedRng rng(id);
  CoupledRun run = empty_run(n, d, T);
  for (int t = 0; t <= T; ++t)
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < d; ++c) {
        set_particle(run, t, i, c,
                     rng.normal(cmf::Stream::kAux, 1, static_cast<std::uint64_t>(t),
                                static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(c)));
        set_mf(run, t, i, c,
               rng.normal(cmf::Stream::kAux, 2, static_cast<std::uint64_t>(t),
                          static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(c)));
      }
  for (int t = 0; t <= T; ++t)
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        run.particle_a.layers[t].set_sym(
            i, j,
            rng.uniform(cmf::Stream::kAux, 3, static_cast<std::uint64_t>(t),
                        static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j)) < 0.5);
        run.mf_a.layers[t].set_sym(
            i, j,
            rng.uniform(cmf::Stream::kAux, 4, static_cast<std::uint64_t>(t),
                        static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j)) < 0.5);
      }
  return run;
}

CoupledRun swapped(const CoupledRun& run) {
  CoupledRun out = run;
  // Exchange the particle and mean-field sides, converting storage layouts.
  for (int t = 0; t <= run.T; ++t)
    for (int i = 0; i < run.n; ++i)
      for (int c = 0; c < run.d; ++c) {
        const double p = run.particle_z.at(t, i)[c];
        const double m = run.mf_z.at(t, i)[c];
        out.particle_z.values[(static_cast<std::size_t>(t) * run.n + i) * run.d + c] = m;
        out.mf_z.z[(static_cast<std::size_t>(i) * (run.T + 1) + t) * run.d + c] = p;
      }
  out.particle_a = run.mf_a;
  out.mf_a = run.particle_a;
  return out;
}

CoupledRun mirrored(const CoupledRun& run) {
  CoupledRun out = run;
  for (int t = 0; t <= run.T; ++t)
    for (int i = 0; i < run.n; ++i)
      for (int c = 0; c < run.d; ++c)
        out.mf_z.z[(static_cast<std::size_t>(i) * (run.T + 1) + t) * run.d + c] =
            run.particle_z.at(t, i)[c];
  out.mf_a = run.particle_a;
  return out;
}

}  // namespace

TEST_SUITE("stats") {
  TEST_CASE("mean squared error of a single diverging agent") {
    CoupledRun run = empty_run(1, 1, 0);
    set_particle(run, 0, 0, 0, 1.0);
    set_mf(run, 0, 0, 0, 3.0);
    const auto series = cmf::mse_series(run);
    REQUIRE(series.size() == 1);
    CHECK(series[0] == doctest::Approx(4.0).epsilon(1e-15));
  }

  TEST_CASE("mean squared error sums coordinates and averages agents") {
    CoupledRun run = empty_run(2, 2, 0);
    set_particle(run, 0, 0, 0, 1.0);
    set_particle(run, 0, 0, 1, 2.0);
    // agent 0 differs by (1,2): squared norm 5; agent 1 identical: 0.
    const auto series = cmf::mse_series(run);
    CHECK(series[0] == doctest::Approx(2.5).epsilon(1e-15));
  }

  TEST_CASE("symmetric difference counts disagreeing off-diagonal pairs") {
    CoupledRun run = empty_run(3, 1, 0);
    run.particle_a.layers[0].set_sym(0, 1, true);
    const auto series = cmf::symdiff_series(run);
    CHECK(series[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    run.mf_a.layers[0].set_sym(0, 1, true);
    CHECK(cmf::symdiff_series(run)[0] == 0.0);
  }

  TEST_CASE("triangle error compares third-order densities") {
    CoupledRun run = empty_run(3, 1, 0);
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) run.mf_a.layers[0].set_sym(i, j, true);
    const auto series = cmf::triangle_series(run);
    CHECK(series[0] == doctest::Approx(2.0 / 9.0).epsilon(1e-15));
  }

  TEST_CASE("spectral error compares scaled second eigenvalues") {
    CoupledRun run = empty_run(4, 1, 0);  // particle identity layer
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) run.mf_a.layers[0].set(i, j, true);
    const auto series = cmf::eig_series(run);
    CHECK(series[0] == doctest::Approx(-0.25).epsilon(1e-12));
  }

  TEST_CASE("difference statistics are antisymmetric, distances symmetric") {
    const CoupledRun run = random_run(17, 6, 2, 3);
    const CoupledRun rev = swapped(run);
    const auto tri = cmf::triangle_series(run);
    const auto tri_rev = cmf::triangle_series(rev);
    const auto eig = cmf::eig_series(run);
    const auto eig_rev = cmf::eig_series(rev);
    const auto mse = cmf::mse_series(run);
    const auto mse_rev = cmf::mse_series(rev);
    const auto sym = cmf::symdiff_series(run);
    const auto sym_rev = cmf::symdiff_series(rev);
    for (int t = 0; t <= run.T; ++t) {
      CHECK(tri[t] == doctest::Approx(-tri_rev[t]).epsilon(1e-12));
      CHECK(eig[t] == doctest::Approx(-eig_rev[t]).epsilon(1e-10));
      CHECK(mse[t] == doctest::Approx(mse_rev[t]).epsilon(1e-12));
      CHECK(sym[t] == sym_rev[t]);
    }
  }

  TEST_CASE("identical sides give identically zero statistics") {
    const CoupledRun run = mirrored(random_run(23, 5, 2, 4));
    for (double v : cmf::mse_series(run)) CHECK(v == 0.0);
    for (double v : cmf::symdiff_series(run)) CHECK(v == 0.0);
    for (double v : cmf::triangle_series(run)) CHECK(v == 0.0);
    for (double v : cmf::eig_series(run)) CHECK(v == 0.0);
  }

  TEST_CASE("series aggregation computes means and standard errors") {
    const StatSeries s = cmf::make_series("demo", {{1.0, 3.0}, {3.0, 5.0}});
    CHECK(s.replicate_count() == 2);
    CHECK(s.horizon() == 1);
    const auto mean = s.mean();
    CHECK(mean[0] == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(mean[1] == doctest::Approx(4.0).epsilon(1e-15));
    const auto se = s.std_error();
    CHECK(se[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(se[1] == doctest::Approx(1.0).epsilon(1e-14));
    const StatSeries single = cmf::make_series("one", {{2.0, 2.0}});
    for (double v : single.std_error()) CHECK(v == 0.0);
  }

  TEST_CASE("series validation rejects malformed input") {
    CHECK_THROWS_AS(cmf::make_series("bad", {}), std::invalid_argument);
    CHECK_THROWS_AS(cmf::make_series("bad", {{}}), std::invalid_argument);
    CHECK_THROWS_AS(cmf::make_series("bad", {{1.0}, {1.0, 2.0}}), std::invalid_argument);
    CHECK_THROWS_AS(cmf::make_series("bad", {{std::nan("")}}), std::invalid_argument);
  }

  TEST_CASE("burn-in averaging uses the across-replicate mean tail") {
    const StatSeries s = cmf::make_series("demo", {{4.0, 2.0, 6.0, 8.0}});
    CHECK(cmf::burnin_average(s, 0) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(cmf::burnin_average(s, 2) == doctest::Approx(7.0).epsilon(1e-15));
    CHECK(cmf::burnin_average(s, 3) == doctest::Approx(8.0).epsilon(1e-15));
    CHECK_THROWS_AS(cmf::burnin_average(s, 4), std::invalid_argument);
    CHECK_THROWS_AS(cmf::burnin_average(s, -1), std::invalid_argument);
  }

  TEST_CASE("replicate aggregators keep shapes and names") {
    std::vector<CoupledRun> runs;
    runs.push_back(random_run(31, 5, 1, 3));
    runs.push_back(random_run(32, 5, 1, 3));
    const StatSeries mse = cmf::mse_stat(runs);
    CHECK(mse.name == "mse");
    CHECK(mse.replicate_count() == 2);
    CHECK(mse.horizon() == 3);
    CHECK(cmf::symdiff_density(runs).name == "symdiff");
    CHECK(cmf::triangle_error(runs).name == "triangle");
    CHECK(cmf::eig_error(runs).name == "lambda2");
    // Duplicated replicate: zero standard error everywhere.
    const std::vector<CoupledRun> twice{runs[0], runs[0]};
    for (double v : cmf::mse_stat(twice).std_error()) CHECK(v == 0.0);
  }

  TEST_CASE("trajectory panel has twenty bounded uniquely named functions") {
    for (auto [d, T] : std::vector<std::pair<int, int>>{{1, 0}, {1, 1}, {2, 20}, {3, 5}, {5, 2}}) {
      const auto panel = cmf::make_trajectory_panel(d, T);
      REQUIRE(panel.size() == 20);
      std::set<std::string> names;
      for (const auto& f : panel) {
        CHECK(names.insert(f.name).second);
        CHECK(f.bound <= 1.0);
      }
      CHECK(panel[0].name == "const_one");
      const cmf::KeyedRng rng(7);
      std::vector<double> path(static_cast<std::size_t>(T + 1) * d);
      for (std::size_t v = 0; v < path.size(); ++v)
        path[v] = 10.0 * rng.normal(cmf::Stream::kAux, 0, v, 0, 0);
      const TrajView z(path.data(), T + 1, d);
      for (const auto& f : panel) CHECK(std::abs(f.eval(z)) <= f.bound + 1e-12);
    }
  }

  TEST_CASE("pair panel has twenty bounded uniquely named functions") {
    for (auto [d, T] : std::vector<std::pair<int, int>>{{1, 0}, {2, 6}, {3, 2}}) {
      const auto panel = cmf::make_pair_panel(d, T);
      REQUIRE(panel.size() == 20);
      std::set<std::string> names;
      bool has_edge = false, has_x_only = false;
      for (const auto& f : panel) {
        CHECK(names.insert(f.name).second);
        CHECK(f.bound <= 1.0);
        has_edge = has_edge || f.name == "edge";
        has_x_only = has_x_only || f.name.rfind("x_", 0) == 0;
      }
      CHECK(has_edge);
      CHECK(has_x_only);
      const cmf::KeyedRng rng(8);
      std::vector<double> x(static_cast<std::size_t>(T + 1) * d), y(x.size());
      for (std::size_t v = 0; v < x.size(); ++v) {
        x[v] = 10.0 * rng.normal(cmf::Stream::kAux, 1, v, 0, 0);
        y[v] = 10.0 * rng.normal(cmf::Stream::kAux, 2, v, 0, 0);
      }
      const TrajView xv(x.data(), T + 1, d), yv(y.data(), T + 1, d);
      for (const auto& f : panel)
        for (int a = 0; a <= 1; ++a) CHECK(std::abs(f.eval(xv, yv, a)) <= f.bound + 1e-12);
    }
  }

  TEST_CASE("panel means average pointwise evaluations") {
    const auto panel = cmf::make_trajectory_panel(2, 3);
    const CoupledRun run = random_run(41, 4, 2, 3);
    const auto means = cmf::panel_means(
        panel, [&](int i) { return run.particle_z.agent_path(i); }, run.n);
    REQUIRE(means.size() == panel.size());
    for (std::size_t f = 0; f < panel.size(); ++f) {
      double direct = 0.0;
      for (int i = 0; i < run.n; ++i) direct += panel[f].eval(run.particle_z.agent_path(i));
      CHECK(means[f] == doctest::Approx(direct / run.n).epsilon(1e-15));
    }
    CHECK(means[0] == 1.0);
  }

  TEST_CASE("hydrodynamic gaps vanish when the measures coincide") {
    const CoupledRun run = random_run(51, 6, 2, 4);
    const cmf::ReferenceMeasure ref = cmf::ReferenceMeasure::from_latent(run.particle_z);
    const auto panel = cmf::make_trajectory_panel(2, 4);
    const auto gaps = cmf::hydro_gap(run.particle_z, ref, panel);
    REQUIRE(gaps.size() == panel.size());
    for (double g : gaps) CHECK(g == 0.0);
  }

  TEST_CASE("hydrodynamic constant-function gap is always zero") {
    const CoupledRun run = random_run(52, 5, 1, 2);
    cmf::ReferenceMeasure ref(7, 1, 2);
    for (std::size_t v = 0; v < ref.samples.size(); ++v) ref.samples[v] = 0.3 * v;
    const auto panel = cmf::make_trajectory_panel(1, 2);
    const auto gaps = cmf::hydro_gap(run.particle_z, ref, panel);
    CHECK(gaps[0] == 0.0);  // const_one
    bool any_positive = false;
    for (double g : gaps) {
      CHECK(g >= 0.0);
      any_positive = any_positive || g > 0.0;
    }
    CHECK(any_positive);
  }

  TEST_CASE("conditional gaps vanish for functions of the conditioning path") {
    const CoupledRun run = random_run(61, 5, 2, 3);
    cmf::ReferenceMeasure ref(9, 2, 3);
    for (std::size_t v = 0; v < ref.samples.size(); ++v) ref.samples[v] = 0.1 * v - 1.0;
    const auto panel = cmf::make_pair_panel(2, 3);
    const auto gaps = cmf::cond_chaos_gap(run.particle_z, run.particle_a, 2, 3, ref,
                                          cmf::KernelSpec::logistic(1.0, 0.5, 1.0), panel);
    REQUIRE(gaps.size() == panel.size());
    for (std::size_t f = 0; f < panel.size(); ++f) {
      // Vanishes by construction; only round-off from the b-weighted split
      // of f(x) survives.
      if (panel[f].name == "const_one" || panel[f].name.rfind("x_", 0) == 0)
        CHECK(gaps[f] <= 1e-15);
      CHECK(gaps[f] >= 0.0);
    }
  }

  TEST_CASE("conditional edge gap under a constant kernel is a density difference") {
    const double c = 0.4;
    const int n = 5, T = 2, agent = 1;
    CoupledRun run = empty_run(n, 1, T);
    // Row of the observed layer at time T: agent 1 linked to 0 and 3.
    run.particle_a.layers[T].set_sym(1, 0, true);
    run.particle_a.layers[T].set_sym(1, 3, true);
    cmf::ReferenceMeasure ref(6, 1, T);
    const auto panel = cmf::make_pair_panel(1, T);
    const auto gaps = cmf::cond_chaos_gap(run.particle_z, run.particle_a, agent, T, ref,
                                          cmf::KernelSpec::constant(c), panel);
    for (std::size_t f = 0; f < panel.size(); ++f) {
      if (panel[f].name != "edge") continue;
      // Particle side: (1 self + 2 links) / 5; limit side: c.
      CHECK(gaps[f] == doctest::Approx(std::abs(3.0 / n - c)).epsilon(1e-14));
    }
  }

  TEST_CASE("gap metrics validate their inputs") {
    const CoupledRun run = random_run(71, 4, 2, 3);
    const cmf::ReferenceMeasure ref = cmf::ReferenceMeasure::from_latent(run.particle_z);
    const auto panel = cmf::make_pair_panel(2, 3);
    CHECK_THROWS_AS(cmf::cond_chaos_gap(run.particle_z, run.particle_a, 9, 3, ref,
                                        cmf::KernelSpec(), panel),
                    std::invalid_argument);
    CHECK_THROWS_AS(cmf::cond_chaos_gap(run.particle_z, run.particle_a, 0, 9, ref,
                                        cmf::KernelSpec(), panel),
                    std::invalid_argument);
    cmf::ReferenceMeasure short_ref(3, 2, 1);
    CHECK_THROWS_AS(
        cmf::hydro_gap(run.particle_z, short_ref, cmf::make_trajectory_panel(2, 3)),
        std::invalid_argument);
  }
}
