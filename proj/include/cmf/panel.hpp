#pragma once

#include <functional>
#include <string>
#include <vector>

#include "cmf/kernels.hpp"

namespace cmf {

// A named bounded test function on trajectory space.
struct PanelFunction {
  std::string name;
  double bound = 1.0;
  std::function<double(TrajView)> eval;
};

// A named bounded test function of (own path, other path, edge bit).
struct PairPanelFunction {
  std::string name;
  double bound = 1.0;
  std::function<double(TrajView, TrajView, int)> eval;
};

// Panel version 1: exactly 20 functions, deterministic for any (d, T).
// Families: a constant-one anchor; clipped coordinate means clamp(z_c(t)/4)
// and clipped second moments clamp(z_c(t)^2/16) at t in {T, ceil(T/2)} for
// the first min(d,2) coordinates; radial indicator boxes 1{|z(t)| <= r},
// r in {1,2,4}; per-coordinate boxes 1{|z_c(t)| <= 2}; one cross-time box
// 1{|z(T)-z(0)| <= 2}; padded to 20 with extra radial boxes at T.
// All functions are bounded by 1.
std::vector<PanelFunction> make_trajectory_panel(int d, int T);

// Pair panel version 1: exactly 20 functions of (x, y, a) used for the
// conditional-law diagnostics; includes x-only functions (whose gaps must
// vanish identically), the raw edge indicator, and products of the edge bit
// with proximity boxes and clipped y-moments. All bounded by 1.
std::vector<PairPanelFunction> make_pair_panel(int d, int T);

// Panel means over a set of trajectories; fixed-order summation.
std::vector<double> panel_means(const std::vector<PanelFunction>& panel,
                                const std::function<TrajView(int)>& traj_at, int count);

}  // namespace cmf
