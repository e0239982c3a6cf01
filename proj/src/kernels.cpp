#include "cmf/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cmf/errors.hpp"

namespace cmf {

namespace {

double clamp01(double p) { return std::clamp(p, 0.0, 1.0); }

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void check_states(std::span<const double> z1, std::span<const double> z2) {
  if (z1.size() != z2.size()) throw std::invalid_argument("kernel: dimension mismatch");
  for (double v : z1)
    if (!std::isfinite(v)) throw std::invalid_argument("kernel: non-finite state");
  for (double v : z2)
    if (!std::isfinite(v)) throw std::invalid_argument("kernel: non-finite state");
}

}  // namespace

double euclidean_distance(std::span<const double> z1, std::span<const double> z2) {
  double s = 0.0;
  for (std::size_t c = 0; c < z1.size(); ++c) {
    const double diff = z1[c] - z2[c];
    s += diff * diff;
  }
  return std::sqrt(s);
}

KernelSpec::KernelSpec() : variant_(LogisticKernel{}) {}

KernelSpec::KernelSpec(Variant v, double decay_constant)
    : variant_(std::move(v)), decay_constant_(decay_constant) {
  if (auto* lk = std::get_if<LogisticKernel>(&variant_)) {
    if (lk->distance_slope < 0.0) throw std::invalid_argument("logistic: distance_slope < 0");
    if (lk->persistence < 0.0) throw std::invalid_argument("logistic: persistence < 0");
  } else if (auto* bc = std::get_if<BoundedConfidenceKernel>(&variant_)) {
    if (bc->radius <= 0.0) throw std::invalid_argument("bounded confidence: radius <= 0");
  } else if (auto* ck = std::get_if<ConstantKernel>(&variant_)) {
    if (ck->value < 0.0 || ck->value > 1.0)
      throw std::invalid_argument("constant kernel: value outside [0,1]");
  } else if (auto* cu = std::get_if<CustomKernel>(&variant_)) {
    if (!cu->b0 || !cu->b) throw std::invalid_argument("custom kernel: missing evaluator");
  }
  if (decay_constant_ <= 0.0) throw std::invalid_argument("kernel: decay_constant <= 0");
}

KernelSpec KernelSpec::logistic(double intercept, double distance_slope, double persistence) {
  return KernelSpec(LogisticKernel{intercept, distance_slope, persistence});
}

KernelSpec KernelSpec::bounded_confidence(double radius) {
  return KernelSpec(BoundedConfidenceKernel{radius});
}

KernelSpec KernelSpec::constant(double value) { return KernelSpec(ConstantKernel{value}); }

KernelSpec KernelSpec::custom(CustomKernel k) { return KernelSpec(Variant{std::move(k)}); }

double KernelSpec::b0(std::span<const double> z1, std::span<const double> z2) const {
  check_states(z1, z2);
  return std::visit(
      [&](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, LogisticKernel>) {
          return clamp01(sigmoid(k.intercept - k.distance_slope * euclidean_distance(z1, z2)));
        } else if constexpr (std::is_same_v<K, BoundedConfidenceKernel>) {
          return euclidean_distance(z1, z2) <= k.radius ? 1.0 : 0.0;
        } else if constexpr (std::is_same_v<K, ConstantKernel>) {
          return k.value;
        } else {
          return clamp01(k.b0(z1, z2));
        }
      },
      variant_);
}

double KernelSpec::b(int a, std::span<const double> z1, std::span<const double> z2) const {
  if (a != 0 && a != 1) throw std::invalid_argument("kernel: edge state must be 0 or 1");
  check_states(z1, z2);
  return std::visit(
      [&](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, LogisticKernel>) {
          return clamp01(sigmoid(k.intercept + k.persistence * a -
                                  k.distance_slope * euclidean_distance(z1, z2)));
        } else if constexpr (std::is_same_v<K, BoundedConfidenceKernel>) {
          // No persistence: B(a,.,.) coincides with the indicator B0.
          return euclidean_distance(z1, z2) <= k.radius ? 1.0 : 0.0;
        } else if constexpr (std::is_same_v<K, ConstantKernel>) {
          return k.value;
        } else {
          return clamp01(k.b(a, z1, z2));
        }
      },
      variant_);
}

InteractionRegime KernelSpec::regime() const {
  return std::visit(
      [](const auto& k) -> InteractionRegime {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, BoundedConfidenceKernel>) {
          return InteractionRegime::kFiniteRange;
        } else if constexpr (std::is_same_v<K, CustomKernel>) {
          return k.regime;
        } else {
          return InteractionRegime::kExpDecay;
        }
      },
      variant_);
}

void KernelSpec::validate_on_grid(const std::vector<std::vector<double>>& states) const {
  for (const auto& z1 : states) {
    for (const auto& z2 : states) {
      for (int a = 0; a <= 1; ++a) {
        const double v = b(a, z1, z2);
        if (!(v >= 0.0 && v <= 1.0))
          throw NumericError("kernel evaluation outside [0,1]: " + std::to_string(v));
      }
      const double v0 = b0(z1, z2);
      if (!(v0 >= 0.0 && v0 <= 1.0))
        throw NumericError("kernel evaluation outside [0,1]: " + std::to_string(v0));
    }
  }
}

double b_hat(const KernelSpec& kernel, double p, std::span<const double> z1,
             std::span<const double> z2) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("b_hat: p outside [0,1]");
  const double b1 = kernel.b(1, z1, z2);
  const double b0 = kernel.b(0, z1, z2);
  return clamp01(p * b1 + (1.0 - p) * b0);
}

double b_s(const KernelSpec& kernel, TrajView traj1, TrajView traj2) {
  if (traj1.len != traj2.len || traj1.dim != traj2.dim)
    throw std::invalid_argument("b_s: mismatched trajectories");
  if (traj1.len < 1) throw std::invalid_argument("b_s: empty trajectory");
  double b = kernel.b0(traj1.at(0), traj2.at(0));
  for (int s = 1; s < traj1.len; ++s) b = b_hat(kernel, b, traj1.at(s), traj2.at(s));
  return b;
}

EdgeChainLaw edge_chain_law(const KernelSpec& kernel, TrajView traj1, TrajView traj2, int horizon) {
  if (traj1.len != traj2.len || traj1.dim != traj2.dim)
    throw std::invalid_argument("edge_chain_law: mismatched trajectories");
  if (traj1.len < horizon + 1) throw std::invalid_argument("edge_chain_law: trajectory too short");
  EdgeChainLaw law;
  law.initial_p = kernel.b0(traj1.at(0), traj2.at(0));
  law.transition_p.reserve(static_cast<std::size_t>(horizon));
  for (int s = 1; s <= horizon; ++s) {
    law.transition_p.push_back(
        {kernel.b(0, traj1.at(s), traj2.at(s)), kernel.b(1, traj1.at(s), traj2.at(s))});
  }
  return law;
}

double EdgeChainLaw::marginal_p(int s) const {
  if (s < 0 || s > horizon()) throw std::invalid_argument("marginal_p: time outside horizon");
  double p = initial_p;
  for (int k = 1; k <= s; ++k) {
    const auto& tr = transition_p[static_cast<std::size_t>(k - 1)];
    p = p * tr[1] + (1.0 - p) * tr[0];
  }
  return p;
}

std::vector<double> EdgeChainLaw::marginals() const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(horizon()) + 1);
  double p = initial_p;
  out.push_back(p);
  for (int k = 1; k <= horizon(); ++k) {
    const auto& tr = transition_p[static_cast<std::size_t>(k - 1)];
    p = p * tr[1] + (1.0 - p) * tr[0];
    out.push_back(p);
  }
  return out;
}

double EdgeChainLaw::path_prob(std::span<const std::uint8_t> path) const {
  if (static_cast<int>(path.size()) != horizon() + 1)
    throw std::invalid_argument("path_prob: wrong path length");
  double p = path[0] ? initial_p : 1.0 - initial_p;
  for (int s = 1; s <= horizon(); ++s) {
    const auto& tr = transition_p[static_cast<std::size_t>(s - 1)];
    const double p1 = tr[path[static_cast<std::size_t>(s - 1)]];
    p *= path[static_cast<std::size_t>(s)] ? p1 : 1.0 - p1;
  }
  return p;
}

double EdgeChainLaw::prob_all_one(std::span<const int> times) const {
  // Forward DP over the two-state chain, zeroing the state-0 mass at each
  // constrained time.
  double q0 = 1.0 - initial_p;
  double q1 = initial_p;
  std::size_t next = 0;
  if (next < times.size() && times[next] == 0) {
    q0 = 0.0;
    ++next;
  }
  const int last = times.empty() ? 0 : times.back();
  if (last > horizon()) throw std::invalid_argument("prob_all_one: time outside horizon");
  for (int s = 1; s <= last; ++s) {
    const auto& tr = transition_p[static_cast<std::size_t>(s - 1)];
    const double n1 = q1 * tr[1] + q0 * tr[0];
    const double n0 = q1 * (1.0 - tr[1]) + q0 * (1.0 - tr[0]);
    q1 = n1;
    q0 = n0;
    if (next < times.size() && times[next] == s) {
      q0 = 0.0;
      ++next;
    }
  }
  return q0 + q1;
}

int EdgeChainLaw::sample_step(int s, int prev, double u) const {
  if (s == 0) return u < initial_p ? 1 : 0;
  const auto& tr = transition_p[static_cast<std::size_t>(s - 1)];
  return u < tr[prev] ? 1 : 0;
}

}  // namespace cmf
