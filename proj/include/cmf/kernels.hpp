#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

namespace cmf {

// Non-owning view of one latent trajectory: states z(0..len-1), each a
// d-vector. stride is the distance (in doubles) between consecutive states,
// so both contiguous per-agent storage (stride = d) and time-major n-agent
// storage (stride = n*d) are viewable without copying.
struct TrajView {
  const double* data = nullptr;
  int len = 0;
  int dim = 0;
  std::size_t stride = 0;

  TrajView() = default;
  TrajView(const double* p, int length, int d)
      : data(p), len(length), dim(d), stride(static_cast<std::size_t>(d)) {}
  TrajView(const double* p, int length, int d, std::size_t stride_doubles)
      : data(p), len(length), dim(d), stride(stride_doubles) {}

  std::span<const double> at(int t) const {
    return {data + static_cast<std::size_t>(t) * stride, static_cast<std::size_t>(dim)};
  }
  // View of the first s+1 states.
  TrajView prefix(int length) const { return {data, length, dim, stride}; }
};

enum class InteractionRegime { kExpDecay, kFiniteRange };

struct LogisticKernel {
  double intercept = 1.0;
  double distance_slope = 0.5;
  double persistence = 1.0;
};

struct BoundedConfidenceKernel {
  double radius = 1.0;
};

struct ConstantKernel {
  double value = 0.5;
};

struct CustomKernel {
  std::function<double(std::span<const double>, std::span<const double>)> b0;
  std::function<double(int, std::span<const double>, std::span<const double>)> b;
  InteractionRegime regime = InteractionRegime::kExpDecay;
};

// Interaction functions B0 (initial edge probability) and B (transition
// probability given the previous edge state), plus regime metadata. All
// evaluations are clamped to [0,1] and symmetric in (z1, z2).
class KernelSpec {
 public:
  using Variant =
      std::variant<LogisticKernel, BoundedConfidenceKernel, ConstantKernel, CustomKernel>;

  KernelSpec();  // logistic with default parameters
  explicit KernelSpec(Variant v, double decay_constant = 1.0);

  static KernelSpec logistic(double intercept, double distance_slope, double persistence);
  static KernelSpec bounded_confidence(double radius);
  static KernelSpec constant(double value);
  static KernelSpec custom(CustomKernel k);

  double b0(std::span<const double> z1, std::span<const double> z2) const;
  double b(int a, std::span<const double> z1, std::span<const double> z2) const;

  const Variant& variant() const { return variant_; }
  InteractionRegime regime() const;
  double decay_constant() const { return decay_constant_; }

  // Spot-checks that b0/b land in [0,1] on the supplied states; throws
  // NumericError on violation. The regime itself is caller-declared metadata.
  void validate_on_grid(const std::vector<std::vector<double>>& states) const;

 private:
  Variant variant_;
  double decay_constant_ = 1.0;
};

// One-step averaged transition probability p*B(1,z1,z2) + (1-p)*B(0,z1,z2).
double b_hat(const KernelSpec& kernel, double p, std::span<const double> z1,
             std::span<const double> z2);

// Conditional edge probability at time s given both latent paths:
// b_0 = B0(z1(0), z2(0)); b_s = b_hat(b_{s-1}, z1(s), z2(s)).
double b_s(const KernelSpec& kernel, TrajView traj1, TrajView traj2);

// The per-pair time-inhomogeneous {0,1} edge chain: initial probability and,
// for s = 1..t, the transition probabilities (P(1|prev=0), P(1|prev=1)).
struct EdgeChainLaw {
  double initial_p = 0.0;
  std::vector<std::array<double, 2>> transition_p;

  int horizon() const { return static_cast<int>(transition_p.size()); }

  // Forward marginal P(chain = 1 at s); equals b_s.
  double marginal_p(int s) const;
  std::vector<double> marginals() const;

  // Probability of one full path a(0..t), each entry 0 or 1.
  double path_prob(std::span<const std::uint8_t> path) const;

  // P(chain = 1 at every s in times); times sorted ascending, within horizon.
  double prob_all_one(std::span<const int> times) const;

  // Samples a(s) given a(s-1) (or the initial state for s = 0) using one
  // uniform; strict inequality u < p.
  int sample_step(int s, int prev, double u) const;
};

EdgeChainLaw edge_chain_law(const KernelSpec& kernel, TrajView traj1, TrajView traj2, int horizon);

// Euclidean distance between two d-vectors.
double euclidean_distance(std::span<const double> z1, std::span<const double> z2);

}  // namespace cmf
