#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cmf/bitmatrix.hpp"
#include "cmf/kernels.hpp"
#include "cmf/meanfield.hpp"
#include "cmf/particle.hpp"
#include "cmf/rng.hpp"

namespace cmf {

// Simple undirected graph (no self-loops). Model layers carry a unit
// diagonal; conversion strips it, since the limit theory concerns simple
// graphs and stripping keeps the density identities exact.
struct SimpleGraph {
  int n = 0;
  BitMatrix adj;

  SimpleGraph() = default;
  explicit SimpleGraph(int n_) : n(n_), adj(n_) {}

  static SimpleGraph from_layer(const BitMatrix& layer);

  void add_edge(int i, int j);
  std::uint64_t edge_count() const { return adj.count_ones() / 2; }
};

// Graph layers over one shared vertex set; self-loops excluded.
struct MultiplexGraph {
  int n = 0;
  std::vector<BitMatrix> layers;

  MultiplexGraph() = default;
  MultiplexGraph(int n_, int num_layers) : n(n_), layers(num_layers, BitMatrix(n_)) {}

  int layer_count() const { return static_cast<int>(layers.size()); }

  static MultiplexGraph from_network(const NetworkTrajectory& net);
};

// Symmetric step function on the n-equipartition of [0,1]^2, values in [0,1].
struct StepGraphon {
  int n = 0;
  std::vector<double> values;  // row-major n*n

  StepGraphon() = default;
  explicit StepGraphon(int n_) : n(n_), values(static_cast<std::size_t>(n_) * n_, 0.0) {}

  double at(int i, int j) const { return values[static_cast<std::size_t>(i) * n + j]; }
  double& at(int i, int j) { return values[static_cast<std::size_t>(i) * n + j]; }

  void validate() const;  // symmetry and range
};

// Small simple pattern graph on vertices 0..k-1.
struct PatternGraph {
  int k = 0;
  std::vector<std::pair<int, int>> edges;  // normalized i < j, unique

  PatternGraph() = default;
  PatternGraph(int k_, std::vector<std::pair<int, int>> e);
};

PatternGraph pattern_vertex();
PatternGraph pattern_edge();
PatternGraph pattern_path3();
PatternGraph pattern_triangle();

// Pattern with per-layer edge sets over a shared small vertex set.
struct PatternMultiplex {
  int k = 0;
  std::vector<std::vector<std::pair<int, int>>> layer_edges;

  PatternMultiplex() = default;
  PatternMultiplex(int k_, std::vector<std::vector<std::pair<int, int>>> layers);

  int layer_count() const { return static_cast<int>(layer_edges.size()); }
};

// Places every edge of base into each layer listed in layers_used (the other
// layers stay empty), over total_layers layers.
PatternMultiplex pattern_at_layers(const PatternGraph& base, std::span<const int> layers_used,
                                   int total_layers);

// Family of graphons indexed by nonempty subsets S of {0..horizon}; either an
// explicit component map or lazy intersection graphons of a multiplex.
class Multigraphon {
 public:
  static Multigraphon empirical(MultiplexGraph m);
  static Multigraphon from_components(int horizon,
                                      std::map<std::vector<int>, StepGraphon> components);

  int horizon() const { return horizon_; }
  bool is_empirical() const { return !source_.layers.empty(); }

  // W^S; computed on demand (intersection graphon) for empirical sources.
  StepGraphon component(std::span<const int> subset) const;

 private:
  Multigraphon() = default;
  int horizon_ = 0;
  MultiplexGraph source_;
  std::map<std::vector<int>, StepGraphon> components_;
};

// Edges present in every layer of S.
SimpleGraph layer_intersection(const MultiplexGraph& m, std::span<const int> subset);

// E^(S) = edges present in exactly the layers of S; nonempty cells partition
// the union edge set.
std::map<std::vector<int>, std::vector<std::pair<int, int>>> exclusive_decomposition(
    const MultiplexGraph& m);

StepGraphon empirical_graphon(const SimpleGraph& g);
Multigraphon empirical_multigraphon(const MultiplexGraph& m);

// Homomorphism densities. Patterns up to 5 vertices; edge/path/triangle use
// closed-form shortcuts, everything else exact enumeration.
double hom_density_graph(const PatternGraph& h, const SimpleGraph& g);
double hom_density_graphon(const PatternGraph& h, const StepGraphon& w);
double hom_density_multiplex(const PatternMultiplex& h, const MultiplexGraph& m);
double hom_density_multigraphon(const PatternMultiplex& h, const Multigraphon& w);

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  int samples = 0;
};

// Monte-Carlo estimate of the limiting multigraphon hom density: draws
// pattern-many trajectories i.i.d. from the reference measure and multiplies
// exact chain probabilities P(chain = 1 on S) per pattern edge.
McEstimate limit_multigraphon_density(const PatternMultiplex& h, const ReferenceMeasure& ref,
                                      const KernelSpec& kernel, int samples, const KeyedRng& rng,
                                      std::uint64_t context = 0);

enum class CutNormMode { kExactSmall, kHeuristic };

// Cut norm of W1 - W2 over block subsets: exact enumeration for n <= 14,
// otherwise alternating maximization with 20 keyed restarts (a lower bound).
double cut_norm_estimate(const StepGraphon& w1, const StepGraphon& w2, CutNormMode mode);

// lambda_2(A)/n of the raw symmetric bit matrix (diagonal as stored).
double scaled_lambda2(const BitMatrix& a);

}  // namespace cmf
