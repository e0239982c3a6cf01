#include "cmf/graphs.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <set>
#include <stdexcept>

namespace cmf {

namespace {

void check_subset(std::span<const int> subset, int layer_count) {
  if (subset.empty()) throw std::invalid_argument("layer subset must be nonempty");
  for (std::size_t i = 0; i < subset.size(); ++i) {
    if (subset[i] < 0 || subset[i] >= layer_count)
      throw std::invalid_argument("layer index out of range");
    if (i > 0 && subset[i] <= subset[i - 1])
      throw std::invalid_argument("layer subset must be strictly ascending");
  }
}

std::vector<std::pair<int, int>> normalize_edges(int k, std::vector<std::pair<int, int>> edges) {
  std::set<std::pair<int, int>> seen;
  for (auto& [a, b] : edges) {
    if (a == b) throw std::invalid_argument("pattern: self-loop");
    if (a > b) std::swap(a, b);
    if (a < 0 || b >= k) throw std::invalid_argument("pattern: vertex out of range");
    if (!seen.insert({a, b}).second) throw std::invalid_argument("pattern: duplicate edge");
  }
  std::vector<std::pair<int, int>> out(seen.begin(), seen.end());
  return out;
}

constexpr int kMaxPatternVertices = 5;

bool is_pattern(const PatternGraph& h, int k, std::initializer_list<std::pair<int, int>> edges) {
  if (h.k != k || h.edges.size() != edges.size()) return false;
  std::vector<std::pair<int, int>> e(edges);
  std::sort(e.begin(), e.end());
  return std::equal(e.begin(), e.end(), h.edges.begin());
}

// Generic hom count by enumeration over all n^k maps, adjacency given per
// pattern edge.
double enumerate_hom_density(int k, int n,
                             const std::vector<std::pair<int, int>>& edges,
                             const std::function<bool(int, int, int)>& edge_ok) {
  if (k > kMaxPatternVertices) throw std::invalid_argument("pattern too large for exact mode");
  double total = std::pow(static_cast<double>(n), k);
  if (total > 4.0e9) throw std::invalid_argument("enumeration too large");
  std::vector<int> x(static_cast<std::size_t>(k), 0);
  std::uint64_t count = 0;
  for (;;) {
    bool ok = true;
    for (std::size_t e = 0; e < edges.size() && ok; ++e) {
      ok = edge_ok(static_cast<int>(e), x[static_cast<std::size_t>(edges[e].first)],
                   x[static_cast<std::size_t>(edges[e].second)]);
    }
    count += ok ? 1 : 0;
    int pos = k - 1;
    while (pos >= 0 && ++x[static_cast<std::size_t>(pos)] == n) {
      x[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  return static_cast<double>(count) / total;
}

std::uint64_t closed_triangle_walks(const BitMatrix& a) {
  // trace(A^3) of a hollow symmetric matrix: 2 * sum over adjacent i<j of
  // |N(i) ∩ N(j)|.
  std::uint64_t walks = 0;
  const int n = a.size();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (a.get(i, j)) walks += static_cast<std::uint64_t>(a.common_neighbors(i, j));
  return 2 * walks;
}

}  // namespace

SimpleGraph SimpleGraph::from_layer(const BitMatrix& layer) {
  SimpleGraph g(layer.size());
  g.adj = layer;
  g.adj.fill_diagonal(false);
  return g;
}

void SimpleGraph::add_edge(int i, int j) {
  if (i == j) throw std::invalid_argument("SimpleGraph: self-loop");
  if (i < 0 || j < 0 || i >= n || j >= n) throw std::invalid_argument("SimpleGraph: vertex range");
  adj.set_sym(i, j, true);
}

MultiplexGraph MultiplexGraph::from_network(const NetworkTrajectory& net) {
  MultiplexGraph m(net.n, net.T + 1);
  for (int t = 0; t <= net.T; ++t) {
    m.layers[static_cast<std::size_t>(t)] = net.layers[static_cast<std::size_t>(t)];
    m.layers[static_cast<std::size_t>(t)].fill_diagonal(false);
  }
  return m;
}

void StepGraphon::validate() const {
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double v = at(i, j);
      if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("StepGraphon: value outside [0,1]");
      if (v != at(j, i)) throw std::invalid_argument("StepGraphon: not symmetric");
    }
  }
}

PatternGraph::PatternGraph(int k_, std::vector<std::pair<int, int>> e) : k(k_) {
  if (k < 1) throw std::invalid_argument("pattern: need at least one vertex");
  edges = normalize_edges(k, std::move(e));
}

PatternGraph pattern_vertex() { return PatternGraph(1, {}); }
PatternGraph pattern_edge() { return PatternGraph(2, {{0, 1}}); }
PatternGraph pattern_path3() { return PatternGraph(3, {{0, 1}, {1, 2}}); }
PatternGraph pattern_triangle() { return PatternGraph(3, {{0, 1}, {1, 2}, {0, 2}}); }

PatternMultiplex::PatternMultiplex(int k_, std::vector<std::vector<std::pair<int, int>>> layers)
    : k(k_) {
  if (k < 1) throw std::invalid_argument("pattern: need at least one vertex");
  layer_edges.reserve(layers.size());
  for (auto& e : layers) layer_edges.push_back(normalize_edges(k, std::move(e)));
}

PatternMultiplex pattern_at_layers(const PatternGraph& base, std::span<const int> layers_used,
                                   int total_layers) {
  check_subset(layers_used, total_layers);
  std::vector<std::vector<std::pair<int, int>>> layers(static_cast<std::size_t>(total_layers));
  for (int s : layers_used) layers[static_cast<std::size_t>(s)] = base.edges;
  return PatternMultiplex(base.k, std::move(layers));
}

Multigraphon Multigraphon::empirical(MultiplexGraph m) {
  Multigraphon w;
  w.horizon_ = m.layer_count() - 1;
  w.source_ = std::move(m);
  return w;
}

Multigraphon Multigraphon::from_components(int horizon,
                                           std::map<std::vector<int>, StepGraphon> components) {
  Multigraphon w;
  w.horizon_ = horizon;
  for (auto& [s, g] : components) {
    check_subset(s, horizon + 1);
    g.validate();
  }
  w.components_ = std::move(components);
  return w;
}

StepGraphon Multigraphon::component(std::span<const int> subset) const {
  check_subset(subset, horizon_ + 1);
  if (is_empirical()) return empirical_graphon(layer_intersection(source_, subset));
  const std::vector<int> key(subset.begin(), subset.end());
  const auto it = components_.find(key);
  if (it == components_.end()) throw std::invalid_argument("multigraphon: missing component");
  return it->second;
}

SimpleGraph layer_intersection(const MultiplexGraph& m, std::span<const int> subset) {
  check_subset(subset, m.layer_count());
  SimpleGraph g(m.n);
  g.adj = m.layers[static_cast<std::size_t>(subset[0])];
  for (std::size_t s = 1; s < subset.size(); ++s) {
    const BitMatrix& other = m.layers[static_cast<std::size_t>(subset[s])];
    for (int i = 0; i < m.n; ++i)
      for (int j = i + 1; j < m.n; ++j)
        if (g.adj.get(i, j) && !other.get(i, j)) g.adj.set_sym(i, j, false);
  }
  g.adj.fill_diagonal(false);
  return g;
}

std::map<std::vector<int>, std::vector<std::pair<int, int>>> exclusive_decomposition(
    const MultiplexGraph& m) {
  std::map<std::vector<int>, std::vector<std::pair<int, int>>> cells;
  for (int i = 0; i < m.n; ++i) {
    for (int j = i + 1; j < m.n; ++j) {
      std::vector<int> present;
      for (int s = 0; s < m.layer_count(); ++s)
        if (m.layers[static_cast<std::size_t>(s)].get(i, j)) present.push_back(s);
      if (!present.empty()) cells[present].emplace_back(i, j);
    }
  }
  return cells;
}

StepGraphon empirical_graphon(const SimpleGraph& g) {
  StepGraphon w(g.n);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) w.at(i, j) = (i != j && g.adj.get(i, j)) ? 1.0 : 0.0;
  return w;
}

Multigraphon empirical_multigraphon(const MultiplexGraph& m) { return Multigraphon::empirical(m); }

double hom_density_graph(const PatternGraph& h, const SimpleGraph& g) {
  const int n = g.n;
  if (n < 1) throw std::invalid_argument("hom_density_graph: empty graph");
  const double nd = static_cast<double>(n);
  if (is_pattern(h, 1, {})) return 1.0;
  if (is_pattern(h, 2, {{0, 1}}))
    return 2.0 * static_cast<double>(g.edge_count()) / (nd * nd);
  if (is_pattern(h, 3, {{0, 1}, {1, 2}})) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const double deg = static_cast<double>(g.adj.degree(i));
      s += deg * deg;
    }
    return s / (nd * nd * nd);
  }
  if (is_pattern(h, 3, {{0, 1}, {1, 2}, {0, 2}}))
    return static_cast<double>(closed_triangle_walks(g.adj)) / (nd * nd * nd);
  return enumerate_hom_density(h.k, n, h.edges,
                               [&](int, int a, int b) { return a != b && g.adj.get(a, b); });
}

double hom_density_graphon(const PatternGraph& h, const StepGraphon& w) {
  const int n = w.n;
  if (n < 1) throw std::invalid_argument("hom_density_graphon: empty graphon");
  const double nd = static_cast<double>(n);
  if (is_pattern(h, 1, {})) return 1.0;
  if (is_pattern(h, 2, {{0, 1}})) {
    double s = 0.0;
    for (double v : w.values) s += v;
    return s / (nd * nd);
  }
  if (is_pattern(h, 3, {{0, 1}, {1, 2}})) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      double row = 0.0;
      for (int j = 0; j < n; ++j) row += w.at(i, j);
      s += row * row;
    }
    return s / (nd * nd * nd);
  }
  if (is_pattern(h, 3, {{0, 1}, {1, 2}, {0, 2}})) {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) s += w.at(i, j) * w.at(j, l) * w.at(i, l);
    return s / (nd * nd * nd);
  }
  if (h.k > kMaxPatternVertices) throw std::invalid_argument("pattern too large for exact mode");
  // Exact finite sum over all block-index maps.
  std::vector<int> x(static_cast<std::size_t>(h.k), 0);
  double total = 0.0;
  for (;;) {
    double prod = 1.0;
    for (const auto& [a, b] : h.edges)
      prod *= w.at(x[static_cast<std::size_t>(a)], x[static_cast<std::size_t>(b)]);
    total += prod;
    int pos = h.k - 1;
    while (pos >= 0 && ++x[static_cast<std::size_t>(pos)] == n) {
      x[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  return total / std::pow(nd, h.k);
}

double hom_density_multiplex(const PatternMultiplex& h, const MultiplexGraph& m) {
  if (h.layer_count() != m.layer_count())
    throw std::invalid_argument("hom_density_multiplex: layer count mismatch");
  const int n = m.n;
  const double nd = static_cast<double>(n);

  // Constraint graph per pattern edge: the intersection of the layers where
  // that edge appears.
  std::map<std::pair<int, int>, std::vector<int>> edge_layers;
  for (int s = 0; s < h.layer_count(); ++s)
    for (const auto& e : h.layer_edges[static_cast<std::size_t>(s)]) edge_layers[e].push_back(s);

  if (edge_layers.empty()) return 1.0;

  std::vector<std::pair<int, int>> edges;
  std::vector<BitMatrix> constraint;
  for (const auto& [e, layers] : edge_layers) {
    edges.push_back(e);
    constraint.push_back(layer_intersection(m, layers).adj);
  }

  // Single-edge and uniform-triangle shortcuts.
  if (h.k == 2 && edges.size() == 1)
    return static_cast<double>(constraint[0].count_ones()) / (nd * nd);
  if (h.k == 3 && edges.size() == 3) {
    const bool uniform = constraint[0] == constraint[1] && constraint[1] == constraint[2];
    const bool triangle = edges[0] == std::pair{0, 1} && edges[1] == std::pair{0, 2} &&
                          edges[2] == std::pair{1, 2};
    if (uniform && triangle)
      return static_cast<double>(closed_triangle_walks(constraint[0])) / (nd * nd * nd);
  }

  return enumerate_hom_density(h.k, n, edges, [&](int e, int a, int b) {
    return a != b && constraint[static_cast<std::size_t>(e)].get(a, b);
  });
}

double hom_density_multigraphon(const PatternMultiplex& h, const Multigraphon& w) {
  if (h.layer_count() != w.horizon() + 1)
    throw std::invalid_argument("hom_density_multigraphon: layer count mismatch");
  if (h.k > kMaxPatternVertices) throw std::invalid_argument("pattern too large for exact mode");

  // Exclusive decomposition of the pattern: edge -> exact layer set.
  std::map<std::pair<int, int>, std::vector<int>> edge_layers;
  for (int s = 0; s < h.layer_count(); ++s)
    for (const auto& e : h.layer_edges[static_cast<std::size_t>(s)]) edge_layers[e].push_back(s);
  if (edge_layers.empty()) return 1.0;

  std::vector<std::pair<int, int>> edges;
  std::vector<StepGraphon> comps;
  int n = -1;
  for (const auto& [e, layers] : edge_layers) {
    edges.push_back(e);
    comps.push_back(w.component(layers));
    if (n < 0) n = comps.back().n;
    if (comps.back().n != n)
      throw std::invalid_argument("hom_density_multigraphon: component size mismatch");
  }

  const double nd = static_cast<double>(n);
  std::vector<int> x(static_cast<std::size_t>(h.k), 0);
  double total = 0.0;
  const double maps = std::pow(nd, h.k);
  if (maps > 4.0e9) throw std::invalid_argument("enumeration too large");
  for (;;) {
    double prod = 1.0;
    for (std::size_t e = 0; e < edges.size(); ++e)
      prod *= comps[e].at(x[static_cast<std::size_t>(edges[e].first)],
                          x[static_cast<std::size_t>(edges[e].second)]);
    total += prod;
    int pos = h.k - 1;
    while (pos >= 0 && ++x[static_cast<std::size_t>(pos)] == n) {
      x[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  return total / maps;
}

McEstimate limit_multigraphon_density(const PatternMultiplex& h, const ReferenceMeasure& ref,
                                      const KernelSpec& kernel, int samples, const KeyedRng& rng,
                                      std::uint64_t context) {
  if (samples < 1) throw std::invalid_argument("limit_multigraphon_density: samples < 1");
  if (ref.T + 1 < h.layer_count())
    throw std::invalid_argument("limit_multigraphon_density: reference horizon too short");

  std::map<std::pair<int, int>, std::vector<int>> edge_layers;
  for (int s = 0; s < h.layer_count(); ++s)
    for (const auto& e : h.layer_edges[static_cast<std::size_t>(s)]) edge_layers[e].push_back(s);

  double sum = 0.0, sumsq = 0.0;
  std::vector<int> idx(static_cast<std::size_t>(h.k));
  for (int r = 0; r < samples; ++r) {
    for (int v = 0; v < h.k; ++v) {
      idx[static_cast<std::size_t>(v)] = static_cast<int>(
          rng.index(Stream::kMcVertex, context, static_cast<std::uint64_t>(r),
                    static_cast<std::uint64_t>(v), 0, static_cast<std::uint64_t>(ref.N)));
    }
    double prod = 1.0;
    for (const auto& [e, layers] : edge_layers) {
      const int tmax = layers.back();
      const EdgeChainLaw law =
          edge_chain_law(kernel, ref.traj(idx[static_cast<std::size_t>(e.first)]),
                         ref.traj(idx[static_cast<std::size_t>(e.second)]), tmax);
      prod *= law.prob_all_one(layers);
    }
    sum += prod;
    sumsq += prod * prod;
  }
  McEstimate est;
  est.samples = samples;
  est.value = sum / samples;
  if (samples > 1) {
    const double var = std::max(0.0, (sumsq - sum * sum / samples) / (samples - 1));
    est.std_error = std::sqrt(var / samples);
  }
  return est;
}

namespace {

// For fixed S (given row sums c_j = sum_{i in S} D_ij), the optimal T picks
// the positive or the negative part, whichever is larger.
double best_value_given_rowsums(const std::vector<double>& c) {
  double pos = 0.0, neg = 0.0;
  for (double v : c) {
    if (v > 0.0)
      pos += v;
    else
      neg -= v;
  }
  return std::max(pos, neg);
}

double cut_norm_exact(const std::vector<double>& d, int n) {
  // Gray-code enumeration of S with incremental column sums.
  std::vector<double> c(static_cast<std::size_t>(n), 0.0);
  double best = 0.0;  // S empty -> 0
  std::uint32_t prev = 0;
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t g = 1; g < total; ++g) {
    const std::uint32_t gray = static_cast<std::uint32_t>(g ^ (g >> 1));
    const std::uint32_t diff = gray ^ prev;
    const int row = std::countr_zero(diff);
    const double sign = (gray & diff) ? 1.0 : -1.0;
    const double* drow = d.data() + static_cast<std::size_t>(row) * n;
    for (int j = 0; j < n; ++j) c[static_cast<std::size_t>(j)] += sign * drow[j];
    prev = gray;
    best = std::max(best, best_value_given_rowsums(c));
  }
  return best / (static_cast<double>(n) * n);
}

double cut_norm_heuristic(const std::vector<double>& d, int n) {
  const KeyedRng rng(0x63757470ull);  // fixed internal seed: pure, reproducible
  double best = 0.0;
  std::vector<char> in_s(static_cast<std::size_t>(n));
  std::vector<double> col(static_cast<std::size_t>(n)), row(static_cast<std::size_t>(n));
  for (int restart = 0; restart < 20; ++restart) {
    for (int target = 0; target < 2; ++target) {
      // target 0 maximizes +sum, target 1 maximizes -sum.
      const double sgn = target == 0 ? 1.0 : -1.0;
      for (int i = 0; i < n; ++i)
        in_s[static_cast<std::size_t>(i)] =
            rng.uniform(Stream::kCutNorm, static_cast<std::uint64_t>(restart),
                        static_cast<std::uint64_t>(target), static_cast<std::uint64_t>(i), 0) < 0.5;
      double val = -1.0;
      for (int pass = 0; pass < 50; ++pass) {
        std::fill(col.begin(), col.end(), 0.0);
        for (int i = 0; i < n; ++i)
          if (in_s[static_cast<std::size_t>(i)]) {
            const double* drow = d.data() + static_cast<std::size_t>(i) * n;
            for (int j = 0; j < n; ++j) col[static_cast<std::size_t>(j)] += drow[j];
          }
        double tval = 0.0;
        for (int j = 0; j < n; ++j) tval += std::max(0.0, sgn * col[static_cast<std::size_t>(j)]);
        std::fill(row.begin(), row.end(), 0.0);
        for (int j = 0; j < n; ++j)
          if (sgn * col[static_cast<std::size_t>(j)] > 0.0) {
            for (int i = 0; i < n; ++i)
              row[static_cast<std::size_t>(i)] += d[static_cast<std::size_t>(i) * n + j];
          }
        double sval = 0.0;
        bool changed = false;
        for (int i = 0; i < n; ++i) {
          const bool take = sgn * row[static_cast<std::size_t>(i)] > 0.0;
          sval += take ? sgn * row[static_cast<std::size_t>(i)] : 0.0;
          if (take != static_cast<bool>(in_s[static_cast<std::size_t>(i)])) changed = true;
          in_s[static_cast<std::size_t>(i)] = take;
        }
        const double cur = std::max(tval, sval);
        if (!changed || cur <= val) {
          val = std::max(val, cur);
          break;
        }
        val = cur;
      }
      best = std::max(best, val);
    }
  }
  return best / (static_cast<double>(n) * n);
}

}  // namespace

double cut_norm_estimate(const StepGraphon& w1, const StepGraphon& w2, CutNormMode mode) {
  if (w1.n != w2.n) throw std::invalid_argument("cut_norm_estimate: size mismatch");
  const int n = w1.n;
  if (n < 1) throw std::invalid_argument("cut_norm_estimate: empty graphon");
  std::vector<double> d(static_cast<std::size_t>(n) * n);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = w1.values[i] - w2.values[i];
  if (mode == CutNormMode::kExactSmall) {
    if (n > 14) throw std::invalid_argument("cut_norm_estimate: exact mode limited to n <= 14");
    return cut_norm_exact(d, n);
  }
  return cut_norm_heuristic(d, n);
}

double scaled_lambda2(const BitMatrix& a) {
  const int n = a.size();
  if (n < 2) throw std::invalid_argument("scaled_lambda2: need n >= 2");
  if (!a.is_symmetric()) throw std::invalid_argument("scaled_lambda2: matrix not symmetric");
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = a.get(i, j) ? 1.0 : 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();  // ascending
  return ev[n - 2] / static_cast<double>(n);
}

}  // namespace cmf
