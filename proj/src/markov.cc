#include "locpriv/markov.h"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "locpriv/error.h"

namespace locpriv {
namespace {

std::string label(const Edge& e) {
  return "(" + std::to_string(e.from + 1) + "," + std::to_string(e.to + 1) + ")";
}

// Forward reachability from `start` over positive entries (or their
// transposes when `reverse` is set).
std::vector<bool> reachable(const TransitionMatrix& t, std::size_t start,
                            bool reverse) {
  const std::size_t r = t.r();
  std::vector<bool> seen(r, false);
  std::vector<std::size_t> stack{start};
  seen[start] = true;
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    for (std::size_t j = 0; j < r; ++j) {
      const double w = reverse ? t(j, i) : t(i, j);
      if (w > 0.0 && !seen[j]) {
        seen[j] = true;
        stack.push_back(j);
      }
    }
  }
  return seen;
}

}  // namespace

MobilityGraph::MobilityGraph(std::size_t r, std::vector<Edge> edges,
                             std::vector<bool> is_free)
    : r_(r), adjacency_(r * r, false) {
  if (r < 1) throw ValidationError("graph needs at least one state");
  if (edges.size() != is_free.size()) {
    throw ValidationError("free flags do not match edge count");
  }
  std::vector<std::size_t> order(edges.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return edges[a] < edges[b]; });
  for (std::size_t idx : order) {
    const Edge& e = edges[idx];
    if (e.from >= r || e.to >= r) {
      throw ValidationError("edge " + label(e) + " references a state outside 1.." +
                            std::to_string(r));
    }
    if (!edges_.empty() && edges_.back() == e) {
      throw ValidationError("duplicate edge " + label(e));
    }
    edges_.push_back(e);
    free_.push_back(is_free[idx]);
    adjacency_[e.from * r + e.to] = true;
  }
  dependent_target_.assign(r, 0);
  std::vector<std::size_t> out(r, 0), dependent(r, 0);
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    ++out[e.from];
    if (free_[i]) {
      free_edges_.push_back(e);
    } else {
      ++dependent[e.from];
      dependent_target_[e.from] = e.to;
    }
  }
  for (std::size_t s = 0; s < r; ++s) {
    if (out[s] == 0) {
      throw ValidationError("state " + std::to_string(s + 1) + " has no out-edge");
    }
    if (dependent[s] != 1) {
      throw ValidationError("state " + std::to_string(s + 1) +
                            " must have exactly one dependent out-edge, found " +
                            std::to_string(dependent[s]));
    }
  }
}

MobilityGraph MobilityGraph::with_canonical_free_edges(std::size_t r,
                                                       std::vector<Edge> edges) {
  std::vector<StateId> largest(r, 0);
  std::vector<bool> has(r, false);
  for (const Edge& e : edges) {
    if (e.from >= r || e.to >= r) {
      throw ValidationError("edge " + label(e) + " references a state outside 1.." +
                            std::to_string(r));
    }
    if (!has[e.from] || e.to > largest[e.from]) largest[e.from] = e.to;
    has[e.from] = true;
  }
  std::vector<bool> is_free(edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    is_free[i] = edges[i].to != largest[edges[i].from];
  }
  return MobilityGraph(r, std::move(edges), std::move(is_free));
}

MobilityGraph MobilityGraph::with_free_edges(std::size_t r,
                                             std::vector<Edge> edges,
                                             std::vector<bool> is_free) {
  return MobilityGraph(r, std::move(edges), std::move(is_free));
}

MobilityGraph MobilityGraph::three_state_example() {
  // Labels 1..3 map to states 0..2. p3 sits on 3->2, so that row cannot use
  // the canonical rule.
  return with_free_edges(3,
                         {{0, 0}, {0, 1}, {0, 2}, {1, 2}, {2, 1}, {2, 0}},
                         {true, true, false, false, true, false});
}

std::size_t MobilityGraph::out_degree(StateId state) const {
  std::size_t k = 0;
  for (std::size_t j = 0; j < r_; ++j) k += adjacency_[state * r_ + j] ? 1 : 0;
  return k;
}

std::size_t degrees_of_freedom(const MobilityGraph& graph) {
  return graph.edges().size() - graph.r();
}

TransitionMatrix::TransitionMatrix(std::size_t r, std::vector<double> row_major)
    : r_(r), data_(std::move(row_major)) {
  if (r == 0 || data_.size() != r * r) {
    throw ValidationError("transition matrix must be r x r with r >= 1");
  }
  for (std::size_t i = 0; i < r; ++i) {
    double total = 0.0;
    for (std::size_t j = 0; j < r; ++j) {
      const double p = data_[i * r + j];
      if (!(p >= 0.0) || p > 1.0) {
        throw ValidationError("transition probability outside [0, 1]");
      }
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) {
      throw ValidationError("row " + std::to_string(i + 1) + " does not sum to 1");
    }
  }
}

DependencyMap::DependencyMap(MobilityGraph graph)
    : graph_(std::move(graph)),
      constants_(graph_.r(), 1.0),
      coefficients_(graph_.r() * graph_.free_edges().size(), 0.0) {
  const auto free = graph_.free_edges();
  for (std::size_t k = 0; k < free.size(); ++k) {
    coefficients_[free[k].from * free.size() + k] = -1.0;
  }
}

TransitionMatrix DependencyMap::expand(const FreeParamVector& params) const {
  const std::size_t r = graph_.r();
  const auto free = graph_.free_edges();
  if (params.values.size() != free.size()) {
    throw ValidationError("expected " + std::to_string(free.size()) +
                          " free parameters, got " +
                          std::to_string(params.values.size()));
  }
  std::vector<double> data(r * r, 0.0);
  for (std::size_t k = 0; k < free.size(); ++k) {
    const double p = params.values[k];
    if (!(p > 0.0) || !(p < 1.0)) {
      throw ValidationError("free parameter on edge " + label(free[k]) +
                            " is outside (0, 1)");
    }
    data[free[k].from * r + free[k].to] = p;
  }
  for (StateId s = 0; s < r; ++s) {
    double dependent = constants_[s];
    for (std::size_t k = 0; k < free.size(); ++k) {
      dependent += coefficient(s, k) * params.values[k];
    }
    if (!(dependent > 0.0)) {
      throw ValidationError("dependent probability on edge " +
                            label({s, graph_.dependent_target(s)}) +
                            " is not positive");
    }
    data[s * r + graph_.dependent_target(s)] = dependent;
  }
  return TransitionMatrix(r, std::move(data));
}

FreeParamVector DependencyMap::contract(const TransitionMatrix& matrix) const {
  const std::size_t r = graph_.r();
  if (matrix.r() != r) throw ValidationError("matrix size does not match graph");
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < r; ++j) {
      const bool on_graph = graph_.has_edge(static_cast<StateId>(i),
                                            static_cast<StateId>(j));
      if (on_graph != (matrix(i, j) > 0.0)) {
        throw ValidationError("matrix support differs from the graph at " +
                              label({static_cast<StateId>(i), static_cast<StateId>(j)}));
      }
    }
  }
  FreeParamVector params;
  for (const Edge& e : graph_.free_edges()) {
    params.values.push_back(matrix(e.from, e.to));
  }
  return params;
}

TransitionMatrix expand_free_params(const FreeParamVector& params,
                                    const DependencyMap& map) {
  return map.expand(params);
}

ChainValidity validate_chain(const TransitionMatrix& matrix) {
  const std::size_t r = matrix.r();
  ChainValidity v;
  const auto fwd = reachable(matrix, 0, false);
  const auto bwd = reachable(matrix, 0, true);
  v.irreducible = std::all_of(fwd.begin(), fwd.end(), [](bool b) { return b; }) &&
                  std::all_of(bwd.begin(), bwd.end(), [](bool b) { return b; });

  // BFS levels from state 0; the period is the gcd of level[i] + 1 - level[j]
  // over edges i -> j inside the reachable set.
  std::vector<long> level(r, -1);
  std::vector<std::size_t> queue{0};
  level[0] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::size_t i = queue[head];
    for (std::size_t j = 0; j < r; ++j) {
      if (matrix(i, j) > 0.0 && level[j] < 0) {
        level[j] = level[i] + 1;
        queue.push_back(j);
      }
    }
  }
  std::size_t g = 0;
  for (std::size_t i = 0; i < r; ++i) {
    if (level[i] < 0) continue;
    for (std::size_t j = 0; j < r; ++j) {
      if (matrix(i, j) > 0.0) {
        g = std::gcd(g, static_cast<std::size_t>(std::abs(level[i] + 1 - level[j])));
      }
    }
  }
  v.period = g;
  v.aperiodic = g == 1;
  return v;
}

std::vector<double> stationary_distribution(const TransitionMatrix& matrix) {
  const auto v = validate_chain(matrix);
  if (!v.irreducible || !v.aperiodic) {
    throw ValidationError("stationary distribution requires an irreducible, aperiodic chain");
  }
  const auto r = static_cast<Eigen::Index>(matrix.r());
  // Rows of A are the balance equations sum_i pi_i (T(i,j) - [i==j]) = 0;
  // the last one is replaced by normalization.
  Eigen::MatrixXd a(r, r);
  for (Eigen::Index j = 0; j < r; ++j) {
    for (Eigen::Index i = 0; i < r; ++i) {
      a(j, i) = matrix(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) -
                (i == j ? 1.0 : 0.0);
    }
  }
  a.row(r - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(r);
  rhs(r - 1) = 1.0;
  const Eigen::VectorXd pi = a.fullPivLu().solve(rhs);
  return std::vector<double>(pi.data(), pi.data() + r);
}

std::vector<double> stationary_distribution_power(const TransitionMatrix& matrix,
                                                  double tolerance,
                                                  std::size_t max_iterations) {
  const std::size_t r = matrix.r();
  std::vector<double> pi(r, 1.0 / static_cast<double>(r)), next(r);
  for (std::size_t it = 0; it < max_iterations; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t j = 0; j < r; ++j) next[j] += pi[i] * matrix(i, j);
    }
    double change = 0.0;
    for (std::size_t j = 0; j < r; ++j) change = std::max(change, std::abs(next[j] - pi[j]));
    pi.swap(next);
    if (change <= tolerance) break;
  }
  return pi;
}

Trajectory sample_trajectory_markov(const TransitionMatrix& matrix,
                                    std::size_t m, Rng& rng) {
  if (m < 1) throw ValidationError("Markov trajectory needs m >= 1");
  Trajectory t;
  t.states.resize(m);
  t.states[0] = 0;
  for (std::size_t k = 1; k < m; ++k) {
    t.states[k] = static_cast<StateId>(rng.categorical(matrix.row(t.states[k - 1])));
  }
  return t;
}

FreeParamVector sample_free_params(const DependencyMap& map, DensityKind kind,
                                   double uniform_weight, Rng& rng) {
  const MobilityGraph& g = map.graph();
  const auto free = g.free_edges();
  FreeParamVector params;
  params.values.assign(free.size(), 0.0);
  for (StateId s = 0; s < g.r(); ++s) {
    const std::size_t degree = g.out_degree(s);
    if (degree < 2) continue;
    const ProfileDensity density =
        kind == DensityKind::kUniformSimplex
            ? ProfileDensity::uniform_simplex(degree)
            : ProfileDensity::bounded_mixture(degree, uniform_weight);
    const auto point = density.sample_point(rng);
    // Coordinates follow the out-edges of s in target order; the dependent
    // edge takes whatever coordinate lands on it, which leaves the law of the
    // row unchanged because the prior is exchangeable.
    std::size_t c = 0;
    for (std::size_t k = 0; k < free.size(); ++k) {
      if (free[k].from != s) continue;
      params.values[k] = point[c++];
    }
  }
  return params;
}

TransitionMatrix fit_markov_profile(const Trajectory& trace,
                                    const MobilityGraph& graph,
                                    double smoothing) {
  const std::size_t r = graph.r();
  if (trace.states.size() < 2) throw ValidationError("Markov fit needs at least 2 observations");
  if (smoothing < 0.0) throw ValidationError("smoothing must be nonnegative");
  std::vector<double> counts(r * r, 0.0);
  for (std::size_t k = 1; k < trace.states.size(); ++k) {
    const StateId a = trace.states[k - 1], b = trace.states[k];
    if (a >= r || b >= r || !graph.has_edge(a, b)) {
      throw ValidationError("trace uses transition " + label({a, b}) +
                            " which is not in the graph");
    }
    counts[a * r + b] += 1.0;
  }
  std::vector<double> data(r * r, 0.0);
  for (std::size_t i = 0; i < r; ++i) {
    double visits = 0.0;
    for (std::size_t j = 0; j < r; ++j) visits += counts[i * r + j];
    const double denom =
        visits + static_cast<double>(graph.out_degree(static_cast<StateId>(i))) * smoothing;
    if (!(denom > 0.0)) {
      throw ValidationError("state " + std::to_string(i + 1) +
                            " is never left in the trace and smoothing is 0");
    }
    for (std::size_t j = 0; j < r; ++j) {
      if (graph.has_edge(static_cast<StateId>(i), static_cast<StateId>(j))) {
        data[i * r + j] = (counts[i * r + j] + smoothing) / denom;
      }
    }
  }
  return TransitionMatrix(r, std::move(data));
}

}  // namespace locpriv
