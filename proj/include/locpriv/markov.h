#ifndef LOCPRIV_MARKOV_H_
#define LOCPRIV_MARKOV_H_

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "locpriv/mobility.h"
#include "locpriv/random.h"

namespace locpriv {

struct Edge {
  StateId from = 0;
  StateId to = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Support of a Markov mobility model. Edges are kept in lexicographic
// order. Every state has at least one out-edge, and exactly one out-edge per
// state is dependent (its probability is 1 minus the free ones in the row);
// the remaining |E| - r edges are free parameters.
class MobilityGraph {
 public:
  // Per row, every out-edge except the one with the largest target is free.
  static MobilityGraph with_canonical_free_edges(std::size_t r,
                                                 std::vector<Edge> edges);

  // Explicit choice; is_free[i] refers to edges[i] as given.
  static MobilityGraph with_free_edges(std::size_t r, std::vector<Edge> edges,
                                       std::vector<bool> is_free);

  // The 3-state example chain: 1->1 (p1), 1->2 (p2), 1->3 (1-p1-p2),
  // 2->3 (1), 3->2 (p3), 3->1 (1-p3), with 1-based labels. Internally the
  // states are 0, 1, 2.
  static MobilityGraph three_state_example();

  std::size_t r() const { return r_; }
  std::span<const Edge> edges() const { return edges_; }
  std::span<const Edge> free_edges() const { return free_edges_; }
  bool is_free(std::size_t edge_index) const { return free_[edge_index]; }
  bool has_edge(StateId from, StateId to) const {
    return adjacency_[from * r_ + to];
  }
  std::size_t out_degree(StateId state) const;
  // Target of the dependent edge leaving `state`.
  StateId dependent_target(StateId state) const {
    return dependent_target_[state];
  }

  friend bool operator==(const MobilityGraph&, const MobilityGraph&) = default;

 private:
  MobilityGraph(std::size_t r, std::vector<Edge> edges, std::vector<bool> is_free);

  std::size_t r_;
  std::vector<Edge> edges_;
  std::vector<bool> free_;
  std::vector<Edge> free_edges_;
  std::vector<StateId> dependent_target_;
  std::vector<bool> adjacency_;
};

// d = |E| - r.
std::size_t degrees_of_freedom(const MobilityGraph& graph);

// Row-stochastic r x r matrix, stored row-major. Rows sum to 1 within 1e-12.
class TransitionMatrix {
 public:
  TransitionMatrix(std::size_t r, std::vector<double> row_major);

  std::size_t r() const { return r_; }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * r_ + j];
  }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(data_).subspan(i * r_, r_);
  }
  std::span<const double> data() const { return data_; }

  friend bool operator==(const TransitionMatrix&, const TransitionMatrix&) = default;

 private:
  std::size_t r_;
  std::vector<double> data_;
};

// Free transition probabilities, ordered like MobilityGraph::free_edges().
struct FreeParamVector {
  std::vector<double> values;

  friend bool operator==(const FreeParamVector&, const FreeParamVector&) = default;
};

// Affine map between free parameters and the full transition matrix:
// dependent probability of row s = constant[s] + sum_k coefficient(s, k) * p_k,
// with constant 1 and coefficient -1 on the free edges of row s.
class DependencyMap {
 public:
  explicit DependencyMap(MobilityGraph graph);

  const MobilityGraph& graph() const { return graph_; }
  std::size_t free_count() const { return graph_.free_edges().size(); }
  double constant(StateId state) const { return constants_[state]; }
  double coefficient(StateId state, std::size_t k) const {
    return coefficients_[state * free_count() + k];
  }

  TransitionMatrix expand(const FreeParamVector& params) const;
  FreeParamVector contract(const TransitionMatrix& matrix) const;

 private:
  MobilityGraph graph_;
  std::vector<double> constants_;
  std::vector<double> coefficients_;  // r x d, row-major
};

TransitionMatrix expand_free_params(const FreeParamVector& params,
                                    const DependencyMap& map);

struct ChainValidity {
  bool irreducible = false;
  bool aperiodic = false;
  // gcd of cycle lengths through the states reachable from state 0.
  std::size_t period = 0;
};

// Structural checks on the positive entries of the matrix.
ChainValidity validate_chain(const TransitionMatrix& matrix);

// Stationary law by a direct linear solve of pi (T - I) = 0, sum(pi) = 1.
// Throws ValidationError unless the chain is irreducible and aperiodic.
std::vector<double> stationary_distribution(const TransitionMatrix& matrix);

// Same quantity by power iteration from the uniform law.
std::vector<double> stationary_distribution_power(const TransitionMatrix& matrix,
                                                  double tolerance = 1e-15,
                                                  std::size_t max_iterations = 1000000);

// Starts in state 0 and follows the rows of the matrix. Requires m >= 1.
Trajectory sample_trajectory_markov(const TransitionMatrix& matrix,
                                    std::size_t m, Rng& rng);

// Draws the free parameters row by row: the probabilities on the out-edges of
// each state form a point of an out_degree-vertex simplex drawn from a prior
// of the given kind. Rows with a single out-edge contribute nothing.
FreeParamVector sample_free_params(const DependencyMap& map, DensityKind kind,
                                   double uniform_weight, Rng& rng);

// Smoothed transition frequencies restricted to the graph's edges.
TransitionMatrix fit_markov_profile(const Trajectory& trace,
                                    const MobilityGraph& graph,
                                    double smoothing = 1.0);

}  // namespace locpriv

#endif  // LOCPRIV_MARKOV_H_
