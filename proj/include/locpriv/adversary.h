#ifndef LOCPRIV_ADVERSARY_H_
#define LOCPRIV_ADVERSARY_H_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "locpriv/anonymization.h"
#include "locpriv/markov.h"
#include "locpriv/mobility.h"

namespace locpriv {

// Largest n for which posterior_pi1 will run the exact O(2^n n) computation.
inline constexpr std::size_t kPermanentFeasibilityBound = 20;

inline constexpr double kImpossible = -std::numeric_limits<double>::infinity();

// Visit counts per pseudonym: counts(j, i) = number of times state i appears
// in column j.
struct CountStats {
  std::size_t m = 0;
  std::size_t r = 0;
  std::vector<std::uint32_t> data;  // n x r, row-major

  std::size_t n() const { return r == 0 ? 0 : data.size() / r; }
  std::span<const std::uint32_t> column(std::size_t j) const {
    return std::span<const std::uint32_t>(data).subspan(j * r, r);
  }
  friend bool operator==(const CountStats&, const CountStats&) = default;
};

// Transition counts per pseudonym: an r x r matrix M_j of adjacent pairs.
struct TransitionStats {
  std::size_t m = 0;
  std::size_t r = 0;
  std::vector<std::uint32_t> data;  // n x r x r

  std::size_t n() const { return r == 0 ? 0 : data.size() / (r * r); }
  std::span<const std::uint32_t> column(std::size_t j) const {
    return std::span<const std::uint32_t>(data).subspan(j * r * r, r * r);
  }
  friend bool operator==(const TransitionStats&, const TransitionStats&) = default;
};

CountStats count_stats(const ObservationMatrix& y, std::size_t r);
TransitionStats transition_stats(const ObservationMatrix& y, std::size_t r);

// Multinomial kernel sum_i counts[i] ln p(i). Coefficients are dropped: they
// are identical for every candidate user and cancel in the posterior.
double log_likelihood_iid(const IidProfile& profile,
                          std::span<const std::uint32_t> counts);

// sum_{i,k} M(i,k) ln T(i,k); kImpossible when a count sits on a zero entry.
double log_likelihood_markov(const TransitionMatrix& matrix,
                             std::span<const std::uint32_t> counts);

// Reduced statistic: only the counts on the graph's free edges. Not a
// sufficient statistic for finite m; kept for comparison experiments.
double log_likelihood_markov_free_edges(const TransitionMatrix& matrix,
                                        const MobilityGraph& graph,
                                        std::span<const std::uint32_t> counts);

// L(u, j): log-likelihood that user u produced pseudonym j's statistics.
class LikelihoodMatrix {
 public:
  explicit LikelihoodMatrix(std::size_t n)
      : n_(n), data_(n * n, 0.0) {}
  LikelihoodMatrix(std::size_t n, std::vector<double> row_major);

  std::size_t n() const { return n_; }
  double operator()(std::size_t u, std::size_t j) const { return data_[u * n_ + j]; }
  double& operator()(std::size_t u, std::size_t j) { return data_[u * n_ + j]; }
  std::span<const double> row(std::size_t u) const {
    return std::span<const double>(data_).subspan(u * n_, n_);
  }

  // Sub-matrix keeping the given users (rows) and pseudonyms (columns), in
  // the given order.
  LikelihoodMatrix select(std::span<const std::size_t> users,
                          std::span<const std::size_t> pseudonyms) const;

 private:
  std::size_t n_;
  std::vector<double> data_;
};

LikelihoodMatrix likelihood_matrix(std::span<const IidProfile> profiles,
                                   const CountStats& stats);
LikelihoodMatrix likelihood_matrix(std::span<const TransitionMatrix> profiles,
                                   const TransitionStats& stats);

// Maximum a posteriori permutation: argmax_pi sum_u L(u, pi(u)). Among
// optimal permutations (ties within 1e-9 relative) the lexicographically
// smallest forward array is returned. Cells equal to kImpossible are never
// used; throws std::runtime_error when no permutation avoids them.
Permutation map_assignment(const LikelihoodMatrix& likelihoods);

struct AssignmentPosterior {
  // weights[j] = P(pseudonym of user 0 is j | statistics).
  std::vector<double> weights;
  double normalization_residual = 0.0;
};

// Exact posterior over the pseudonym of user 0:
//   W_j ∝ exp(L(0, j)) * perm[exp(L(u, k))]_{u != 0, k != j}.
// All n minor permanents come out of one subset dynamic program whose terms
// are all nonnegative. Rows are scaled by their maximum; if the scaled
// permanents underflow the computation is redone in the log domain.
// Throws ValidationError when n > max_n and std::runtime_error when every
// permutation has zero likelihood.
AssignmentPosterior posterior_pi1(const LikelihoodMatrix& likelihoods,
                                  std::size_t max_n = kPermanentFeasibilityBound);

}  // namespace locpriv

#endif  // LOCPRIV_ADVERSARY_H_
