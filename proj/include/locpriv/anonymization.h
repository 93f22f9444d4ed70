#ifndef LOCPRIV_ANONYMIZATION_H_
#define LOCPRIV_ANONYMIZATION_H_

#include <cstddef>
#include <span>
#include <vector>

#include "locpriv/markov.h"
#include "locpriv/mobility.h"
#include "locpriv/random.h"

namespace locpriv {

// Bijection of {0, ..., n-1}: forward[u] is the pseudonym of user u.
class Permutation {
 public:
  explicit Permutation(std::vector<std::size_t> forward);
  static Permutation identity(std::size_t n);

  std::size_t size() const { return forward_.size(); }
  std::size_t operator()(std::size_t user) const { return forward_[user]; }
  std::size_t inverse(std::size_t pseudonym) const { return inverse_[pseudonym]; }
  std::span<const std::size_t> forward() const { return forward_; }

  friend bool operator==(const Permutation& a, const Permutation& b) {
    return a.forward_ == b.forward_;
  }

 private:
  std::vector<std::size_t> forward_;
  std::vector<std::size_t> inverse_;
};

// Fisher-Yates shuffle. Requires n >= 1.
Permutation sample_permutation(std::size_t n, Rng& rng);

// m x n matrix of anonymized observations; column j is the trajectory of the
// user whose pseudonym is j. Stored column-major.
class ObservationMatrix {
 public:
  ObservationMatrix(std::size_t m, std::size_t n, std::vector<StateId> column_major);

  std::size_t m() const { return m_; }
  std::size_t n() const { return n_; }
  // Time index k is 0-based here.
  StateId at(std::size_t k, std::size_t j) const { return data_[j * m_ + k]; }
  std::span<const StateId> column(std::size_t j) const {
    return std::span<const StateId>(data_).subspan(j * m_, m_);
  }

  friend bool operator==(const ObservationMatrix&, const ObservationMatrix&) = default;

 private:
  std::size_t m_;
  std::size_t n_;
  std::vector<StateId> data_;
};

// Places trajectory u in column perm(u).
ObservationMatrix anonymize(std::span<const Trajectory> trajectories,
                            const Permutation& perm);

// m(n) = max(1, round_half_up(c * n^beta)).
class ObservationSchedule {
 public:
  ObservationSchedule(double c, double beta);

  double c() const { return c_; }
  double beta() const { return beta_; }

 private:
  double c_;
  double beta_;
};

std::size_t schedule_observations(std::size_t n, const ObservationSchedule& schedule);

enum class ModelKind { kIid, kMarkov };

struct ModelDescriptor {
  ModelKind kind = ModelKind::kIid;
  std::size_t r = 2;
  // |E| for Markov models; unused for i.i.d.
  std::size_t edge_count = 0;

  static ModelDescriptor iid(std::size_t r) { return {ModelKind::kIid, r, 0}; }
  static ModelDescriptor markov(const MobilityGraph& graph) {
    return {ModelKind::kMarkov, graph.r(), graph.edges().size()};
  }
};

// 2/(r-1) for i.i.d. models, 2/(|E|-r) for Markov models. Throws
// ValidationError when r < 2 (i.i.d.) or |E| - r = 0 (Markov).
double threshold_exponent(const ModelDescriptor& model);

}  // namespace locpriv

#endif  // LOCPRIV_ANONYMIZATION_H_
