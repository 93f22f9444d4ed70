#ifndef LOCPRIV_POPULATION_H_
#define LOCPRIV_POPULATION_H_

#include <cstddef>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "locpriv/adversary.h"
#include "locpriv/anonymization.h"
#include "locpriv/markov.h"
#include "locpriv/mobility.h"

namespace locpriv {

// Mobility law of a single user.
using UserProfile = std::variant<IidProfile, TransitionMatrix>;

// n users sharing one model kind (and, for Markov, one graph). Index 0 is
// the user whose privacy is measured.
class Population {
 public:
  static Population iid(std::vector<IidProfile> profiles);
  static Population markov(std::shared_ptr<const DependencyMap> map,
                           std::vector<TransitionMatrix> profiles);

  ModelKind kind() const { return kind_; }
  std::size_t size() const;
  std::size_t r() const { return r_; }
  std::span<const IidProfile> iid_profiles() const { return iid_; }
  std::span<const TransitionMatrix> markov_profiles() const { return markov_; }
  const DependencyMap* dependency_map() const { return map_.get(); }
  ModelDescriptor descriptor() const;
  UserProfile profile(std::size_t user) const;

  Trajectory sample_trajectory(std::size_t user, std::size_t m, Rng& rng) const;

  // Sufficient statistics of y and the n x n log-likelihood matrix the
  // adversary builds from them.
  LikelihoodMatrix likelihoods(const ObservationMatrix& y) const;

 private:
  ModelKind kind_ = ModelKind::kIid;
  std::size_t r_ = 0;
  std::shared_ptr<const DependencyMap> map_;
  std::vector<IidProfile> iid_;
  std::vector<TransitionMatrix> markov_;
};

}  // namespace locpriv

#endif  // LOCPRIV_POPULATION_H_
