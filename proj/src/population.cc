#include "locpriv/population.h"

#include "locpriv/error.h"

namespace locpriv {

Population Population::iid(std::vector<IidProfile> profiles) {
  if (profiles.empty()) throw ValidationError("population needs at least one user");
  Population p;
  p.kind_ = ModelKind::kIid;
  p.r_ = profiles.front().r();
  for (const auto& prof : profiles) {
    if (prof.r() != p.r_) throw ValidationError("profiles disagree on r");
  }
  p.iid_ = std::move(profiles);
  return p;
}

Population Population::markov(std::shared_ptr<const DependencyMap> map,
                              std::vector<TransitionMatrix> profiles) {
  if (profiles.empty()) throw ValidationError("population needs at least one user");
  if (!map) throw ValidationError("Markov population needs a graph");
  Population p;
  p.kind_ = ModelKind::kMarkov;
  p.r_ = map->graph().r();
  for (const auto& t : profiles) {
    if (t.r() != p.r_) throw ValidationError("transition matrix has wrong size");
  }
  p.map_ = std::move(map);
  p.markov_ = std::move(profiles);
  return p;
}

std::size_t Population::size() const {
  return kind_ == ModelKind::kIid ? iid_.size() : markov_.size();
}

ModelDescriptor Population::descriptor() const {
  return kind_ == ModelKind::kIid ? ModelDescriptor::iid(r_)
                                  : ModelDescriptor::markov(map_->graph());
}

UserProfile Population::profile(std::size_t user) const {
  if (kind_ == ModelKind::kIid) return iid_.at(user);
  return markov_.at(user);
}

Trajectory Population::sample_trajectory(std::size_t user, std::size_t m,
                                         Rng& rng) const {
  if (kind_ == ModelKind::kIid) return sample_trajectory_iid(iid_.at(user), m, rng);
  return sample_trajectory_markov(markov_.at(user), m, rng);
}

LikelihoodMatrix Population::likelihoods(const ObservationMatrix& y) const {
  if (kind_ == ModelKind::kIid) return likelihood_matrix(iid_, count_stats(y, r_));
  return likelihood_matrix(markov_, transition_stats(y, r_));
}

}  // namespace locpriv
