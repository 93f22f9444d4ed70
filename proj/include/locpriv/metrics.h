#ifndef LOCPRIV_METRICS_H_
#define LOCPRIV_METRICS_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "locpriv/adversary.h"
#include "locpriv/anonymization.h"
#include "locpriv/population.h"

namespace locpriv {

// Shannon entropy in bits, with 0 log 0 = 0.
double entropy_bits(std::span<const double> p);

// P(X_1(k) = x | Y) = sum_j W_j [Y_j(k) = x]. k is 1-based.
std::vector<double> conditional_location_distribution(const ObservationMatrix& y,
                                                      const AssignmentPosterior& post,
                                                      std::size_t k, std::size_t r);

// Exact law of X(k), k 1-based: the profile itself for i.i.d. users, the
// row e_0 T^(k-1) for Markov users starting in state 0.
std::vector<double> marginal_location_distribution(const UserProfile& profile,
                                                   std::size_t k);

// Entropy (bits) of the normalized likelihoods of user 0 over pseudonyms,
// ignoring the one-to-one constraint. A posterior proxy for n too large for
// the exact permanent computation.
double pi1_proxy_entropy(const LikelihoodMatrix& likelihoods);

struct PriorSpec {
  DensityKind kind = DensityKind::kUniformSimplex;
  double uniform_weight = 1.0;
};

enum class ProfileMode {
  // User 0 is fixed for the whole experiment; users 1..n-1 are redrawn from
  // the prior in every trial.
  kFixedUser1,
  // Every profile is given and held fixed.
  kFullyFixed,
};

// One (model, n, m) cell of an experiment. Trials of the cell draw from
// substream_seed(seed, cell_index, trial).
struct CellSpec {
  ModelKind model = ModelKind::kIid;
  std::size_t r = 2;
  std::shared_ptr<const DependencyMap> markov_map;
  PriorSpec prior;
  ProfileMode mode = ProfileMode::kFixedUser1;
  // Profile of user 0 in kFixedUser1 mode; when empty it is drawn from the
  // prior on a stream that depends on `seed` only, so every cell of an
  // experiment shares it.
  std::optional<UserProfile> user1;
  std::vector<UserProfile> fixed_profiles;
  std::size_t n = 1;
  std::size_t m = 1;
  // Evaluation time, 1-based; 0 selects the last observation (k = m).
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::uint64_t cell_index = 0;

  ModelDescriptor descriptor() const;
  std::size_t evaluation_time() const;
};

// Rejects inconsistent cells (missing graph, wrong fixed profile count, k > m).
void validate_cell(const CellSpec& cell);

// Profile drawn from the cell's prior.
UserProfile sample_prior_profile(const CellSpec& cell, Rng& rng);

// User 0's profile for the cell (explicit, fixed, or drawn from the seed).
UserProfile resolve_user1(const CellSpec& cell);

// Everything one trial of the pipeline produces: profiles -> trajectories ->
// permutation -> anonymized matrix -> likelihoods.
struct TrialSample {
  Population population;
  Permutation permutation;
  ObservationMatrix observations;
  LikelihoodMatrix likelihoods;
};

TrialSample sample_trial(const CellSpec& cell, std::uint64_t trial);

enum class MiMethod { kExactEnumeration, kMcPermanent };

struct MiEstimate {
  double value = 0.0;      // bits
  double std_error = 0.0;  // bits
  std::size_t trials = 0;
  MiMethod method = MiMethod::kMcPermanent;
  // H(X_1(k)) - H(X_1(k) | Y = y_t) for each trial.
  std::vector<double> per_trial;
};

// Per-trial MI contribution H(X_1(k)) - H(conditional law of X_1(k)).
double trial_mi_contribution(const CellSpec& cell, const TrialSample& sample);

// Monte Carlo estimate of I(X_1(k); Y) given the profiles: H(X_1(k)) minus
// the average entropy of the exact posterior location law. Requires
// n <= kPermanentFeasibilityBound and trials >= 2.
MiEstimate mutual_information_mc(const CellSpec& cell, std::size_t trials,
                                 std::size_t threads = 1);

struct AccuracyEstimate {
  double pi1_accuracy = 0.0;
  double full_perm_accuracy = 0.0;
  std::vector<std::uint8_t> pi1_hits;
  std::vector<std::uint8_t> full_hits;
};

// Fraction of trials where the MAP assignment recovers the pseudonym of
// user 0 (resp. the whole permutation).
AccuracyEstimate deanonymization_accuracy(const CellSpec& cell, std::size_t trials,
                                          std::size_t threads = 1);

// Sample mean and standard error (sample std / sqrt(T)); SE is 0 for T < 2.
struct MeanSe {
  double mean = 0.0;
  double std_error = 0.0;
};
MeanSe mean_and_se(std::span<const double> values);

}  // namespace locpriv

#endif  // LOCPRIV_METRICS_H_
