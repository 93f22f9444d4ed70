#include "locpriv/metrics.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "locpriv/error.h"
#include "locpriv/parallel.h"

namespace locpriv {
namespace {

// Cell index reserved for the experiment-wide user-0 profile stream.
constexpr std::uint64_t kUser1Stream = 0xffffffffffffffffULL;

}  // namespace

double entropy_bits(std::span<const double> p) {
  double total = 0.0;
  for (double v : p) {
    if (v < 0.0) throw ValidationError("negative probability in entropy");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ValidationError("entropy input does not sum to 1");
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log2(v);
  }
  return h;
}

std::vector<double> conditional_location_distribution(const ObservationMatrix& y,
                                                      const AssignmentPosterior& post,
                                                      std::size_t k, std::size_t r) {
  if (k < 1 || k > y.m()) {
    throw ValidationError("time index " + std::to_string(k) + " outside 1.." +
                          std::to_string(y.m()));
  }
  if (post.weights.size() != y.n()) throw ValidationError("posterior size mismatch");
  std::vector<double> dist(r, 0.0);
  for (std::size_t j = 0; j < y.n(); ++j) {
    const StateId x = y.at(k - 1, j);
    if (x >= r) throw ValidationError("observation outside the state space");
    dist[x] += post.weights[j];
  }
  return dist;
}

std::vector<double> marginal_location_distribution(const UserProfile& profile,
                                                   std::size_t k) {
  if (k < 1) throw ValidationError("time index is 1-based");
  if (const auto* iid = std::get_if<IidProfile>(&profile)) {
    return {iid->probs().begin(), iid->probs().end()};
  }
  const auto& t = std::get<TransitionMatrix>(profile);
  const std::size_t r = t.r();
  std::vector<double> dist(r, 0.0), next(r);
  dist[0] = 1.0;
  for (std::size_t step = 1; step < k; ++step) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < r; ++i) {
      if (dist[i] == 0.0) continue;
      for (std::size_t j = 0; j < r; ++j) next[j] += dist[i] * t(i, j);
    }
    dist.swap(next);
  }
  return dist;
}

double pi1_proxy_entropy(const LikelihoodMatrix& likelihoods) {
  const auto row = likelihoods.row(0);
  const double hi = *std::max_element(row.begin(), row.end());
  if (hi == kImpossible) throw std::runtime_error("user 1 matches no pseudonym");
  std::vector<double> w(row.size());
  double total = 0.0;
  for (std::size_t j = 0; j < row.size(); ++j) {
    w[j] = std::exp(row[j] - hi);
    total += w[j];
  }
  for (auto& v : w) v /= total;
  return entropy_bits(w);
}

ModelDescriptor CellSpec::descriptor() const {
  return model == ModelKind::kIid ? ModelDescriptor::iid(r)
                                  : ModelDescriptor::markov(markov_map->graph());
}

std::size_t CellSpec::evaluation_time() const { return k == 0 ? m : k; }

void validate_cell(const CellSpec& cell) {
  if (cell.n < 1) throw ValidationError("cell needs n >= 1");
  if (cell.m < 1) throw ValidationError("cell needs m >= 1");
  if (cell.evaluation_time() > cell.m) {
    throw ValidationError("time index k = " + std::to_string(cell.k) +
                          " exceeds m = " + std::to_string(cell.m));
  }
  if (cell.model == ModelKind::kMarkov) {
    if (!cell.markov_map) throw ValidationError("Markov cell needs a graph");
    if (cell.r != cell.markov_map->graph().r()) {
      throw ValidationError("cell r does not match the graph");
    }
  } else if (cell.r < 2) {
    throw ValidationError("i.i.d. cell needs r >= 2");
  }
  if (cell.mode == ProfileMode::kFullyFixed && cell.fixed_profiles.size() != cell.n) {
    throw ValidationError("fixed profile mode needs exactly n profiles");
  }
  auto check = [&](const UserProfile& p) {
    const bool iid = std::holds_alternative<IidProfile>(p);
    if (iid != (cell.model == ModelKind::kIid)) {
      throw ValidationError("profile kind does not match the model");
    }
    const std::size_t r = iid ? std::get<IidProfile>(p).r() : std::get<TransitionMatrix>(p).r();
    if (r != cell.r) throw ValidationError("profile has the wrong number of states");
  };
  for (const auto& p : cell.fixed_profiles) check(p);
  if (cell.user1) check(*cell.user1);
}

UserProfile sample_prior_profile(const CellSpec& cell, Rng& rng) {
  if (cell.model == ModelKind::kIid) {
    const auto density = cell.prior.kind == DensityKind::kUniformSimplex
                             ? ProfileDensity::uniform_simplex(cell.r)
                             : ProfileDensity::bounded_mixture(cell.r, cell.prior.uniform_weight);
    return sample_profile(density, rng);
  }
  const auto params =
      sample_free_params(*cell.markov_map, cell.prior.kind, cell.prior.uniform_weight, rng);
  return cell.markov_map->expand(params);
}

UserProfile resolve_user1(const CellSpec& cell) {
  if (cell.mode == ProfileMode::kFullyFixed) return cell.fixed_profiles.at(0);
  if (cell.user1) return *cell.user1;
  Rng rng(substream_seed(cell.seed, kUser1Stream, 0));
  return sample_prior_profile(cell, rng);
}

TrialSample sample_trial(const CellSpec& cell, std::uint64_t trial) {
  Rng rng(substream_seed(cell.seed, cell.cell_index, trial));
  std::vector<UserProfile> profiles;
  profiles.reserve(cell.n);
  if (cell.mode == ProfileMode::kFullyFixed) {
    profiles = cell.fixed_profiles;
  } else {
    profiles.push_back(resolve_user1(cell));
    for (std::size_t u = 1; u < cell.n; ++u) profiles.push_back(sample_prior_profile(cell, rng));
  }
  Population pop = [&] {
    if (cell.model == ModelKind::kIid) {
      std::vector<IidProfile> v;
      for (auto& p : profiles) v.push_back(std::get<IidProfile>(std::move(p)));
      return Population::iid(std::move(v));
    }
    std::vector<TransitionMatrix> v;
    for (auto& p : profiles) v.push_back(std::get<TransitionMatrix>(std::move(p)));
    return Population::markov(cell.markov_map, std::move(v));
  }();
  std::vector<Trajectory> trajectories;
  trajectories.reserve(cell.n);
  for (std::size_t u = 0; u < cell.n; ++u) {
    trajectories.push_back(pop.sample_trajectory(u, cell.m, rng));
  }
  Permutation perm = sample_permutation(cell.n, rng);
  ObservationMatrix y = anonymize(trajectories, perm);
  LikelihoodMatrix l = pop.likelihoods(y);
  return TrialSample{std::move(pop), std::move(perm), std::move(y), std::move(l)};
}

double trial_mi_contribution(const CellSpec& cell, const TrialSample& sample) {
  const std::size_t k = cell.evaluation_time();
  const double prior_entropy =
      entropy_bits(marginal_location_distribution(sample.population.profile(0), k));
  const auto post = posterior_pi1(sample.likelihoods);
  const auto cond = conditional_location_distribution(sample.observations, post, k, cell.r);
  return prior_entropy - entropy_bits(cond);
}

MeanSe mean_and_se(std::span<const double> values) {
  MeanSe out;
  if (values.empty()) return out;
  // A constant sample reports its value and a zero error exactly.
  if (std::all_of(values.begin(), values.end(), [&](double v) { return v == values[0]; })) {
    out.mean = values[0];
    return out;
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  const double var = ss / static_cast<double>(values.size() - 1);
  out.std_error = std::sqrt(var / static_cast<double>(values.size()));
  return out;
}

MiEstimate mutual_information_mc(const CellSpec& cell, std::size_t trials,
                                 std::size_t threads) {
  validate_cell(cell);
  if (trials < 2) throw ValidationError("MI estimation needs at least 2 trials");
  if (cell.n > kPermanentFeasibilityBound) {
    throw ValidationError("MI estimation is limited to n <= " +
                          std::to_string(kPermanentFeasibilityBound));
  }
  MiEstimate est;
  est.trials = trials;
  est.method = MiMethod::kMcPermanent;
  est.per_trial.assign(trials, 0.0);
  parallel_for(trials, threads, [&](std::size_t t) {
    est.per_trial[t] = trial_mi_contribution(cell, sample_trial(cell, t));
  });
  const auto s = mean_and_se(est.per_trial);
  est.value = s.mean;
  est.std_error = s.std_error;
  return est;
}

AccuracyEstimate deanonymization_accuracy(const CellSpec& cell, std::size_t trials,
                                          std::size_t threads) {
  validate_cell(cell);
  if (trials < 1) throw ValidationError("accuracy needs at least 1 trial");
  AccuracyEstimate est;
  est.pi1_hits.assign(trials, 0);
  est.full_hits.assign(trials, 0);
  parallel_for(trials, threads, [&](std::size_t t) {
    const auto sample = sample_trial(cell, t);
    const auto guess = map_assignment(sample.likelihoods);
    est.pi1_hits[t] = guess(0) == sample.permutation(0) ? 1 : 0;
    est.full_hits[t] = guess == sample.permutation ? 1 : 0;
  });
  std::size_t pi1 = 0, full = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    pi1 += est.pi1_hits[t];
    full += est.full_hits[t];
  }
  est.pi1_accuracy = static_cast<double>(pi1) / static_cast<double>(trials);
  est.full_perm_accuracy = static_cast<double>(full) / static_cast<double>(trials);
  return est;
}

}  // namespace locpriv
