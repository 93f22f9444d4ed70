#include "locpriv/mobility.h"

#include <cmath>
#include <numeric>
#include <string>

#include "locpriv/error.h"

namespace locpriv {
namespace {

double factorial(std::size_t k) { return std::tgamma(static_cast<double>(k) + 1.0); }

bool strictly_interior(std::span<const double> x, double margin) {
  for (double v : x) {
    if (!(v > margin) || !(v < 1.0 - margin)) return false;
  }
  return true;
}

// Normalized vector of independent Gamma(shape) draws, shape in {1, 2}.
std::vector<double> dirichlet(std::size_t r, int shape, Rng& rng) {
  std::vector<double> x(r);
  double total = 0.0;
  for (auto& v : x) {
    v = 0.0;
    for (int s = 0; s < shape; ++s) v += rng.exponential();
    total += v;
  }
  for (auto& v : x) v /= total;
  return x;
}

}  // namespace

IidProfile::IidProfile(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.size() < 2) {
    throw ValidationError("profile needs at least 2 locations");
  }
  double total = 0.0;
  for (double p : probs_) {
    if (!(p > 0.0) || !(p < 1.0)) {
      throw ValidationError("profile entry " + std::to_string(p) +
                            " is not strictly inside (0, 1)");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw ValidationError("profile does not sum to 1");
  }
}

IidProfile IidProfile::two_state(double p_one) {
  return IidProfile({1.0 - p_one, p_one});
}

ProfileDensity::ProfileDensity(DensityKind kind, std::size_t r,
                               double uniform_weight)
    : kind_(kind), r_(r), uniform_weight_(uniform_weight) {
  if (r < 2) throw ValidationError("density needs r >= 2");
  if (!(uniform_weight > 0.0) || uniform_weight > 1.0) {
    throw ValidationError("mixture uniform weight must lie in (0, 1]");
  }
  const double uniform_density = factorial(r - 1);
  const double bump_peak =
      factorial(2 * r - 1) / std::pow(static_cast<double>(r), static_cast<double>(r));
  lower_ = uniform_weight * uniform_density;
  upper_ = lower_ + (1.0 - uniform_weight) * bump_peak;
}

ProfileDensity ProfileDensity::uniform_simplex(std::size_t r) {
  return ProfileDensity(DensityKind::kUniformSimplex, r, 1.0);
}

ProfileDensity ProfileDensity::bounded_mixture(std::size_t r,
                                               double uniform_weight) {
  return ProfileDensity(DensityKind::kBoundedMixture, r, uniform_weight);
}

double ProfileDensity::evaluate(std::span<const double> x) const {
  if (x.size() != r_ || !strictly_interior(x, 0.0)) return 0.0;
  const double total = std::accumulate(x.begin(), x.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-9) return 0.0;
  const double uniform_density = factorial(r_ - 1);
  if (kind_ == DensityKind::kUniformSimplex) return uniform_density;
  // Dirichlet(2, ..., 2): Gamma(2r) / Gamma(2)^r * prod x_i.
  double bump = factorial(2 * r_ - 1);
  for (double v : x) bump *= v;
  return uniform_weight_ * uniform_density + (1.0 - uniform_weight_) * bump;
}

std::vector<double> ProfileDensity::sample_point(Rng& rng) const {
  while (true) {
    int shape = 1;
    if (kind_ == DensityKind::kBoundedMixture &&
        !(rng.uniform() < uniform_weight_)) {
      shape = 2;
    }
    auto x = dirichlet(r_, shape, rng);
    if (strictly_interior(x, kBoundaryMargin)) return x;
  }
}

IidProfile sample_profile(const ProfileDensity& density, Rng& rng) {
  while (true) {
    auto x = density.sample_point(rng);
    // Renormalization can push the sum off 1 by a few ulps; retry in the
    // (practically impossible) event the profile contract rejects it.
    const double total = std::accumulate(x.begin(), x.end(), 0.0);
    if (std::abs(total - 1.0) <= 1e-12) return IidProfile(std::move(x));
  }
}

Trajectory sample_trajectory_iid(const IidProfile& profile, std::size_t m,
                                 Rng& rng) {
  Trajectory t;
  t.states.resize(m);
  for (auto& s : t.states) {
    s = static_cast<StateId>(rng.categorical(profile.probs()));
  }
  return t;
}

IidProfile fit_iid_profile(const Trajectory& trace, std::size_t r,
                           double smoothing) {
  if (r < 2) throw ValidationError("fit needs r >= 2");
  if (smoothing < 0.0) throw ValidationError("smoothing must be nonnegative");
  if (trace.states.empty() && smoothing == 0.0) {
    throw ValidationError("cannot fit an empty trace without smoothing");
  }
  std::vector<double> counts(r, 0.0);
  for (StateId s : trace.states) {
    if (s >= r) throw ValidationError("trace state out of range");
    counts[s] += 1.0;
  }
  const double denom =
      static_cast<double>(trace.states.size()) + static_cast<double>(r) * smoothing;
  for (auto& c : counts) c = (c + smoothing) / denom;
  return IidProfile(std::move(counts));
}

}  // namespace locpriv
