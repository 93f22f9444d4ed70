#ifndef LOCPRIV_MOBILITY_H_
#define LOCPRIV_MOBILITY_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "locpriv/random.h"

namespace locpriv {

// 0-based location / state index. External formats use 1-based labels.
using StateId = std::uint32_t;

// Profiles closer than this to the simplex boundary are rejected by the
// samplers and resampled.
inline constexpr double kBoundaryMargin = 1e-9;

// Location distribution of a user under the i.i.d. model: probs[i] is the
// probability of being at location i at any time step. Entries are strictly
// inside (0, 1) and sum to 1 within 1e-12.
class IidProfile {
 public:
  explicit IidProfile(std::vector<double> probs);

  // Two-state profile with P(state 1) = p_one.
  static IidProfile two_state(double p_one);

  std::size_t r() const { return probs_.size(); }
  std::span<const double> probs() const { return probs_; }
  double operator[](std::size_t i) const { return probs_[i]; }

  friend bool operator==(const IidProfile&, const IidProfile&) = default;

 private:
  std::vector<double> probs_;
};

enum class DensityKind { kUniformSimplex, kBoundedMixture };

// Prior density f_P over the open probability simplex with r vertices,
// measured per unit volume of the (r-1)-dimensional coordinates
// (x_0, ..., x_{r-2}).
//
// kUniformSimplex has constant density (r-1)!. kBoundedMixture mixes the
// uniform law (weight w) with a Dirichlet(2, ..., 2) bump that vanishes on
// the boundary, so its density lies in [w (r-1)!, w (r-1)! + (1-w) (2r-1)!/r^r].
class ProfileDensity {
 public:
  static ProfileDensity uniform_simplex(std::size_t r);
  static ProfileDensity bounded_mixture(std::size_t r, double uniform_weight);

  DensityKind kind() const { return kind_; }
  std::size_t r() const { return r_; }
  double uniform_weight() const { return uniform_weight_; }
  double lower_bound() const { return lower_; }
  double upper_bound() const { return upper_; }

  // Density at a full r-vector x on the simplex; 0 outside the open simplex.
  double evaluate(std::span<const double> x) const;

  // Draws a point strictly inside the simplex (all coordinates at least
  // kBoundaryMargin away from 0).
  std::vector<double> sample_point(Rng& rng) const;

 private:
  ProfileDensity(DensityKind kind, std::size_t r, double uniform_weight);

  DensityKind kind_;
  std::size_t r_;
  double uniform_weight_;
  double lower_;
  double upper_;
};

struct Trajectory {
  std::vector<StateId> states;
  // Time index of states[0].
  std::size_t time_base = 1;

  std::size_t size() const { return states.size(); }
};

IidProfile sample_profile(const ProfileDensity& density, Rng& rng);

Trajectory sample_trajectory_iid(const IidProfile& profile, std::size_t m,
                                 Rng& rng);

// Laplace-smoothed maximum likelihood fit:
// probs[i] = (count_i + smoothing) / (m + r * smoothing).
IidProfile fit_iid_profile(const Trajectory& trace, std::size_t r,
                           double smoothing = 1.0);

}  // namespace locpriv

#endif  // LOCPRIV_MOBILITY_H_
