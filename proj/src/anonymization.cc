#include "locpriv/anonymization.h"

#include <cmath>
#include <numeric>
#include <string>

#include "locpriv/error.h"

namespace locpriv {

Permutation::Permutation(std::vector<std::size_t> forward)
    : forward_(std::move(forward)), inverse_(forward_.size(), forward_.size()) {
  const std::size_t n = forward_.size();
  for (std::size_t u = 0; u < n; ++u) {
    const std::size_t j = forward_[u];
    if (j >= n || inverse_[j] != n) {
      throw ValidationError("not a permutation of 0.." + std::to_string(n - 1));
    }
    inverse_[j] = u;
  }
}

Permutation Permutation::identity(std::size_t n) {
  std::vector<std::size_t> f(n);
  std::iota(f.begin(), f.end(), 0);
  return Permutation(std::move(f));
}

Permutation sample_permutation(std::size_t n, Rng& rng) {
  if (n < 1) throw ValidationError("permutation needs n >= 1");
  std::vector<std::size_t> f(n);
  std::iota(f.begin(), f.end(), 0);
  for (std::size_t i = n - 1; i > 0; --i) {
    std::swap(f[i], f[rng.uniform_index(i + 1)]);
  }
  return Permutation(std::move(f));
}

ObservationMatrix::ObservationMatrix(std::size_t m, std::size_t n,
                                     std::vector<StateId> column_major)
    : m_(m), n_(n), data_(std::move(column_major)) {
  if (data_.size() != m * n) throw ValidationError("observation matrix size mismatch");
}

ObservationMatrix anonymize(std::span<const Trajectory> trajectories,
                            const Permutation& perm) {
  const std::size_t n = trajectories.size();
  if (perm.size() != n) {
    throw ValidationError("permutation size " + std::to_string(perm.size()) +
                          " does not match " + std::to_string(n) + " users");
  }
  const std::size_t m = n == 0 ? 0 : trajectories[0].size();
  std::vector<StateId> data(m * n);
  for (std::size_t u = 0; u < n; ++u) {
    if (trajectories[u].size() != m) {
      throw ValidationError("trajectory lengths differ");
    }
    std::copy(trajectories[u].states.begin(), trajectories[u].states.end(),
              data.begin() + static_cast<std::ptrdiff_t>(perm(u) * m));
  }
  return ObservationMatrix(m, n, std::move(data));
}

ObservationSchedule::ObservationSchedule(double c, double beta) : c_(c), beta_(beta) {
  if (!(c > 0.0) || !std::isfinite(c)) throw ValidationError("schedule c must be positive");
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw ValidationError("schedule beta must be positive");
  }
}

std::size_t schedule_observations(std::size_t n, const ObservationSchedule& schedule) {
  if (n < 1) throw ValidationError("schedule needs n >= 1");
  const double raw = schedule.c() * std::pow(static_cast<double>(n), schedule.beta());
  const double rounded = std::floor(raw + 0.5);
  return rounded < 1.0 ? 1 : static_cast<std::size_t>(rounded);
}

double threshold_exponent(const ModelDescriptor& model) {
  if (model.kind == ModelKind::kIid) {
    if (model.r < 2) throw ValidationError("i.i.d. threshold needs r >= 2");
    return 2.0 / static_cast<double>(model.r - 1);
  }
  if (model.edge_count <= model.r) {
    throw ValidationError("Markov threshold undefined for d = |E| - r = 0");
  }
  return 2.0 / static_cast<double>(model.edge_count - model.r);
}

}  // namespace locpriv
