#include "locpriv/adversary.h"

#include <cmath>
#include <string>

#include "locpriv/error.h"

namespace locpriv {

CountStats count_stats(const ObservationMatrix& y, std::size_t r) {
  CountStats s{y.m(), r, std::vector<std::uint32_t>(y.n() * r, 0)};
  for (std::size_t j = 0; j < y.n(); ++j) {
    for (StateId x : y.column(j)) {
      if (x >= r) throw ValidationError("observation outside the state space");
      ++s.data[j * r + x];
    }
  }
  return s;
}

TransitionStats transition_stats(const ObservationMatrix& y, std::size_t r) {
  if (y.m() < 1) throw ValidationError("transition statistics need m >= 1");
  TransitionStats s{y.m(), r, std::vector<std::uint32_t>(y.n() * r * r, 0)};
  for (std::size_t j = 0; j < y.n(); ++j) {
    const auto col = y.column(j);
    for (std::size_t k = 1; k < col.size(); ++k) {
      if (col[k - 1] >= r || col[k] >= r) {
        throw ValidationError("observation outside the state space");
      }
      ++s.data[j * r * r + col[k - 1] * r + col[k]];
    }
  }
  return s;
}

double log_likelihood_iid(const IidProfile& profile,
                          std::span<const std::uint32_t> counts) {
  if (counts.size() != profile.r()) {
    throw ValidationError("count vector length does not match the profile");
  }
  double ll = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] != 0) ll += counts[i] * std::log(profile[i]);
  }
  return ll;
}

double log_likelihood_markov(const TransitionMatrix& matrix,
                             std::span<const std::uint32_t> counts) {
  const std::size_t r = matrix.r();
  if (counts.size() != r * r) {
    throw ValidationError("transition count matrix does not match the chain");
  }
  double ll = 0.0;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] == 0) continue;
    const double p = matrix.data()[c];
    if (p <= 0.0) return kImpossible;
    ll += counts[c] * std::log(p);
  }
  return ll;
}

double log_likelihood_markov_free_edges(const TransitionMatrix& matrix,
                                        const MobilityGraph& graph,
                                        std::span<const std::uint32_t> counts) {
  const std::size_t r = matrix.r();
  if (counts.size() != r * r || graph.r() != r) {
    throw ValidationError("transition count matrix does not match the chain");
  }
  double ll = 0.0;
  for (const Edge& e : graph.free_edges()) {
    const std::uint32_t c = counts[e.from * r + e.to];
    if (c == 0) continue;
    const double p = matrix(e.from, e.to);
    if (p <= 0.0) return kImpossible;
    ll += c * std::log(p);
  }
  return ll;
}

LikelihoodMatrix::LikelihoodMatrix(std::size_t n, std::vector<double> row_major)
    : n_(n), data_(std::move(row_major)) {
  if (data_.size() != n * n) throw ValidationError("likelihood matrix must be square");
}

LikelihoodMatrix LikelihoodMatrix::select(std::span<const std::size_t> users,
                                          std::span<const std::size_t> pseudonyms) const {
  if (users.size() != pseudonyms.size()) {
    throw ValidationError("selection must be square");
  }
  LikelihoodMatrix out(users.size());
  for (std::size_t a = 0; a < users.size(); ++a) {
    for (std::size_t b = 0; b < pseudonyms.size(); ++b) {
      out(a, b) = (*this)(users[a], pseudonyms[b]);
    }
  }
  return out;
}

LikelihoodMatrix likelihood_matrix(std::span<const IidProfile> profiles,
                                   const CountStats& stats) {
  const std::size_t n = profiles.size();
  if (stats.n() != n) throw ValidationError("statistics and population sizes differ");
  LikelihoodMatrix l(n);
  for (std::size_t u = 0; u < n; ++u) {
    if (profiles[u].r() != stats.r) throw ValidationError("profile has wrong r");
    std::vector<double> logp(stats.r);
    for (std::size_t i = 0; i < stats.r; ++i) logp[i] = std::log(profiles[u][i]);
    for (std::size_t j = 0; j < n; ++j) {
      const auto counts = stats.column(j);
      double ll = 0.0;
      for (std::size_t i = 0; i < stats.r; ++i) {
        if (counts[i] != 0) ll += counts[i] * logp[i];
      }
      l(u, j) = ll;
    }
  }
  return l;
}

LikelihoodMatrix likelihood_matrix(std::span<const TransitionMatrix> profiles,
                                   const TransitionStats& stats) {
  const std::size_t n = profiles.size();
  if (stats.n() != n) throw ValidationError("statistics and population sizes differ");
  LikelihoodMatrix l(n);
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t j = 0; j < n; ++j) {
      l(u, j) = log_likelihood_markov(profiles[u], stats.column(j));
    }
  }
  return l;
}

}  // namespace locpriv
