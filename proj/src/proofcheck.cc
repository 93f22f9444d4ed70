#include "locpriv/proofcheck.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "locpriv/error.h"
#include "locpriv/parallel.h"

namespace locpriv {

LemmaParams LemmaParams::create(double alpha, double theta, double phi) {
  if (!(alpha > 0.0) || alpha > 1.0) throw ValidationError("alpha must lie in (0, 1]");
  if (!(theta > 0.0)) throw ValidationError("theta must be positive");
  if (!(theta < phi)) throw ValidationError("theta must be smaller than phi");
  const double lambda = alpha / 2.0 + alpha * phi - 2.0 * phi;
  if (!(lambda > 0.0)) {
    throw ValidationError("lambda = alpha/2 + alpha*phi - 2*phi = " + std::to_string(lambda) +
                          " must be positive");
  }
  return LemmaParams(alpha, theta, phi, lambda);
}

double LemmaParams::eps(double m) const { return std::pow(m, -(0.5 + phi_)); }

double LemmaParams::beta(double m) const { return std::pow(m, -(0.5 - theta_)); }

std::vector<std::size_t> critical_set(std::span<const double> p, std::size_t p1_index,
                                      double eps) {
  if (p1_index >= p.size()) throw ValidationError("user index out of range");
  std::vector<std::size_t> j;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i == p1_index || std::abs(p[i] - p[p1_index]) < eps) j.push_back(i);
  }
  return j;
}

double interval_event_prob(std::span<const double> profiles_in_j, double p1,
                           std::size_t m, double beta, std::size_t trials, Rng& rng) {
  if (profiles_in_j.empty()) throw ValidationError("critical set is empty");
  if (trials == 0) throw ValidationError("need at least one trial");
  const double md = static_cast<double>(m);
  const double lo = md * (p1 - beta);
  const double hi = md * (p1 + beta);
  std::size_t hits = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    bool inside = true;
    for (double pj : profiles_in_j) {
      // The one library distribution in the code base: these draws (and the
      // interval_event_prob rows) can differ between standard libraries.
      std::binomial_distribution<long long> bin(static_cast<long long>(m), pj);
      const double s = static_cast<double>(bin(rng.engine()));
      if (s < lo || s > hi) inside = false;
    }
    hits += inside ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(trials);
}

DeltaRatio likelihood_ratio_delta(double p_i, double p_j, double a, double b) {
  for (double p : {p_i, p_j}) {
    if (!(p > 0.0) || !(p < 1.0)) throw ValidationError("probabilities must lie in (0, 1)");
  }
  DeltaRatio d;
  d.log_ratio = (a - b) * (std::log(p_i / p_j) + std::log((1.0 - p_j) / (1.0 - p_i)));
  d.ratio = std::exp(d.log_ratio);
  return d;
}

std::vector<DeltaUniformityRow> delta_uniformity_experiment(
    const LemmaParams& params, std::span<const std::size_t> m_grid,
    std::size_t samples, double p1, Rng& rng) {
  std::vector<DeltaUniformityRow> rows;
  for (std::size_t m : m_grid) {
    const double md = static_cast<double>(m);
    DeltaUniformityRow row;
    row.m = m;
    row.eps = params.eps(md);
    row.beta = params.beta(md);
    row.m_beta_eps = md * row.beta * row.eps;
    row.closed_form = std::pow(md, params.theta() - params.phi());
    row.envelope = 5.0 * row.closed_form;
    row.samples = samples;
    if (!(p1 - row.eps > 0.0) || !(p1 + row.eps < 1.0)) {
      throw ValidationError("profile window around p1 leaves (0, 1) at m = " + std::to_string(m));
    }
    const auto lo = static_cast<long long>(std::max(0.0, std::ceil(md * (p1 - row.beta))));
    const auto hi = static_cast<long long>(std::min(md, std::floor(md * (p1 + row.beta))));
    const double p_hi = p1 + row.eps, p_lo = p1 - row.eps;
    row.box_supremum = static_cast<double>(hi - lo) *
                       (std::log(p_hi / p_lo) + std::log((1.0 - p_lo) / (1.0 - p_hi)));
    for (std::size_t s = 0; s < samples; ++s) {
      const double p_i = p_lo + 2.0 * row.eps * rng.uniform();
      const double p_j = p_lo + 2.0 * row.eps * rng.uniform();
      const auto span_counts = static_cast<std::size_t>(hi - lo + 1);
      const double a = static_cast<double>(lo + static_cast<long long>(rng.uniform_index(span_counts)));
      const double b = static_cast<double>(lo + static_cast<long long>(rng.uniform_index(span_counts)));
      row.max_abs_log_delta =
          std::max(row.max_abs_log_delta, std::abs(likelihood_ratio_delta(p_i, p_j, a, b).log_ratio));
    }
    rows.push_back(row);
  }
  return rows;
}

double weight_deviation(const LikelihoodMatrix& likelihoods,
                        std::span<const std::size_t> critical_users,
                        const Permutation& perm) {
  if (critical_users.empty() || critical_users.front() != 0) {
    throw ValidationError("critical set must start with user 1");
  }
  std::vector<std::size_t> pseudonyms;
  for (std::size_t u : critical_users) pseudonyms.push_back(perm(u));
  std::sort(pseudonyms.begin(), pseudonyms.end());
  const auto block = likelihoods.select(critical_users, pseudonyms);
  const auto post = posterior_pi1(block);
  const double n = static_cast<double>(critical_users.size());
  double worst = 0.0;
  for (double w : post.weights) worst = std::max(worst, std::abs(n * w - 1.0));
  return worst;
}

std::optional<double> trial_weight_deviation(const TrialSample& sample, double eps) {
  if (sample.population.kind() != ModelKind::kIid || sample.population.r() != 2) {
    throw ValidationError("weight uniformity is defined for the two-state model only");
  }
  std::vector<double> p;
  for (const auto& prof : sample.population.iid_profiles()) p.push_back(prof[1]);
  const auto j = critical_set(p, 0, eps);
  if (j.size() < 2) return std::nullopt;
  return weight_deviation(sample.likelihoods, j, sample.permutation);
}

WeightUniformity weight_uniformity(const CellSpec& cell, const LemmaParams& params,
                                   std::size_t trials, std::size_t threads) {
  validate_cell(cell);
  const double eps = params.eps(static_cast<double>(cell.m));
  std::vector<std::optional<double>> dev(trials);
  parallel_for(trials, threads, [&](std::size_t t) {
    dev[t] = trial_weight_deviation(sample_trial(cell, t), eps);
  });
  WeightUniformity out;
  for (const auto& d : dev) {
    if (d) {
      out.per_trial.push_back(*d);
    } else {
      ++out.degenerate;
    }
  }
  out.median = out.per_trial.empty() ? 0.0 : median(out.per_trial);
  return out;
}

double kl_bernoulli_bits(double p, double q) {
  for (double v : {p, q}) {
    if (!(v > 0.0) || !(v < 1.0)) throw ValidationError("KL arguments must lie in (0, 1)");
  }
  return p * std::log2(p / q) + (1.0 - p) * std::log2((1.0 - p) / (1.0 - q));
}

double kl_quadratic_approx_bits(double p, double eps) {
  if (!(p > 0.0) || !(p < 1.0)) throw ValidationError("p must lie in (0, 1)");
  return eps * eps / (2.0 * p * (1.0 - p) * std::log(2.0));
}

double median(std::vector<double> values) {
  if (values.empty()) throw ValidationError("median of an empty sample");
  std::sort(values.begin(), values.end());
  const std::size_t h = values.size() / 2;
  return values.size() % 2 == 1 ? values[h] : 0.5 * (values[h - 1] + values[h]);
}

}  // namespace locpriv
