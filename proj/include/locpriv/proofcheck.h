#ifndef LOCPRIV_PROOFCHECK_H_
#define LOCPRIV_PROOFCHECK_H_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "locpriv/adversary.h"
#include "locpriv/anonymization.h"
#include "locpriv/metrics.h"
#include "locpriv/random.h"

namespace locpriv {

// Exponents of the two-state indistinguishability argument:
//   eps(m)  = m^-(1/2 + phi)   half-width of the critical profile window,
//   beta(m) = m^-(1/2 - theta) half-width of the count window A(m) / m,
//   lambda  = alpha/2 + alpha*phi - 2*phi, growth exponent of E|J|.
// Requires 0 < theta < phi, 0 < alpha < 1 (alpha = 1 is accepted as the
// boundary case) and lambda > 0.
class LemmaParams {
 public:
  static LemmaParams create(double alpha, double theta, double phi);

  double alpha() const { return alpha_; }
  double theta() const { return theta_; }
  double phi() const { return phi_; }
  double lambda() const { return lambda_; }
  double eps(double m) const;
  double beta(double m) const;

 private:
  LemmaParams(double alpha, double theta, double phi, double lambda)
      : alpha_(alpha), theta_(theta), phi_(phi), lambda_(lambda) {}

  double alpha_;
  double theta_;
  double phi_;
  double lambda_;
};

// Indices i with |p[i] - p[p1_index]| < eps (always contains p1_index).
std::vector<std::size_t> critical_set(std::span<const double> p,
                                      std::size_t p1_index, double eps);

// Fraction of trials in which every Binomial(m, p_j) count lies in
// [m (p1 - beta), m (p1 + beta)].
double interval_event_prob(std::span<const double> profiles_in_j, double p1,
                           std::size_t m, double beta, std::size_t trials, Rng& rng);

struct DeltaRatio {
  double ratio = 1.0;
  double log_ratio = 0.0;
};

// Ratio of P(S_i = a, S_j = b) to P(S_i = b, S_j = a) for two-state users.
DeltaRatio likelihood_ratio_delta(double p_i, double p_j, double a, double b);

struct DeltaUniformityRow {
  std::size_t m = 0;
  double eps = 0.0;
  double beta = 0.0;
  // Exact m * beta(m) * eps(m) and the closed form m^(theta - phi).
  double m_beta_eps = 0.0;
  double closed_form = 0.0;
  double max_abs_log_delta = 0.0;
  // 5 m^(theta - phi).
  double envelope = 0.0;
  // Supremum of |ln Delta| over the sampled box: 2 m beta(m) times
  // max ln(p_i/p_j) + ln((1-p_j)/(1-p_i)) over the profile window.
  double box_supremum = 0.0;
  std::size_t samples = 0;
};

// For each m: draws p_i, p_j uniformly in (p1 - eps, p1 + eps) and integer
// counts a, b uniformly in A(m) clipped to [0, m], and records max |ln Delta|.
std::vector<DeltaUniformityRow> delta_uniformity_experiment(
    const LemmaParams& params, std::span<const std::size_t> m_grid,
    std::size_t samples, double p1, Rng& rng);

// max over j in Pi(J) of |N W_j - 1|, where W is the posterior of user 0's
// pseudonym conditioned on the set of pseudonyms Pi(J) and N = |J|.
// Conditioning on Pi(J) factorizes the permanent, so W is the posterior of
// the J x Pi(J) block. `critical_users` must contain user 0.
double weight_deviation(const LikelihoodMatrix& likelihoods,
                        std::span<const std::size_t> critical_users,
                        const Permutation& perm);

struct WeightUniformity {
  std::vector<double> per_trial;  // non-degenerate trials, in trial order
  std::size_t degenerate = 0;     // trials with |J| < 2
  double median = 0.0;
};

// Two-state cells only: J is built from the trial's profiles with eps(m).
WeightUniformity weight_uniformity(const CellSpec& cell, const LemmaParams& params,
                                   std::size_t trials, std::size_t threads = 1);

// Per-trial deviation for an already sampled trial; nullopt if |J| < 2.
std::optional<double> trial_weight_deviation(const TrialSample& sample, double eps);

// KL divergence D(Bernoulli(p) || Bernoulli(q)) in bits.
double kl_bernoulli_bits(double p, double q);

// Leading term of D(Bernoulli(p + eps) || Bernoulli(p)): eps^2 / (2 p (1-p) ln 2).
double kl_quadratic_approx_bits(double p, double eps);

double median(std::vector<double> values);

}  // namespace locpriv

#endif  // LOCPRIV_PROOFCHECK_H_
