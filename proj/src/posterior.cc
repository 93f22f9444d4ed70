#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "locpriv/adversary.h"
#include "locpriv/error.h"

namespace locpriv {
namespace {

// For every column j, the permanent of rows 1..n-1 restricted to the columns
// other than j. perm_j = table[full \ {j}], where table[S] sums over ways to
// give the first |S| of those rows the columns in S.
std::vector<double> minor_permanents(const std::vector<double>& a, std::size_t n) {
  const std::uint32_t full = (std::uint32_t{1} << n) - 1;
  std::vector<double> table(std::size_t{1} << n, 0.0);
  table[0] = 1.0;
  for (std::uint32_t s = 1; s <= full; ++s) {
    const std::size_t t = static_cast<std::size_t>(std::popcount(s));
    if (t >= n) continue;  // only n-1 rows to place
    const double* row = &a[t * n];  // row t places into the last column added
    double acc = 0.0;
    for (std::uint32_t rest = s; rest != 0; rest &= rest - 1) {
      const int k = std::countr_zero(rest);
      acc += table[s & ~(std::uint32_t{1} << k)] * row[k];
    }
    table[s] = acc;
  }
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) out[j] = table[full & ~(std::uint32_t{1} << j)];
  return out;
}

// Same recursion on log-scaled entries.
std::vector<double> log_minor_permanents(const std::vector<double>& log_a, std::size_t n) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  const std::uint32_t full = (std::uint32_t{1} << n) - 1;
  std::vector<double> table(std::size_t{1} << n, kNegInf);
  table[0] = 0.0;
  std::vector<double> terms;
  for (std::uint32_t s = 1; s <= full; ++s) {
    const std::size_t t = static_cast<std::size_t>(std::popcount(s));
    if (t >= n) continue;
    const double* row = &log_a[t * n];
    terms.clear();
    double hi = kNegInf;
    for (std::uint32_t rest = s; rest != 0; rest &= rest - 1) {
      const int k = std::countr_zero(rest);
      const double term = table[s & ~(std::uint32_t{1} << k)] + row[k];
      terms.push_back(term);
      hi = std::max(hi, term);
    }
    if (hi == kNegInf) continue;
    double acc = 0.0;
    for (double term : terms) acc += std::exp(term - hi);
    table[s] = hi + std::log(acc);
  }
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) out[j] = table[full & ~(std::uint32_t{1} << j)];
  return out;
}

}  // namespace

AssignmentPosterior posterior_pi1(const LikelihoodMatrix& likelihoods, std::size_t max_n) {
  const std::size_t n = likelihoods.n();
  if (n == 0) throw ValidationError("posterior needs at least one user");
  if (n > max_n || n > 30) {
    throw ValidationError("exact posterior is limited to n <= " +
                          std::to_string(std::min<std::size_t>(max_n, 30)) +
                          ", got n = " + std::to_string(n));
  }
  // Row-max factoring: the factor exp(max_u) is common to every permutation.
  std::vector<double> log_a(n * n);
  for (std::size_t u = 0; u < n; ++u) {
    const auto row = likelihoods.row(u);
    const double hi = *std::max_element(row.begin(), row.end());
    if (hi == kImpossible) {
      throw std::runtime_error("user " + std::to_string(u + 1) +
                               " cannot have produced any observed column");
    }
    for (std::size_t j = 0; j < n; ++j) log_a[u * n + j] = row[j] - hi;
  }

  // Identical rows give every permutation the same weight.
  bool identical = true;
  for (std::size_t u = 1; u < n && identical; ++u) {
    identical = std::equal(likelihoods.row(u).begin(), likelihoods.row(u).end(),
                           likelihoods.row(0).begin());
  }
  if (identical) {
    const auto row = likelihoods.row(0);
    if (std::find(row.begin(), row.end(), kImpossible) != row.end()) {
      throw std::runtime_error("every permutation has zero likelihood");
    }
    return {std::vector<double>(n, 1.0 / static_cast<double>(n)), 0.0};
  }

  std::vector<double> weights(n, 0.0);
  double total = 0.0;
  {
    std::vector<double> a(n * n);
    for (std::size_t c = 0; c < a.size(); ++c) a[c] = std::exp(log_a[c]);
    const auto minors = minor_permanents(a, n);
    for (std::size_t j = 0; j < n; ++j) {
      weights[j] = a[j] * minors[j];
      total += weights[j];
    }
  }
  if (!(total >= std::numeric_limits<double>::min() * 1e16)) {
    // Scaled permanents underflowed; redo everything in the log domain.
    const auto minors = log_minor_permanents(log_a, n);
    double hi = kImpossible;
    for (std::size_t j = 0; j < n; ++j) {
      weights[j] = log_a[j] + minors[j];
      hi = std::max(hi, weights[j]);
    }
    if (hi == kImpossible) {
      throw std::runtime_error("posterior is degenerate: every permutation has zero likelihood");
    }
    total = 0.0;
    for (auto& w : weights) {
      w = std::exp(w - hi);
      total += w;
    }
  }
  AssignmentPosterior post;
  post.weights = std::move(weights);
  double sum = 0.0;
  for (auto& w : post.weights) {
    w /= total;
    sum += w;
  }
  post.normalization_residual = std::abs(sum - 1.0);
  return post;
}

}  // namespace locpriv
