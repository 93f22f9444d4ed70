#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "locpriv/adversary.h"

namespace locpriv {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kNone = static_cast<std::size_t>(-1);

// Shortest augmenting path Hungarian method on costs -L, minimizing.
// Infinite costs are forbidden cells. On return row_match[i] is the column of
// row i and (row_pot, col_pot) is an optimal dual: cost(i,j) - row_pot[i] -
// col_pot[j] >= 0 everywhere, with equality on the matching.
struct Solution {
  std::vector<std::size_t> row_match;
  std::vector<double> row_pot;
  std::vector<double> col_pot;
};

Solution solve(const std::vector<double>& cost, std::size_t n) {
  // 1-based internally; index 0 is the virtual root.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double c = cost[(i0 - 1) * n + (j - 1)];
        if (c < kInf) {
          const double cur = c - u[i0] - v[j];
          if (cur < minv[j]) {
            minv[j] = cur;
            way[j] = j0;
          }
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      if (j1 == 0) {
        throw std::runtime_error("no feasible assignment: every permutation uses an impossible cell");
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  Solution s;
  s.row_match.assign(n, 0);
  for (std::size_t j = 1; j <= n; ++j) s.row_match[p[j] - 1] = j - 1;
  s.row_pot.assign(u.begin() + 1, u.end());
  s.col_pot.assign(v.begin() + 1, v.end());
  return s;
}

}  // namespace

Permutation map_assignment(const LikelihoodMatrix& likelihoods) {
  const std::size_t n = likelihoods.n();
  if (n == 0) return Permutation::identity(0);
  std::vector<double> cost(n * n);
  double scale = 1.0;
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t j = 0; j < n; ++j) {
      const double l = likelihoods(u, j);
      if (std::isnan(l) || l == kInf) throw std::invalid_argument("likelihood is NaN or +inf");
      cost[u * n + j] = l == kImpossible ? kInf : -l;
      if (l != kImpossible) scale = std::max(scale, std::abs(l));
    }
  }
  Solution s = solve(cost, n);
  const double tol = 1e-9 * scale;
  auto tight = [&](std::size_t i, std::size_t j) {
    const double c = cost[i * n + j];
    return c < kInf && c - s.row_pot[i] - s.col_pot[j] <= tol;
  };

  // Every optimal permutation is a perfect matching on the tight cells of an
  // optimal dual. Walk rows in order and give each the smallest column that
  // still extends to a perfect tight matching.
  std::vector<std::size_t>& match = s.row_match;
  std::vector<std::size_t> owner(n);
  for (std::size_t i = 0; i < n; ++i) owner[match[i]] = i;
  std::vector<bool> fixed_col(n, false);
  std::vector<std::size_t> parent_col(n), via_row(n);
  std::vector<bool> seen(n);
  for (std::size_t row = 0; row < n; ++row) {
    for (std::size_t col = 0; col < n; ++col) {
      if (fixed_col[col] || !tight(row, col)) continue;
      if (match[row] == col) break;
      // Alternating path: owner[col] must move to another column, ending at
      // the column `row` gives up.
      const std::size_t target = match[row];
      const std::size_t start = owner[col];
      std::fill(seen.begin(), seen.end(), false);
      std::vector<std::size_t> queue{start};
      std::size_t found = kNone;
      std::fill(parent_col.begin(), parent_col.end(), kNone);
      for (std::size_t head = 0; head < queue.size() && found == kNone; ++head) {
        const std::size_t x = queue[head];
        for (std::size_t c = 0; c < n; ++c) {
          if (c == col || fixed_col[c] || seen[c] || !tight(x, c)) continue;
          seen[c] = true;
          via_row[c] = x;
          if (c == target) {
            found = c;
            break;
          }
          parent_col[owner[c]] = c;
          queue.push_back(owner[c]);
        }
      }
      if (found == kNone) continue;
      // Shift along the path back to `start`.
      std::size_t c = found;
      while (true) {
        const std::size_t x = via_row[c];
        const std::size_t prev = parent_col[x];
        match[x] = c;
        owner[c] = x;
        if (x == start) break;
        c = prev;
      }
      match[row] = col;
      owner[col] = row;
      break;
    }
    fixed_col[match[row]] = true;
  }
  return Permutation(std::move(match));
}

}  // namespace locpriv
