// Acceptance battery. Runs every criterion, prints one PASS/FAIL line each
// and exits nonzero if any criterion fails.
//
// Usage: acceptance <path-to-locpriv-cli> [criterion ...]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "locpriv/adversary.h"
#include "locpriv/anonymization.h"
#include "locpriv/harness.h"
#include "locpriv/markov.h"
#include "locpriv/metrics.h"
#include "locpriv/proofcheck.h"
#include "oracles.h"

namespace locpriv {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::vector<Trajectory> sample_iid_trajectories(std::span<const IidProfile> profiles, std::size_t m,
                                                Rng& rng) {
  std::vector<Trajectory> x;
  for (const auto& p : profiles) x.push_back(sample_trajectory_iid(p, m, rng));
  return x;
}

// 1. Posterior of pi(0) from minor permanents vs enumeration of all n!.
Outcome posterior_oracle() {
  Rng rng(1001);
  double worst = 0.0;
  for (int c = 0; c < 200; ++c) {
    const std::size_t r = 2 + rng.uniform_index(2);
    const std::size_t n = 1 + rng.uniform_index(6);
    const std::size_t m = 1 + rng.uniform_index(12);
    const auto density = ProfileDensity::uniform_simplex(r);
    std::vector<IidProfile> profiles;
    for (std::size_t u = 0; u < n; ++u) profiles.push_back(sample_profile(density, rng));
    const auto x = sample_iid_trajectories(profiles, m, rng);
    const auto y = anonymize(x, sample_permutation(n, rng));
    const auto l = likelihood_matrix(profiles, count_stats(y, r));
    const auto got = posterior_pi1(l).weights;
    const auto expected = oracle::brute_force_posterior(l);
    for (std::size_t j = 0; j < n; ++j) worst = std::max(worst, std::abs(got[j] - expected[j]));
  }
  return {worst <= 1e-10, "200 instances, max |dW| = " + fmt("%.3g", worst) + " (tol 1e-10)"};
}

// 2. MAP assignment vs exhaustive argmax.
Outcome map_oracle() {
  Rng rng(1002);
  int mismatches = 0;
  for (int c = 0; c < 500; ++c) {
    const std::size_t n = 1 + rng.uniform_index(6);
    LikelihoodMatrix l(n);
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t j = 0; j < n; ++j) {
        // Every third matrix is integer valued so that ties are common.
        l(u, j) = c % 3 == 0 ? -static_cast<double>(rng.uniform_index(3)) : -10.0 * rng.uniform();
      }
    const auto got = map_assignment(l);
    const auto expected = oracle::brute_force_map(l);
    if (std::vector<std::size_t>(got.forward().begin(), got.forward().end()) != expected) {
      ++mismatches;
    }
  }
  return {mismatches == 0, "500 matrices, " + std::to_string(mismatches) + " mismatches"};
}

// Random trail through the same multiset of transitions, starting where
// `column` starts. Rejection sampling over random walks; returns the input
// unchanged if no other trail is found.
std::vector<StateId> rewire_trail(const std::vector<StateId>& column, Rng& rng) {
  std::vector<std::pair<StateId, StateId>> steps;
  for (std::size_t t = 1; t < column.size(); ++t) steps.emplace_back(column[t - 1], column[t]);
  for (int attempt = 0; attempt < 200; ++attempt) {
    auto left = steps;
    std::vector<StateId> out = {column[0]};
    while (!left.empty()) {
      std::vector<std::size_t> options;
      for (std::size_t e = 0; e < left.size(); ++e)
        if (left[e].first == out.back()) options.push_back(e);
      if (options.empty()) break;
      const std::size_t pick = options[rng.uniform_index(options.size())];
      out.push_back(left[pick].second);
      left.erase(left.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    if (left.empty() && out != column) return out;
  }
  return column;
}

ObservationMatrix with_columns(const ObservationMatrix& y,
                               const std::vector<std::vector<StateId>>& cols) {
  std::vector<StateId> data;
  for (const auto& c : cols) data.insert(data.end(), c.begin(), c.end());
  return ObservationMatrix(y.m(), y.n(), std::move(data));
}

std::vector<std::vector<StateId>> columns_of(const ObservationMatrix& y) {
  std::vector<std::vector<StateId>> cols;
  for (std::size_t j = 0; j < y.n(); ++j) cols.emplace_back(y.column(j).begin(), y.column(j).end());
  return cols;
}

// 3. Posterior invariance under statistic-preserving rewrites of Y.
Outcome sufficiency() {
  Rng rng(1003);
  double worst = 0.0;
  std::size_t rewired = 0;
  const auto density = ProfileDensity::uniform_simplex(2);
  for (int c = 0; c < 100; ++c) {
    std::vector<IidProfile> profiles;
    for (int u = 0; u < 4; ++u) profiles.push_back(sample_profile(density, rng));
    const auto y = anonymize(sample_iid_trajectories(profiles, 6, rng), sample_permutation(4, rng));
    auto cols = columns_of(y);
    for (auto& col : cols) {
      for (std::size_t i = col.size() - 1; i > 0; --i) std::swap(col[i], col[rng.uniform_index(i + 1)]);
    }
    const auto y2 = with_columns(y, cols);
    rewired += !(y2 == y);
    const auto a = posterior_pi1(likelihood_matrix(profiles, count_stats(y, 2))).weights;
    const auto b = posterior_pi1(likelihood_matrix(profiles, count_stats(y2, 2))).weights;
    for (std::size_t j = 0; j < 4; ++j) worst = std::max(worst, std::abs(a[j] - b[j]));
  }
  const DependencyMap map(MobilityGraph::three_state_example());
  for (int c = 0; c < 100; ++c) {
    std::vector<TransitionMatrix> profiles;
    std::vector<Trajectory> x;
    for (int u = 0; u < 4; ++u) {
      profiles.push_back(map.expand(sample_free_params(map, DensityKind::kUniformSimplex, 1.0, rng)));
      x.push_back(sample_trajectory_markov(profiles.back(), 8, rng));
    }
    const auto y = anonymize(x, sample_permutation(4, rng));
    auto cols = columns_of(y);
    for (auto& col : cols) col = rewire_trail(col, rng);
    const auto y2 = with_columns(y, cols);
    rewired += !(y2 == y);
    const auto a = posterior_pi1(likelihood_matrix(profiles, transition_stats(y, 3))).weights;
    const auto b = posterior_pi1(likelihood_matrix(profiles, transition_stats(y2, 3))).weights;
    for (std::size_t j = 0; j < 4; ++j) worst = std::max(worst, std::abs(a[j] - b[j]));
  }
  return {worst <= 1e-12, "200 cases (" + std::to_string(rewired) + " with Y changed), max |dW| = " +
                              fmt("%.3g", worst) + " (tol 1e-12)"};
}

// 4. Monte Carlo MI against exhaustive enumeration on the tiny model.
Outcome tiny_mi() {
  CellSpec cell;
  cell.r = 2;
  cell.mode = ProfileMode::kFullyFixed;
  cell.fixed_profiles = {IidProfile::two_state(0.3), IidProfile::two_state(0.7)};
  cell.n = 2;
  cell.m = 2;
  cell.k = 1;
  cell.seed = 1004;
  const auto est = mutual_information_mc(cell, 100000);
  const double exact = oracle::exact_mutual_information_iid(
      {IidProfile::two_state(0.3), IidProfile::two_state(0.7)}, 2, 1);
  const double z = std::abs(est.value - exact) / est.std_error;
  return {z <= 3.0, "MC " + fmt("%.6f", est.value) + " +/- " + fmt("%.2g", est.std_error) +
                        " bits vs exact " + fmt("%.6f", exact) + " (|z| = " + fmt("%.2f", z) + ")"};
}

ExperimentConfig trend_config(ConfigModel model, double beta, std::vector<Metric> metrics) {
  ExperimentConfig c;
  c.model = model;
  if (model == ConfigModel::kMarkov) {
    c.markov_map = std::make_shared<DependencyMap>(MobilityGraph::three_state_example());
    c.r = 3;
  }
  c.n_grid = {4, 8, 16};
  c.schedule.beta = beta;
  c.trials = 2000;
  c.metrics = std::move(metrics);
  c.seed = 2024;
  return c;
}

struct CellValue {
  std::size_t n = 0;
  std::size_t m = 0;
  double value = 0.0;
  double se = 0.0;
};

std::vector<CellValue> aggregates(const std::vector<ResultRow>& rows, const std::string& metric) {
  std::vector<CellValue> out;
  for (const auto& r : rows) {
    if (r.trial == -1 && r.metric == metric) out.push_back({r.n, r.m, r.value, r.std_error.value_or(0.0)});
  }
  return out;
}

// Nonincreasing sequence allowing at most `allowed` rises, each within
// 2 combined standard errors.
bool nonincreasing(const std::vector<CellValue>& v, int allowed, std::string& detail) {
  int rises = 0;
  bool ok = true;
  for (std::size_t i = 0; i < v.size(); ++i) {
    detail += (i ? ", " : "") + std::string("n=") + std::to_string(v[i].n) + " m=" +
              std::to_string(v[i].m) + ": " + fmt("%.4f", v[i].value) + "+/-" + fmt("%.4f", v[i].se);
    if (i == 0 || v[i].value <= v[i - 1].value) continue;
    ++rises;
    if (v[i].value - v[i - 1].value > 2.0 * std::hypot(v[i].se, v[i - 1].se)) ok = false;
  }
  return ok && rises <= allowed;
}

double accuracy_at(const std::vector<ResultRow>& rows, std::size_t n) {
  for (const auto& c : aggregates(rows, "pi1_accuracy"))
    if (c.n == n) return c.value;
  return std::nan("");
}

// 5. Two-state trend below and above the threshold exponent 2.
Outcome two_state_trend() {
  const auto below = run_sweep(trend_config(ConfigModel::kIid2, 1.2, {Metric::kMi, Metric::kAccuracy}));
  std::string detail = "MI ";
  const bool mi_ok = nonincreasing(aggregates(below, "mi"), 1, detail);
  auto above_cfg = trend_config(ConfigModel::kIid2, 2.8, {Metric::kAccuracy});
  above_cfg.n_grid = {16};
  const auto above = run_sweep(above_cfg);
  const double a_low = accuracy_at(below, 16), a_high = accuracy_at(above, 16);
  const bool acc_ok = a_high >= 3.0 * a_low;
  detail += "; pi1_accuracy n=16: beta=2.8 " + fmt("%.4f", a_high) + " vs beta=1.2 " + fmt("%.4f", a_low);
  return {mi_ok && acc_ok, detail};
}

// 6. Threshold exponents.
Outcome exponents() {
  const double t2 = threshold_exponent(ModelDescriptor::iid(2));
  const double t3 = threshold_exponent(ModelDescriptor::iid(3));
  const double tm = threshold_exponent(ModelDescriptor::markov(MobilityGraph::three_state_example()));
  const bool ok = t2 == 2.0 && t3 == 1.0 && tm == 2.0 / 3.0;
  return {ok, "iid r=2: " + fmt("%.17g", t2) + ", iid r=3: " + fmt("%.17g", t3) +
                  ", example graph: " + fmt("%.17g", tm)};
}

// 7. Markov trend on the example graph (threshold 2/3).
Outcome markov_trend() {
  const auto below = run_sweep(trend_config(ConfigModel::kMarkov, 0.4, {Metric::kMi, Metric::kAccuracy}));
  std::string detail = "MI ";
  const bool mi_ok = nonincreasing(aggregates(below, "mi"), 0, detail);
  auto above_cfg = trend_config(ConfigModel::kMarkov, 1.2, {Metric::kAccuracy});
  above_cfg.n_grid = {16};
  const auto above = run_sweep(above_cfg);
  const double a_low = accuracy_at(below, 16), a_high = accuracy_at(above, 16);
  const bool acc_ok = a_high >= 3.0 * a_low;
  detail += "; pi1_accuracy n=16: beta=1.2 " + fmt("%.4f", a_high) + " vs beta=0.4 " + fmt("%.4f", a_low);
  return {mi_ok && acc_ok, detail};
}

// 8. Lemma machinery.
Outcome lemma_machinery() {
  const auto params = LemmaParams::create(1.0, 0.05, 0.1);
  std::string detail;
  bool ok = true;

  // (a) m beta eps = m^(theta - phi).
  const std::vector<std::size_t> m_grid = {100, 1000, 10000, 100000, 1000000};
  double worst = 0.0;
  for (std::size_t m : m_grid) {
    const double md = static_cast<double>(m);
    worst = std::max(worst, std::abs(md * params.beta(md) * params.eps(md) - std::pow(md, -0.05)));
  }
  const bool a_ok = worst <= 1e-12;
  detail += std::string("(a) ") + (a_ok ? "ok" : "FAIL") + " max err " + fmt("%.2g", worst);

  // (b) mean |J| over 200 draws vs 2 n eps delta (delta = 1 for the uniform prior).
  LemmaBatteryConfig battery;
  battery.n_grid = {10000};
  battery.trials = 200;
  battery.seed = 1008;
  const auto rows = run_lemma_battery(battery);
  double mean = 0, se = 0, expected = 0;
  for (const auto& r : rows) {
    if (r.metric == "critical_set_mean") {
      mean = r.value;
      se = r.std_error.value_or(0.0);
    }
    if (r.metric == "critical_set_expected") expected = r.value;
  }
  const bool b_ok = std::abs(mean - expected) <= 3.0 * se;
  detail += std::string("; (b) ") + (b_ok ? "ok" : "FAIL") + " mean |J| " + fmt("%.3f", mean) +
            " vs " + fmt("%.3f", expected) + " (3 SE = " + fmt("%.3f", 3 * se) + ")";

  // (c) max |ln Delta| under 5 m^(theta - phi) and decreasing in m.
  Rng rng(1009);
  const auto delta = delta_uniformity_experiment(params, m_grid, kDeltaSamples, 0.5, rng);
  bool under = true, decreasing = true;
  double worst_ratio = 0.0;
  for (std::size_t i = 0; i < delta.size(); ++i) {
    under &= delta[i].max_abs_log_delta <= delta[i].envelope;
    worst_ratio = std::max(worst_ratio, delta[i].max_abs_log_delta / delta[i].m_beta_eps);
    if (i > 0) decreasing &= delta[i].max_abs_log_delta < delta[i - 1].max_abs_log_delta;
  }
  const bool c_ok = under && decreasing;
  detail += std::string("; (c) ") + (c_ok ? "ok" : "FAIL") + " max|lnD|/(m beta eps) = " +
            fmt("%.2f", worst_ratio) + " (envelope 5), decreasing " + (decreasing ? "yes" : "no");

  // (d) median max deviation of N W_j from 1, two-state, beta = 1.2.
  const auto wparams = LemmaParams::create(0.8, 0.05, 0.1);
  std::vector<double> medians;
  for (std::size_t n : {4u, 8u, 16u}) {
    CellSpec cell;
    cell.r = 2;
    cell.user1 = IidProfile::two_state(0.5);
    cell.n = n;
    cell.m = schedule_observations(n, ObservationSchedule(1.0, 1.2));
    cell.seed = 1010;
    medians.push_back(weight_uniformity(cell, wparams, 2000).median);
  }
  const bool d_ok = medians[1] < medians[0] && medians[2] < medians[1];
  detail += std::string("; (d) ") + (d_ok ? "ok" : "FAIL") + " medians " + fmt("%.4f", medians[0]) +
            ", " + fmt("%.4f", medians[1]) + ", " + fmt("%.4f", medians[2]);
  ok = a_ok && b_ok && c_ok && d_ok;
  return {ok, detail};
}

// 9. Markov algebra.
Outcome markov_algebra() {
  Rng rng(1011);
  double worst = 0.0;
  for (int c = 0; c < 100; ++c) {
    const double a = rng.uniform(), b = rng.uniform();
    const auto pi = stationary_distribution(TransitionMatrix(2, {1 - a, a, b, 1 - b}));
    worst = std::max({worst, std::abs(pi[0] - b / (a + b)), std::abs(pi[1] - a / (a + b))});
  }
  int round_trip_failures = 0;
  for (int c = 0; c < 100; ++c) {
    const std::size_t r = 2 + rng.uniform_index(5);
    std::vector<Edge> edges;
    for (StateId s = 0; s < r; ++s) {
      const std::size_t first = edges.size();
      for (StateId t = 0; t < r; ++t)
        if (rng.uniform() < 0.5) edges.push_back({s, t});
      if (edges.size() == first) edges.push_back({s, static_cast<StateId>(rng.uniform_index(r))});
    }
    const DependencyMap map(MobilityGraph::with_canonical_free_edges(r, edges));
    const auto params = sample_free_params(map, DensityKind::kUniformSimplex, 1.0, rng);
    const auto t = map.expand(params);
    if (!(map.contract(t) == params) || !(map.expand(map.contract(t)) == t)) ++round_trip_failures;
  }
  const bool ok = worst <= 1e-12 && round_trip_failures == 0;
  return {ok, "stationary max err " + fmt("%.2g", worst) + " (tol 1e-12); round-trip failures " +
                  std::to_string(round_trip_failures) + "/100"};
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// 10. CLI determinism across runs and thread counts.
Outcome determinism(const std::string& cli) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("locpriv_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "sweep.json");
    cfg << R"({"model": "iidr", "r": 3, "n_grid": [3, 6, 9],
      "density": {"kind": "bounded-mixture", "uniform_weight": 0.4},
      "schedule": {"alpha": 0.2}, "trials": 40, "metrics": ["mi", "accuracy"], "seed": 77})";
  }
  ::unsetenv("LOCPRIV_THREADS");
  std::vector<std::string> outputs;
  bool exits_ok = true;
  for (int threads : {1, 1, 4}) {
    const fs::path out = dir / ("run" + std::to_string(outputs.size()) + ".csv");
    const std::string cmd = "\"" + cli + "\" sweep --config \"" + (dir / "sweep.json").string() +
                            "\" --out \"" + out.string() + "\" --threads " + std::to_string(threads);
    exits_ok &= std::system(cmd.c_str()) == 0;
    outputs.push_back(read_file(out));
  }
  fs::remove_all(dir);
  const bool same = !outputs[0].empty() && outputs[0] == outputs[1] && outputs[0] == outputs[2];
  return {exits_ok && same, std::to_string(outputs[0].size()) + " bytes; threads 1/1/4 identical: " +
                                (same ? "yes" : "no")};
}

}  // namespace
}  // namespace locpriv

int main(int argc, char** argv) {
  using namespace locpriv;
  if (argc < 2) {
    std::cerr << "usage: acceptance <locpriv-cli> [criterion ...]\n";
    return 2;
  }
  const std::string cli = argv[1];
  std::set<int> only;
  for (int i = 2; i < argc; ++i) only.insert(std::atoi(argv[i]));

  struct Criterion {
    int id;
    const char* name;
    double budget_seconds;  // 0 = no runtime bound
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "posterior matches enumeration", 60, posterior_oracle},
      {2, "MAP matches exhaustive argmax", 10, map_oracle},
      {3, "sufficient statistics", 0, sufficiency},
      {4, "tiny-model MI vs exact", 60, tiny_mi},
      {5, "two-state trend", 600, two_state_trend},
      {6, "threshold exponents", 0, exponents},
      {7, "Markov trend", 900, markov_trend},
      {8, "lemma machinery", 0, lemma_machinery},
      {9, "Markov algebra", 0, markov_algebra},
      {10, "CLI determinism", 0, [&] { return determinism(cli); }},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_seconds > 0 && secs > c.budget_seconds) {
      o.pass = false;
      o.detail += "; over time budget";
    }
    std::printf("[%s] %2d %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += !o.pass;
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
