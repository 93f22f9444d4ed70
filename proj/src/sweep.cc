#include <cmath>
#include <optional>
#include <string>

#include "locpriv/error.h"
#include "locpriv/harness.h"
#include "locpriv/parallel.h"
#include "locpriv/proofcheck.h"

namespace locpriv {
namespace {

UserProfile to_profile(const ExperimentConfig& c, const std::vector<double>& v) {
  if (c.model == ConfigModel::kMarkov) return c.markov_map->expand(FreeParamVector{v});
  if (v.size() == 1 && c.r == 2) return IidProfile::two_state(v[0]);
  return IidProfile(v);
}

struct TrialValues {
  double mi = 0.0;  // MI contribution, or the proxy entropy above the bound
  std::uint8_t pi1 = 0;
  std::uint8_t full = 0;
  std::optional<double> weight;
};

}  // namespace

CellSpec make_cell(const ExperimentConfig& config, std::size_t cell_index) {
  CellSpec cell;
  cell.model = config.model == ConfigModel::kMarkov ? ModelKind::kMarkov : ModelKind::kIid;
  cell.r = config.r;
  cell.markov_map = config.markov_map;
  cell.prior = config.density.prior;
  if (!config.density.fixed_profiles.empty()) {
    cell.mode = ProfileMode::kFullyFixed;
    for (const auto& p : config.density.fixed_profiles) {
      cell.fixed_profiles.push_back(to_profile(config, p));
    }
  } else {
    cell.mode = ProfileMode::kFixedUser1;
    if (config.density.user1) cell.user1 = to_profile(config, *config.density.user1);
  }
  cell.n = config.n_grid.at(cell_index);
  cell.m = schedule_observations(cell.n, ObservationSchedule(config.schedule.c,
                                                             config.effective_beta()));
  cell.k = config.k;
  cell.seed = config.seed;
  cell.cell_index = cell_index;
  return cell;
}

namespace {

void run_cell(const ExperimentConfig& config, std::size_t cell_index, std::size_t threads,
              const std::string& id, std::vector<ResultRow>& rows) {
  const CellSpec cell = make_cell(config, cell_index);
  validate_cell(cell);
  const bool exact_mi = cell.n <= kPermanentFeasibilityBound;
  const double weight_eps =
      std::pow(static_cast<double>(cell.m), -(0.5 + kSweepWeightPhi));

  std::vector<TrialValues> values(config.trials);
  parallel_for(config.trials, threads, [&](std::size_t t) {
    const TrialSample sample = sample_trial(cell, t);
    TrialValues& v = values[t];
    for (Metric metric : config.metrics) {
      switch (metric) {
        case Metric::kMi:
          v.mi = exact_mi ? trial_mi_contribution(cell, sample)
                          : pi1_proxy_entropy(sample.likelihoods);
          break;
        case Metric::kAccuracy: {
          const auto guess = map_assignment(sample.likelihoods);
          v.pi1 = guess(0) == sample.permutation(0) ? 1 : 0;
          v.full = guess == sample.permutation ? 1 : 0;
          break;
        }
        case Metric::kWeights:
          v.weight = trial_weight_deviation(sample, weight_eps);
          break;
      }
    }
  });

  const double beta = config.effective_beta();
  auto row = [&](long long trial, std::string metric, double value,
                 std::optional<double> se) {
    rows.push_back(ResultRow{id, config.model_name(), cell.n, cell.m, beta, trial,
                             std::move(metric), value, se, config.seed});
  };
  const std::string mi_name = exact_mi ? "mi" : "pi1_proxy_entropy";

  for (std::size_t t = 0; t < config.trials; ++t) {
    const auto trial = static_cast<long long>(t);
    for (Metric metric : config.metrics) {
      switch (metric) {
        case Metric::kMi:
          row(trial, mi_name, values[t].mi, std::nullopt);
          break;
        case Metric::kAccuracy:
          row(trial, "pi1_accuracy", values[t].pi1, std::nullopt);
          row(trial, "full_perm_accuracy", values[t].full, std::nullopt);
          break;
        case Metric::kWeights:
          if (values[t].weight) {
            row(trial, "weight_deviation", *values[t].weight, std::nullopt);
          } else {
            row(trial, "weight_degenerate", 1.0, std::nullopt);
          }
          break;
      }
    }
  }

  for (Metric metric : config.metrics) {
    switch (metric) {
      case Metric::kMi: {
        std::vector<double> x;
        for (const auto& v : values) x.push_back(v.mi);
        const auto s = mean_and_se(x);
        row(-1, mi_name, s.mean, s.std_error);
        if (!exact_mi) row(-1, "mi_skipped", 0.0, std::nullopt);
        break;
      }
      case Metric::kAccuracy: {
        std::vector<double> pi1, full;
        for (const auto& v : values) {
          pi1.push_back(v.pi1);
          full.push_back(v.full);
        }
        const auto a = mean_and_se(pi1);
        const auto b = mean_and_se(full);
        row(-1, "pi1_accuracy", a.mean, a.std_error);
        row(-1, "full_perm_accuracy", b.mean, b.std_error);
        break;
      }
      case Metric::kWeights: {
        std::vector<double> dev;
        std::size_t degenerate = 0;
        for (const auto& v : values) {
          if (v.weight) {
            dev.push_back(*v.weight);
          } else {
            ++degenerate;
          }
        }
        row(-1, "weight_deviation", dev.empty() ? 0.0 : median(dev), std::nullopt);
        row(-1, "weight_degenerate", static_cast<double>(degenerate), std::nullopt);
        break;
      }
    }
  }
}

}  // namespace

std::vector<ResultRow> run_sweep(const ExperimentConfig& config, std::size_t threads) {
  if (config.n_grid.empty()) throw ValidationError("'n_grid' must be nonempty");
  const std::string id = config.experiment_id();
  std::vector<ResultRow> rows;
  for (std::size_t i = 0; i < config.n_grid.size(); ++i) run_cell(config, i, threads, id, rows);
  return rows;
}

std::vector<ResultRow> run_simulate(const ExperimentConfig& config, std::size_t threads) {
  if (config.n_grid.size() != 1) {
    throw ValidationError("simulate runs a single cell; 'n_grid' has " +
                          std::to_string(config.n_grid.size()) + " entries (use sweep)");
  }
  return run_sweep(config, threads);
}

std::vector<ResultRow> run_lemma_battery(const LemmaBatteryConfig& config, std::size_t threads) {
  const auto params = LemmaParams::create(config.alpha, config.theta, config.phi);
  if (config.trials < 1) throw ValidationError("lemma battery needs trials >= 1");
  const std::string id = "lemma";
  const std::string model = "iid2";
  const double beta = 2.0 - config.alpha;
  std::vector<ResultRow> rows;
  auto row = [&](std::size_t n, std::size_t m, std::string metric, double value,
                 std::optional<double> se = std::nullopt) {
    rows.push_back(ResultRow{id, model, n, m, beta, -1, std::move(metric), value, se, config.seed});
  };

  // Per-m quantities.
  {
    Rng rng(substream_seed(config.seed, 0, 0));
    const auto delta = delta_uniformity_experiment(params, config.m_grid, kDeltaSamples,
                                                   config.p1, rng);
    for (const auto& d : delta) {
      row(0, d.m, "m_beta_eps", d.m_beta_eps);
      row(0, d.m, "m_beta_eps_closed_form", d.closed_form);
      row(0, d.m, "delta_max_abs_log", d.max_abs_log_delta);
      row(0, d.m, "delta_envelope", d.envelope);
      row(0, d.m, "delta_box_supremum", d.box_supremum);
    }
    Rng irng(substream_seed(config.seed, 1, 0));
    for (std::size_t m : config.m_grid) {
      const double md = static_cast<double>(m);
      const double eps = params.eps(md);
      std::vector<double> members(20);
      for (auto& p : members) p = config.p1 - eps + 2.0 * eps * irng.uniform();
      row(20, m, "interval_event_prob",
          interval_event_prob(members, config.p1, m, params.beta(md), config.trials, irng));
    }
  }

  // Per-n quantities, with m = n^(2 - alpha).
  const ObservationSchedule schedule(1.0, beta);
  for (std::size_t idx = 0; idx < config.n_grid.size(); ++idx) {
    const std::size_t n = config.n_grid[idx];
    const std::size_t m = schedule_observations(n, schedule);
    const double eps = params.eps(static_cast<double>(m));
    std::vector<double> sizes(config.trials);
    parallel_for(config.trials, threads, [&](std::size_t t) {
      Rng rng(substream_seed(config.seed, 1000 + idx, t));
      std::vector<double> p(n);
      p[0] = config.p1;
      for (std::size_t u = 1; u < n; ++u) p[u] = rng.uniform();
      sizes[t] = static_cast<double>(critical_set(p, 0, eps).size());
    });
    const auto s = mean_and_se(sizes);
    row(n, m, "critical_set_mean", s.mean, s.std_error);
    row(n, m, "critical_set_expected", 2.0 * static_cast<double>(n) * eps);

    if (n <= kPermanentFeasibilityBound) {
      CellSpec cell;
      cell.r = 2;
      cell.user1 = IidProfile::two_state(config.p1);
      cell.n = n;
      cell.m = m;
      cell.seed = config.seed;
      cell.cell_index = 2000 + idx;
      const auto w = weight_uniformity(cell, params, config.trials, threads);
      row(n, m, "weight_deviation_median", w.median);
      row(n, m, "weight_degenerate", static_cast<double>(w.degenerate));
    }
  }
  return rows;
}

}  // namespace locpriv
