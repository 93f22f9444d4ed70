#ifndef LOCPRIV_HARNESS_H_
#define LOCPRIV_HARNESS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "locpriv/markov.h"
#include "locpriv/metrics.h"
#include "locpriv/population.h"

namespace locpriv {

// Fixed phi used by the sweep's "weights" metric to size the critical set.
inline constexpr double kSweepWeightPhi = 0.1;

// Draws per m in the lemma battery's likelihood-ratio experiment.
inline constexpr std::size_t kDeltaSamples = 10000;

// Seed of the audit's simulated attacks.
inline constexpr std::uint64_t kAuditSeed = 0;
inline constexpr std::size_t kAuditTrials = 200;

enum class ConfigModel { kIid2, kIidR, kMarkov };
enum class Metric { kMi, kAccuracy, kWeights };

struct ScheduleSpec {
  double c = 1.0;
  std::optional<double> beta;
  // beta = threshold_exponent - alpha when beta is absent.
  std::optional<double> alpha;
};

struct DensitySpec {
  PriorSpec prior;
  // User 0's profile (kFixedUser1 mode); i.i.d.: probability vector,
  // Markov: free parameters.
  std::optional<std::vector<double>> user1;
  // Fully fixed mode: one entry per user (requires a single-n grid).
  std::vector<std::vector<double>> fixed_profiles;
};

// Declarative experiment. Parsed from a JSON object with exactly these
// snake_case keys; unknown keys are rejected.
struct ExperimentConfig {
  ConfigModel model = ConfigModel::kIid2;
  std::size_t r = 2;
  std::optional<std::filesystem::path> graph_path;
  DensitySpec density;
  std::vector<std::size_t> n_grid;
  ScheduleSpec schedule;
  std::size_t trials = 1;
  std::size_t k = 0;  // 0 = last observation
  std::vector<Metric> metrics;
  std::uint64_t seed = 0;
  std::optional<std::filesystem::path> out_path;

  // Loaded from graph_path for Markov models.
  std::shared_ptr<const DependencyMap> markov_map;

  double effective_beta() const;
  std::string experiment_id() const;
  std::string model_name() const;
};

// Parses and validates; relative graph paths resolve against base_dir.
ExperimentConfig parse_config(const std::string& json_text,
                              const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

// Canonical JSON form of the config (graph_path and out_path excluded).
std::string canonical_config(const ExperimentConfig& config);

struct ResultRow {
  std::string experiment_id;
  std::string model;
  std::size_t n = 0;
  std::size_t m = 0;
  double beta = 0.0;
  long long trial = -1;  // -1 marks a per-cell aggregate
  std::string metric;
  double value = 0.0;
  std::optional<double> std_error;
  std::uint64_t seed = 0;

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

inline constexpr const char* kResultsHeader =
    "experiment_id,model,n,m,beta,trial,metric,value,std_error,seed";

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_results_csv(std::istream& in);

// Builds the cell for grid entry `cell_index`.
CellSpec make_cell(const ExperimentConfig& config, std::size_t cell_index);

// Runs every cell of the grid. Per cell, trial rows come in (trial, metric)
// order followed by the aggregate rows (trial = -1).
std::vector<ResultRow> run_sweep(const ExperimentConfig& config, std::size_t threads = 1);

// Runs only the first cell; the config must have a single-entry n_grid.
std::vector<ResultRow> run_simulate(const ExperimentConfig& config, std::size_t threads = 1);

struct LemmaBatteryConfig {
  double alpha = 1.0;
  double theta = 0.05;
  double phi = 0.1;
  std::vector<std::size_t> m_grid;
  std::vector<std::size_t> n_grid;
  std::size_t trials = 200;
  std::uint64_t seed = 0;
  double p1 = 0.5;
};

std::vector<ResultRow> run_lemma_battery(const LemmaBatteryConfig& config,
                                         std::size_t threads = 1);

// Edge list CSV with header from,to,free (1-based labels, free in
// {0, 1, auto}).
MobilityGraph read_graph_csv(std::istream& in);
MobilityGraph load_graph(const std::filesystem::path& path);

struct TraceDataset {
  std::vector<std::string> user_ids;
  // Per user, (time, state) pairs with strictly increasing time.
  std::vector<std::vector<std::pair<long long, StateId>>> visits;
  // labels[state] is the file label of internal state `state`.
  std::vector<std::string> labels;

  Trajectory trajectory(std::size_t user) const;
  std::size_t min_length() const;
};

struct IngestedTraces {
  TraceDataset dataset;
  Population population;
};

// Parses a user_id,time,location CSV and fits one profile per user. For
// i.i.d. models labels map to states in first-seen order; `r` (0 = number of
// labels) may add unvisited states but must not be below the label count.
// For Markov models labels must be the graph's 1-based state numbers.
IngestedTraces ingest_traces(std::istream& in, ModelKind model, std::size_t r,
                             std::shared_ptr<const DependencyMap> graph,
                             double smoothing = 1.0);

struct AuditReport {
  ModelKind model = ModelKind::kIid;
  std::size_t r = 0;
  std::optional<std::size_t> d;
  double threshold_exponent = 0.0;
  std::size_t n_effective = 0;
  double alpha_margin = 0.0;
  std::size_t recommended_max_observations = 0;
  std::size_t users = 0;
  std::size_t observations_per_user = 0;
  double pi1_accuracy = 0.0;         // simulated, adversary knows the profiles
  double pi1_accuracy_traces = 0.0;  // recorded traces attacked with fitted profiles
  std::size_t trials = 0;
  std::vector<std::string> labels;
};

// m* = round(n_effective^(tau - alpha_margin)).
std::size_t recommended_max_observations(double tau, std::size_t n_effective,
                                         double alpha_margin);

AuditReport audit(const IngestedTraces& traces, std::size_t n_effective,
                  double alpha_margin, std::size_t threads = 1);

std::string audit_report_json(const AuditReport& report);

}  // namespace locpriv

#endif  // LOCPRIV_HARNESS_H_
