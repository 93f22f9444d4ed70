// locpriv: anonymization privacy experiments from the command line.
//
//   locpriv simulate --config <file> [--seed <u64>] [--out <path>]
//   locpriv sweep    --config <file> [--seed <u64>] [--out <path>] [--threads <k>]
//   locpriv lemma    --alpha <f> --theta <f> --phi <f> --m-grid <ints>
//                    --n-grid <ints> --trials <k> --seed <u64> --out <path>
//   locpriv audit    --traces <csv> --model <iid|markov> [--r <int>]
//                    [--graph <csv>] --n <int> --alpha-margin <f> [--out <path>]
//
// Exit codes: 0 success, 2 configuration/validation error, 1 runtime failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "locpriv/error.h"
#include "locpriv/harness.h"

namespace {

using locpriv::ValidationError;

std::vector<std::size_t> parse_int_list(const std::string& text, const std::string& flag) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(item, &used);
      if (used != item.size() || v < 1) throw std::invalid_argument(item);
      out.push_back(static_cast<std::size_t>(v));
    } catch (const std::logic_error&) {
      throw ValidationError(flag + ": '" + item + "' is not a positive integer");
    }
  }
  if (out.empty()) throw ValidationError(flag + " must list at least one value");
  return out;
}

std::size_t resolve_threads(std::optional<std::size_t> flag) {
  if (const char* env = std::getenv("LOCPRIV_THREADS")) {
    try {
      const long long v = std::stoll(env);
      if (v >= 1) return static_cast<std::size_t>(v);
    } catch (const std::logic_error&) {
    }
    throw ValidationError("LOCPRIV_THREADS must be a positive integer");
  }
  if (flag) {
    if (*flag < 1) throw ValidationError("--threads must be >= 1");
    return *flag;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

void emit_rows(const std::vector<locpriv::ResultRow>& rows,
               const std::optional<std::filesystem::path>& out) {
  if (!out) {
    locpriv::write_results_csv(std::cout, rows);
    return;
  }
  std::ofstream f(*out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + out->string());
  locpriv::write_results_csv(f, rows);
  if (!f) throw std::runtime_error("write to " + out->string() + " failed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Anonymization privacy experiments"};
  app.require_subcommand(1);

  std::string config_path, out_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;

  auto* simulate = app.add_subcommand("simulate", "Run a single-cell experiment");
  simulate->add_option("--config", config_path, "Experiment config (JSON)")->required();
  simulate->add_option("--seed", seed, "Override the config seed");
  simulate->add_option("--out", out_path, "Results CSV (default: config out_path or stdout)");

  auto* sweep = app.add_subcommand("sweep", "Run every cell of the n grid");
  sweep->add_option("--config", config_path, "Experiment config (JSON)")->required();
  sweep->add_option("--seed", seed, "Override the config seed");
  sweep->add_option("--out", out_path, "Results CSV (default: config out_path or stdout)");
  sweep->add_option("--threads", threads, "Worker threads (LOCPRIV_THREADS overrides)");

  locpriv::LemmaBatteryConfig lemma_cfg;
  std::string m_grid, n_grid;
  std::uint64_t lemma_seed = 0;
  auto* lemma = app.add_subcommand("lemma", "Numerical checks of the two-state lemma chain");
  lemma->add_option("--alpha", lemma_cfg.alpha)->required();
  lemma->add_option("--theta", lemma_cfg.theta)->required();
  lemma->add_option("--phi", lemma_cfg.phi)->required();
  lemma->add_option("--m-grid", m_grid, "Comma-separated observation counts")->required();
  lemma->add_option("--n-grid", n_grid, "Comma-separated population sizes")->required();
  lemma->add_option("--trials", lemma_cfg.trials)->required();
  lemma->add_option("--seed", lemma_seed)->required();
  lemma->add_option("--out", out_path)->required();

  std::string traces_path, model_name, graph_path;
  std::size_t audit_r = 0, audit_n = 0;
  double alpha_margin = 0.0;
  auto* audit = app.add_subcommand("audit", "Recommend a pseudonym lifetime for a trace set");
  audit->add_option("--traces", traces_path, "CSV with user_id,time,location")->required();
  audit->add_option("--model", model_name, "iid or markov")->required();
  audit->add_option("--r", audit_r, "Number of locations (i.i.d.)");
  audit->add_option("--graph", graph_path, "Markov graph CSV (from,to,free)");
  audit->add_option("--n", audit_n, "Effective population size")->required();
  audit->add_option("--alpha-margin", alpha_margin, "Safety margin below the threshold")->required();
  audit->add_option("--out", out_path, "Report path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "locpriv: " << e.what() << '\n';
    return 2;
  }

  try {
    std::optional<std::filesystem::path> out;
    if (!out_path.empty()) out = out_path;

    if (simulate->parsed() || sweep->parsed()) {
      auto config = locpriv::load_config(config_path);
      if (seed) config.seed = *seed;
      if (!out) out = config.out_path;
      const std::size_t k = resolve_threads(threads);
      const auto rows = simulate->parsed() ? locpriv::run_simulate(config, k)
                                           : locpriv::run_sweep(config, k);
      emit_rows(rows, out);
    } else if (lemma->parsed()) {
      lemma_cfg.m_grid = parse_int_list(m_grid, "--m-grid");
      lemma_cfg.n_grid = parse_int_list(n_grid, "--n-grid");
      lemma_cfg.seed = lemma_seed;
      emit_rows(locpriv::run_lemma_battery(lemma_cfg, resolve_threads(std::nullopt)), out);
    } else if (audit->parsed()) {
      locpriv::ModelKind kind;
      std::shared_ptr<const locpriv::DependencyMap> map;
      if (model_name == "iid") {
        kind = locpriv::ModelKind::kIid;
        if (!graph_path.empty()) throw ValidationError("--graph is only valid with --model markov");
      } else if (model_name == "markov") {
        kind = locpriv::ModelKind::kMarkov;
        if (graph_path.empty()) throw ValidationError("--model markov requires --graph");
        map = std::make_shared<const locpriv::DependencyMap>(locpriv::load_graph(graph_path));
        if (audit_r != 0 && audit_r != map->graph().r()) {
          throw ValidationError("--r does not match the graph");
        }
      } else {
        throw ValidationError("--model must be iid or markov");
      }
      std::ifstream in(traces_path);
      if (!in) throw ValidationError("cannot open traces " + traces_path);
      const auto traces = locpriv::ingest_traces(in, kind, audit_r, map);
      const auto report =
          locpriv::audit(traces, audit_n, alpha_margin, resolve_threads(std::nullopt));
      const std::string text = locpriv::audit_report_json(report) + "\n";
      if (out) {
        std::ofstream f(*out);
        if (!f) throw std::runtime_error("cannot write " + out->string());
        f << text;
      } else {
        std::cout << text;
      }
    }
  } catch (const ValidationError& e) {
    std::cerr << "locpriv: error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "locpriv: failure: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
