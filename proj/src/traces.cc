#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <unordered_map>

#include <json.hpp>

#include "locpriv/error.h"
#include "locpriv/harness.h"
#include "locpriv/parallel.h"

namespace locpriv {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

long long parse_int(const std::string& s, const std::string& what, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used == s.size()) return v;
  } catch (const std::logic_error&) {
  }
  throw ValidationError("line " + std::to_string(line_no) + ": " + what + " '" + s +
                        "' is not an integer");
}

}  // namespace

MobilityGraph read_graph_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || split_fields(line) != std::vector<std::string>{"from", "to", "free"}) {
    throw ValidationError("graph file must start with the header from,to,free");
  }
  std::vector<Edge> edges;
  std::vector<int> flags;  // 0, 1, or -1 for auto
  std::size_t r = 0;
  for (std::size_t line_no = 2; std::getline(in, line); ++line_no) {
    if (trim(line).empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 3) throw ValidationError("line " + std::to_string(line_no) + ": expected 3 fields");
    const long long from = parse_int(f[0], "from", line_no);
    const long long to = parse_int(f[1], "to", line_no);
    if (from < 1 || to < 1) {
      throw ValidationError("line " + std::to_string(line_no) + ": state labels are 1-based");
    }
    int flag;
    if (f[2] == "auto") {
      flag = -1;
    } else if (f[2] == "0" || f[2] == "1") {
      flag = f[2] == "1" ? 1 : 0;
    } else {
      throw ValidationError("line " + std::to_string(line_no) + ": free must be 0, 1 or auto");
    }
    edges.push_back({static_cast<StateId>(from - 1), static_cast<StateId>(to - 1)});
    flags.push_back(flag);
    r = std::max<std::size_t>(r, static_cast<std::size_t>(std::max(from, to)));
  }
  if (edges.empty()) throw ValidationError("graph file has no edges");

  // A state's edges are either all auto (canonical rule) or all explicit.
  std::vector<int> mode(r, 0);  // bit 1: auto seen, bit 2: explicit seen
  std::vector<StateId> largest(r, 0);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    mode[edges[i].from] |= flags[i] < 0 ? 1 : 2;
    largest[edges[i].from] = std::max(largest[edges[i].from], edges[i].to);
  }
  std::vector<bool> is_free(edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (mode[edges[i].from] == 3) {
      throw ValidationError("state " + std::to_string(edges[i].from + 1) +
                            " mixes auto and explicit free flags");
    }
    is_free[i] = flags[i] < 0 ? edges[i].to != largest[edges[i].from] : flags[i] == 1;
  }
  return MobilityGraph::with_free_edges(r, std::move(edges), std::move(is_free));
}

MobilityGraph load_graph(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open graph file " + path.string());
  return read_graph_csv(in);
}

Trajectory TraceDataset::trajectory(std::size_t user) const {
  Trajectory t;
  for (const auto& [time, state] : visits.at(user)) t.states.push_back(state);
  return t;
}

std::size_t TraceDataset::min_length() const {
  std::size_t m = visits.empty() ? 0 : visits.front().size();
  for (const auto& v : visits) m = std::min(m, v.size());
  return m;
}

IngestedTraces ingest_traces(std::istream& in, ModelKind model, std::size_t r,
                             std::shared_ptr<const DependencyMap> graph, double smoothing) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("trace file is empty");
  const auto header = split_fields(line);
  std::size_t c_user = header.size(), c_time = header.size(), c_loc = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "user_id") c_user = i;
    if (header[i] == "time") c_time = i;
    if (header[i] == "location") c_loc = i;
  }
  if (c_user == header.size() || c_time == header.size() || c_loc == header.size()) {
    throw ValidationError("trace header must contain user_id,time,location");
  }
  if (model == ModelKind::kMarkov && !graph) {
    throw ValidationError("Markov traces need a graph");
  }

  TraceDataset ds;
  std::unordered_map<std::string, std::size_t> user_index;
  std::unordered_map<std::string, StateId> label_index;
  for (std::size_t line_no = 2; std::getline(in, line); ++line_no) {
    if (trim(line).empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != header.size()) {
      throw ValidationError("line " + std::to_string(line_no) + ": expected " +
                            std::to_string(header.size()) + " fields");
    }
    const long long time = parse_int(f[c_time], "time", line_no);
    const std::string& label = f[c_loc];
    if (label.empty()) throw ValidationError("line " + std::to_string(line_no) + ": empty location");

    StateId state;
    if (model == ModelKind::kMarkov) {
      const long long s = parse_int(label, "Markov location", line_no);
      if (s < 1 || static_cast<std::size_t>(s) > graph->graph().r()) {
        throw ValidationError("line " + std::to_string(line_no) + ": location " + label +
                              " is not a state of the graph");
      }
      state = static_cast<StateId>(s - 1);
    } else {
      auto [it, inserted] = label_index.try_emplace(label, static_cast<StateId>(ds.labels.size()));
      if (inserted) ds.labels.push_back(label);
      state = it->second;
    }

    auto [uit, new_user] = user_index.try_emplace(f[c_user], ds.user_ids.size());
    if (new_user) {
      ds.user_ids.push_back(f[c_user]);
      ds.visits.emplace_back();
    }
    auto& visits = ds.visits[uit->second];
    if (!visits.empty() && time <= visits.back().first) {
      throw ValidationError("line " + std::to_string(line_no) + ": times of user '" + f[c_user] +
                            "' are not strictly increasing");
    }
    visits.emplace_back(time, state);
  }
  if (ds.user_ids.empty()) throw ValidationError("trace file has no rows");

  if (model == ModelKind::kMarkov) {
    ds.labels.clear();
    for (std::size_t s = 0; s < graph->graph().r(); ++s) ds.labels.push_back(std::to_string(s + 1));
    std::vector<TransitionMatrix> fitted;
    for (std::size_t u = 0; u < ds.user_ids.size(); ++u) {
      fitted.push_back(fit_markov_profile(ds.trajectory(u), graph->graph(), smoothing));
    }
    return {std::move(ds), Population::markov(std::move(graph), std::move(fitted))};
  }
  if (r != 0 && r < ds.labels.size()) {
    throw ValidationError("--r " + std::to_string(r) + " is smaller than the " +
                          std::to_string(ds.labels.size()) + " distinct locations in the traces");
  }
  const std::size_t states = std::max<std::size_t>({r, ds.labels.size(), 2});
  std::vector<IidProfile> fitted;
  for (std::size_t u = 0; u < ds.user_ids.size(); ++u) {
    fitted.push_back(fit_iid_profile(ds.trajectory(u), states, smoothing));
  }
  return {std::move(ds), Population::iid(std::move(fitted))};
}

std::size_t recommended_max_observations(double tau, std::size_t n_effective,
                                         double alpha_margin) {
  if (n_effective < 1) throw ValidationError("n must be >= 1");
  if (!(alpha_margin > 0.0)) throw ValidationError("alpha margin must be positive");
  const double m = std::pow(static_cast<double>(n_effective), tau - alpha_margin);
  return static_cast<std::size_t>(std::floor(m + 0.5));
}

AuditReport audit(const IngestedTraces& traces, std::size_t n_effective, double alpha_margin,
                  std::size_t threads) {
  const Population& pop = traces.population;
  AuditReport rep;
  rep.model = pop.kind();
  rep.r = pop.r();
  if (pop.kind() == ModelKind::kMarkov) {
    rep.d = degrees_of_freedom(pop.dependency_map()->graph());
    if (*rep.d == 0) throw ValidationError("Markov graph has d = 0; no threshold exists");
  }
  rep.threshold_exponent = threshold_exponent(pop.descriptor());
  rep.n_effective = n_effective;
  rep.alpha_margin = alpha_margin;
  rep.recommended_max_observations =
      recommended_max_observations(rep.threshold_exponent, n_effective, alpha_margin);
  rep.users = pop.size();
  rep.observations_per_user = traces.dataset.min_length();
  rep.labels = traces.dataset.labels;
  rep.trials = kAuditTrials;

  const std::size_t n = pop.size();
  const std::size_t m = rep.observations_per_user;
  std::vector<Trajectory> recorded;
  for (std::size_t u = 0; u < n; ++u) {
    Trajectory t = traces.dataset.trajectory(u);
    t.states.resize(m);
    recorded.push_back(std::move(t));
  }
  std::vector<std::uint8_t> simulated(kAuditTrials), replayed(kAuditTrials);
  parallel_for(kAuditTrials, threads, [&](std::size_t t) {
    Rng rng(substream_seed(kAuditSeed, 0, t));
    std::vector<Trajectory> fresh;
    for (std::size_t u = 0; u < n; ++u) fresh.push_back(pop.sample_trajectory(u, m, rng));
    const Permutation perm = sample_permutation(n, rng);
    simulated[t] = map_assignment(pop.likelihoods(anonymize(fresh, perm)))(0) == perm(0);
    const Permutation perm2 = sample_permutation(n, rng);
    replayed[t] = map_assignment(pop.likelihoods(anonymize(recorded, perm2)))(0) == perm2(0);
  });
  std::size_t a = 0, b = 0;
  for (std::size_t t = 0; t < kAuditTrials; ++t) {
    a += simulated[t];
    b += replayed[t];
  }
  rep.pi1_accuracy = static_cast<double>(a) / kAuditTrials;
  rep.pi1_accuracy_traces = static_cast<double>(b) / kAuditTrials;
  return rep;
}

std::string audit_report_json(const AuditReport& rep) {
  nlohmann::ordered_json j;
  j["model"] = rep.model == ModelKind::kIid ? "iid" : "markov";
  j["state_labeling"] = "states are numbered 1..r; label_map gives the trace label of each";
  j["r"] = rep.r;
  if (rep.d) j["d"] = *rep.d;
  j["threshold_exponent"] = rep.threshold_exponent;
  j["n_effective"] = rep.n_effective;
  j["alpha_margin"] = rep.alpha_margin;
  j["recommended_max_observations"] = rep.recommended_max_observations;
  j["users"] = rep.users;
  j["observations_per_user"] = rep.observations_per_user;
  j["trials"] = rep.trials;
  j["pi1_accuracy"] = rep.pi1_accuracy;
  j["pi1_accuracy_recorded_traces"] = rep.pi1_accuracy_traces;
  auto map = nlohmann::ordered_json::array();
  for (std::size_t s = 0; s < rep.labels.size(); ++s) {
    map.push_back({{"state", s + 1}, {"label", rep.labels[s]}});
  }
  j["label_map"] = map;
  return j.dump(2);
}

}  // namespace locpriv
