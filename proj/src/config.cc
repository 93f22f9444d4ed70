#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "locpriv/error.h"
#include "locpriv/harness.h"

namespace locpriv {
namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
  if (!obj.is_object()) throw ValidationError(where + " must be a JSON object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) throw ValidationError("unknown key '" + key + "' in " + where);
  }
}

double get_number(const json& v, const std::string& name) {
  if (!v.is_number()) throw ValidationError("'" + name + "' must be a number");
  return v.get<double>();
}

std::size_t get_count(const json& v, const std::string& name) {
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ValidationError("'" + name + "' must be a nonnegative integer");
  }
  return v.get<std::size_t>();
}

std::vector<double> get_profile(const json& v, const std::string& name) {
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array()) throw ValidationError("'" + name + "' must be a number or an array");
  std::vector<double> out;
  for (const auto& x : v) out.push_back(get_number(x, name));
  return out;
}

Metric parse_metric(const std::string& s) {
  if (s == "mi") return Metric::kMi;
  if (s == "accuracy") return Metric::kAccuracy;
  if (s == "weights") return Metric::kWeights;
  throw ValidationError("unknown metric '" + s + "' (expected mi, accuracy or weights)");
}

const char* metric_name(Metric m) {
  switch (m) {
    case Metric::kMi: return "mi";
    case Metric::kAccuracy: return "accuracy";
    case Metric::kWeights: return "weights";
  }
  return "";
}

json graph_json(const MobilityGraph& g) {
  json edges = json::array();
  for (std::size_t i = 0; i < g.edges().size(); ++i) {
    const Edge& e = g.edges()[i];
    edges.push_back({e.from + 1, e.to + 1, g.is_free(i) ? 1 : 0});
  }
  return {{"r", g.r()}, {"edges", edges}};
}

}  // namespace

double ExperimentConfig::effective_beta() const {
  if (schedule.beta) return *schedule.beta;
  const auto model_desc = model == ConfigModel::kMarkov
                              ? ModelDescriptor::markov(markov_map->graph())
                              : ModelDescriptor::iid(r);
  return threshold_exponent(model_desc) - *schedule.alpha;
}

std::string ExperimentConfig::model_name() const {
  switch (model) {
    case ConfigModel::kIid2: return "iid2";
    case ConfigModel::kIidR: return "iidr";
    case ConfigModel::kMarkov: return "markov";
  }
  return "";
}

std::string canonical_config(const ExperimentConfig& c) {
  json j;
  j["model"] = c.model_name();
  j["r"] = c.r;
  if (c.markov_map) j["graph"] = graph_json(c.markov_map->graph());
  json density;
  density["kind"] = c.density.prior.kind == DensityKind::kUniformSimplex ? "uniform-simplex"
                                                                         : "bounded-mixture";
  density["uniform_weight"] = c.density.prior.uniform_weight;
  if (c.density.user1) density["user1"] = *c.density.user1;
  if (!c.density.fixed_profiles.empty()) density["fixed_profiles"] = c.density.fixed_profiles;
  j["density"] = density;
  j["n_grid"] = c.n_grid;
  json sched;
  sched["c"] = c.schedule.c;
  if (c.schedule.beta) sched["beta"] = *c.schedule.beta;
  if (c.schedule.alpha) sched["alpha"] = *c.schedule.alpha;
  j["schedule"] = sched;
  j["trials"] = c.trials;
  j["k"] = c.k;
  json metrics = json::array();
  for (Metric m : c.metrics) metrics.push_back(metric_name(m));
  j["metrics"] = metrics;
  j["seed"] = c.seed;
  return j.dump();
}

std::string ExperimentConfig::experiment_id() const {
  // FNV-1a over the canonical form.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical_config(*this)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ExperimentConfig parse_config(const std::string& json_text,
                              const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
  reject_unknown_keys(doc,
                      {"model", "r", "graph_path", "density", "n_grid", "schedule", "trials",
                       "k", "metrics", "seed", "out_path"},
                      "config");
  for (const char* key : {"model", "n_grid", "schedule", "trials", "metrics", "seed"}) {
    if (!doc.contains(key)) throw ValidationError(std::string("config is missing '") + key + "'");
  }
  ExperimentConfig c;

  const auto model = doc["model"].is_string() ? doc["model"].get<std::string>() : "";
  if (model == "iid2") {
    c.model = ConfigModel::kIid2;
  } else if (model == "iidr") {
    c.model = ConfigModel::kIidR;
  } else if (model == "markov") {
    c.model = ConfigModel::kMarkov;
  } else {
    throw ValidationError("model must be one of iid2, iidr, markov");
  }

  if (doc.contains("graph_path")) {
    if (!doc["graph_path"].is_string()) throw ValidationError("'graph_path' must be a string");
    std::filesystem::path p = doc["graph_path"].get<std::string>();
    c.graph_path = p.is_absolute() ? p : base_dir / p;
  }
  if (c.model == ConfigModel::kMarkov) {
    if (!c.graph_path) throw ValidationError("markov model requires 'graph_path'");
    c.markov_map = std::make_shared<const DependencyMap>(load_graph(*c.graph_path));
    c.r = c.markov_map->graph().r();
    if (doc.contains("r") && get_count(doc["r"], "r") != c.r) {
      throw ValidationError("'r' does not match the graph's state count");
    }
    if (degrees_of_freedom(c.markov_map->graph()) == 0) {
      throw ValidationError("markov graph has d = |E| - r = 0 free parameters");
    }
  } else {
    if (c.graph_path) throw ValidationError("'graph_path' is only valid for the markov model");
    c.r = doc.contains("r") ? get_count(doc["r"], "r") : 2;
    if (c.model == ConfigModel::kIid2 && c.r != 2) throw ValidationError("iid2 requires r = 2");
    if (c.r < 2) throw ValidationError("r must be at least 2");
  }

  if (doc.contains("density")) {
    const json& d = doc["density"];
    reject_unknown_keys(d, {"kind", "uniform_weight", "user1", "fixed_profiles"}, "density");
    const std::string kind = d.value("kind", std::string("uniform-simplex"));
    if (kind == "uniform-simplex") {
      c.density.prior.kind = DensityKind::kUniformSimplex;
      if (d.contains("uniform_weight")) {
        throw ValidationError("'uniform_weight' only applies to bounded-mixture");
      }
    } else if (kind == "bounded-mixture") {
      c.density.prior.kind = DensityKind::kBoundedMixture;
      c.density.prior.uniform_weight =
          d.contains("uniform_weight") ? get_number(d["uniform_weight"], "uniform_weight") : 0.5;
      if (!(c.density.prior.uniform_weight > 0.0) || c.density.prior.uniform_weight > 1.0) {
        throw ValidationError("'uniform_weight' must lie in (0, 1]");
      }
    } else {
      throw ValidationError("density kind must be uniform-simplex or bounded-mixture");
    }
    if (d.contains("user1")) c.density.user1 = get_profile(d["user1"], "user1");
    if (d.contains("fixed_profiles")) {
      if (!d["fixed_profiles"].is_array()) {
        throw ValidationError("'fixed_profiles' must be an array");
      }
      for (const auto& p : d["fixed_profiles"]) {
        c.density.fixed_profiles.push_back(get_profile(p, "fixed_profiles"));
      }
    }
  }

  if (!doc["n_grid"].is_array() || doc["n_grid"].empty()) {
    throw ValidationError("'n_grid' must be a nonempty array");
  }
  for (const auto& v : doc["n_grid"]) {
    const std::size_t n = get_count(v, "n_grid");
    if (n < 1) throw ValidationError("'n_grid' entries must be >= 1");
    if (!c.n_grid.empty() && n <= c.n_grid.back()) {
      throw ValidationError("'n_grid' must be strictly ascending");
    }
    c.n_grid.push_back(n);
  }
  if (!c.density.fixed_profiles.empty() &&
      (c.n_grid.size() != 1 || c.n_grid[0] != c.density.fixed_profiles.size())) {
    throw ValidationError("'fixed_profiles' requires a single n equal to the profile count");
  }

  const json& s = doc["schedule"];
  reject_unknown_keys(s, {"c", "beta", "alpha"}, "schedule");
  c.schedule.c = s.contains("c") ? get_number(s["c"], "c") : 1.0;
  if (s.contains("beta") == s.contains("alpha")) {
    throw ValidationError("schedule needs exactly one of 'beta' or 'alpha'");
  }
  if (s.contains("beta")) c.schedule.beta = get_number(s["beta"], "beta");
  if (s.contains("alpha")) c.schedule.alpha = get_number(s["alpha"], "alpha");
  ObservationSchedule(c.schedule.c, c.effective_beta());  // validates

  c.trials = get_count(doc["trials"], "trials");
  if (c.trials < 1) throw ValidationError("'trials' must be >= 1");

  if (doc.contains("k")) {
    const json& k = doc["k"];
    if (k.is_string() && k.get<std::string>() == "last") {
      c.k = 0;
    } else {
      c.k = get_count(k, "k");
      if (c.k < 1) throw ValidationError("'k' is 1-based");
    }
  }

  if (!doc["metrics"].is_array() || doc["metrics"].empty()) {
    throw ValidationError("'metrics' must be a nonempty array");
  }
  for (const auto& v : doc["metrics"]) {
    if (!v.is_string()) throw ValidationError("metric names must be strings");
    const Metric m = parse_metric(v.get<std::string>());
    for (Metric seen : c.metrics) {
      if (seen == m) throw ValidationError("duplicate metric '" + v.get<std::string>() + "'");
    }
    c.metrics.push_back(m);
  }
  for (Metric m : c.metrics) {
    if (m == Metric::kMi && c.trials < 2) throw ValidationError("metric 'mi' needs trials >= 2");
    if (m == Metric::kWeights && c.model != ConfigModel::kIid2) {
      throw ValidationError("metric 'weights' is defined for the iid2 model only");
    }
  }

  if (!doc["seed"].is_number_unsigned() && !doc["seed"].is_number_integer()) {
    throw ValidationError("'seed' must be an unsigned 64-bit integer");
  }
  if (doc["seed"].is_number_integer() && !doc["seed"].is_number_unsigned() &&
      doc["seed"].get<long long>() < 0) {
    throw ValidationError("'seed' must be nonnegative");
  }
  c.seed = doc["seed"].get<std::uint64_t>();

  if (doc.contains("out_path")) {
    if (!doc["out_path"].is_string()) throw ValidationError("'out_path' must be a string");
    c.out_path = doc["out_path"].get<std::string>();
  }

  // Build every cell once so profile errors surface at load time.
  for (std::size_t i = 0; i < c.n_grid.size(); ++i) validate_cell(make_cell(c, i));
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path());
}

}  // namespace locpriv
