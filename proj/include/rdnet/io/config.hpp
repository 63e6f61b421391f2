#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "rdnet/io/topology.hpp"
#include "rdnet/merge.hpp"
#include "rdnet/redundancy.hpp"

namespace rdnet::io {

// Config file, every section optional:
//   {
//     "estimator": {"backend": "binned-plugin", "bins": 30, "log_base": "2",
//                   "covariance_mode": "diagonal", "regularizer": 1e-6},
//     "objective": {"epsilon": 0.01, "xi": {"A": [0.5, 0.5]}, "xi_single": {"A": 1.0}},
//     "merge": {"alpha": 0.01, "estimator": {...}, "new_edge_init": "zero",
//               "init_scale": 0.01, "rng_seed": 7, "tie_break": "lowest-id",
//               "auto_discrete": true, "discrete_alphabet_limit": 16}
//   }
// The merge section's estimator defaults to the KL backend.

struct Config {
  RedundancyObjectiveConfig objective;
  MergeConfig merge;
  bool alpha_given = false;
  bool seed_given = false;
};

inline void apply_estimator(const json& j, info::EstimatorConfig& e) {
  if (!j.is_object()) throw ParseError("estimator section must be an object");
  if (j.contains("backend")) e.backend = info::parse_backend(j["backend"].get<std::string>());
  if (j.contains("bins")) e.bins = j["bins"].get<int>();
  if (j.contains("log_base")) {
    const auto& b = j["log_base"];
    const std::string s = b.is_string() ? b.get<std::string>() : b.dump();
    if (s == "2")
      e.log_base = info::LogBase::two;
    else if (s == "e")
      e.log_base = info::LogBase::e;
    else
      throw ParseError("log_base must be \"2\" or \"e\", got " + s);
  }
  if (j.contains("covariance_mode")) e.covariance_mode = info::parse_covariance_mode(j["covariance_mode"].get<std::string>());
  if (j.contains("regularizer")) e.regularizer = j["regularizer"].get<double>();
}

inline json estimator_to_json(const info::EstimatorConfig& e) {
  return json{{"backend", info::to_string(e.backend)},
              {"bins", e.bins},
              {"log_base", e.log_base == info::LogBase::two ? "2" : "e"},
              {"covariance_mode", info::to_string(e.covariance_mode)},
              {"regularizer", e.regularizer}};
}

inline EdgeInit parse_edge_init(const std::string& s) {
  if (s == "zero") return EdgeInit::zero;
  if (s == "uniform-near-zero") return EdgeInit::uniform_near_zero;
  throw ParseError("unknown new_edge_init '" + s + "'");
}

inline Config config_from_json(const json& doc) {
  Config c;
  try {
    if (!doc.is_object()) throw ParseError("config must be a JSON object");
    if (doc.contains("estimator")) {
      apply_estimator(doc["estimator"], c.objective.estimator);
      apply_estimator(doc["estimator"], c.merge.estimator);
      if (!doc["estimator"].contains("backend")) c.merge.estimator.backend = info::Backend::kl_upper_bound;
    }
    if (doc.contains("objective")) {
      const auto& o = doc["objective"];
      if (o.contains("epsilon")) c.objective.epsilon = o["epsilon"].get<double>();
      if (o.contains("xi"))
        for (const auto& [task, w] : o["xi"].items())
          c.objective.xi[task] = w.is_array() ? w.get<std::vector<double>>() : std::vector<double>{w.get<double>()};
      if (o.contains("xi_single"))
        for (const auto& [task, w] : o["xi_single"].items()) c.objective.xi_single[task] = w.get<double>();
    }
    c.merge.epsilon = c.objective.epsilon;
    if (doc.contains("merge")) {
      const auto& m = doc["merge"];
      if (m.contains("alpha")) {
        c.merge.alpha = m["alpha"].get<double>();
        c.alpha_given = true;
      }
      if (m.contains("estimator")) apply_estimator(m["estimator"], c.merge.estimator);
      if (m.contains("new_edge_init")) c.merge.new_edge_init = parse_edge_init(m["new_edge_init"].get<std::string>());
      if (m.contains("init_scale")) c.merge.init_scale = m["init_scale"].get<double>();
      if (m.contains("rng_seed")) {
        c.merge.rng_seed = m["rng_seed"].get<std::uint64_t>();
        c.seed_given = true;
      }
      if (m.contains("tie_break")) c.merge.tie_break = m["tie_break"].get<std::string>();
      if (m.contains("auto_discrete")) c.merge.auto_discrete = m["auto_discrete"].get<bool>();
      if (m.contains("discrete_alphabet_limit"))
        c.merge.discrete_alphabet_limit = m["discrete_alphabet_limit"].get<std::size_t>();
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed config: ") + e.what());
  } catch (const ArgumentError& e) {
    throw ParseError(std::string("bad config value: ") + e.what());
  }
  return c;
}

inline Config load_config(const std::filesystem::path& path) { return config_from_json(read_json(path)); }

}  // namespace rdnet::io
