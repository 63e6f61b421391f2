#pragma once

#include <cstdio>
#include <string>

#include "rdnet/io/config.hpp"
#include "rdnet/io/topology.hpp"
#include "rdnet/layering.hpp"
#include "rdnet/merge.hpp"
#include "rdnet/redundancy.hpp"

namespace rdnet::io {

inline json to_json(const VertexSet& vs) {
  json out = json::array();
  for (const auto& v : vs) out.push_back(to_json(v));
  return out;
}

inline json to_json(const TaskSet& t) { return json(t.tasks()); }

inline json to_json(const InfoTerm& t) {
  return json{{"value", t.value}, {"structural_zero", t.structural_zero}};
}

inline json layering_to_json(const Layering& l) {
  json layers = json::array();
  for (int i = 0; i <= l.depth(); ++i) layers.push_back(to_json(l.layer(i)));
  layers.push_back(to_json(l.sinks));
  return json{{"depth", l.depth()}, {"layers", layers}};
}

inline json partition_to_json(const TaskPartition& p) {
  json layers = json::array();
  for (const auto& [i, blocks] : p.layers) {
    json jb = json::array();
    for (const auto& [tau, vs] : blocks) jb.push_back({{"tasks", to_json(tau)}, {"neurons", to_json(vs)}});
    layers.push_back({{"layer", i}, {"blocks", jb}});
  }
  return json{{"tasks", to_json(p.tasks)}, {"layers", layers}, {"dropped", to_json(p.dropped)}};
}

inline json conditions_to_json(const DisentanglementResult& r) {
  json triples = json::array();
  for (const auto& c : r.triples)
    triples.push_back({{"layer", c.layer},
                       {"tau_a", to_json(c.tau_a)},
                       {"tau_b", to_json(c.tau_b)},
                       {"c1", to_json(c.c1)},
                       {"c2", to_json(c.c2)},
                       {"c3", to_json(c.c3)}});
  return json{{"epsilon", r.epsilon}, {"passed", r.passed}, {"triples", triples}};
}

inline json report_to_json(const RedundancyReport& r) {
  json layers = json::array();
  for (const auto& t : r.layers)
    layers.push_back({{"layer", t.layer},
                      {"task", t.task},
                      {"neurons", to_json(t.neurons)},
                      {"redundancy", t.redundancy},
                      {"carried_entropy", t.carried_entropy},
                      {"relevance", to_json(t.relevance)}});
  json inter_layers = json::array();
  for (const auto& t : r.inter_layers)
    inter_layers.push_back({{"layer", t.layer}, {"task_a", t.task_a}, {"task_b", t.task_b}, {"mi", to_json(t.value)}});
  json inter = json::array();
  for (const auto& [pair, v] : r.inter) inter.push_back({{"task_a", pair.first}, {"task_b", pair.second}, {"value", v}});
  auto pairs = [](const std::vector<std::pair<std::string, double>>& ps) {
    json out = json::array();
    for (const auto& [name, v] : ps) out.push_back({{"term", name}, {"value", v}});
    return out;
  };
  return json{{"tasks", to_json(r.tasks)},
              {"depth", r.depth},
              {"backend", r.backend},
              {"epsilon", r.epsilon},
              {"layers", layers},
              {"inter_layers", inter_layers},
              {"intra_redundancy", r.intra},
              {"inter_redundancy", inter},
              {"whole_graph_objective", r.whole_graph_objective},
              {"layerwise_objective", r.layerwise_objective},
              {"multi_objective", pairs(r.multi_objective)},
              {"reduced_objective", pairs(r.reduced_objective)},
              {"reduced_constraints_hold", r.reduced_constraints_hold},
              {"conditions", conditions_to_json(r.conditions)}};
}

/// One line per greedy decision.
inline std::string trace_line(const TraceEntry& t) {
  char mi[64];
  std::snprintf(mi, sizeof mi, "%.12g", t.set_mi);
  return "layer=" + std::to_string(t.layer) + " tau=" + t.tau.str() + " off=" + t.off_tasks.str() +
         " candidate=" + t.candidate.str() + " set_mi=" + mi + " " + (t.accepted ? "accept" : "reject");
}

inline std::string trace_text(const std::vector<TraceEntry>& trace) {
  std::string out;
  for (const auto& t : trace) out += trace_line(t) + "\n";
  return out;
}

}  // namespace rdnet::io
