#pragma once

#include <map>
#include <string>
#include <vector>

#include "rdnet/graph.hpp"

namespace rdnet {

/// Ordered vertex layers Gamma_0..Gamma_N; the sinks form Gamma_{N+1}. A vertex
/// that feeds a sink is carried forward, so it may sit in several consecutive
/// layers while remaining one vertex.
struct Layering {
  std::vector<VertexSet> layers;
  VertexSet sinks;

  int depth() const { return static_cast<int>(layers.size()) - 1; }

  const VertexSet& layer(int i) const { return layers.at(static_cast<std::size_t>(i)); }

  std::vector<int> layers_of(const VertexId& v) const {
    std::vector<int> out;
    for (std::size_t i = 0; i < layers.size(); ++i)
      if (layers[i].count(v)) out.push_back(static_cast<int>(i));
    return out;
  }

  friend bool operator==(const Layering&, const Layering&) = default;
};

/// Layer output L_i for i >= 1: the internal neurons of Gamma_i, optionally
/// restricted to a vertex subset such as a task-connected graph. Carried
/// sources stay part of L_0 = X and are never counted here.
inline VertexSet layer_output(const NeuralGraph& g, const Layering& layering, int i,
                              const VertexSet* restrict_to = nullptr) {
  VertexSet out;
  for (const auto& v : layering.layer(i)) {
    if (g.vertex(v).kind != VertexKind::internal) continue;
    if (restrict_to && !restrict_to->count(v)) continue;
    out.insert(v);
  }
  return out;
}

/// Layer construction. Gamma_0 is the source set. Each step carries every
/// vertex with a sink neighbour into the next layer and adds the non-sink
/// out-neighbours of the vertices that were newly reached in the current
/// layer. A carried vertex only contributes its sink neighbours to N^+, which
/// is what lets the loop reach the stopping condition N^+(Gamma_i) = sinks
/// when a skip connection feeds a sink.
inline Layering construct_layers(const NeuralGraph& g) {
  if (auto cycle = g.find_cycle()) {
    std::string msg = "cannot layer a cyclic graph:";
    for (const auto& v : *cycle) msg += " " + v.str();
    throw StructuralError(msg);
  }
  Layering out;
  out.sinks = g.sinks();
  VertexSet sources = g.sources();
  if (sources.empty()) throw StructuralError("graph has no source vertex");
  if (out.sinks.empty()) throw StructuralError("graph has no sink vertex");

  auto feeds_sink = [&](const VertexId& v) {
    for (const auto& [succ, w] : g.out_edges(v))
      if (out.sinks.count(succ)) return true;
    return false;
  };

  VertexSet current = sources;
  VertexSet expanded = sources;
  out.layers.push_back(current);

  const std::size_t limit = g.vertex_count() + 2;
  for (std::size_t step = 0;; ++step) {
    VertexSet reached = g.successors(expanded);
    VertexSet effective = reached;
    for (const auto& v : current)
      if (!expanded.count(v))
        for (const auto& [succ, w] : g.out_edges(v))
          if (out.sinks.count(succ)) effective.insert(succ);
    if (effective == out.sinks) break;

    VertexSet next_expanded;
    for (const auto& v : reached)
      if (!out.sinks.count(v)) next_expanded.insert(v);

    if (next_expanded.empty() || step > limit) {
      std::string msg = "sink(s) unreachable from the sources:";
      for (const auto& s : out.sinks)
        if (!effective.count(s)) msg += " " + s.str();
      throw StructuralError(msg);
    }

    VertexSet next;
    for (const auto& v : current)
      if (feeds_sink(v)) next.insert(v);
    next.insert(next_expanded.begin(), next_expanded.end());

    out.layers.push_back(next);
    current = std::move(next);
    expanded = std::move(next_expanded);
  }
  return out;
}

/// Per-layer assignment of internal neurons into subset-exclusive blocks
/// T'^tau, keyed by layer index i >= 1. Every nonempty subset of the task set
/// has an entry, possibly empty.
struct TaskPartition {
  TaskSet tasks;
  std::map<int, std::map<TaskSet, VertexSet>> layers;
  VertexSet dropped;

  const VertexSet& block(int layer, const TaskSet& tau) const {
    static const VertexSet empty;
    auto li = layers.find(layer);
    if (li == layers.end()) return empty;
    auto bi = li->second.find(tau);
    return bi == li->second.end() ? empty : bi->second;
  }

  /// Union of the blocks whose subset contains `task` (the layer's L^t).
  VertexSet task_connected(int layer, const std::string& task) const {
    VertexSet out;
    auto li = layers.find(layer);
    if (li == layers.end()) return out;
    for (const auto& [tau, vs] : li->second)
      if (tau.contains(task)) out.insert(vs.begin(), vs.end());
    return out;
  }

  friend bool operator==(const TaskPartition&, const TaskPartition&) = default;
};

/// Task membership of each internal vertex: the set of tasks whose sink it
/// reaches.
inline std::map<VertexId, TaskSet> task_membership(const NeuralGraph& g) {
  std::map<VertexId, std::vector<std::string>> members;
  for (const auto& t : g.tasks().tasks())
    for (const auto& v : g.ancestors(g.sink_of(t)))
      if (g.vertex(v).kind == VertexKind::internal) members[v].push_back(t);
  std::map<VertexId, TaskSet> out;
  for (const auto& v : g.internals()) {
    auto it = members.find(v);
    out.emplace(v, it == members.end() ? TaskSet{} : TaskSet(it->second));
  }
  return out;
}

inline TaskPartition partition(const NeuralGraph& g, const Layering& layering) {
  TaskPartition p;
  p.tasks = g.tasks();
  const auto membership = task_membership(g);
  const auto subsets = nonempty_subsets(p.tasks);
  for (int i = 1; i <= layering.depth(); ++i) {
    auto& blocks = p.layers[i];
    for (const auto& tau : subsets) blocks[tau];
    for (const auto& v : layer_output(g, layering, i)) {
      const TaskSet& tau = membership.at(v);
      if (tau.empty()) throw StructuralError("vertex " + v.str() + " is connected to no sink");
      blocks[tau].insert(v);
    }
  }
  return p;
}

inline TaskPartition partition(const NeuralGraph& g) { return partition(g, construct_layers(g)); }

}  // namespace rdnet
