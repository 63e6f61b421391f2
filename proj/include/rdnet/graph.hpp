#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "rdnet/errors.hpp"
#include "rdnet/vertex.hpp"

namespace rdnet {

struct Edge {
  VertexId from;
  VertexId to;
  float weight = 0.0f;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// One or more feed-forward networks as a single simple DAG. Vertices are keyed
/// by VertexId; adjacency is kept in ordered maps so every traversal is
/// deterministic.
class NeuralGraph {
 public:
  using Adjacency = std::map<VertexId, float>;

  void add_vertex(const VertexId& id, VertexKind kind, std::string task = {}) {
    if (nodes_.count(id)) throw ArgumentError("duplicate vertex " + id.str());
    if (kind == VertexKind::sink && task.empty()) throw ArgumentError("sink " + id.str() + " has no task");
    if (kind != VertexKind::sink && !task.empty())
      throw ArgumentError("only sinks carry a task (vertex " + id.str() + ")");
    nodes_.emplace(id, Node{Vertex{id, kind, std::move(task)}, {}, {}});
  }
  void add_source(const VertexId& id) { add_vertex(id, VertexKind::source); }
  void add_internal(const VertexId& id) { add_vertex(id, VertexKind::internal); }
  void add_sink(const VertexId& id, std::string task) { add_vertex(id, VertexKind::sink, std::move(task)); }

  void add_edge(const VertexId& from, const VertexId& to, float weight) {
    if (from == to) throw ArgumentError("self-loop on " + from.str());
    auto& src = node(from);
    auto& dst = node(to);
    if (src.out.count(to)) throw ArgumentError("parallel edge " + from.str() + " -> " + to.str());
    src.out.emplace(to, weight);
    dst.in.emplace(from, weight);
  }

  void remove_edge(const VertexId& from, const VertexId& to) {
    node(from).out.erase(to);
    node(to).in.erase(from);
  }

  void remove_vertex(const VertexId& id) {
    auto& n = node(id);
    for (const auto& [succ, w] : n.out) nodes_.at(succ).in.erase(id);
    for (const auto& [pred, w] : n.in) nodes_.at(pred).out.erase(id);
    nodes_.erase(id);
  }

  bool contains(const VertexId& id) const { return nodes_.count(id) != 0; }

  const Vertex& vertex(const VertexId& id) const { return node(id).v; }
  const Adjacency& out_edges(const VertexId& id) const { return node(id).out; }
  const Adjacency& in_edges(const VertexId& id) const { return node(id).in; }

  std::optional<float> weight(const VertexId& from, const VertexId& to) const {
    const auto& out = out_edges(from);
    auto it = out.find(to);
    if (it == out.end()) return std::nullopt;
    return it->second;
  }

  std::size_t vertex_count() const { return nodes_.size(); }
  std::size_t edge_count() const {
    std::size_t n = 0;
    for (const auto& [id, node] : nodes_) n += node.out.size();
    return n;
  }

  std::vector<Vertex> vertices() const {
    std::vector<Vertex> out;
    out.reserve(nodes_.size());
    for (const auto& [id, n] : nodes_) out.push_back(n.v);
    return out;
  }

  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    for (const auto& [id, n] : nodes_)
      for (const auto& [to, w] : n.out) out.push_back(Edge{id, to, w});
    return out;
  }

  VertexSet of_kind(VertexKind kind) const {
    VertexSet out;
    for (const auto& [id, n] : nodes_)
      if (n.v.kind == kind) out.insert(id);
    return out;
  }
  VertexSet sources() const { return of_kind(VertexKind::source); }
  VertexSet internals() const { return of_kind(VertexKind::internal); }
  VertexSet sinks() const { return of_kind(VertexKind::sink); }

  TaskSet tasks() const {
    std::vector<std::string> t;
    for (const auto& [id, n] : nodes_)
      if (n.v.kind == VertexKind::sink) t.push_back(n.v.task);
    return TaskSet(std::move(t));
  }

  const VertexId& sink_of(const std::string& task) const {
    for (const auto& [id, n] : nodes_)
      if (n.v.kind == VertexKind::sink && n.v.task == task) return id;
    throw LookupError("unknown task '" + task + "'");
  }

  /// Out-neighbourhood N^+ of a vertex set.
  VertexSet successors(const VertexSet& vs) const {
    VertexSet out;
    for (const auto& v : vs)
      for (const auto& [succ, w] : out_edges(v)) out.insert(succ);
    return out;
  }

  VertexSet descendants(const VertexId& v) const { return reach(v, true); }
  VertexSet ancestors(const VertexId& v) const { return reach(v, false); }

  /// Returns one directed cycle (first vertex repeated at the end) if any.
  std::optional<std::vector<VertexId>> find_cycle() const {
    enum class Mark { white, grey, black };
    std::map<VertexId, Mark> mark;
    for (const auto& [id, n] : nodes_) mark[id] = Mark::white;
    std::vector<VertexId> stack;
    std::optional<std::vector<VertexId>> cycle;

    auto visit = [&](auto&& self, const VertexId& v) -> bool {
      mark[v] = Mark::grey;
      stack.push_back(v);
      for (const auto& [succ, w] : nodes_.at(v).out) {
        if (mark[succ] == Mark::grey) {
          auto first = std::find(stack.begin(), stack.end(), succ);
          cycle.emplace(first, stack.end());
          cycle->push_back(succ);
          return true;
        }
        if (mark[succ] == Mark::white && self(self, succ)) return true;
      }
      stack.pop_back();
      mark[v] = Mark::black;
      return false;
    };
    for (const auto& [id, n] : nodes_)
      if (mark[id] == Mark::white && visit(visit, id)) return cycle;
    return std::nullopt;
  }

  /// Kahn's algorithm; ties resolved by VertexId order.
  std::vector<VertexId> topological_order() const {
    std::map<VertexId, std::size_t> indeg;
    std::set<VertexId> ready;
    for (const auto& [id, n] : nodes_) {
      indeg[id] = n.in.size();
      if (n.in.empty()) ready.insert(id);
    }
    std::vector<VertexId> order;
    while (!ready.empty()) {
      VertexId v = *ready.begin();
      ready.erase(ready.begin());
      order.push_back(v);
      for (const auto& [succ, w] : nodes_.at(v).out)
        if (--indeg[succ] == 0) ready.insert(succ);
    }
    if (order.size() != nodes_.size()) throw StructuralError("graph contains a cycle: " + cycle_text());
    return order;
  }

  /// Checks every structural invariant: acyclic, degree-consistent kinds, one
  /// sink per task, no vertex off every source-to-sink path.
  void validate() const {
    if (find_cycle()) throw StructuralError("graph contains a cycle: " + cycle_text());

    std::map<std::string, int> sinks_per_task;
    for (const auto& [id, n] : nodes_) {
      switch (n.v.kind) {
        case VertexKind::source:
          if (!n.in.empty()) throw StructuralError("source " + id.str() + " has incoming edges");
          break;
        case VertexKind::sink:
          if (!n.out.empty()) throw StructuralError("sink " + id.str() + " has outgoing edges");
          ++sinks_per_task[n.v.task];
          break;
        case VertexKind::internal:
          if (n.in.empty()) throw StructuralError("internal vertex " + id.str() + " has no incoming edges");
          break;
      }
    }
    for (const auto& [task, count] : sinks_per_task)
      if (count != 1) throw StructuralError("task '" + task + "' has " + std::to_string(count) + " sinks");
    if (sinks_per_task.empty()) throw StructuralError("graph has no sink");

    std::vector<VertexId> dangling;
    VertexSet from_sources, to_sinks;
    for (const auto& s : sources()) {
      auto d = descendants(s);
      from_sources.insert(d.begin(), d.end());
      from_sources.insert(s);
    }
    for (const auto& s : sinks()) {
      auto a = ancestors(s);
      to_sinks.insert(a.begin(), a.end());
      to_sinks.insert(s);
    }
    for (const auto& [id, n] : nodes_)
      if (!from_sources.count(id) || !to_sinks.count(id)) dangling.push_back(id);
    if (!dangling.empty()) {
      std::string msg = "vertices on no source-to-sink path:";
      for (const auto& d : dangling) msg += " " + d.str();
      throw StructuralError(msg);
    }
  }

  /// Induced subgraph on `keep`; edges with an endpoint outside are dropped.
  NeuralGraph induced(const VertexSet& keep) const {
    NeuralGraph g;
    for (const auto& id : keep) {
      const auto& v = vertex(id);
      g.add_vertex(id, v.kind, v.task);
    }
    for (const auto& id : keep)
      for (const auto& [to, w] : out_edges(id))
        if (keep.count(to)) g.add_edge(id, to, w);
    return g;
  }

  /// Union of several graphs. Vertices with equal ids (shared inputs) are
  /// unified and must agree on kind; an edge present in two inputs must carry
  /// the same weight.
  static NeuralGraph unite(const std::vector<const NeuralGraph*>& parts) {
    NeuralGraph g;
    for (const auto* p : parts) {
      for (const auto& [id, n] : p->nodes_) {
        if (auto it = g.nodes_.find(id); it != g.nodes_.end()) {
          if (it->second.v.kind != n.v.kind || it->second.v.task != n.v.task)
            throw StructuralError("vertex " + id.str() + " declared differently in two graphs");
          continue;
        }
        g.add_vertex(id, n.v.kind, n.v.task);
      }
    }
    for (const auto* p : parts) {
      for (const auto& e : p->edges()) {
        if (auto w = g.weight(e.from, e.to)) {
          if (*w != e.weight)
            throw StructuralError("edge " + e.from.str() + " -> " + e.to.str() + " has conflicting weights");
          continue;
        }
        g.add_edge(e.from, e.to, e.weight);
      }
    }
    return g;
  }

  friend bool operator==(const NeuralGraph& a, const NeuralGraph& b) {
    if (a.nodes_.size() != b.nodes_.size()) return false;
    for (const auto& [id, n] : a.nodes_) {
      auto it = b.nodes_.find(id);
      if (it == b.nodes_.end()) return false;
      const auto& m = it->second;
      if (n.v.kind != m.v.kind || n.v.task != m.v.task || n.out != m.out) return false;
    }
    return true;
  }

 private:
  struct Node {
    Vertex v;
    Adjacency out;
    Adjacency in;
  };

  Node& node(const VertexId& id) {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) throw LookupError("unknown vertex " + id.str());
    return it->second;
  }
  const Node& node(const VertexId& id) const {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) throw LookupError("unknown vertex " + id.str());
    return it->second;
  }

  VertexSet reach(const VertexId& start, bool forward) const {
    VertexSet seen;
    std::vector<VertexId> todo{start};
    while (!todo.empty()) {
      VertexId v = todo.back();
      todo.pop_back();
      const auto& adj = forward ? node(v).out : node(v).in;
      for (const auto& [next, w] : adj)
        if (seen.insert(next).second) todo.push_back(next);
    }
    return seen;
  }

  std::string cycle_text() const {
    auto c = find_cycle();
    if (!c) return "(none)";
    std::string s;
    for (std::size_t i = 0; i < c->size(); ++i) s += (i ? " -> " : "") + (*c)[i].str();
    return s;
  }

  std::map<VertexId, Node> nodes_;
};

/// True iff a directed path joins v1 and v2 in either direction.
inline bool connected(const NeuralGraph& g, const VertexId& v1, const VertexId& v2) {
  if (!g.contains(v1)) throw LookupError("unknown vertex " + v1.str());
  if (!g.contains(v2)) throw LookupError("unknown vertex " + v2.str());
  return g.descendants(v1).count(v2) || g.descendants(v2).count(v1);
}

/// G^t: sink v^t together with every vertex that has a path to it.
inline NeuralGraph task_connected_subgraph(const NeuralGraph& g, const std::string& task) {
  const VertexId& sink = g.sink_of(task);
  VertexSet keep = g.ancestors(sink);
  keep.insert(sink);
  return g.induced(keep);
}

}  // namespace rdnet
