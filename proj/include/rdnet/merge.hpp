#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "rdnet/graph.hpp"
#include "rdnet/info/estimator.hpp"
#include "rdnet/layering.hpp"
#include "rdnet/redundancy.hpp"

namespace rdnet {

enum class EdgeInit { zero, uniform_near_zero };

struct MergeConfig {
  /// Threshold on I(T'; Y^off) during the greedy search, in the estimator's unit.
  double alpha = 0.0;
  info::EstimatorConfig estimator{info::Backend::kl_upper_bound};
  EdgeInit new_edge_init = EdgeInit::zero;
  double init_scale = 0.01;
  std::uint64_t rng_seed = 0;
  std::string tie_break = "lowest-id";
  /// Switch a KL-backend merge to exact-discrete when every neuron column is
  /// integral with at most `discrete_alphabet_limit` values.
  bool auto_discrete = true;
  std::size_t discrete_alphabet_limit = 16;
  /// Tolerance for the disentanglement check run on the merged graph.
  double epsilon = 0.01;

  void validate() const {
    if (!(alpha > 0.0)) throw ArgumentError("alpha must be positive");
    if (new_edge_init == EdgeInit::uniform_near_zero && !(init_scale > 0.0))
      throw ArgumentError("uniform-near-zero initialization needs a positive scale");
    if (tie_break != "lowest-id") throw ArgumentError("unknown tie-break rule '" + tie_break + "'");
    if (!(epsilon > 0.0)) throw ArgumentError("epsilon must be positive");
    estimator.validate();
  }
};

/// One greedy decision: the best candidate at this step and the MI of the set
/// it would produce.
struct TraceEntry {
  int layer = 0;
  TaskSet tau;
  TaskSet off_tasks;
  VertexId candidate;
  double set_mi = 0.0;
  bool accepted = false;
};

struct MergeResult {
  NeuralGraph merged;
  TaskPartition partition;
  VertexSet dropped;
  std::vector<TraceEntry> trace;
  DisentanglementResult conditions;
  info::Backend backend_used = info::Backend::kl_upper_bound;
};

/// The estimator configuration a merge actually runs with.
inline info::EstimatorConfig effective_estimator(const info::ActivationDataset& data, const MergeConfig& cfg) {
  info::EstimatorConfig e = cfg.estimator;
  if (cfg.auto_discrete && e.backend == info::Backend::kl_upper_bound && data.is_discrete(cfg.discrete_alphabet_limit))
    e.backend = info::Backend::exact_discrete;
  return e;
}

/// Greedy search for a set S of candidates with I(S; Y^off) <= alpha.
///
/// Every step evaluates I(S + {T}; Y^off) for each remaining T and takes the
/// minimizer (values within 1e-12 count as tied; the lowest VertexId wins). The
/// minimizer joins only if the enlarged set stays within alpha; otherwise no
/// candidate can and the search stops. The first step is the seed, so a seed
/// above alpha yields the empty set.
inline VertexSet greedy_exclusive_set(const VertexSet& candidates, const TaskSet& off_tasks, const Estimator& est,
                                      double alpha, std::vector<TraceEntry>* trace = nullptr, int layer = 0,
                                      const TaskSet& tau = {}) {
  if (candidates.empty()) return {};
  if (off_tasks.empty()) throw ArgumentError("greedy_exclusive_set needs at least one off-task label");
  constexpr double kTie = 1e-12;
  const VarSet off = info::labels(off_tasks);
  VertexSet chosen;
  VertexSet remaining = candidates;
  while (!remaining.empty()) {
    std::optional<VertexId> best;
    double best_mi = 0.0;
    for (const auto& c : remaining) {
      VertexSet trial = chosen;
      trial.insert(c);
      const double mi = est.mutual_info(info::neurons(trial), off);
      if (!best || mi < best_mi - kTie) {
        best = c;
        best_mi = mi;
      }
    }
    const bool accept = best_mi <= alpha;
    if (trace) trace->push_back(TraceEntry{layer, tau, off_tasks, *best, best_mi, accept});
    if (!accept) break;
    chosen.insert(*best);
    remaining.erase(*best);
  }
  return chosen;
}

inline VertexSet greedy_exclusive_set(const VertexSet& candidates, const std::string& off_task,
                                      const info::ActivationDataset& data, const MergeConfig& cfg) {
  cfg.validate();
  Estimator est(data, effective_estimator(data, cfg));
  return greedy_exclusive_set(candidates, TaskSet{off_task}, est, cfg.alpha);
}

struct LayerAlignment {
  std::vector<std::pair<int, int>> pairs;
  /// Which input (0 = first, 1 = second) owns the unpaired tail; -1 if none.
  int tail_owner = -1;
  std::vector<int> tail_layers;
};

/// Pairs layer i of both networks for i = 1..min(depths) and reports the tail.
inline LayerAlignment align_layers(const Layering& a, const Layering& b) {
  LayerAlignment out;
  const int da = a.depth();
  const int db = b.depth();
  const int m = std::min(da, db);
  for (int i = 1; i <= m; ++i) out.pairs.emplace_back(i, i);
  if (da != db) {
    out.tail_owner = da > db ? 0 : 1;
    for (int i = m + 1; i <= std::max(da, db); ++i) out.tail_layers.push_back(i);
  }
  return out;
}

inline LayerAlignment align_layers(const NeuralGraph& a, const NeuralGraph& b) {
  return align_layers(construct_layers(a), construct_layers(b));
}

namespace detail {

/// One input network prepared for merging.
struct PreparedNet {
  const NeuralGraph* graph = nullptr;
  std::string task;
  Layering layering;
  std::vector<VertexSet> layer_neurons;  // index i-1 -> L_i

  int depth() const { return static_cast<int>(layer_neurons.size()); }
};

/// Checks the simple feed-forward shape: one task, every internal neuron in a
/// single layer, edges only between consecutive layers.
inline PreparedNet prepare(const NeuralGraph& g) {
  g.validate();
  PreparedNet p;
  p.graph = &g;
  const auto tasks = g.tasks();
  if (tasks.size() != 1) throw ArgumentError("each merge input must serve exactly one task");
  p.task = tasks.tasks().front();
  p.layering = construct_layers(g);
  if (p.layering.depth() < 1) throw ArgumentError("network for task '" + p.task + "' has depth 0");

  std::map<VertexId, int> level;
  for (const auto& s : g.sources()) level[s] = 0;
  for (int i = 1; i <= p.layering.depth(); ++i) {
    VertexSet layer;
    for (const auto& v : p.layering.layer(i)) {
      if (g.vertex(v).kind != VertexKind::internal || level.count(v))
        throw ArgumentError("network for task '" + p.task + "' is not simple feed-forward (vertex " + v.str() +
                            " spans several layers)");
      level[v] = i;
      layer.insert(v);
    }
    p.layer_neurons.push_back(std::move(layer));
  }
  const int sink_level = p.layering.depth() + 1;
  for (const auto& s : g.sinks()) level[s] = sink_level;
  for (const auto& e : g.edges())
    if (level.at(e.to) != level.at(e.from) + 1)
      throw ArgumentError("network for task '" + p.task + "' is not simple feed-forward (edge " + e.from.str() +
                          " -> " + e.to.str() + " skips a layer)");
  return p;
}

inline std::vector<PreparedNet> prepare_all(const std::vector<const NeuralGraph*>& nets,
                                            const info::ActivationDataset& data) {
  if (nets.size() < 2) throw ArgumentError("merging needs at least two networks");
  std::vector<PreparedNet> out;
  std::set<std::string> tasks;
  for (const auto* g : nets) {
    out.push_back(prepare(*g));
    if (!tasks.insert(out.back().task).second)
      throw ArgumentError("two merge inputs serve the same task '" + out.back().task + "'");
  }
  VarSet wanted;
  for (const auto& p : out) {
    wanted.insert(Var::label(p.task));
    for (const auto& layer : p.layer_neurons)
      for (const auto& v : layer) wanted.insert(Var::neuron(v));
  }
  auto missing = data.missing(wanted);
  if (!missing.empty()) throw DataError("dataset lacks columns " + info::to_string(missing));
  return out;
}

/// Assembles the merged graph from per-layer blocks and applies the
/// subset-lattice connection rule between consecutive layers.
inline MergeResult assemble(const std::vector<PreparedNet>& nets, std::map<int, std::map<TaskSet, VertexSet>> blocks,
                            VertexSet dropped, std::vector<TraceEntry> trace, const Estimator& est,
                            const MergeConfig& cfg) {
  std::vector<const NeuralGraph*> graphs;
  for (const auto& n : nets) graphs.push_back(n.graph);
  const NeuralGraph original = NeuralGraph::unite(graphs);

  std::vector<std::string> task_names;
  std::map<VertexId, std::size_t> origin;
  for (std::size_t k = 0; k < nets.size(); ++k) {
    task_names.push_back(nets[k].task);
    for (const auto& v : nets[k].graph->internals()) origin[v] = k;
    origin[nets[k].graph->sink_of(nets[k].task)] = k;
  }
  const TaskSet all_tasks(task_names);

  struct Placed {
    int layer;
    TaskSet tau;
  };
  std::map<VertexId, Placed> placed;
  for (const auto& s : original.sources()) placed[s] = Placed{0, all_tasks};
  for (const auto& [i, bs] : blocks)
    for (const auto& [tau, vs] : bs)
      for (const auto& v : vs) placed[v] = Placed{i, tau};
  for (const auto& n : nets) placed[n.graph->sink_of(n.task)] = Placed{n.depth() + 1, TaskSet{n.task}};

  std::map<int, std::vector<VertexId>> by_layer;
  for (const auto& [v, p] : placed) by_layer[p.layer].push_back(v);

  NeuralGraph merged;
  for (const auto& [v, p] : placed) {
    const auto& vx = original.vertex(v);
    merged.add_vertex(v, vx.kind, vx.task);
  }

  std::mt19937_64 rng(cfg.rng_seed);
  std::uniform_real_distribution<double> near_zero(-cfg.init_scale, cfg.init_scale);
  auto init_weight = [&]() -> float {
    return cfg.new_edge_init == EdgeInit::zero ? 0.0f : static_cast<float>(near_zero(rng));
  };

  for (const auto& [layer, targets] : by_layer) {
    if (layer == 0) continue;
    auto prev = by_layer.find(layer - 1);
    if (prev == by_layer.end()) continue;
    for (const auto& v : targets) {
      const TaskSet& tau2 = placed.at(v).tau;
      for (const auto& u : prev->second) {
        const TaskSet& tau1 = placed.at(u).tau;
        if (!tau2.subset_of(tau1)) continue;
        const bool u_is_source = original.vertex(u).kind == VertexKind::source;
        if (u_is_source || origin.at(u) == origin.at(v)) {
          if (auto w = original.weight(u, v)) merged.add_edge(u, v, *w);
        } else {
          merged.add_edge(u, v, init_weight());
        }
      }
    }
  }

  // Internal neurons left without inputs or outputs are removed, repeatedly,
  // and recorded as dropped; orphaned sources are removed silently.
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& vx : merged.vertices()) {
      const bool no_in = merged.in_edges(vx.id).empty();
      const bool no_out = merged.out_edges(vx.id).empty();
      if (vx.kind == VertexKind::internal && (no_in || no_out)) {
        merged.remove_vertex(vx.id);
        dropped.insert(vx.id);
        changed = true;
      } else if (vx.kind == VertexKind::source && no_out) {
        merged.remove_vertex(vx.id);
        changed = true;
      }
    }
  }
  for (const auto& s : merged.sinks())
    if (merged.in_edges(s).empty())
      throw StructuralError("merging removed every input of sink " + s.str() + " (task '" +
                            merged.vertex(s).task + "')");
  merged.validate();

  MergeResult r;
  r.partition.tasks = all_tasks;
  for (auto& [i, bs] : blocks)
    for (auto& [tau, vs] : bs) {
      VertexSet kept;
      for (const auto& v : vs)
        if (!dropped.count(v)) kept.insert(v);
      r.partition.layers[i][tau] = std::move(kept);
    }
  r.partition.dropped = dropped;
  r.dropped = std::move(dropped);
  r.trace = std::move(trace);
  r.backend_used = est.config().backend;
  r.conditions = disentanglement_check(merged, construct_layers(merged), est, cfg.epsilon);
  r.merged = std::move(merged);
  return r;
}

inline void add_tails(const std::vector<PreparedNet>& nets, int shared_depth, const TaskSet& all_tasks,
                      std::map<int, std::map<TaskSet, VertexSet>>& blocks) {
  int max_depth = shared_depth;
  for (const auto& n : nets) max_depth = std::max(max_depth, n.depth());
  const auto subsets = nonempty_subsets(all_tasks);
  for (int i = shared_depth + 1; i <= max_depth; ++i) {
    auto& bs = blocks[i];
    for (const auto& tau : subsets) bs[tau];
    for (const auto& n : nets)
      if (n.depth() >= i) bs[TaskSet{n.task}] = n.layer_neurons[static_cast<std::size_t>(i - 1)];
  }
}

}  // namespace detail

/// Two-network merge. Per aligned layer both greedy searches run on the full
/// pool of both networks' neurons; neurons picked by both are dropped, the
/// rest of the pool becomes the shared block.
inline MergeResult merge_two(const NeuralGraph& net_a, const NeuralGraph& net_b, const info::ActivationDataset& data,
                             const MergeConfig& cfg) {
  cfg.validate();
  auto nets = detail::prepare_all({&net_a, &net_b}, data);
  Estimator est(data, effective_estimator(data, cfg));
  const std::string& a = nets[0].task;
  const std::string& b = nets[1].task;
  const TaskSet ta{a}, tb{b}, tab{a, b};

  std::map<int, std::map<TaskSet, VertexSet>> blocks;
  VertexSet dropped;
  std::vector<TraceEntry> trace;
  const auto alignment = align_layers(nets[0].layering, nets[1].layering);
  for (const auto& [i, j] : alignment.pairs) {
    VertexSet pool = nets[0].layer_neurons[static_cast<std::size_t>(i - 1)];
    const auto& other = nets[1].layer_neurons[static_cast<std::size_t>(j - 1)];
    pool.insert(other.begin(), other.end());

    VertexSet excl_a = greedy_exclusive_set(pool, tb, est, cfg.alpha, &trace, i, ta);
    VertexSet excl_b = greedy_exclusive_set(pool, ta, est, cfg.alpha, &trace, i, tb);
    VertexSet shared;
    for (const auto& v : pool)
      if (!excl_a.count(v) && !excl_b.count(v)) shared.insert(v);
    for (const auto& v : excl_a)
      if (excl_b.count(v)) dropped.insert(v);
    for (const auto& v : dropped) {
      excl_a.erase(v);
      excl_b.erase(v);
    }
    auto& bs = blocks[i];
    bs[ta] = std::move(excl_a);
    bs[tb] = std::move(excl_b);
    bs[tab] = std::move(shared);
  }
  detail::add_tails(nets, static_cast<int>(alignment.pairs.size()), tab, blocks);
  return detail::assemble(nets, std::move(blocks), std::move(dropped), std::move(trace), est, cfg);
}

/// K-network merge. Per aligned layer, subsets tau of the task set are visited
/// by increasing size; all subsets of one size search the same pool for
/// neurons with I(T'^tau; Y^{rest}) <= alpha, neurons claimed by two subsets of
/// that size are dropped, and claimed neurons leave the pool before the next
/// size. The full task set takes whatever remains.
inline MergeResult merge_k(const std::vector<const NeuralGraph*>& inputs, const info::ActivationDataset& data,
                           const MergeConfig& cfg) {
  cfg.validate();
  auto nets = detail::prepare_all(inputs, data);
  Estimator est(data, effective_estimator(data, cfg));

  std::vector<std::string> names;
  int shared_depth = nets.front().depth();
  for (const auto& n : nets) {
    names.push_back(n.task);
    shared_depth = std::min(shared_depth, n.depth());
  }
  const TaskSet all_tasks(names);
  const auto subsets = nonempty_subsets(all_tasks);

  std::map<int, std::map<TaskSet, VertexSet>> blocks;
  VertexSet dropped;
  std::vector<TraceEntry> trace;
  for (int i = 1; i <= shared_depth; ++i) {
    VertexSet pool;
    for (const auto& n : nets) {
      const auto& l = n.layer_neurons[static_cast<std::size_t>(i - 1)];
      pool.insert(l.begin(), l.end());
    }
    auto& bs = blocks[i];
    for (const auto& tau : subsets) bs[tau];
    for (std::size_t size = 1; size < all_tasks.size(); ++size) {
      std::map<VertexId, int> claims;
      std::map<TaskSet, VertexSet> found;
      for (const auto& tau : subsets) {
        if (tau.size() != size) continue;
        found[tau] = greedy_exclusive_set(pool, all_tasks.minus(tau), est, cfg.alpha, &trace, i, tau);
        for (const auto& v : found[tau]) ++claims[v];
      }
      for (auto& [tau, vs] : found)
        for (const auto& v : vs)
          if (claims[v] == 1) bs[tau].insert(v);
      for (const auto& [v, count] : claims) {
        if (count > 1) dropped.insert(v);
        pool.erase(v);
      }
    }
    bs[all_tasks] = pool;
  }
  detail::add_tails(nets, shared_depth, all_tasks, blocks);
  return detail::assemble(nets, std::move(blocks), std::move(dropped), std::move(trace), est, cfg);
}

}  // namespace rdnet
