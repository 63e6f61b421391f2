#pragma once

#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "rdnet/graph.hpp"
#include "rdnet/info/estimator.hpp"
#include "rdnet/layering.hpp"

namespace rdnet {

using info::Estimator;
using info::Var;
using info::VarSet;

/// An information quantity, flagged when an empty argument forces it to zero
/// without consulting the estimator.
struct InfoTerm {
  double value = 0.0;
  bool structural_zero = false;

  static InfoTerm zero() { return InfoTerm{0.0, true}; }
  static InfoTerm of(double v) { return InfoTerm{v, false}; }
};

struct RedundancyObjectiveConfig {
  /// xi_i^t per task; one entry broadcasts to every layer. Missing task -> 0.
  std::map<std::string, std::vector<double>> xi;
  /// The single trade-off weight of the whole-graph single-task objective.
  std::map<std::string, double> xi_single;
  double epsilon = 0.01;
  info::EstimatorConfig estimator;

  double xi_at(const std::string& task, int layer, int depth) const {
    auto it = xi.find(task);
    if (it == xi.end() || it->second.empty()) return 0.0;
    const auto& w = it->second;
    if (w.size() == 1) return w.front();
    if (static_cast<int>(w.size()) != depth)
      throw ArgumentError("xi for task '" + task + "' has " + std::to_string(w.size()) + " entries, graph has " +
                          std::to_string(depth) + " layers");
    return w.at(static_cast<std::size_t>(layer - 1));
  }

  double xi_whole(const std::string& task) const {
    auto it = xi_single.find(task);
    return it == xi_single.end() ? 0.0 : it->second;
  }

  void validate() const {
    if (!(epsilon > 0.0)) throw ArgumentError("epsilon must be positive");
    for (const auto& [t, w] : xi)
      for (double x : w)
        if (x < 0.0) throw ArgumentError("xi must be nonnegative");
    for (const auto& [t, x] : xi_single)
      if (x < 0.0) throw ArgumentError("xi must be nonnegative");
  }
};

/// R_t(T) = sum_i H(T_i) - I(T; Y^t). Zero for an empty set.
inline double redundancy_of_set(const VarSet& vars, const std::string& task, const Estimator& est) {
  if (vars.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& v : vars) sum += est.joint_entropy(VarSet{v});
  const double r = sum - est.mutual_info(vars, info::label(task));
  return r < 0.0 ? 0.0 : r;
}

/// Right-hand side of the join rule:
/// R(T1) + R(T2) + I(T1;T2;Y) - sum_{T in T1 & T2} H(T).
inline double join_redundancy(const VarSet& t1, const VarSet& t2, const std::string& task, const Estimator& est) {
  if (t1.empty() || t2.empty()) throw ArgumentError("join_redundancy needs two nonempty sets");
  double overlap = 0.0;
  for (const auto& v : info::set_intersection(t1, t2)) overlap += est.joint_entropy(VarSet{v});
  const double co = est.co_information_entropic({t1, t2, info::label(task)}, {});
  return redundancy_of_set(t1, task, est) + redundancy_of_set(t2, task, est) + co - overlap;
}

/// Per-layer quantities for one task.
struct LayerTaskTerms {
  int layer = 0;
  std::string task;
  VertexSet neurons;
  double redundancy = 0.0;       // R_t(L_i^t)
  double carried_entropy = 0.0;  // sum of H(T) over neurons already in an earlier layer
  InfoTerm relevance;            // I(L_i^t; Y^t)
};

namespace detail {

inline VertexSet task_members(const NeuralGraph& g, const std::string& task) {
  VertexSet out;
  for (const auto& v : g.ancestors(g.sink_of(task)))
    if (g.vertex(v).kind == VertexKind::internal) out.insert(v);
  return out;
}

inline void check_layering(const NeuralGraph& g, const Layering& layering) {
  for (const auto& layer : layering.layers)
    for (const auto& v : layer)
      if (!g.contains(v)) throw StructuralError("layering names vertex " + v.str() + " missing from the graph");
  for (const auto& v : g.internals())
    if (layering.layers_of(v).empty()) throw StructuralError("internal vertex " + v.str() + " is in no layer");
}

}  // namespace detail

/// Layer terms for `task` over the layering restricted to G^task. A neuron
/// that already appeared in an earlier layer has its entropy subtracted again
/// where it reappears; under Algorithm-2 layerings this is exactly the
/// L_{i-1} & L_i intersection because carried vertices recur consecutively.
inline std::vector<LayerTaskTerms> layer_terms(const NeuralGraph& g, const Layering& layering, const std::string& task,
                                               const Estimator& est) {
  detail::check_layering(g, layering);
  const VertexSet members = detail::task_members(g, task);
  std::vector<LayerTaskTerms> out;
  VertexSet seen;
  for (int i = 1; i <= layering.depth(); ++i) {
    LayerTaskTerms t;
    t.layer = i;
    t.task = task;
    t.neurons = layer_output(g, layering, i, &members);
    const VarSet vars = info::neurons(t.neurons);
    t.redundancy = redundancy_of_set(vars, task, est);
    for (const auto& v : t.neurons)
      if (seen.count(v)) t.carried_entropy += est.joint_entropy(VarSet{Var::neuron(v)});
    t.relevance = vars.empty() ? InfoTerm::zero() : InfoTerm::of(est.mutual_info(vars, info::label(task)));
    seen.insert(t.neurons.begin(), t.neurons.end());
    out.push_back(std::move(t));
  }
  return out;
}

/// sum_i [R(L_i) - carried_i] + sum_{i>=2} I(L_i; Y).
inline double layerwise_redundancy(const std::vector<LayerTaskTerms>& terms) {
  double total = 0.0;
  for (const auto& t : terms) {
    total += t.redundancy - t.carried_entropy;
    if (t.layer >= 2) total += t.relevance.value;
  }
  return total;
}

inline double layerwise_redundancy(const NeuralGraph& g, const Layering& layering, const std::string& task,
                                   const Estimator& est) {
  return layerwise_redundancy(layer_terms(g, layering, task, est));
}

/// Definition-level redundancy of every task-connected internal neuron at once.
inline double direct_redundancy(const NeuralGraph& g, const std::string& task, const Estimator& est) {
  return redundancy_of_set(info::neurons(detail::task_members(g, task)), task, est);
}

inline double intra_redundancy(const NeuralGraph& g, const Layering& layering, const std::string& task,
                               const Estimator& est) {
  const double r = layerwise_redundancy(g, layering, task, est);
  return r < 0.0 ? 0.0 : r;
}

struct InterTerm {
  int layer = 0;
  std::string task_a;
  std::string task_b;
  InfoTerm value;  // I(L_i'^A; L_i'^B)
};

inline std::vector<InterTerm> inter_terms(const NeuralGraph& g, const Layering& layering, const std::string& a,
                                          const std::string& b, const Estimator& est) {
  detail::check_layering(g, layering);
  const TaskPartition p = partition(g, layering);
  std::vector<InterTerm> out;
  for (int i = 1; i <= layering.depth(); ++i) {
    const auto& ea = p.block(i, TaskSet{a});
    const auto& eb = p.block(i, TaskSet{b});
    InterTerm t{i, a, b, InfoTerm::zero()};
    if (!ea.empty() && !eb.empty()) t.value = InfoTerm::of(est.mutual_info(info::neurons(ea), info::neurons(eb)));
    out.push_back(t);
  }
  return out;
}

inline double inter_redundancy(const NeuralGraph& g, const Layering& layering, const std::string& a,
                               const std::string& b, const Estimator& est) {
  double total = 0.0;
  for (const auto& t : inter_terms(g, layering, a, b, est)) total += t.value.value;
  return total;
}

/// Disentanglement values at one layer for one pair of disjoint task subsets:
///   c1 = I(L'^a; L'^b; Y^a; Y^b)
///   c2 = I(L'^{a|b}; Y^a | L'^a, Y^b)
///   c3 = I(L'^{a|b}; Y^b | L'^b, Y^a)
struct ConditionTriple {
  int layer = 0;
  TaskSet tau_a;
  TaskSet tau_b;
  InfoTerm c1, c2, c3;
};

struct DisentanglementResult {
  std::vector<ConditionTriple> triples;
  double epsilon = 0.01;
  bool passed = true;
};

namespace detail {

inline ConditionTriple condition_triple(const TaskPartition& p, int layer, const TaskSet& ta, const TaskSet& tb,
                                        const Estimator& est) {
  ConditionTriple c{layer, ta, tb, InfoTerm::zero(), InfoTerm::zero(), InfoTerm::zero()};
  const VarSet la = info::neurons(p.block(layer, ta));
  const VarSet lb = info::neurons(p.block(layer, tb));
  const VarSet shared = info::neurons(p.block(layer, ta.united(tb)));
  const VarSet ya = info::labels(ta);
  const VarSet yb = info::labels(tb);
  if (!la.empty() && !lb.empty()) c.c1 = InfoTerm::of(est.co_information({la, lb, ya, yb}));
  if (!shared.empty()) {
    c.c2 = InfoTerm::of(est.conditional_mi(shared, ya, info::set_union(la, yb)));
    c.c3 = InfoTerm::of(est.conditional_mi(shared, yb, info::set_union(lb, ya)));
  }
  return c;
}

inline bool within(const ConditionTriple& c, double eps) {
  return std::abs(c.c1.value) <= eps && std::abs(c.c2.value) <= eps && std::abs(c.c3.value) <= eps;
}

}  // namespace detail

/// Two-task check for tasks a and b at every layer.
inline DisentanglementResult disentanglement_check(const NeuralGraph& g, const Layering& layering,
                                                   const std::string& a, const std::string& b, const Estimator& est,
                                                   double epsilon) {
  detail::check_layering(g, layering);
  if (a == b) throw ArgumentError("disentanglement_check needs two distinct tasks");
  const TaskPartition p = partition(g, layering);
  DisentanglementResult r;
  r.epsilon = epsilon;
  for (int i = 1; i <= layering.depth(); ++i) {
    auto c = detail::condition_triple(p, i, TaskSet{a}, TaskSet{b}, est);
    r.passed = r.passed && detail::within(c, epsilon);
    r.triples.push_back(std::move(c));
  }
  return r;
}

/// K-task check over every pair of disjoint nonempty task subsets; for two
/// tasks this is exactly the two-task check.
inline DisentanglementResult disentanglement_check(const NeuralGraph& g, const Layering& layering, const Estimator& est,
                                                   double epsilon) {
  detail::check_layering(g, layering);
  const TaskPartition p = partition(g, layering);
  const auto subsets = nonempty_subsets(p.tasks);
  DisentanglementResult r;
  r.epsilon = epsilon;
  for (int i = 1; i <= layering.depth(); ++i)
    for (std::size_t x = 0; x < subsets.size(); ++x)
      for (std::size_t y = x + 1; y < subsets.size(); ++y) {
        if (!subsets[x].disjoint_with(subsets[y])) continue;
        auto c = detail::condition_triple(p, i, subsets[x], subsets[y], est);
        r.passed = r.passed && detail::within(c, epsilon);
        r.triples.push_back(std::move(c));
      }
  return r;
}

/// Every evaluated term of the single- and multi-task objectives.
struct RedundancyReport {
  TaskSet tasks;
  int depth = 0;
  double epsilon = 0.01;
  std::string backend;

  std::vector<LayerTaskTerms> layers;  // depth entries per task, grouped by task
  std::vector<InterTerm> inter_layers;

  std::map<std::string, double> intra;                             // R_intra^t
  std::map<std::pair<std::string, std::string>, double> inter;     // R_inter^{a,b}
  std::map<std::string, double> whole_graph_objective;             // R_t(G^t) - xi * sum_i I(L_i^t; Y^t)
  std::map<std::string, double> layerwise_objective;               // sum_i (R - carried - xi_i I)

  /// Multi-objective form: one layer-wise objective per task followed by one
  /// inter-redundancy term per task pair. Never scalarized.
  std::vector<std::pair<std::string, double>> multi_objective;
  /// Reduced form: the per-task objectives only, subject to c1 = 0 per layer.
  std::vector<std::pair<std::string, double>> reduced_objective;
  bool reduced_constraints_hold = true;

  DisentanglementResult conditions;
};

inline RedundancyReport objective_values(const NeuralGraph& g, const Layering& layering, const Estimator& est,
                                         const RedundancyObjectiveConfig& cfg) {
  cfg.validate();
  RedundancyReport rep;
  rep.tasks = g.tasks();
  rep.depth = layering.depth();
  rep.epsilon = cfg.epsilon;
  rep.backend = info::to_string(est.config().backend);

  for (const auto& t : rep.tasks.tasks()) {
    auto terms = layer_terms(g, layering, t, est);
    const double r_graph = layerwise_redundancy(terms);
    rep.intra[t] = r_graph < 0.0 ? 0.0 : r_graph;
    double relevance = 0.0;
    double layerwise = 0.0;
    for (const auto& lt : terms) {
      relevance += lt.relevance.value;
      layerwise += lt.redundancy - lt.carried_entropy - cfg.xi_at(t, lt.layer, rep.depth) * lt.relevance.value;
    }
    rep.whole_graph_objective[t] = rep.intra[t] - cfg.xi_whole(t) * relevance;
    rep.layerwise_objective[t] = layerwise;
    rep.layers.insert(rep.layers.end(), terms.begin(), terms.end());
  }

  const auto& ts = rep.tasks.tasks();
  for (const auto& t : ts) rep.multi_objective.emplace_back(t, rep.layerwise_objective[t]);
  for (std::size_t x = 0; x < ts.size(); ++x)
    for (std::size_t y = x + 1; y < ts.size(); ++y) {
      auto terms = inter_terms(g, layering, ts[x], ts[y], est);
      double total = 0.0;
      for (const auto& it : terms) total += it.value.value;
      rep.inter[{ts[x], ts[y]}] = total;
      rep.multi_objective.emplace_back("inter:" + ts[x] + "," + ts[y], total);
      rep.inter_layers.insert(rep.inter_layers.end(), terms.begin(), terms.end());
    }
  for (const auto& t : ts) rep.reduced_objective.emplace_back(t, rep.layerwise_objective[t]);

  rep.conditions = ts.size() >= 2 ? disentanglement_check(g, layering, est, cfg.epsilon) : DisentanglementResult{};
  rep.conditions.epsilon = cfg.epsilon;
  for (const auto& c : rep.conditions.triples)
    if (std::abs(c.c1.value) > cfg.epsilon) rep.reduced_constraints_hold = false;
  return rep;
}

}  // namespace rdnet
