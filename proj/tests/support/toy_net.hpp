#pragma once

// Fixture builders for tests: binary step networks, a forward evaluator and
// planted bit-block constructions.

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "rdnet/graph.hpp"
#include "rdnet/info/dataset.hpp"
#include "rdnet/layering.hpp"

namespace toy {

using rdnet::NeuralGraph;
using rdnet::TaskSet;
using rdnet::VertexId;
using rdnet::VertexKind;
using rdnet::VertexSet;
using rdnet::info::ActivationDataset;

using Values = std::map<VertexId, int>;

/// Every non-source vertex outputs [sum w * in > 0.5].
inline Values forward(const NeuralGraph& g, const Values& inputs) {
  Values out;
  for (const auto& v : g.topological_order()) {
    if (g.vertex(v).kind == VertexKind::source) {
      out[v] = inputs.at(v);
      continue;
    }
    double s = 0.0;
    for (const auto& [u, w] : g.in_edges(v)) s += static_cast<double>(w) * out.at(u);
    out[v] = s > 0.5 ? 1 : 0;
  }
  return out;
}

/// All 2^n assignments of the given sources, first source slowest.
inline std::vector<Values> all_inputs(const VertexSet& sources) {
  const std::vector<VertexId> xs(sources.begin(), sources.end());
  std::vector<Values> rows;
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << xs.size()); ++m) {
    Values r;
    for (std::size_t k = 0; k < xs.size(); ++k) r[xs[k]] = static_cast<int>((m >> (xs.size() - 1 - k)) & 1u);
    rows.push_back(std::move(r));
  }
  return rows;
}

using LabelFn = std::function<int(const Values&)>;

/// Evaluates every net on every input and records each internal neuron and
/// each label.
inline ActivationDataset tabulate(const std::vector<const NeuralGraph*>& nets, const std::vector<Values>& rows,
                                  const std::map<std::string, LabelFn>& labels) {
  ActivationDataset ds(rows.size());
  std::map<VertexId, std::vector<double>> cols;
  std::map<std::string, std::vector<std::int32_t>> ys;
  for (const auto& row : rows) {
    Values all = row;
    for (const auto* g : nets) {
      const auto v = forward(*g, row);
      all.insert(v.begin(), v.end());
      for (const auto& id : g->internals()) cols[id].push_back(v.at(id));
    }
    for (const auto& [t, f] : labels) ys[t].push_back(f(all));
  }
  for (auto& [id, c] : cols) ds.add_neuron(id, std::move(c));
  for (auto& [t, y] : ys) ds.add_label(t, std::move(y));
  return ds;
}

inline VertexId x(int k) { return VertexId{"x", 0, k}; }

/// Planted construction: independent bit blocks, one per nonempty task
/// subset with a positive size. Net t copies, at every layer, each bit of
/// every block whose subset contains t; its sink ORs the last layer. Y^t
/// encodes every bit t sees, except that its own exclusive block enters
/// through popcount when `popcount` is set.
struct Planted {
  TaskSet tasks;
  std::map<TaskSet, int> block_bits;
  std::map<TaskSet, std::vector<VertexId>> block_sources;
  std::map<std::string, NeuralGraph> nets;
  std::map<std::string, int> depth;
  ActivationDataset data;
  /// layer -> subset -> neurons expected in that block.
  std::map<int, std::map<TaskSet, VertexSet>> expected;

  std::vector<const NeuralGraph*> net_ptrs() const {
    std::vector<const NeuralGraph*> out;
    for (const auto& [t, g] : nets) out.push_back(&g);
    return out;
  }
  VertexSet sources() const {
    VertexSet out;
    for (const auto& [tau, xs] : block_sources) out.insert(xs.begin(), xs.end());
    return out;
  }
};

inline Planted planted(const std::map<TaskSet, int>& block_bits, const std::map<std::string, int>& depth,
                       bool popcount) {
  Planted p;
  std::vector<std::string> names;
  for (const auto& [t, d] : depth) names.push_back(t);
  p.tasks = TaskSet(names);
  p.depth = depth;
  p.block_bits = block_bits;
  int next_source = 0;
  for (const auto& [tau, n] : block_bits)
    for (int k = 0; k < n; ++k) p.block_sources[tau].push_back(x(next_source++));

  int shared_depth = 1 << 20;
  for (const auto& [t, d] : depth) shared_depth = std::min(shared_depth, d);

  for (const auto& t : names) {
    NeuralGraph g;
    std::vector<VertexId> prev;
    std::vector<TaskSet> owner;
    for (const auto& [tau, xs] : p.block_sources)
      if (tau.contains(t))
        for (const auto& s : xs) {
          g.add_source(s);
          prev.push_back(s);
          owner.push_back(tau);
        }
    for (int layer = 1; layer <= depth.at(t); ++layer) {
      std::vector<VertexId> cur;
      for (std::size_t k = 0; k < prev.size(); ++k) {
        VertexId v{t, layer, static_cast<int>(k)};
        g.add_internal(v);
        g.add_edge(prev[k], v, 1.0f);
        cur.push_back(v);
        auto& bucket = p.expected[layer];
        if (layer <= shared_depth)
          bucket[owner[k]].insert(v);
        else
          bucket[TaskSet{t}].insert(v);
      }
      prev = std::move(cur);
    }
    VertexId sink{t, depth.at(t) + 1, 0};
    g.add_sink(sink, t);
    for (const auto& v : prev) g.add_edge(v, sink, 1.0f);
    p.nets.emplace(t, std::move(g));
  }
  for (auto& [layer, bs] : p.expected)
    for (const auto& tau : rdnet::nonempty_subsets(p.tasks)) bs[tau];

  std::map<std::string, LabelFn> labels;
  for (const auto& t : names) {
    labels[t] = [&p, t, popcount](const Values& v) {
      int code = 0;
      for (const auto& [tau, xs] : p.block_sources) {
        if (!tau.contains(t)) continue;
        if (popcount && tau == TaskSet{t}) {
          int c = 0;
          for (const auto& s : xs) c += v.at(s);
          code = code * (static_cast<int>(xs.size()) + 1) + c;
        } else {
          for (const auto& s : xs) code = code * 2 + v.at(s);
        }
      }
      return code;
    };
  }
  p.data = tabulate(p.net_ptrs(), all_inputs(p.sources()), labels);
  return p;
}

/// Two-task planted fixture with blocks Xa, Xs, Xb.
inline Planted planted_two(int na, int ns, int nb, int depth_a = 2, int depth_b = 2, bool popcount = false) {
  std::map<TaskSet, int> bits;
  if (na) bits[TaskSet{"A"}] = na;
  if (nb) bits[TaskSet{"B"}] = nb;
  if (ns) bits[TaskSet{"A", "B"}] = ns;
  return planted(bits, {{"A", depth_a}, {"B", depth_b}}, popcount);
}

/// Random step network on `inputs` with the given layer widths. Each neuron
/// draws 1..3 inputs from the previous layer with positive weights summing
/// past the threshold, so every neuron is a nonconstant monotone function of
/// the inputs. Skips optionally let earlier neurons feed the sink directly or
/// give some neurons an extra input from two layers back.
struct Skips {
  bool to_sink = false;
  bool internal = false;
};

inline NeuralGraph random_net(const std::string& name, const std::string& task, const std::vector<VertexId>& inputs,
                              const std::vector<int>& widths, std::mt19937_64& rng, Skips skips = {}) {
  NeuralGraph g;
  for (const auto& s : inputs) g.add_source(s);
  std::uniform_real_distribution<float> weight(0.3f, 1.2f);
  std::vector<std::vector<VertexId>> levels{inputs};
  const VertexId sink{name, static_cast<int>(widths.size()) + 1, 0};
  g.add_sink(sink, task);
  for (std::size_t layer = 1; layer <= widths.size(); ++layer) {
    const auto& prev = levels.back();
    std::vector<VertexId> cur;
    for (int k = 0; k < widths[layer - 1]; ++k) {
      VertexId v{name, static_cast<int>(layer), k};
      g.add_internal(v);
      std::vector<VertexId> pool = prev;
      std::shuffle(pool.begin(), pool.end(), rng);
      const std::size_t fan = std::min<std::size_t>(pool.size(), 1 + rng() % 3);
      double total = 0.0;
      for (std::size_t f = 0; f < fan; ++f) {
        float w = weight(rng);
        if (f + 1 == fan && total + w <= 0.5) w = 0.6f;
        total += w;
        g.add_edge(pool[f], v, w);
      }
      if (skips.internal && layer >= 3 && rng() % 2 == 0) {
        const auto& back = levels[layer - 2];
        g.add_edge(back[rng() % back.size()], v, weight(rng));
      }
      cur.push_back(v);
    }
    levels.push_back(std::move(cur));
  }
  for (const auto& s : inputs)
    if (g.out_edges(s).empty()) g.add_edge(s, levels[1][rng() % levels[1].size()], weight(rng));
  for (std::size_t layer = 1; layer < levels.size(); ++layer)
    for (const auto& v : levels[layer]) {
      const bool last = layer + 1 == levels.size();
      if (last || (skips.to_sink && rng() % 3 == 0)) {
        g.add_edge(v, sink, weight(rng));
      } else if (g.out_edges(v).empty()) {
        const auto& next = levels[layer + 1];
        g.add_edge(v, next[rng() % next.size()], weight(rng));
      }
    }
  return g;
}

/// Encodes the joint value of a vertex list as one integer label.
inline LabelFn joint_of(std::vector<VertexId> vs) {
  return [vs = std::move(vs)](const Values& v) {
    int code = 0;
    for (const auto& id : vs) code = code * 2 + v.at(id);
    return code;
  };
}

}  // namespace toy
