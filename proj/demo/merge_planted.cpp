// Builds two small step networks that share one input bit, merges them and
// prints the partition and the disentanglement check.

#include <cstdio>

#include "rdnet/io/report.hpp"
#include "rdnet/merge.hpp"

using namespace rdnet;

namespace {

// x0 feeds only A, x1 feeds both, x2 feeds only B. Each net copies its inputs
// through two layers.
NeuralGraph copy_net(const std::string& task, std::vector<int> inputs) {
  NeuralGraph g;
  std::vector<VertexId> prev;
  for (int k : inputs) {
    g.add_source(VertexId{"x", 0, k});
    prev.push_back(VertexId{"x", 0, k});
  }
  for (int layer = 1; layer <= 2; ++layer) {
    std::vector<VertexId> cur;
    for (std::size_t k = 0; k < prev.size(); ++k) {
      VertexId v{task, layer, static_cast<int>(k)};
      g.add_internal(v);
      g.add_edge(prev[k], v, 1.0f);
      cur.push_back(v);
    }
    prev = cur;
  }
  g.add_sink(VertexId{task, 3, 0}, task);
  for (const auto& v : prev) g.add_edge(v, VertexId{task, 3, 0}, 1.0f);
  return g;
}

}  // namespace

int main() {
  const NeuralGraph a = copy_net("A", {0, 1});
  const NeuralGraph b = copy_net("B", {1, 2});

  info::ActivationDataset data(8);
  std::vector<double> bit[3];
  std::vector<std::int32_t> ya, yb;
  for (int s = 0; s < 8; ++s) {
    for (int k = 0; k < 3; ++k) bit[k].push_back((s >> k) & 1);
    ya.push_back(2 * bit[0].back() + bit[1].back());
    yb.push_back(2 * bit[2].back() + bit[1].back());
  }
  for (int layer = 1; layer <= 2; ++layer)
    for (int k = 0; k < 2; ++k) {
      data.add_neuron(VertexId{"A", layer, k}, bit[k]);
      data.add_neuron(VertexId{"B", layer, k}, bit[k + 1]);
    }
  data.add_label("A", ya);
  data.add_label("B", yb);

  MergeConfig cfg;
  cfg.alpha = 0.01;
  cfg.rng_seed = 1;
  const MergeResult r = merge_two(a, b, data, cfg);

  std::printf("backend %s\n", info::to_string(r.backend_used));
  std::printf("%s\n", io::partition_to_json(r.partition).dump(2).c_str());
  std::printf("disentanglement %s\n", r.conditions.passed ? "holds" : "fails");
  return r.conditions.passed ? 0 : 1;
}
