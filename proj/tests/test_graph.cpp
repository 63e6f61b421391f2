#include <gtest/gtest.h>

#include "rdnet/graph.hpp"
#include "rdnet/layering.hpp"

using namespace rdnet;

namespace {

VertexId v(const std::string& net, int layer, int index) { return VertexId{net, layer, index}; }

// x -> a -> t, with a second branch x -> b -> u feeding only the B sink.
NeuralGraph diamond() {
  NeuralGraph g;
  g.add_source(v("x", 0, 0));
  g.add_internal(v("n", 1, 0));
  g.add_internal(v("n", 1, 1));
  g.add_internal(v("n", 2, 0));
  g.add_sink(v("n", 3, 0), "A");
  g.add_sink(v("n", 3, 1), "B");
  g.add_edge(v("x", 0, 0), v("n", 1, 0), 1.0f);
  g.add_edge(v("x", 0, 0), v("n", 1, 1), 1.0f);
  g.add_edge(v("n", 1, 0), v("n", 2, 0), 1.0f);
  g.add_edge(v("n", 1, 1), v("n", 2, 0), 1.0f);
  g.add_edge(v("n", 2, 0), v("n", 3, 0), 1.0f);
  g.add_edge(v("n", 1, 1), v("n", 3, 1), 1.0f);
  return g;
}

}  // namespace

TEST(Graph, RejectsSelfLoopsAndParallelEdges) {
  NeuralGraph g;
  g.add_source(v("x", 0, 0));
  g.add_internal(v("n", 1, 0));
  EXPECT_THROW(g.add_edge(v("n", 1, 0), v("n", 1, 0), 1.0f), ArgumentError);
  g.add_edge(v("x", 0, 0), v("n", 1, 0), 1.0f);
  EXPECT_THROW(g.add_edge(v("x", 0, 0), v("n", 1, 0), 2.0f), ArgumentError);
  EXPECT_THROW(g.add_internal(v("n", 1, 0)), ArgumentError);
  EXPECT_THROW(g.add_edge(v("x", 0, 0), v("missing", 1, 0), 1.0f), LookupError);
}

TEST(Graph, SinkNeedsTask) {
  NeuralGraph g;
  EXPECT_THROW(g.add_sink(v("n", 1, 0), ""), ArgumentError);
  EXPECT_THROW(g.add_vertex(v("n", 1, 1), VertexKind::internal, "A"), ArgumentError);
}

TEST(Graph, ConnectedFollowsDirectedPaths) {
  const auto g = diamond();
  EXPECT_TRUE(connected(g, v("x", 0, 0), v("n", 3, 0)));
  EXPECT_TRUE(connected(g, v("n", 3, 0), v("x", 0, 0)));
  EXPECT_FALSE(connected(g, v("n", 1, 0), v("n", 1, 1)));
  EXPECT_FALSE(connected(g, v("n", 3, 0), v("n", 3, 1)));
  EXPECT_THROW(connected(g, v("q", 0, 0), v("x", 0, 0)), LookupError);
}

TEST(Graph, TaskConnectedSubgraphDropsOtherBranches) {
  const auto g = diamond();
  const auto gb = task_connected_subgraph(g, "B");
  EXPECT_TRUE(gb.contains(v("n", 1, 1)));
  EXPECT_FALSE(gb.contains(v("n", 1, 0)));
  EXPECT_FALSE(gb.contains(v("n", 2, 0)));
  EXPECT_FALSE(gb.contains(v("n", 3, 0)));
  EXPECT_EQ(gb.edge_count(), 2u);

  const auto ga = task_connected_subgraph(g, "A");
  EXPECT_EQ(ga.internals().size(), 3u);
  EXPECT_THROW(task_connected_subgraph(g, "C"), LookupError);
}

TEST(Graph, ValidateReportsCycleAndDanglingVertices) {
  auto g = diamond();
  EXPECT_NO_THROW(g.validate());

  auto cyclic = g;
  cyclic.add_edge(v("n", 2, 0), v("n", 1, 0), 1.0f);
  ASSERT_TRUE(cyclic.find_cycle().has_value());
  try {
    cyclic.validate();
    FAIL() << "expected a structural error";
  } catch (const StructuralError& e) {
    EXPECT_NE(std::string(e.what()).find("n:1:0"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("n:2:0"), std::string::npos);
  }

  auto dangling = g;
  dangling.add_internal(v("n", 1, 5));
  dangling.add_edge(v("x", 0, 0), v("n", 1, 5), 1.0f);
  try {
    dangling.validate();
    FAIL() << "expected a structural error";
  } catch (const StructuralError& e) {
    EXPECT_NE(std::string(e.what()).find("n:1:5"), std::string::npos);
  }

  auto two_sinks = g;
  two_sinks.add_sink(v("n", 3, 9), "A");
  two_sinks.add_edge(v("n", 2, 0), v("n", 3, 9), 1.0f);
  EXPECT_THROW(two_sinks.validate(), StructuralError);
}

TEST(Graph, TopologicalOrderRespectsEdges) {
  const auto g = diamond();
  const auto order = g.topological_order();
  ASSERT_EQ(order.size(), g.vertex_count());
  std::map<VertexId, std::size_t> pos;
  for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
  for (const auto& e : g.edges()) EXPECT_LT(pos[e.from], pos[e.to]);
}

TEST(Graph, UniteSharesEqualIdsAndRejectsConflicts) {
  NeuralGraph a, b;
  for (auto* g : {&a, &b}) g->add_source(v("x", 0, 0));
  a.add_internal(v("A", 1, 0));
  a.add_sink(v("A", 2, 0), "A");
  a.add_edge(v("x", 0, 0), v("A", 1, 0), 0.25f);
  a.add_edge(v("A", 1, 0), v("A", 2, 0), 1.0f);
  b.add_internal(v("B", 1, 0));
  b.add_sink(v("B", 2, 0), "B");
  b.add_edge(v("x", 0, 0), v("B", 1, 0), 0.5f);
  b.add_edge(v("B", 1, 0), v("B", 2, 0), 1.0f);

  const auto u = NeuralGraph::unite({&a, &b});
  EXPECT_EQ(u.sources().size(), 1u);
  EXPECT_EQ(u.edge_count(), 4u);
  EXPECT_EQ(u.tasks(), (TaskSet{"A", "B"}));
  EXPECT_NO_THROW(u.validate());

  NeuralGraph c;
  c.add_internal(v("x", 0, 0));
  EXPECT_THROW(NeuralGraph::unite({&a, &c}), StructuralError);
}

TEST(TaskSetTest, SubsetsAreOrderedBySizeThenName) {
  const auto subsets = nonempty_subsets(TaskSet{"C", "A", "B"});
  ASSERT_EQ(subsets.size(), 7u);
  EXPECT_EQ(subsets[0], TaskSet{"A"});
  EXPECT_EQ(subsets[2], TaskSet{"C"});
  EXPECT_EQ(subsets[3], (TaskSet{"A", "B"}));
  EXPECT_EQ(subsets[6], (TaskSet{"A", "B", "C"}));
  EXPECT_TRUE(TaskSet{"A"}.subset_of(TaskSet{"A", "B"}));
  EXPECT_FALSE((TaskSet{"A", "C"}).subset_of(TaskSet{"A", "B"}));
  EXPECT_TRUE(TaskSet{"A"}.disjoint_with(TaskSet{"B", "C"}));
}
