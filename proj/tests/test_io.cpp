#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <cstring>
#include <unistd.h>

#include "rdnet/io/config.hpp"
#include "rdnet/io/dataset.hpp"
#include "rdnet/io/report.hpp"
#include "rdnet/io/topology.hpp"
#include "support/toy_net.hpp"

using namespace rdnet;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("rdnet_io_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

}  // namespace

TEST(Topology, RoundTripIsBitExact) {
  std::mt19937_64 rng(4);
  auto g = toy::random_net("A", "A", {toy::x(0), toy::x(1), toy::x(2)}, {3, 2}, rng);
  // Awkward weights: subnormal, huge, negative zero, many significant digits.
  g.remove_edge(toy::x(0), VertexId{"A", 1, 0});
  g.add_edge(toy::x(0), VertexId{"A", 1, 0}, std::numeric_limits<float>::denorm_min());
  for (const auto& e : g.edges())
    if (e.to.layer_hint == 2) {
      g.remove_edge(e.from, e.to);
      g.add_edge(e.from, e.to, 0.1f + 1e-7f);
      break;
    }
  const auto text = io::topology_to_json(g).dump();
  const auto back = io::topology_from_json(io::json::parse(text));
  EXPECT_EQ(back, g);
  for (const auto& e : g.edges()) {
    const float w = *back.weight(e.from, e.to);
    EXPECT_EQ(std::memcmp(&w, &e.weight, sizeof w), 0);
  }
  EXPECT_EQ(io::topology_to_json(back).dump(), text);
}

TEST(Topology, FileRoundTrip) {
  const auto dir = scratch("topo");
  const auto p = toy::planted_two(1, 1, 1);
  io::save_topology(dir / "a.json", p.nets.at("A"));
  EXPECT_EQ(io::load_topology(dir / "a.json"), p.nets.at("A"));
  EXPECT_FALSE(fs::exists(dir / "a.json.tmp"));
}

TEST(Topology, ParseErrors) {
  using io::json;
  const auto ok = io::topology_to_json(toy::planted_two(1, 0, 1).nets.at("A"));
  auto bad = ok;
  bad["format_version"] = 2;
  EXPECT_THROW(io::topology_from_json(bad), ParseError);
  bad = ok;
  bad["vertices"][0]["kind"] = "hidden";
  EXPECT_THROW(io::topology_from_json(bad), ParseError);
  bad = ok;
  bad["edges"].push_back({{"from", {"x", 0, 0}}, {"to", {"Q", 1, 0}}, {"weight", 1.0}});
  EXPECT_THROW(io::topology_from_json(bad), ParseError);
  bad = ok;
  bad["edges"][0]["from"] = json::array({"x", 0});
  EXPECT_THROW(io::topology_from_json(bad), ParseError);
  bad = ok;
  bad["edges"][0]["weight"] = "heavy";
  EXPECT_THROW(io::topology_from_json(bad), ParseError);
  bad = ok;
  bad["networks"] = json::array({{{"name", "A"}, {"tasks", {"A", "Z"}}}});
  EXPECT_THROW(io::topology_from_json(bad), ParseError);
  bad = ok;
  bad["edges"].push_back(bad["edges"][0]);
  EXPECT_THROW(io::topology_from_json(bad), ParseError);
  EXPECT_THROW(io::topology_from_json(json::array()), ParseError);
}

TEST(Topology, CycleIsStructural) {
  auto doc = io::topology_to_json(toy::planted_two(1, 0, 1, 2, 2).nets.at("A"));
  doc["edges"].push_back({{"from", {"A", 2, 0}}, {"to", {"A", 1, 0}}, {"weight", 1.0}});
  try {
    io::topology_from_json(doc);
    FAIL();
  } catch (const StructuralError& e) {
    EXPECT_NE(std::string(e.what()).find("A:2:0"), std::string::npos);
  }
}

TEST(Dataset, BinaryAndCsvRoundTrip) {
  const auto dir = scratch("data");
  info::ActivationDataset ds(3);
  ds.add_neuron(VertexId{"A", 1, 0}, {0.5, -1.25, 3.0e-8});
  ds.add_neuron(VertexId{"A", 1, 1}, {1.0, 2.0, 3.0});
  ds.add_label("A", {0, 7, -2});
  for (auto fmt : {io::StorageFormat::binary, io::StorageFormat::csv}) {
    const auto manifest = dir / (fmt == io::StorageFormat::binary ? "bin.json" : "csv.json");
    io::save_dataset(manifest, ds, fmt);
    const auto back = io::load_dataset(manifest);
    EXPECT_EQ(back.sample_count(), 3u);
    for (const auto& [id, col] : ds.neuron_columns())
      for (std::size_t r = 0; r < col.size(); ++r)
        EXPECT_EQ(back.neuron(id)[r], static_cast<double>(static_cast<float>(col[r])));
    EXPECT_EQ(back.label("A"), ds.label("A"));
  }
  // Row-major, little-endian, 4 bytes per cell.
  EXPECT_EQ(fs::file_size(dir / "bin.bin"), 3u * 3u * 4u);
}

TEST(Dataset, ManifestErrors) {
  const auto dir = scratch("manifest");
  write(dir / "m.csv", "0.5,1\n0.25,0\n");
  const std::string base =
      R"({"format_version":1,"sample_count":2,"columns":[["A",1,0],"label:A"],"dtype":"float32","storage":"m.csv"})";
  write(dir / "ok.json", base);
  EXPECT_EQ(io::load_dataset(dir / "ok.json").label("A"), (std::vector<std::int32_t>{1, 0}));

  write(dir / "rows.json", std::string(base).replace(base.find("\"sample_count\":2"), 16, "\"sample_count\":3"));
  EXPECT_THROW(io::load_dataset(dir / "rows.json"), DataError);

  write(dir / "wide.csv", "0.5,1,9\n0.25,0,9\n");
  write(dir / "wide.json", std::string(base).replace(base.find("m.csv"), 5, "wide.csv"));
  EXPECT_THROW(io::load_dataset(dir / "wide.json"), DataError);

  write(dir / "frac.csv", "0.5,1.5\n0.25,0\n");
  write(dir / "frac.json", std::string(base).replace(base.find("m.csv"), 5, "frac.csv"));
  EXPECT_THROW(io::load_dataset(dir / "frac.json"), DataError);

  write(dir / "dup.json", R"({"format_version":1,"sample_count":2,"columns":["label:A","label:A"],"storage":"m.csv"})");
  EXPECT_THROW(io::load_dataset(dir / "dup.json"), ParseError);

  write(dir / "short.bin", std::string(12, '\0'));
  write(dir / "short.json",
        R"({"format_version":1,"sample_count":2,"columns":[["A",1,0],"label:A"],"storage":"short.bin"})");
  EXPECT_THROW(io::load_dataset(dir / "short.json"), DataError);

  EXPECT_THROW(io::load_dataset(dir / "absent.json"), ParseError);
}

TEST(Dataset, Int32NeuronColumns) {
  const auto dir = scratch("int32");
  std::string bytes;
  for (std::int32_t v : {3, 0, -4, 1}) io::detail::store_le32(static_cast<std::uint32_t>(v), bytes);
  write(dir / "m.bin", bytes);
  write(dir / "m.json",
        R"({"format_version":1,"sample_count":2,"columns":[["A",1,0],"label:A"],"dtype":"int32","storage":"m.bin"})");
  const auto ds = io::load_dataset(dir / "m.json");
  EXPECT_EQ(ds.neuron(VertexId{"A", 1, 0}), (std::vector<double>{3, -4}));
  EXPECT_EQ(ds.label("A"), (std::vector<std::int32_t>{0, 1}));
}

TEST(Config, SectionsAndDefaults) {
  const auto c = io::config_from_json(io::json::parse(R"({
    "estimator": {"bins": 12, "log_base": "e"},
    "objective": {"epsilon": 0.05, "xi": {"A": 0.5, "B": [1, 2]}, "xi_single": {"A": 3}},
    "merge": {"alpha": 0.02, "new_edge_init": "uniform-near-zero", "init_scale": 0.1, "rng_seed": 9}
  })"));
  EXPECT_EQ(c.objective.estimator.bins, 12);
  EXPECT_EQ(c.objective.estimator.backend, info::Backend::binned_plugin);
  EXPECT_EQ(c.objective.estimator.log_base, info::LogBase::e);
  EXPECT_EQ(c.merge.estimator.backend, info::Backend::kl_upper_bound);
  EXPECT_EQ(c.merge.estimator.bins, 12);
  EXPECT_EQ(c.objective.xi.at("A"), std::vector<double>{0.5});
  EXPECT_EQ(c.objective.xi.at("B"), (std::vector<double>{1, 2}));
  EXPECT_EQ(c.objective.xi_single.at("A"), 3.0);
  EXPECT_EQ(c.merge.epsilon, 0.05);
  EXPECT_TRUE(c.alpha_given);
  EXPECT_TRUE(c.seed_given);
  EXPECT_EQ(c.merge.new_edge_init, EdgeInit::uniform_near_zero);

  EXPECT_FALSE(io::config_from_json(io::json::object()).alpha_given);
  EXPECT_THROW(io::config_from_json(io::json::parse(R"({"estimator": {"backend": "magic"}})")), ParseError);
  EXPECT_THROW(io::config_from_json(io::json::parse(R"({"merge": {"alpha": "high"}})")), ParseError);
}

TEST(Report, TraceLinesAndPartitionJson) {
  TraceEntry t{2, TaskSet{"A"}, TaskSet{"B"}, VertexId{"B", 2, 1}, 0.125, false};
  EXPECT_EQ(io::trace_line(t), "layer=2 tau={A} off={B} candidate=B:2:1 set_mi=0.125 reject");
  TaskPartition p;
  p.tasks = TaskSet{"A"};
  p.layers[1][TaskSet{"A"}] = {VertexId{"A", 1, 0}};
  const auto j = io::partition_to_json(p);
  EXPECT_EQ(j["layers"][0]["blocks"][0]["neurons"][0], io::json::array({"A", 1, 0}));
}
