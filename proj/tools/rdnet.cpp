// rdnet command-line front end: layering, redundancy reports, condition checks
// and merging.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rdnet/io/config.hpp"
#include "rdnet/io/dataset.hpp"
#include "rdnet/io/report.hpp"
#include "rdnet/io/topology.hpp"
#include "rdnet/layering.hpp"
#include "rdnet/log.hpp"
#include "rdnet/merge.hpp"
#include "rdnet/redundancy.hpp"

namespace fs = std::filesystem;
using namespace rdnet;

namespace {

enum Exit { kOk = 0, kInputError = 2, kStructuralError = 3, kConditionFailure = 4 };

struct Options {
  std::optional<std::string> config;
  std::optional<double> alpha;
  std::optional<double> epsilon;
  std::optional<int> bins;
  std::optional<std::string> estimator;
  std::optional<std::uint64_t> seed;
  bool require_rdnet = false;
  std::string out_dir;
  std::string verbosity = "warn";
};

io::Config resolve_config(const Options& o) {
  io::Config c = o.config ? io::load_config(*o.config) : io::Config{};
  if (o.estimator) {
    const auto b = info::parse_backend(*o.estimator);
    c.objective.estimator.backend = b;
    c.merge.estimator.backend = b;
  }
  if (o.bins) {
    c.objective.estimator.bins = *o.bins;
    c.merge.estimator.bins = *o.bins;
  }
  if (o.epsilon) {
    c.objective.epsilon = *o.epsilon;
    c.merge.epsilon = *o.epsilon;
  }
  if (o.alpha) {
    c.merge.alpha = *o.alpha;
    c.alpha_given = true;
  }
  if (o.seed) {
    c.merge.rng_seed = *o.seed;
    c.seed_given = true;
  }
  return c;
}

void emit(const Options& o, const std::string& name, const std::string& text) {
  if (o.out_dir.empty())
    std::cout << text;
  else
    io::write_atomic(fs::path(o.out_dir) / name, text);
}

std::string layer_line(const std::string& label, const VertexSet& vs) {
  std::string line = label + ":";
  for (const auto& v : vs) line += " " + v.str();
  return line + "\n";
}

int cmd_layers(const Options& o, const std::string& topo) {
  const auto g = io::load_topology(topo);
  const auto l = construct_layers(g);
  for (int i = 0; i <= l.depth(); ++i) std::cerr << layer_line("G" + std::to_string(i), l.layer(i));
  std::cerr << layer_line("G" + std::to_string(l.depth() + 1), l.sinks);
  emit(o, "layers.json", io::layering_to_json(l).dump(2) + "\n");
  return kOk;
}

void require_columns(const NeuralGraph& g, const info::ActivationDataset& data) {
  info::VarSet wanted = info::neurons(g.internals());
  for (const auto& t : g.tasks().tasks()) wanted.insert(info::Var::label(t));
  const auto missing = data.missing(wanted);
  if (!missing.empty()) throw DataError("dataset lacks columns " + info::to_string(missing));
}

void print_conditions(const DisentanglementResult& r) {
  for (const auto& c : r.triples)
    std::fprintf(stderr, "layer %d %s|%s c1=%.6g c2=%.6g c3=%.6g\n", c.layer, c.tau_a.str().c_str(),
                 c.tau_b.str().c_str(), c.c1.value, c.c2.value, c.c3.value);
  std::fprintf(stderr, "disentanglement %s at epsilon=%g\n", r.passed ? "holds" : "FAILS", r.epsilon);
}

int cmd_report(const Options& o, const std::string& topo, const std::string& dataset, bool check_only) {
  const io::Config c = resolve_config(o);
  const auto g = io::load_topology(topo);
  const auto data = io::load_dataset(dataset);
  require_columns(g, data);
  const info::Estimator est(data, c.objective.estimator);
  const auto l = construct_layers(g);

  DisentanglementResult conditions;
  if (check_only) {
    if (g.tasks().size() < 2) throw ArgumentError("check needs a graph with at least two tasks");
    conditions = disentanglement_check(g, l, est, c.objective.epsilon);
    emit(o, "conditions.json", io::conditions_to_json(conditions).dump(2) + "\n");
  } else {
    const auto report = objective_values(g, l, est, c.objective);
    conditions = report.conditions;
    emit(o, "report.json", io::report_to_json(report).dump(2) + "\n");
  }
  print_conditions(conditions);
  return (o.require_rdnet || check_only) && !conditions.passed ? kConditionFailure : kOk;
}

int cmd_merge(const Options& o, const std::vector<std::string>& topos, const std::string& dataset) {
  io::Config c = resolve_config(o);
  if (!c.seed_given) throw ArgumentError("merge needs --seed (or merge.rng_seed in the config)");
  if (!c.alpha_given) throw ArgumentError("merge needs --alpha (or merge.alpha in the config)");
  if (topos.size() < 2) throw ArgumentError("merge needs at least two topologies");

  std::vector<NeuralGraph> graphs;
  for (const auto& t : topos) graphs.push_back(io::load_topology(t));
  const auto data = io::load_dataset(dataset);
  std::vector<const NeuralGraph*> ptrs;
  for (const auto& g : graphs) ptrs.push_back(&g);
  const MergeResult r = graphs.size() == 2 ? merge_two(graphs[0], graphs[1], data, c.merge)
                                           : merge_k(ptrs, data, c.merge);

  const fs::path dir = o.out_dir.empty() ? fs::path(".") : fs::path(o.out_dir);
  io::save_topology(dir / "merged.json", r.merged);
  io::write_atomic(dir / "partition.json", io::partition_to_json(r.partition).dump(2) + "\n");
  io::write_atomic(dir / "conditions.json", io::conditions_to_json(r.conditions).dump(2) + "\n");
  io::write_atomic(dir / "trace.log", io::trace_text(r.trace));

  std::printf("backend %s\n", info::to_string(r.backend_used));
  for (const auto& [i, blocks] : r.partition.layers) {
    std::printf("layer %d:", i);
    for (const auto& [tau, vs] : blocks) std::printf(" %s=%zu", tau.str().c_str(), vs.size());
    std::printf("\n");
  }
  std::printf("dropped %zu\n", r.dropped.size());
  for (const auto& t : r.conditions.triples)
    std::printf("layer %d %s|%s c1=%.6g c2=%.6g c3=%.6g\n", t.layer, t.tau_a.str().c_str(), t.tau_b.str().c_str(),
                t.c1.value, t.c2.value, t.c3.value);
  std::printf("disentanglement %s\n", r.conditions.passed ? "holds" : "fails");
  return o.require_rdnet && !r.conditions.passed ? kConditionFailure : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Redundancy analysis and disentangled merging of feed-forward networks"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON config file");
    sub->add_option("--epsilon", o.epsilon, "Disentanglement tolerance in bits");
    sub->add_option("--bins", o.bins, "Bins per variable for the binned estimator");
    sub->add_option("--estimator", o.estimator, "exact-discrete, binned-plugin or kl-upper-bound");
    sub->add_flag("--require-rdnet", o.require_rdnet, "Exit 4 when the disentanglement check fails");
    sub->add_option("--out-dir", o.out_dir, "Write outputs here instead of stdout");
    sub->add_option("--log-level", o.verbosity, "debug, info, warn, error or off");
  };

  std::string topo, dataset;
  std::vector<std::string> topos;

  auto* layers = app.add_subcommand("layers", "Print the layering of a topology");
  layers->add_option("topology", topo, "Topology JSON")->required();
  layers->add_option("--out-dir", o.out_dir, "Write layers.json here instead of stdout");

  auto* report = app.add_subcommand("report", "Evaluate every redundancy and objective term");
  report->add_option("topology", topo, "Topology JSON")->required();
  report->add_option("dataset", dataset, "Dataset manifest")->required();
  add_common(report);

  auto* check = app.add_subcommand("check", "Run the disentanglement check only");
  check->add_option("topology", topo, "Topology JSON")->required();
  check->add_option("dataset", dataset, "Dataset manifest")->required();
  add_common(check);

  auto* merge = app.add_subcommand("merge", "Merge networks into a disentangled topology");
  merge->add_option("topologies", topos, "Two or more topology files")->required()->expected(2, -1);
  merge->add_option("--dataset", dataset, "Dataset manifest covering every network")->required();
  merge->add_option("--alpha", o.alpha, "MI threshold in bits");
  merge->add_option("--seed", o.seed, "Seed for new-edge initialization");
  add_common(merge);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInputError;
  }

  try {
    if (o.verbosity == "debug")
      rdnet::log::set_level(rdnet::log::Level::debug);
    else if (o.verbosity == "info")
      rdnet::log::set_level(rdnet::log::Level::info);
    else if (o.verbosity == "error")
      rdnet::log::set_level(rdnet::log::Level::error);
    else if (o.verbosity == "off")
      rdnet::log::set_level(rdnet::log::Level::off);
    else
      rdnet::log::set_level(rdnet::log::Level::warn);

    if (layers->parsed()) return cmd_layers(o, topo);
    if (report->parsed()) return cmd_report(o, topo, dataset, false);
    if (check->parsed()) return cmd_report(o, topo, dataset, true);
    if (merge->parsed()) return cmd_merge(o, topos, dataset);
  } catch (const StructuralError& e) {
    std::cerr << "structural error: " << e.what() << "\n";
    return kStructuralError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
