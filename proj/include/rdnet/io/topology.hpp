#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "rdnet/errors.hpp"
#include "rdnet/graph.hpp"

namespace rdnet::io {

using nlohmann::json;

inline constexpr int kFormatVersion = 1;

/// Vertex ids serialize as ["network", layer_hint, index].
inline json to_json(const VertexId& id) { return json::array({id.network, id.layer_hint, id.index}); }

inline VertexId vertex_id_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3 || !j[0].is_string() || !j[1].is_number_integer() || !j[2].is_number_integer())
    throw ParseError("vertex id must be [network, layer, index], got " + j.dump());
  return VertexId{j[0].get<std::string>(), j[1].get<int>(), j[2].get<int>()};
}

/// Shortest decimal that reads back as the same float, stored as a JSON number.
inline json float_to_json(float w) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, w);
  return json::parse(std::string(buf, res.ptr));
}

inline float float_from_json(const json& j) {
  if (!j.is_number()) throw ParseError("edge weight must be a number, got " + j.dump());
  return static_cast<float>(j.get<double>());
}

struct NetworkInfo {
  std::string name;
  std::vector<std::string> tasks;
};

inline json topology_to_json(const NeuralGraph& g, std::vector<NetworkInfo> networks = {}) {
  if (networks.empty()) {
    std::map<std::string, std::vector<std::string>> by_net;
    for (const auto& v : g.vertices())
      if (v.kind == VertexKind::sink) by_net[v.id.network].push_back(v.task);
    for (auto& [name, tasks] : by_net) networks.push_back(NetworkInfo{name, tasks});
  }
  json nets = json::array();
  for (const auto& n : networks) nets.push_back({{"name", n.name}, {"tasks", n.tasks}});
  json vertices = json::array();
  for (const auto& v : g.vertices()) {
    json jv = {{"id", to_json(v.id)}, {"kind", to_string(v.kind)}};
    if (v.kind == VertexKind::sink) jv["task"] = v.task;
    vertices.push_back(std::move(jv));
  }
  json edges = json::array();
  for (const auto& e : g.edges())
    edges.push_back({{"from", to_json(e.from)}, {"to", to_json(e.to)}, {"weight", float_to_json(e.weight)}});
  return json{{"format_version", kFormatVersion}, {"networks", nets}, {"vertices", vertices}, {"edges", edges}};
}

/// Parses and validates a topology document. Throws ParseError for malformed
/// documents and StructuralError for graphs that break the DAG invariants.
inline NeuralGraph topology_from_json(const json& doc) {
  if (!doc.is_object()) throw ParseError("topology must be a JSON object");
  if (!doc.contains("format_version") || doc["format_version"] != kFormatVersion)
    throw ParseError("unsupported or missing format_version");
  if (!doc.contains("vertices") || !doc["vertices"].is_array()) throw ParseError("topology lacks a vertices array");
  if (!doc.contains("edges") || !doc["edges"].is_array()) throw ParseError("topology lacks an edges array");

  NeuralGraph g;
  try {
    for (const auto& jv : doc["vertices"]) {
      const VertexId id = vertex_id_from_json(jv.at("id"));
      const std::string kind = jv.at("kind").get<std::string>();
      if (kind == "source")
        g.add_source(id);
      else if (kind == "internal")
        g.add_internal(id);
      else if (kind == "sink")
        g.add_sink(id, jv.at("task").get<std::string>());
      else
        throw ParseError("unknown vertex kind '" + kind + "'");
    }
    for (const auto& je : doc["edges"]) {
      const VertexId from = vertex_id_from_json(je.at("from"));
      const VertexId to = vertex_id_from_json(je.at("to"));
      if (!g.contains(from) || !g.contains(to))
        throw ParseError("edge " + from.str() + " -> " + to.str() + " references an undeclared vertex");
      g.add_edge(from, to, float_from_json(je.at("weight")));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed topology: ") + e.what());
  } catch (const ArgumentError& e) {
    throw ParseError(e.what());
  }

  if (doc.contains("networks")) {
    const TaskSet declared = [&] {
      std::vector<std::string> t;
      for (const auto& n : doc["networks"])
        for (const auto& task : n.value("tasks", json::array())) t.push_back(task.get<std::string>());
      return TaskSet(std::move(t));
    }();
    if (!declared.empty() && declared != g.tasks())
      throw ParseError("declared tasks " + declared.str() + " do not match sink tasks " + g.tasks().str());
  }
  g.validate();
  return g;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json read_json(const std::filesystem::path& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

/// Writes to a temporary sibling and renames over the target.
inline void write_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out << contents;
    if (!out) throw DataError("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline NeuralGraph load_topology(const std::filesystem::path& path) { return topology_from_json(read_json(path)); }

inline void save_topology(const std::filesystem::path& path, const NeuralGraph& g) {
  write_atomic(path, topology_to_json(g).dump(2) + "\n");
}

}  // namespace rdnet::io
