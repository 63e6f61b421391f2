#pragma once

#include <compare>
#include <set>
#include <string>

#include "rdnet/vertex.hpp"

namespace rdnet::info {

/// A random variable the estimators can see: either one neuron's output column
/// or one task's label column.
struct Var {
  enum class Kind { neuron, label };

  Kind kind = Kind::neuron;
  VertexId vertex;
  std::string task;

  static Var neuron(VertexId id) { return Var{Kind::neuron, std::move(id), {}}; }
  static Var label(std::string task) { return Var{Kind::label, {}, std::move(task)}; }

  bool is_label() const { return kind == Kind::label; }

  std::string str() const { return is_label() ? "label:" + task : vertex.str(); }

  friend auto operator<=>(const Var&, const Var&) = default;
  friend bool operator==(const Var&, const Var&) = default;
};

using VarSet = std::set<Var>;

inline VarSet neurons(const VertexSet& vs) {
  VarSet out;
  for (const auto& v : vs) out.insert(Var::neuron(v));
  return out;
}

inline VarSet labels(const TaskSet& tasks) {
  VarSet out;
  for (const auto& t : tasks.tasks()) out.insert(Var::label(t));
  return out;
}

inline VarSet label(const std::string& task) { return VarSet{Var::label(task)}; }

inline VarSet set_union(const VarSet& a, const VarSet& b) {
  VarSet out = a;
  out.insert(b.begin(), b.end());
  return out;
}

inline VarSet set_intersection(const VarSet& a, const VarSet& b) {
  VarSet out;
  for (const auto& v : a)
    if (b.count(v)) out.insert(v);
  return out;
}

inline bool disjoint(const VarSet& a, const VarSet& b) {
  for (const auto& v : a)
    if (b.count(v)) return false;
  return true;
}

inline std::string to_string(const VarSet& vs) {
  std::string s = "{";
  bool first = true;
  for (const auto& v : vs) {
    if (!first) s += ", ";
    s += v.str();
    first = false;
  }
  return s + "}";
}

}  // namespace rdnet::info
