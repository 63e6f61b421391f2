#pragma once

#include <algorithm>
#include <compare>
#include <initializer_list>
#include <ostream>
#include <set>
#include <string>
#include <vector>

namespace rdnet {

/// Provenance-stable identity of a neuron: originating network, the layer it
/// had there, and its index within that layer. Ordering is lexicographic over
/// (network, layer_hint, index) and doubles as the deterministic tie-break.
struct VertexId {
  std::string network;
  int layer_hint = 0;
  int index = 0;

  friend auto operator<=>(const VertexId&, const VertexId&) = default;
  friend bool operator==(const VertexId&, const VertexId&) = default;

  std::string str() const {
    return network + ":" + std::to_string(layer_hint) + ":" + std::to_string(index);
  }
};

inline std::ostream& operator<<(std::ostream& os, const VertexId& id) { return os << id.str(); }

enum class VertexKind { source, internal, sink };

inline const char* to_string(VertexKind k) {
  switch (k) {
    case VertexKind::source:
      return "source";
    case VertexKind::internal:
      return "internal";
    case VertexKind::sink:
      return "sink";
  }
  return "?";
}

struct Vertex {
  VertexId id;
  VertexKind kind = VertexKind::internal;
  std::string task;  // sinks only
};

/// A nonempty-or-empty set of task names, kept sorted and unique. Used for the
/// subset-exclusive blocks T'^tau of a partition.
class TaskSet {
 public:
  TaskSet() = default;
  TaskSet(std::initializer_list<std::string> tasks) : tasks_(tasks) { normalize(); }
  explicit TaskSet(std::vector<std::string> tasks) : tasks_(std::move(tasks)) { normalize(); }

  const std::vector<std::string>& tasks() const& { return tasks_; }
  std::vector<std::string> tasks() && { return std::move(tasks_); }
  std::size_t size() const { return tasks_.size(); }
  bool empty() const { return tasks_.empty(); }
  bool contains(const std::string& t) const { return std::binary_search(tasks_.begin(), tasks_.end(), t); }

  bool subset_of(const TaskSet& other) const {
    return std::includes(other.tasks_.begin(), other.tasks_.end(), tasks_.begin(), tasks_.end());
  }
  bool disjoint_with(const TaskSet& other) const {
    for (const auto& t : tasks_)
      if (other.contains(t)) return false;
    return true;
  }

  TaskSet united(const TaskSet& other) const {
    std::vector<std::string> out(tasks_);
    out.insert(out.end(), other.tasks_.begin(), other.tasks_.end());
    return TaskSet(std::move(out));
  }
  TaskSet minus(const TaskSet& other) const {
    std::vector<std::string> out;
    for (const auto& t : tasks_)
      if (!other.contains(t)) out.push_back(t);
    return TaskSet(std::move(out));
  }

  std::string str() const {
    std::string s = "{";
    for (std::size_t i = 0; i < tasks_.size(); ++i) {
      if (i) s += ",";
      s += tasks_[i];
    }
    return s + "}";
  }

  friend auto operator<=>(const TaskSet&, const TaskSet&) = default;
  friend bool operator==(const TaskSet&, const TaskSet&) = default;

 private:
  void normalize() {
    std::sort(tasks_.begin(), tasks_.end());
    tasks_.erase(std::unique(tasks_.begin(), tasks_.end()), tasks_.end());
  }

  std::vector<std::string> tasks_;
};

/// All nonempty subsets of `all`, ordered by size then lexicographically.
inline std::vector<TaskSet> nonempty_subsets(const TaskSet& all) {
  const auto& t = all.tasks();
  std::vector<TaskSet> out;
  const std::size_t n = t.size();
  for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
    std::vector<std::string> members;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (std::size_t{1} << i)) members.push_back(t[i]);
    out.emplace_back(std::move(members));
  }
  std::stable_sort(out.begin(), out.end(), [](const TaskSet& a, const TaskSet& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  return out;
}

using VertexSet = std::set<VertexId>;

}  // namespace rdnet
