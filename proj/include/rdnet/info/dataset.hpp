#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "rdnet/errors.hpp"
#include "rdnet/info/var.hpp"

namespace rdnet::info {

/// Per-sample neuron outputs (columns keyed by VertexId) plus one discrete
/// label column per task. Columns are stored column-major.
class ActivationDataset {
 public:
  ActivationDataset() = default;
  explicit ActivationDataset(std::size_t sample_count) : n_(sample_count) {}

  std::size_t sample_count() const { return n_; }

  void add_neuron(const VertexId& id, std::vector<double> values) {
    check_length(values.size(), id.str());
    for (double v : values)
      if (!std::isfinite(v)) throw DataError("column " + id.str() + " holds a missing or non-finite value");
    if (!neurons_.emplace(id, std::move(values)).second) throw DataError("duplicate column " + id.str());
  }

  void add_label(const std::string& task, std::vector<std::int32_t> values) {
    check_length(values.size(), "label:" + task);
    std::set<std::int32_t> alphabet(values.begin(), values.end());
    if (alphabet.size() < 2) throw DataError("label column '" + task + "' needs at least two distinct values");
    if (!labels_.emplace(task, std::move(values)).second) throw DataError("duplicate label column " + task);
  }

  /// Replaces an existing neuron column in place (used by quantile_bin).
  void replace_neuron(const VertexId& id, std::vector<double> values) {
    check_length(values.size(), id.str());
    neurons_.at(id) = std::move(values);
  }

  bool has(const Var& v) const { return v.is_label() ? labels_.count(v.task) != 0 : neurons_.count(v.vertex) != 0; }
  bool has_neuron(const VertexId& id) const { return neurons_.count(id) != 0; }
  bool has_label(const std::string& task) const { return labels_.count(task) != 0; }

  const std::vector<double>& neuron(const VertexId& id) const {
    auto it = neurons_.find(id);
    if (it == neurons_.end()) throw LookupError("dataset has no column " + id.str());
    return it->second;
  }

  const std::vector<std::int32_t>& label(const std::string& task) const {
    auto it = labels_.find(task);
    if (it == labels_.end()) throw LookupError("dataset has no label column for task '" + task + "'");
    return it->second;
  }

  const std::map<VertexId, std::vector<double>>& neuron_columns() const { return neurons_; }
  const std::map<std::string, std::vector<std::int32_t>>& label_columns() const { return labels_; }

  VarSet variables() const {
    VarSet out;
    for (const auto& [id, c] : neurons_) out.insert(Var::neuron(id));
    for (const auto& [t, c] : labels_) out.insert(Var::label(t));
    return out;
  }

  /// Variables of `wanted` that have no column here.
  VarSet missing(const VarSet& wanted) const {
    VarSet out;
    for (const auto& v : wanted)
      if (!has(v)) out.insert(v);
    return out;
  }

  /// True when every neuron column is integer-valued with at most
  /// `max_alphabet` distinct values.
  bool is_discrete(std::size_t max_alphabet) const {
    for (const auto& [id, col] : neurons_) {
      std::set<double> distinct;
      for (double v : col) {
        if (v != std::floor(v)) return false;
        distinct.insert(v);
        if (distinct.size() > max_alphabet) return false;
      }
    }
    return true;
  }

 private:
  void check_length(std::size_t len, const std::string& name) {
    if (neurons_.empty() && labels_.empty() && n_ == 0) n_ = len;
    if (len != n_)
      throw DataError("column " + name + " has " + std::to_string(len) + " samples, expected " + std::to_string(n_));
  }

  std::size_t n_ = 0;
  std::map<VertexId, std::vector<double>> neurons_;
  std::map<std::string, std::vector<std::int32_t>> labels_;
};

}  // namespace rdnet::info
