#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "rdnet/errors.hpp"
#include "rdnet/info/config.hpp"
#include "rdnet/info/var.hpp"

namespace rdnet::info {

/// Exact probability mass function over a few finite-alphabet variables,
/// stored densely in mixed radix with the last variable varying fastest.
class DiscreteJoint {
 public:
  using Outcome = std::vector<int>;

  DiscreteJoint(std::vector<Var> vars, std::vector<int> alphabets, std::vector<double> table)
      : vars_(std::move(vars)), alphabets_(std::move(alphabets)), table_(std::move(table)) {
    if (vars_.size() != alphabets_.size()) throw ArgumentError("one alphabet size per variable required");
    if (VarSet(vars_.begin(), vars_.end()).size() != vars_.size())
      throw ArgumentError("duplicate variable in joint distribution");
    std::uint64_t cells = 1;
    for (int a : alphabets_) {
      if (a < 1) throw ArgumentError("alphabet sizes must be positive");
      cells *= static_cast<std::uint64_t>(a);
      if (cells > kMaxExactAlphabet) throw EstimationError("joint alphabet exceeds 2^24 outcomes");
    }
    if (table_.size() != cells) throw ArgumentError("probability table has the wrong size");
    double total = 0.0;
    for (double p : table_) {
      if (!(p >= 0.0)) throw ArgumentError("probabilities must be nonnegative");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) throw ArgumentError("probabilities must sum to 1");
  }

  /// Builds the joint by evaluating `mass` on every outcome.
  static DiscreteJoint from_function(std::vector<Var> vars, std::vector<int> alphabets,
                                     const std::function<double(const Outcome&)>& mass) {
    std::uint64_t cells = 1;
    for (int a : alphabets) cells *= static_cast<std::uint64_t>(a);
    if (cells > kMaxExactAlphabet) throw EstimationError("joint alphabet exceeds 2^24 outcomes");
    std::vector<double> table(cells);
    Outcome o(alphabets.size(), 0);
    for (std::uint64_t i = 0; i < cells; ++i) {
      table[i] = mass(o);
      advance(o, alphabets);
    }
    return DiscreteJoint(std::move(vars), std::move(alphabets), std::move(table));
  }

  const std::vector<Var>& variables() const { return vars_; }
  const std::vector<int>& alphabets() const { return alphabets_; }
  const std::vector<double>& table() const { return table_; }
  std::size_t size() const { return table_.size(); }

  bool has(const Var& v) const { return position(v) >= 0; }

  Outcome outcome(std::size_t index) const {
    Outcome o(vars_.size());
    for (std::size_t k = vars_.size(); k-- > 0;) {
      o[k] = static_cast<int>(index % static_cast<std::size_t>(alphabets_[k]));
      index /= static_cast<std::size_t>(alphabets_[k]);
    }
    return o;
  }

  double probability(const Outcome& o) const {
    std::size_t index = 0;
    for (std::size_t k = 0; k < vars_.size(); ++k) index = index * static_cast<std::size_t>(alphabets_[k]) + o[k];
    return table_.at(index);
  }

  /// Sums out every variable not in `keep`; variable order follows this joint.
  DiscreteJoint marginalize(const VarSet& keep) const {
    std::vector<int> pos;
    std::vector<Var> vars;
    std::vector<int> alph;
    for (const auto& v : keep) {
      int p = position(v);
      if (p < 0) throw LookupError("variable " + v.str() + " not in joint");
    }
    for (std::size_t k = 0; k < vars_.size(); ++k)
      if (keep.count(vars_[k])) {
        pos.push_back(static_cast<int>(k));
        vars.push_back(vars_[k]);
        alph.push_back(alphabets_[k]);
      }
    std::size_t cells = 1;
    for (int a : alph) cells *= static_cast<std::size_t>(a);
    std::vector<double> table(cells, 0.0);
    Outcome o(vars_.size(), 0);
    for (double p : table_) {
      std::size_t index = 0;
      for (std::size_t j = 0; j < pos.size(); ++j)
        index = index * static_cast<std::size_t>(alph[j]) + static_cast<std::size_t>(o[pos[j]]);
      table[index] += p;
      advance(o, alphabets_);
    }
    // Summation can drift by a few ulps; renormalize so the result validates.
    double total = 0.0;
    for (double p : table) total += p;
    for (double& p : table) p /= total;
    return DiscreteJoint(std::move(vars), std::move(alph), std::move(table));
  }

  /// Shannon entropy in nats of the marginal over `vars` (empty set -> 0).
  double entropy_nats(const VarSet& vars) const {
    if (vars.empty()) return 0.0;
    const DiscreteJoint m = marginalize(vars);
    double h = 0.0;
    for (double p : m.table())
      if (p > 0.0) h -= p * std::log(p);
    return h;
  }

 private:
  static void advance(Outcome& o, const std::vector<int>& alphabets) {
    for (std::size_t k = o.size(); k-- > 0;) {
      if (++o[k] < alphabets[k]) return;
      o[k] = 0;
    }
  }

  int position(const Var& v) const {
    for (std::size_t k = 0; k < vars_.size(); ++k)
      if (vars_[k] == v) return static_cast<int>(k);
    return -1;
  }

  std::vector<Var> vars_;
  std::vector<int> alphabets_;
  std::vector<double> table_;
};

}  // namespace rdnet::info
