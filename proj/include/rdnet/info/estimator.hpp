#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <variant>
#include <vector>

#include "rdnet/errors.hpp"
#include "rdnet/info/binning.hpp"
#include "rdnet/info/config.hpp"
#include "rdnet/info/dataset.hpp"
#include "rdnet/info/discrete_joint.hpp"
#include "rdnet/info/kl_bound.hpp"
#include "rdnet/info/var.hpp"
#include "rdnet/log.hpp"

namespace rdnet::info {

namespace detail {

/// Equal-weight sample table of integer codes, one column per variable.
struct CodedTable {
  std::size_t rows = 0;
  std::map<Var, std::vector<std::int32_t>> columns;
  std::map<Var, std::uint64_t> alphabet;

  const std::vector<std::int32_t>& column(const Var& v) const {
    auto it = columns.find(v);
    if (it == columns.end()) throw LookupError("unknown variable " + v.str());
    return it->second;
  }

  double entropy_nats(const VarSet& vars, bool enforce_exact_limit) const {
    if (vars.empty()) return 0.0;
    std::vector<const std::vector<std::int32_t>*> cols;
    std::vector<std::uint64_t> radix;
    bool fits = true;
    std::uint64_t product = 1;
    for (const auto& v : vars) {
      cols.push_back(&column(v));
      const std::uint64_t a = alphabet.at(v);
      radix.push_back(a);
      if (fits && product > (std::uint64_t{1} << 62) / a) fits = false;
      product = fits ? product * a : product;
    }
    if (enforce_exact_limit && (!fits || product > kMaxExactAlphabet))
      throw EstimationError("exact backend: joint alphabet of " + to_string(vars) + " exceeds 2^24 outcomes");

    std::vector<std::size_t> run_lengths;
    if (fits) {
      std::vector<std::uint64_t> keys(rows, 0);
      for (std::size_t c = 0; c < cols.size(); ++c) {
        const auto& col = *cols[c];
        for (std::size_t r = 0; r < rows; ++r) keys[r] = keys[r] * radix[c] + static_cast<std::uint64_t>(col[r]);
      }
      std::sort(keys.begin(), keys.end());
      for (std::size_t r = 0; r < rows;) {
        std::size_t s = r;
        while (r < rows && keys[r] == keys[s]) ++r;
        run_lengths.push_back(r - s);
      }
    } else {
      std::vector<std::vector<std::int32_t>> keys(rows);
      for (std::size_t r = 0; r < rows; ++r) {
        keys[r].reserve(cols.size());
        for (const auto* col : cols) keys[r].push_back((*col)[r]);
      }
      std::sort(keys.begin(), keys.end());
      for (std::size_t r = 0; r < rows;) {
        std::size_t s = r;
        while (r < rows && keys[r] == keys[s]) ++r;
        run_lengths.push_back(r - s);
      }
    }
    const double n = static_cast<double>(rows);
    double h = 0.0;
    for (auto count : run_lengths) {
      const double p = static_cast<double>(count) / n;
      h -= p * std::log(p);
    }
    return h;
  }
};

inline std::vector<std::int32_t> rank_codes(const std::vector<double>& col) {
  std::vector<double> distinct(col);
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::vector<std::int32_t> codes(col.size());
  for (std::size_t r = 0; r < col.size(); ++r)
    codes[r] = static_cast<std::int32_t>(std::lower_bound(distinct.begin(), distinct.end(), col[r]) - distinct.begin());
  return codes;
}

inline std::vector<std::int32_t> rank_codes(const std::vector<std::int32_t>& col) {
  std::vector<std::int32_t> distinct(col);
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::vector<std::int32_t> codes(col.size());
  for (std::size_t r = 0; r < col.size(); ++r)
    codes[r] = static_cast<std::int32_t>(std::lower_bound(distinct.begin(), distinct.end(), col[r]) - distinct.begin());
  return codes;
}

inline std::uint64_t alphabet_of(const std::vector<std::int32_t>& codes) {
  std::int32_t mx = 0;
  for (auto c : codes) mx = std::max(mx, c);
  return codes.empty() ? 1 : static_cast<std::uint64_t>(mx) + 1;
}

inline double clamp_nonneg(double x) { return x < 0.0 ? 0.0 : x; }

}  // namespace detail

/// Entropy-based information measures over one source under one backend.
///
/// Exact-discrete treats every distinct value as a symbol and weights samples
/// equally (a DiscreteJoint source is used as-is). Binned-plugin quantile-bins
/// each neuron column once at construction. The KL backend answers
/// neuron-set vs label-set mutual information with the pairwise-KL Gaussian
/// bound and everything else with the binned plug-in route.
///
/// Immutable after construction; every query is const and thread-safe.
class Estimator {
 public:
  explicit Estimator(const DiscreteJoint& joint, EstimatorConfig cfg = {}) : cfg_(cfg), joint_(&joint) {
    cfg_.validate();
  }

  explicit Estimator(const ActivationDataset& data, EstimatorConfig cfg = {}) : cfg_(cfg), data_(&data) {
    cfg_.validate();
    table_.rows = data.sample_count();
    const bool exact = cfg_.backend == Backend::exact_discrete;
    for (const auto& [id, col] : data.neuron_columns()) {
      Var v = Var::neuron(id);
      std::vector<std::int32_t> codes;
      if (exact) {
        codes = detail::rank_codes(col);
      } else {
        bool constant = false;
        codes = quantile_codes(col, cfg_.bins, &constant);
        if (constant) log::debug("column " + v.str() + " is constant; all samples fall in bin 0");
      }
      table_.alphabet[v] = detail::alphabet_of(codes);
      table_.columns.emplace(v, std::move(codes));
    }
    for (const auto& [task, col] : data.label_columns()) {
      Var v = Var::label(task);
      auto codes = detail::rank_codes(col);
      table_.alphabet[v] = detail::alphabet_of(codes);
      table_.columns.emplace(v, std::move(codes));
    }
  }

  const EstimatorConfig& config() const { return cfg_; }

  bool has(const Var& v) const { return joint_ ? joint_->has(v) : data_->has(v); }

  /// H(vars) with no argument checks beyond variable lookup; empty set -> 0.
  double joint_entropy(const VarSet& vars) const {
    for (const auto& v : vars)
      if (!has(v)) throw LookupError("unknown variable " + v.str());
    double nats;
    if (joint_) {
      nats = joint_->entropy_nats(vars);
    } else {
      if (!vars.empty() && data_->sample_count() < 2) throw EstimationError("degenerate dataset: fewer than 2 samples");
      nats = table_.entropy_nats(vars, cfg_.backend == Backend::exact_discrete);
    }
    return nats * cfg_.unit_scale();
  }

  double entropy(const VarSet& vars) const {
    if (vars.empty()) throw ArgumentError("entropy of an empty variable set");
    return detail::clamp_nonneg(joint_entropy(vars));
  }

  double mutual_info(const VarSet& a, const VarSet& b) const {
    require_nonempty(a, "mutual_info");
    require_nonempty(b, "mutual_info");
    if (!disjoint(a, b)) throw ArgumentError("mutual_info: overlapping variable sets");
    if (uses_kl_bound(a, b)) return kl_mi(a, b);
    return detail::clamp_nonneg(entropic_mi(a, b, {}));
  }

  double conditional_mi(const VarSet& a, const VarSet& b, const VarSet& cond) const {
    require_nonempty(a, "conditional_mi");
    require_nonempty(b, "conditional_mi");
    if (!disjoint(a, b) || !disjoint(a, cond) || !disjoint(b, cond))
      throw ArgumentError("conditional_mi: overlapping variable sets");
    if (cond.empty()) return mutual_info(a, b);
    return detail::clamp_nonneg(entropic_mi(a, b, cond));
  }

  /// n-way co-information via I(S1;..;Sn) = I(S1;..;Sn-1) - I(S1;..;Sn-1 | Sn).
  /// Never clamped; negative values signal synergy.
  double co_information(const std::vector<VarSet>& sets) const {
    if (sets.size() < 2) throw ArgumentError("co_information needs at least two sets");
    for (std::size_t i = 0; i < sets.size(); ++i) {
      require_nonempty(sets[i], "co_information");
      for (std::size_t j = i + 1; j < sets.size(); ++j)
        if (!disjoint(sets[i], sets[j])) throw ArgumentError("co_information: overlapping variable sets");
    }
    return co_information_entropic(sets, {});
  }

  /// Same recursion without disjointness checks, conditioned on `cond`. With
  /// overlapping arguments the entropic expansion is still well defined, which
  /// is what the join rule for redundancy needs.
  double co_information_entropic(const std::vector<VarSet>& sets, const VarSet& cond) const {
    if (sets.size() < 2) throw ArgumentError("co_information needs at least two sets");
    if (sets.size() == 2) return entropic_mi(sets[0], sets[1], cond);
    std::vector<VarSet> head(sets.begin(), sets.end() - 1);
    return co_information_entropic(head, cond) - co_information_entropic(head, set_union(cond, sets.back()));
  }

  double total_correlation(const VarSet& vars) const {
    require_nonempty(vars, "total_correlation");
    double sum = 0.0;
    for (const auto& v : vars) sum += joint_entropy(VarSet{v});
    return detail::clamp_nonneg(sum - joint_entropy(vars));
  }

  /// I(a; b | cond) = H(a,c) + H(b,c) - H(a,b,c) - H(c), unclamped.
  double entropic_mi(const VarSet& a, const VarSet& b, const VarSet& cond) const {
    const VarSet ac = set_union(a, cond);
    const VarSet bc = set_union(b, cond);
    const VarSet abc = set_union(ac, b);
    return joint_entropy(ac) + joint_entropy(bc) - joint_entropy(abc) - joint_entropy(cond);
  }

 private:
  static void require_nonempty(const VarSet& s, const char* op) {
    if (s.empty()) throw ArgumentError(std::string(op) + ": empty variable set");
  }

  static bool all_labels(const VarSet& s) {
    return std::all_of(s.begin(), s.end(), [](const Var& v) { return v.is_label(); });
  }
  static bool no_labels(const VarSet& s) {
    return std::none_of(s.begin(), s.end(), [](const Var& v) { return v.is_label(); });
  }

  bool uses_kl_bound(const VarSet& a, const VarSet& b) const {
    if (cfg_.backend != Backend::kl_upper_bound || !data_) return false;
    return (no_labels(a) && all_labels(b)) || (all_labels(a) && no_labels(b));
  }

  double kl_mi(const VarSet& a, const VarSet& b) const {
    for (const auto& v : set_union(a, b))
      if (!has(v)) throw LookupError("unknown variable " + v.str());
    return all_labels(b) ? kl_upper_bound_mi(a, b, *data_, cfg_) : kl_upper_bound_mi(b, a, *data_, cfg_);
  }

  EstimatorConfig cfg_;
  const DiscreteJoint* joint_ = nullptr;
  const ActivationDataset* data_ = nullptr;
  detail::CodedTable table_;
};

// Free-function forms; each builds a throwaway Estimator. Hold an Estimator
// directly when issuing many queries against the same source.

template <class Source>
double entropy(const VarSet& vars, const Source& source, const EstimatorConfig& cfg = {}) {
  return Estimator(source, cfg).entropy(vars);
}

template <class Source>
double mutual_info(const VarSet& a, const VarSet& b, const Source& source, const EstimatorConfig& cfg = {}) {
  return Estimator(source, cfg).mutual_info(a, b);
}

template <class Source>
double conditional_mi(const VarSet& a, const VarSet& b, const VarSet& cond, const Source& source,
                      const EstimatorConfig& cfg = {}) {
  return Estimator(source, cfg).conditional_mi(a, b, cond);
}

template <class Source>
double co_information(const std::vector<VarSet>& sets, const Source& source, const EstimatorConfig& cfg = {}) {
  return Estimator(source, cfg).co_information(sets);
}

template <class Source>
double total_correlation(const VarSet& vars, const Source& source, const EstimatorConfig& cfg = {}) {
  return Estimator(source, cfg).total_correlation(vars);
}

}  // namespace rdnet::info
