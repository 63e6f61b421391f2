#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "rdnet/errors.hpp"
#include "rdnet/info/dataset.hpp"
#include "rdnet/log.hpp"

namespace rdnet::info {

/// Discretizes one column into codes 0..bins-1.
///
/// A column with at most `bins` distinct values is treated as categorical and
/// coded by value rank, so discrete data passes through unchanged up to
/// relabelling. Otherwise the upper edge of bin k is the order statistic at
/// position ceil((k+1) n / bins) - 1, and a value equal to an edge lands in the
/// lower bin. Sets `*constant` when the column takes a single value.
inline std::vector<std::int32_t> quantile_codes(std::span<const double> column, int bins, bool* constant = nullptr) {
  if (bins < 2) throw ArgumentError("bins must be >= 2");
  std::vector<double> sorted(column.begin(), column.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> distinct = sorted;
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (constant) *constant = distinct.size() <= 1;

  std::vector<std::int32_t> codes(column.size());
  if (distinct.size() <= static_cast<std::size_t>(bins)) {
    for (std::size_t r = 0; r < column.size(); ++r)
      codes[r] = static_cast<std::int32_t>(std::lower_bound(distinct.begin(), distinct.end(), column[r]) -
                                           distinct.begin());
    return codes;
  }

  const std::size_t n = sorted.size();
  std::vector<double> edges;
  edges.reserve(static_cast<std::size_t>(bins) - 1);
  for (int k = 0; k + 1 < bins; ++k) {
    std::size_t pos = (static_cast<std::size_t>(k + 1) * n + static_cast<std::size_t>(bins) - 1) /
                          static_cast<std::size_t>(bins) -
                      1;
    edges.push_back(sorted[pos]);
  }
  for (std::size_t r = 0; r < column.size(); ++r)
    codes[r] = static_cast<std::int32_t>(std::lower_bound(edges.begin(), edges.end(), column[r]) - edges.begin());
  return codes;
}

/// Returns a copy of `data` with each selected neuron column replaced by its
/// quantile bin index. Label columns are left untouched.
inline ActivationDataset quantile_bin(const ActivationDataset& data, const VarSet& vars, int bins) {
  if (bins < 2) throw ArgumentError("bins must be >= 2");
  ActivationDataset out = data;
  for (const auto& v : vars) {
    if (v.is_label()) continue;
    const auto& col = data.neuron(v.vertex);
    bool constant = false;
    auto codes = quantile_codes(col, bins, &constant);
    if (constant) log::warn("column " + v.str() + " is constant; all samples fall in bin 0");
    out.replace_neuron(v.vertex, std::vector<double>(codes.begin(), codes.end()));
  }
  return out;
}

}  // namespace rdnet::info
