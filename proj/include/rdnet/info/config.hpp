#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "rdnet/errors.hpp"

namespace rdnet::info {

enum class Backend { exact_discrete, binned_plugin, kl_upper_bound };
enum class CovarianceMode { diagonal, full };
enum class LogBase { two, e };

/// Largest joint alphabet the exact backend will enumerate.
inline constexpr std::uint64_t kMaxExactAlphabet = std::uint64_t{1} << 24;

struct EstimatorConfig {
  Backend backend = Backend::binned_plugin;
  int bins = 30;
  LogBase log_base = LogBase::two;
  CovarianceMode covariance_mode = CovarianceMode::diagonal;
  double regularizer = 1e-6;

  void validate() const {
    if (bins < 2) throw ArgumentError("bins must be >= 2, got " + std::to_string(bins));
    if (backend == Backend::kl_upper_bound && !(regularizer > 0.0))
      throw ArgumentError("the KL backend needs a positive covariance regularizer");
  }

  /// Multiplier converting nats into the configured unit.
  double unit_scale() const { return log_base == LogBase::two ? 1.0 / std::log(2.0) : 1.0; }
};

inline const char* to_string(Backend b) {
  switch (b) {
    case Backend::exact_discrete:
      return "exact-discrete";
    case Backend::binned_plugin:
      return "binned-plugin";
    case Backend::kl_upper_bound:
      return "kl-upper-bound";
  }
  return "?";
}

inline Backend parse_backend(const std::string& s) {
  if (s == "exact-discrete" || s == "exact") return Backend::exact_discrete;
  if (s == "binned-plugin" || s == "binned") return Backend::binned_plugin;
  if (s == "kl-upper-bound" || s == "kl") return Backend::kl_upper_bound;
  throw ArgumentError("unknown estimator backend '" + s + "'");
}

inline const char* to_string(CovarianceMode m) { return m == CovarianceMode::full ? "full" : "diagonal"; }

inline CovarianceMode parse_covariance_mode(const std::string& s) {
  if (s == "diagonal") return CovarianceMode::diagonal;
  if (s == "full") return CovarianceMode::full;
  throw ArgumentError("unknown covariance mode '" + s + "'");
}

}  // namespace rdnet::info
