#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "rdnet/errors.hpp"
#include "rdnet/info/config.hpp"
#include "rdnet/info/dataset.hpp"

namespace rdnet::info {

/// One weighted mixture component N(mean, cov).
struct GaussianComponent {
  double weight = 0.0;
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

/// KL(p || q) in nats between two Gaussians of equal dimension.
inline double gaussian_kl(const GaussianComponent& p, const GaussianComponent& q) {
  const auto d = p.mean.size();
  Eigen::LLT<Eigen::MatrixXd> lq(q.cov);
  Eigen::LLT<Eigen::MatrixXd> lp(p.cov);
  if (lq.info() != Eigen::Success || lp.info() != Eigen::Success)
    throw NumericalError("class covariance is singular after regularization");
  const Eigen::VectorXd diff = q.mean - p.mean;
  const double trace = lq.solve(p.cov).trace();
  const double mahalanobis = diff.dot(lq.solve(diff));
  const double logdet_q = 2.0 * lq.matrixLLT().diagonal().array().log().sum();
  const double logdet_p = 2.0 * lp.matrixLLT().diagonal().array().log().sum();
  return 0.5 * (trace + mahalanobis - static_cast<double>(d) + logdet_q - logdet_p);
}

/// Pairwise-distance upper bound on I(X; C) for a Gaussian mixture indexed by
/// C, in nats: -sum_c w_c log sum_c' w_c' exp(-KL(p_c || p_c')).
inline double pairwise_kl_bound(std::span<const GaussianComponent> comps) {
  double bound = 0.0;
  for (const auto& pc : comps) {
    double inner = 0.0;
    for (const auto& pd : comps) inner += pd.weight * std::exp(-gaussian_kl(pc, pd));
    bound -= pc.weight * std::log(inner);
  }
  return bound < 0.0 ? 0.0 : bound;
}

/// Fits one Gaussian per joint outcome of the label columns over the neuron
/// columns in `vars`.
inline std::vector<GaussianComponent> fit_class_gaussians(const VarSet& vars, const VarSet& label_vars,
                                                          const ActivationDataset& data, const EstimatorConfig& cfg) {
  if (vars.empty() || label_vars.empty()) throw ArgumentError("KL bound needs neuron and label variables");
  std::vector<const std::vector<double>*> cols;
  for (const auto& v : vars) {
    if (v.is_label()) throw ArgumentError("KL bound: " + v.str() + " is a label, expected a neuron");
    cols.push_back(&data.neuron(v.vertex));
  }
  std::vector<const std::vector<std::int32_t>*> labs;
  for (const auto& v : label_vars) {
    if (!v.is_label()) throw ArgumentError("KL bound: " + v.str() + " is not a label column");
    labs.push_back(&data.label(v.task));
  }

  const std::size_t n = data.sample_count();
  std::map<std::vector<std::int32_t>, std::vector<std::size_t>> classes;
  for (std::size_t r = 0; r < n; ++r) {
    std::vector<std::int32_t> key;
    key.reserve(labs.size());
    for (const auto* l : labs) key.push_back((*l)[r]);
    classes[key].push_back(r);
  }

  const auto d = static_cast<Eigen::Index>(cols.size());
  std::vector<GaussianComponent> comps;
  for (const auto& [key, rows] : classes) {
    if (rows.size() < 2) throw EstimationError("a label class has fewer than 2 samples");
    GaussianComponent g;
    g.weight = static_cast<double>(rows.size()) / static_cast<double>(n);
    g.mean = Eigen::VectorXd::Zero(d);
    for (auto r : rows)
      for (Eigen::Index j = 0; j < d; ++j) g.mean[j] += (*cols[static_cast<std::size_t>(j)])[r];
    g.mean /= static_cast<double>(rows.size());
    g.cov = Eigen::MatrixXd::Zero(d, d);
    Eigen::VectorXd x(d);
    for (auto r : rows) {
      for (Eigen::Index j = 0; j < d; ++j) x[j] = (*cols[static_cast<std::size_t>(j)])[r] - g.mean[j];
      if (cfg.covariance_mode == CovarianceMode::full)
        g.cov.noalias() += x * x.transpose();
      else
        g.cov.diagonal().array() += x.array().square();
    }
    g.cov /= static_cast<double>(rows.size() - 1);
    g.cov.diagonal().array() += cfg.regularizer;
    comps.push_back(std::move(g));
  }
  return comps;
}

/// KL-based mutual information upper bound between a neuron set and the joint
/// of the given label columns, in the configured unit.
inline double kl_upper_bound_mi(const VarSet& vars, const VarSet& label_vars, const ActivationDataset& data,
                                const EstimatorConfig& cfg) {
  cfg.validate();
  if (cfg.backend != Backend::kl_upper_bound) throw ArgumentError("kl_upper_bound_mi requires the kl-upper-bound backend");
  auto comps = fit_class_gaussians(vars, label_vars, data, cfg);
  return pairwise_kl_bound(comps) * cfg.unit_scale();
}

inline double kl_upper_bound_mi(const VarSet& vars, const std::string& task, const ActivationDataset& data,
                                const EstimatorConfig& cfg) {
  return kl_upper_bound_mi(vars, VarSet{Var::label(task)}, data, cfg);
}

}  // namespace rdnet::info
