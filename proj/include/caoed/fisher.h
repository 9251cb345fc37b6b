// Copyright 2026 The caoed Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CAOED_FISHER_H_
#define CAOED_FISHER_H_

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "caoed/core.h"
#include "caoed/dynamics.h"
#include "caoed/error.h"
#include "caoed/scenarios.h"

namespace caoed {

// How the measurement Jacobian G = dy/dtheta is obtained.
enum class FisherMode {
  kContactAware,      // analytic contact, SDF and sensitivity chain rule
  kFiniteDifference,  // central differences of the full rollout
};

inline const char* FisherModeName(FisherMode mode) {
  return mode == FisherMode::kContactAware ? "contact-aware" : "baseline";
}

inline FisherMode FisherModeFromName(const std::string& name) {
  if (name == "contact-aware") return FisherMode::kContactAware;
  if (name == "baseline") return FisherMode::kFiniteDifference;
  throw Error(ErrorCode::kInvalidArgument, "unknown engine: " + name);
}

struct FisherEngine {
  FisherMode mode = FisherMode::kContactAware;
  // step_j = fd_relative_step * max(|theta_j|, 1)
  double fd_relative_step = 1e-4;

  void Validate() const {
    if (mode == FisherMode::kFiniteDifference && !(fd_relative_step > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "fd step must be positive");
    }
  }
};

struct InfoMatrix {
  Eigen::MatrixXd matrix;
  int sample_count = 0;
};

// Central-difference Jacobian of model.Predict.
template <class Model>
Eigen::MatrixXd FiniteDifferenceJacobian(const Model& model,
                                         const Eigen::VectorXd& theta,
                                         double relative_step) {
  Eigen::MatrixXd g;
  for (Eigen::Index j = 0; j < theta.size(); ++j) {
    const double h = relative_step * std::max(std::abs(theta[j]), 1.0);
    Eigen::VectorXd plus = theta, minus = theta;
    plus[j] += h;
    minus[j] -= h;
    const Eigen::VectorXd column =
        (model.Predict(plus) - model.Predict(minus)) / (2.0 * h);
    if (j == 0) g.resize(column.size(), theta.size());
    g.col(j) = column;
  }
  return g;
}

template <class Model>
Eigen::MatrixXd MeasurementJacobian(const FisherEngine& engine,
                                    const Model& model,
                                    const Eigen::VectorXd& theta) {
  engine.Validate();
  if (engine.mode == FisherMode::kContactAware) return model.Jacobian(theta);
  return FiniteDifferenceJacobian(model, theta, engine.fd_relative_step);
}

// Per-channel std repeated for each sample (time-major).
inline Eigen::VectorXd StackNoise(const Eigen::VectorXd& per_channel,
                                  int samples) {
  return per_channel.replicate(samples, 1);
}

// sum_t G_t^T Sigma^-1 G_t for diagonal Sigma.
inline InfoMatrix GaussNewtonInformation(const Eigen::MatrixXd& g,
                                         const Eigen::VectorXd& stacked_std,
                                         int samples) {
  if (g.rows() != stacked_std.size()) {
    throw Error(ErrorCode::kInvalidArgument, "noise dimension mismatch");
  }
  const Eigen::VectorXd weight = stacked_std.array().square().inverse();
  InfoMatrix info;
  info.matrix = g.transpose() * weight.asDiagonal() * g;
  Symmetrize(info.matrix);
  info.sample_count = samples;
  return info;
}

template <class Model>
InfoMatrix FimTrajectory(const FisherEngine& engine, const Model& model,
                         const Eigen::VectorXd& theta,
                         const Eigen::VectorXd& noise_std) {
  const Eigen::MatrixXd g = MeasurementJacobian(engine, model, theta);
  return GaussNewtonInformation(
      g, StackNoise(noise_std, model.num_samples()), model.num_samples());
}

// Information of a stored trajectory, re-simulated from its first state.
inline InfoMatrix FimTrajectory(const FisherEngine& engine,
                                const ScenarioSpec& spec,
                                const Trajectory& trajectory,
                                const std::vector<ControlInput>& controls,
                                const Eigen::VectorXd& theta,
                                const Eigen::VectorXd& noise_std) {
  if (trajectory.states.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty trajectory");
  }
  const ExperimentModel model(spec, trajectory.states.front(), controls);
  return FimTrajectory(engine, model, theta, noise_std);
}

enum class DesignMetric { kTrace, kLogDet };

inline const char* DesignMetricName(DesignMetric metric) {
  return metric == DesignMetric::kTrace ? "trace" : "logdet";
}

inline DesignMetric DesignMetricFromName(const std::string& name) {
  if (name == "trace") return DesignMetric::kTrace;
  if (name == "logdet") return DesignMetric::kLogDet;
  throw Error(ErrorCode::kInvalidArgument, "unknown metric: " + name);
}

// Scalar design objective: trace(F) or log det(F + 1e-12 I).
inline double Psi(DesignMetric metric, const Eigen::MatrixXd& f) {
  if (metric == DesignMetric::kTrace) return f.trace();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      0.5 * (f + f.transpose()), Eigen::EigenvaluesOnly);
  double value = 0.0;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    const double e = solver.eigenvalues()[i] + 1e-12;
    if (!(e > 0.0)) return -std::numeric_limits<double>::infinity();
    value += std::log(e);
  }
  return value;
}

// Moore-Penrose inverse of a symmetric PSD matrix; eigenvalues below
// rel_tol * max eigenvalue are treated as zero.
inline Eigen::MatrixXd PseudoInverse(const Eigen::MatrixXd& f,
                                     double rel_tol = 1e-12) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 *
                                                        (f + f.transpose()));
  const Eigen::VectorXd& e = solver.eigenvalues();
  const double cutoff = rel_tol * std::max(e.cwiseAbs().maxCoeff(), 0.0);
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(e.size());
  for (Eigen::Index i = 0; i < e.size(); ++i) {
    if (e[i] > cutoff && e[i] > 0.0) inv[i] = 1.0 / e[i];
  }
  return solver.eigenvectors() * inv.asDiagonal() *
         solver.eigenvectors().transpose();
}

struct CrlbReport {
  bool satisfied = true;
  // lambda_min(S - F^+) / lambda_max(F^+); +inf when F carries no information
  double margin = std::numeric_limits<double>::infinity();
};

// Checks cov(theta_hat) >= F^-1 on the informative subspace of F, up to a
// relative tolerance.
inline CrlbReport CrlbCheck(const Eigen::MatrixXd& f,
                            const Eigen::MatrixXd& sample_cov,
                            double tolerance = 0.1) {
  if (f.rows() != sample_cov.rows() || f.cols() != sample_cov.cols()) {
    throw Error(ErrorCode::kInvalidArgument, "crlb dimension mismatch");
  }
  const Eigen::MatrixXd bound = PseudoInverse(f);
  const double scale = MaxEigenvalue(bound);
  CrlbReport report;
  if (!(scale > 0.0)) return report;
  report.margin = MinEigenvalue(sample_cov - bound) / scale;
  report.satisfied = report.margin >= -tolerance;
  return report;
}

// Unbiased sample covariance of row samples.
inline Eigen::MatrixXd SampleCovariance(const Eigen::MatrixXd& samples) {
  if (samples.rows() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "need at least two samples");
  }
  const Eigen::RowVectorXd mean = samples.colwise().mean();
  const Eigen::MatrixXd centered = samples.rowwise() - mean;
  return centered.transpose() * centered /
         static_cast<double>(samples.rows() - 1);
}

struct ConditionBoundReport {
  bool skipped = false;  // singular input
  double kappa = 0.0;
  // ||F||^2 ||F^-1||^2 with the Frobenius (Schur) norm
  double schur_norm_product = 0.0;
  double upper = 0.0;   // (P - (n - 2))^2
  double middle = 0.0;  // (kappa + 1/kappa)^2
  double lower = 0.0;   // 4P/n^2 (n even), 4(P - 1)/(n^2 - 1) (n odd)
  bool holds = false;
};

// Two-sided bound relating the condition number to the Schur norms of F and
// F^-1.
inline ConditionBoundReport ConditionBoundCheck(const Eigen::MatrixXd& f) {
  ConditionBoundReport report;
  const Eigen::Index n = f.rows();
  if (n < 2 || f.cols() != n || !f.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument,
                "condition bound needs square F with n >= 2");
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(f);
  const Eigen::VectorXd& s = svd.singularValues();
  if (!(s[n - 1] > 1e-14 * s[0])) {
    report.skipped = true;
    return report;
  }
  report.kappa = s[0] / s[n - 1];
  const double norm_sq = s.squaredNorm();
  const double inv_norm_sq = s.cwiseInverse().squaredNorm();
  const double p = norm_sq * inv_norm_sq;
  const double nn = static_cast<double>(n);
  report.schur_norm_product = p;
  report.upper = std::pow(p - (nn - 2.0), 2);
  report.middle = std::pow(report.kappa + 1.0 / report.kappa, 2);
  report.lower = n % 2 == 0 ? 4.0 * p / (nn * nn)
                            : 4.0 * (p - 1.0) / (nn * nn - 1.0);
  const double slack = 1e-9;
  report.holds = report.upper >= report.middle * (1.0 - slack) &&
                 report.middle >= report.lower * (1.0 - slack);
  return report;
}

}  // namespace caoed

#endif  // CAOED_FISHER_H_
