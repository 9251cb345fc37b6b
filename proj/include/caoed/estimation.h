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

#ifndef CAOED_ESTIMATION_H_
#define CAOED_ESTIMATION_H_

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <utility>

#include "caoed/core.h"
#include "caoed/error.h"
#include "caoed/fisher.h"

namespace caoed {

// y = A theta, one channel per row.
struct LinearGaussianModel {
  Eigen::MatrixXd design;

  int dim() const { return static_cast<int>(design.cols()); }
  int num_channels() const { return 1; }
  int num_samples() const { return static_cast<int>(design.rows()); }
  Eigen::VectorXd Predict(const Eigen::VectorXd& theta) const {
    return design * theta;
  }
  Eigen::MatrixXd Jacobian(const Eigen::VectorXd&) const { return design; }
};

// Gaussian log posterior of stacked data under a measurement model. Model
// provides Predict(theta), Jacobian(theta), num_channels() and
// num_samples().
template <class Model>
struct LogPosterior {
  const Model* model = nullptr;
  Eigen::VectorXd data;       // stacked y, time-major
  Eigen::VectorXd noise_std;  // stacked, same length as data
  ParamBelief prior;          // support always applies
  bool flat_prior = false;    // drop the Gaussian prior term

  void Validate() const {
    if (model == nullptr || data.size() != noise_std.size() ||
        !(noise_std.array() > 0.0).all()) {
      throw Error(ErrorCode::kInvalidArgument, "invalid log posterior");
    }
  }
};

template <class Model>
LogPosterior<Model> MakeLogPosterior(const Model& model,
                                     const Eigen::VectorXd& data,
                                     const Eigen::VectorXd& channel_std,
                                     const ParamBelief& prior,
                                     bool flat_prior = false) {
  LogPosterior<Model> lp;
  lp.model = &model;
  lp.data = data;
  lp.noise_std = StackNoise(channel_std, model.num_samples());
  lp.prior = prior;
  lp.flat_prior = flat_prior;
  lp.Validate();
  return lp;
}

namespace internal {

template <class Model>
Eigen::MatrixXd PriorPrecision(const LogPosterior<Model>& lp) {
  const int d = lp.prior.dim();
  if (lp.flat_prior) return Eigen::MatrixXd::Zero(d, d);
  Eigen::MatrixXd p =
      lp.prior.covariance.ldlt().solve(Eigen::MatrixXd::Identity(d, d));
  Symmetrize(p);
  return p;
}

}  // namespace internal

// sum_t -1/2 r_t^T Sigma^-1 r_t - 1/2 (theta - mode)^T Sigma_p^-1 (theta -
// mode), constants dropped.
template <class Model>
double LogPosteriorValue(const LogPosterior<Model>& lp,
                         const Eigen::VectorXd& theta) {
  const Eigen::VectorXd r =
      (lp.data - lp.model->Predict(theta)).cwiseQuotient(lp.noise_std);
  double value = -0.5 * r.squaredNorm();
  if (!lp.flat_prior) {
    const Eigen::VectorXd delta = theta - lp.prior.mode.values;
    value -= 0.5 * delta.dot(lp.prior.covariance.ldlt().solve(delta));
  }
  return value;
}

template <class Model>
Eigen::VectorXd GradLogPosterior(const LogPosterior<Model>& lp,
                                 const Eigen::VectorXd& theta,
                                 const FisherEngine& engine = {}) {
  const Eigen::MatrixXd g = MeasurementJacobian(engine, *lp.model, theta);
  const Eigen::VectorXd weight = lp.noise_std.array().square().inverse();
  const Eigen::VectorXd r = lp.data - lp.model->Predict(theta);
  return g.transpose() * weight.cwiseProduct(r) -
         internal::PriorPrecision(lp) * (theta - lp.prior.mode.values);
}

struct MapOptions {
  int max_iters = 50;
  double tol = 1e-6;  // on the projected gradient, times data count
  int max_backtracks = 40;
};

struct MapResult {
  ParamVector theta;
  int iterations = 0;
  bool converged = false;
  double value = 0.0;
};

namespace internal {

// zero the gradient entries that push against an active bound
inline Eigen::VectorXd ProjectedGradient(const Eigen::VectorXd& grad,
                                         const Eigen::VectorXd& theta,
                                         const Eigen::VectorXd& lower,
                                         const Eigen::VectorXd& upper) {
  Eigen::VectorXd pg = grad;
  for (Eigen::Index i = 0; i < pg.size(); ++i) {
    if ((theta[i] <= lower[i] && pg[i] < 0.0) ||
        (theta[i] >= upper[i] && pg[i] > 0.0)) {
      pg[i] = 0.0;
    }
  }
  return pg;
}

template <class Model>
double SafeValue(const LogPosterior<Model>& lp, const Eigen::VectorXd& theta) {
  try {
    const double v = LogPosteriorValue(lp, theta);
    return std::isfinite(v) ? v : -std::numeric_limits<double>::infinity();
  } catch (const Error&) {
    return -std::numeric_limits<double>::infinity();
  }
}

}  // namespace internal

// Damped natural-gradient ascent
//   theta <- Proj(theta + eta (H + eps I)^-1 grad),
// H = G^T Sigma^-1 G + Sigma_p^-1, eps = 1e-6 tr(H)/d + 1e-9, with
// backtracking on eta. Returns the best iterate.
template <class Model>
MapResult CaMapSolve(const LogPosterior<Model>& lp, const ParamVector& theta0,
                     const FisherEngine& engine = {},
                     const MapOptions& options = {}) {
  lp.Validate();
  const Eigen::VectorXd& lower = lp.prior.lower;
  const Eigen::VectorXd& upper = lp.prior.upper;
  const int d = lp.prior.dim();
  if (theta0.size() != d) {
    throw Error(ErrorCode::kInvalidArgument, "theta0 dimension mismatch");
  }
  const Eigen::VectorXd weight = lp.noise_std.array().square().inverse();
  const Eigen::MatrixXd prior_precision = internal::PriorPrecision(lp);
  const double tol = options.tol * static_cast<double>(lp.data.size());

  Eigen::VectorXd theta = ClampToBox(theta0.values, lower, upper);
  double value = LogPosteriorValue(lp, theta);
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::kDivergedRollout, "diverged rollout");
  }

  MapResult result;
  for (int iter = 0;; ++iter) {
    const Eigen::MatrixXd g = MeasurementJacobian(engine, *lp.model, theta);
    const Eigen::VectorXd r = lp.data - lp.model->Predict(theta);
    const Eigen::VectorXd grad =
        g.transpose() * weight.cwiseProduct(r) -
        prior_precision * (theta - lp.prior.mode.values);
    const Eigen::VectorXd pg =
        internal::ProjectedGradient(grad, theta, lower, upper);
    result.iterations = iter;
    if (pg.norm() < tol) {
      result.converged = true;
      break;
    }
    if (iter == options.max_iters) break;

    Eigen::MatrixXd h = g.transpose() * weight.asDiagonal() * g +
                        prior_precision;
    Symmetrize(h);
    const double eps = 1e-6 * h.trace() / d + 1e-9;
    h.diagonal().array() += eps;
    const Eigen::VectorXd newton = h.ldlt().solve(grad);

    // natural-gradient direction, then projected gradient as a fallback
    bool accepted = false;
    Eigen::VectorXd candidate;
    double candidate_value = value;
    double eta = 1.0;
    for (int k = 0; k <= options.max_backtracks && !accepted; ++k, eta *= 0.5) {
      candidate = ClampToBox(theta + eta * newton, lower, upper);
      candidate_value = internal::SafeValue(lp, candidate);
      accepted = candidate_value > value;
    }
    if (!accepted) {
      const double curvature = pg.dot(h * pg);
      eta = curvature > 0.0 ? pg.squaredNorm() / curvature : 1.0;
      for (int k = 0; k <= options.max_backtracks && !accepted;
           ++k, eta *= 0.5) {
        candidate = ClampToBox(theta + eta * pg, lower, upper);
        candidate_value = internal::SafeValue(lp, candidate);
        accepted = candidate_value > value;
      }
    }
    if (!accepted) break;  // no ascent direction left at working precision
    theta = candidate;
    value = candidate_value;
  }

  result.theta.values = theta;
  result.theta.names = lp.prior.mode.names;
  result.value = value;
  return result;
}

// Sigma+ = (F + Sigma^-1)^-1, symmetrized; mode set to theta_hat.
inline ParamBelief BeliefUpdate(const ParamBelief& prior,
                                const Eigen::MatrixXd& fim,
                                const ParamVector& theta_hat) {
  prior.Validate();
  const int d = prior.dim();
  if (fim.rows() != d || fim.cols() != d || theta_hat.size() != d) {
    throw Error(ErrorCode::kInvalidArgument, "belief update dimension mismatch");
  }
  if (!fim.allFinite()) {
    throw Error(ErrorCode::kInvalidInformation, "invalid information matrix");
  }
  Eigen::MatrixXd f = fim;
  const double scale = std::max(1.0, f.cwiseAbs().maxCoeff());
  if ((f - f.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale ||
      MinEigenvalue(f) < -1e-8 * scale) {
    throw Error(ErrorCode::kInvalidInformation, "invalid information matrix");
  }
  Symmetrize(f);

  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(d, d);
  Eigen::MatrixXd precision = prior.covariance.llt().solve(identity);
  Symmetrize(precision);
  Eigen::MatrixXd posterior = (f + precision).llt().solve(identity);
  Symmetrize(posterior);
  // Information below working precision leaves the covariance unchanged;
  // the round trip through the precision would otherwise jitter it upward.
  if (f.isZero(0.0) || posterior.trace() >= prior.covariance.trace()) {
    posterior = prior.covariance;
  }

  ParamBelief out = prior;
  out.mode = theta_hat;
  out.mode.values = ClampToBox(theta_hat.values, prior.lower, prior.upper);
  if (out.mode.names.empty()) out.mode.names = prior.mode.names;
  out.covariance = posterior;
  return out;
}

}  // namespace caoed

#endif  // CAOED_ESTIMATION_H_
