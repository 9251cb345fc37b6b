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

#ifndef CAOED_PLANNER_H_
#define CAOED_PLANNER_H_

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "caoed/core.h"
#include "caoed/dynamics.h"
#include "caoed/error.h"
#include "caoed/fisher.h"
#include "caoed/rng.h"
#include "caoed/scenarios.h"

namespace caoed {

struct PlannerConfig {
  int horizon = 10;            // steps
  int num_samples = 10;        // perturbed candidates besides the nominal
  double sampling_std = 1.0;   // m/s at knots
  int spline_knots = 4;
  double effort_weight = 1e-3;
  double boundary_weight = 1.0;
  double boundary_margin = 0.05;  // fraction of the workspace width
  DesignMetric metric = DesignMetric::kTrace;

  void Validate() const {
    if (horizon < 2 || num_samples < 1 || !(sampling_std >= 0.0) ||
        spline_knots < 2 || !(effort_weight >= 0.0) ||
        !(boundary_weight >= 0.0) || !(boundary_margin >= 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "invalid planner config");
    }
  }
};

// Cubic Hermite spline of velocity commands. knots is axes x K with knot i
// at step i * horizon / (K - 1).
struct ControlPlan {
  Eigen::MatrixXd knots;
  int horizon = 0;
  double dt = 0.0;

  int axes() const { return static_cast<int>(knots.rows()); }
  int num_knots() const { return static_cast<int>(knots.cols()); }
  double KnotTime(int i) const {
    return static_cast<double>(i) * horizon / (num_knots() - 1);
  }
};

inline ControlPlan ZeroPlan(int axes, const PlannerConfig& config, double dt) {
  ControlPlan plan;
  plan.knots = Eigen::MatrixXd::Zero(axes, config.spline_knots);
  plan.horizon = config.horizon;
  plan.dt = dt;
  return plan;
}

// Unclamped spline value at (fractional) step t; held constant beyond the
// last knot.
inline Eigen::VectorXd SplineValue(const ControlPlan& plan, double t) {
  const int k = plan.num_knots();
  if (k == 1) return plan.knots.col(0);
  if (t <= 0.0) return plan.knots.col(0);
  if (t >= plan.horizon) return plan.knots.col(k - 1);

  // finite-difference tangents (per step), one-sided at the ends
  auto tangent = [&](int i) -> Eigen::VectorXd {
    const int a = std::max(i - 1, 0), b = std::min(i + 1, k - 1);
    return (plan.knots.col(b) - plan.knots.col(a)) /
           (plan.KnotTime(b) - plan.KnotTime(a));
  };

  int seg = static_cast<int>(std::floor(t * (k - 1) / plan.horizon));
  seg = std::clamp(seg, 0, k - 2);
  const double t0 = plan.KnotTime(seg), t1 = plan.KnotTime(seg + 1);
  const double h = t1 - t0;
  const double s = (t - t0) / h;
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
  return h00 * plan.knots.col(seg) + h10 * h * tangent(seg) +
         h01 * plan.knots.col(seg + 1) + h11 * h * tangent(seg + 1);
}

// Command at step t, clamped per axis to the velocity bounds.
inline ControlInput SplineEval(const ControlPlan& plan, int t,
                               const Eigen::VectorXd& lower,
                               const Eigen::VectorXd& upper) {
  if (t < 0 || t >= plan.horizon) {
    throw Error(ErrorCode::kInvalidArgument, "spline step out of range");
  }
  return {ClampToBox(SplineValue(plan, t), lower, upper)};
}

inline std::vector<ControlInput> PlanControls(const ControlPlan& plan,
                                              const Eigen::VectorXd& lower,
                                              const Eigen::VectorXd& upper) {
  std::vector<ControlInput> controls;
  controls.reserve(plan.horizon);
  for (int t = 0; t < plan.horizon; ++t) {
    controls.push_back(SplineEval(plan, t, lower, upper));
  }
  return controls;
}

// Receding-horizon warm start: the plan advanced by `steps`.
inline ControlPlan ShiftPlan(const ControlPlan& plan, int steps) {
  ControlPlan shifted = plan;
  for (int i = 0; i < plan.num_knots(); ++i) {
    shifted.knots.col(i) = SplineValue(plan, plan.KnotTime(i) + steps);
  }
  return shifted;
}

struct CostTerms {
  double effort = 0.0;
  double boundary = 0.0;
  double total = 0.0;
};

// J = w_u sum_t |u_t|^2 + w_b sum_t sum_axes pen^2, where pen is the depth
// of q inside the margin band along the workspace walls.
inline CostTerms TrajectoryCost(const Trajectory& trajectory,
                                const std::vector<ControlInput>& controls,
                                const PlannerConfig& config,
                                const DynamicsSpec& dynamics) {
  CostTerms cost;
  for (const ControlInput& u : controls) cost.effort += u.command.squaredNorm();
  const Eigen::VectorXd margin =
      config.boundary_margin *
      (dynamics.workspace_upper - dynamics.workspace_lower);
  for (size_t t = 1; t < trajectory.states.size(); ++t) {
    const Eigen::VectorXd& q = trajectory.states[t].position;
    for (Eigen::Index i = 0; i < q.size(); ++i) {
      const double pen =
          std::max(0.0, margin[i] - (q[i] - dynamics.workspace_lower[i])) +
          std::max(0.0, margin[i] - (dynamics.workspace_upper[i] - q[i]));
      cost.boundary += pen * pen;
    }
  }
  cost.effort *= config.effort_weight;
  cost.boundary *= config.boundary_weight;
  cost.total = cost.effort + cost.boundary;
  return cost;
}

struct PlanResult {
  ControlPlan plan;  // winning knots (unclamped)
  std::vector<ControlInput> controls;
  Experiment predicted;  // noiseless predicted measurements
  double score = -std::numeric_limits<double>::infinity();
  double information = 0.0;  // psi(F)
  CostTerms cost;
  std::vector<double> candidate_scores;  // index 0 is the nominal
  int winner = 0;
};

// Predictive sampling: score the nominal plan and num_samples Gaussian knot
// perturbations by psi(F) - J under theta = belief mode, keep the best.
// Ties keep the earlier candidate, so the nominal wins ties.
inline PlanResult PlanExperiment(const PlannerConfig& config,
                                 const ScenarioSpec& spec,
                                 const RobotState& x0,
                                 const ParamBelief& belief,
                                 const FisherEngine& engine, Rng& rng,
                                 const ControlPlan& nominal,
                                 const Eigen::VectorXd& noise_std) {
  config.Validate();
  engine.Validate();
  if (!belief.Contains(belief.mode.values)) {
    throw Error(ErrorCode::kInvalidArgument, "belief mode outside support");
  }
  const DynamicsSpec& dyn = spec.dynamics;
  if (nominal.axes() != dyn.dim() || nominal.horizon != config.horizon) {
    throw Error(ErrorCode::kInvalidArgument, "nominal plan shape mismatch");
  }

  // draw all perturbations before evaluating anything
  std::vector<ControlPlan> candidates = {nominal};
  for (int n = 0; n < config.num_samples; ++n) {
    ControlPlan p = nominal;
    for (int j = 0; j < p.num_knots(); ++j) {
      for (int i = 0; i < p.axes(); ++i) {
        p.knots(i, j) += config.sampling_std * rng.Gaussian();
      }
    }
    candidates.push_back(std::move(p));
  }

  PlanResult best;
  bool any = false;
  for (size_t c = 0; c < candidates.size(); ++c) {
    double score = -std::numeric_limits<double>::infinity();
    try {
      const std::vector<ControlInput> controls = PlanControls(
          candidates[c], dyn.velocity_lower, dyn.velocity_upper);
      const ExperimentModel model(spec, x0, controls);
      const InfoMatrix f =
          FimTrajectory(engine, model, belief.mode.values, noise_std);
      const Prediction pred =
          Predict(spec, x0, controls, belief.mode.values, false);
      const CostTerms cost =
          TrajectoryCost(pred.trajectory, controls, config, dyn);
      const double information = Psi(config.metric, f.matrix);
      score = information - cost.total;
      if (std::isfinite(score) && (!any || score > best.score)) {
        any = true;
        best.plan = candidates[c];
        best.controls = controls;
        best.predicted.measurements = pred.measurements;
        best.predicted.controls = controls;
        best.predicted.executed = pred.trajectory;
        best.predicted.noise_std = noise_std;
        best.score = score;
        best.information = information;
        best.cost = cost;
        best.winner = static_cast<int>(c);
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kDivergedRollout) throw;
    }
    best.candidate_scores.push_back(score);
  }
  if (!any) throw Error(ErrorCode::kPlanningFailed, "planning failed");
  return best;
}

}  // namespace caoed

#endif  // CAOED_PLANNER_H_
