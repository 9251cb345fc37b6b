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

#ifndef CAOED_DYNAMICS_H_
#define CAOED_DYNAMICS_H_

#include <Eigen/Dense>
#include <cmath>
#include <utility>
#include <vector>

#include "caoed/contact.h"
#include "caoed/core.h"
#include "caoed/error.h"
#include "caoed/rng.h"
#include "caoed/scenarios.h"

namespace caoed {

struct StepResult {
  RobotState next;
  ContactForce force;  // model force at the pre-step state (pair 0)
  // d(object position, object velocity)/dtheta after the step; empty when
  // the scenario has no free object or sensitivities were not requested
  Eigen::MatrixXd object_sensitivity;
};

namespace internal {

// Hand-ball contact force and its (phi, v_n, params) slopes for a candidate
// ball position z_next.
struct BallContact {
  double lambda;
  double dphi;
  double dvn;
  Eigen::Matrix<double, 1, 4> dparams;
};

inline BallContact EvaluateBallContact(const ScenarioSpec& spec,
                                       const PhysicalParams& phys,
                                       double z_next, double z, double hand,
                                       double hand_velocity, double dt) {
  ContactState cs;
  cs.phi_n = z_next - spec.object_radius - hand;
  cs.v_n = (z_next - z) / dt - hand_velocity;
  const ContactForceJacobian jac =
      ContactForceGradient(phys.contact, cs, spec.contact_options);
  return {jac.lambda_n, jac.wrt_state(0, 0), jac.wrt_state(0, 1),
          jac.wrt_params.row(0)};
}

// Solve z+ = z_pred + a lambda(z+) for the ball position (backward Euler).
inline double SolveBallPosition(const ScenarioSpec& spec,
                                const PhysicalParams& phys, double z_pred,
                                double a, double z, double hand,
                                double hand_velocity, double dt) {
  auto residual = [&](double zc) {
    const BallContact c =
        EvaluateBallContact(spec, phys, zc, z, hand, hand_velocity, dt);
    return std::pair<double, double>(
        zc - z_pred - a * c.lambda, 1.0 - a * (c.dphi + c.dvn / dt));
  };

  double lo = z_pred;
  const double g_lo = residual(lo).first;
  if (g_lo >= 0.0) return z_pred;  // free flight

  double gap = -g_lo;
  double hi = z_pred + gap;
  int expand = 0;
  while (residual(hi).first < 0.0) {
    gap *= 2.0;
    hi = z_pred + gap;
    if (++expand > 60) {
      throw Error(ErrorCode::kDivergedRollout, "diverged rollout");
    }
  }

  double zc = lo;
  for (int iter = 0; iter < 200; ++iter) {
    const auto [g, slope] = residual(zc);
    if (g == 0.0) return zc;
    if (g < 0.0) {
      lo = zc;
    } else {
      hi = zc;
    }
    double next = slope > 0.0 ? zc - g / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - zc) <= 1e-15 * (1.0 + std::abs(zc)) ||
        hi - lo <= 1e-15 * (1.0 + std::abs(zc))) {
      return next;
    }
    zc = next;
  }
  return zc;
}

}  // namespace internal

// x_{t+1} = f_theta(x_t, u_t). The robot is a kinematic point following the
// clamped velocity command inside the workspace; the hefted ball follows
// m zdd = lambda_n - m g, integrated with backward Euler.
inline StepResult Step(const ScenarioSpec& spec, const RobotState& x,
                       const ControlInput& u, const Eigen::VectorXd& theta,
                       const Eigen::MatrixXd* object_sensitivity = nullptr) {
  const DynamicsSpec& dyn = spec.dynamics;
  const double dt = dyn.dt;
  if (u.command.size() != dyn.dim() || x.position.size() != dyn.dim()) {
    throw Error(ErrorCode::kInvalidArgument, "state or command size mismatch");
  }
  if (!x.AllFinite() || !u.command.allFinite() || !theta.allFinite()) {
    throw Error(ErrorCode::kDivergedRollout, "diverged rollout");
  }
  const PhysicalParams phys = Instantiate(spec, theta);

  StepResult result;
  {
    const std::vector<ContactKinematics> pairs = ContactPairs(spec, phys, x);
    result.force =
        ComputeContactForce(phys.contact, pairs[0].state, spec.contact_options);
  }

  // velocity
  const Eigen::VectorXd command =
      ClampToBox(u.command, dyn.velocity_lower, dyn.velocity_upper);

  // position
  result.next.position = ClampToBox(x.position + dt * command,
                                    dyn.workspace_lower, dyn.workspace_upper);
  result.next.velocity = (result.next.position - x.position) / dt;

  if (spec.kind == ScenarioKind::kHefting) {
    const double m = phys.mass;
    if (!(m > 0.0)) {
      throw Error(ErrorCode::kDivergedRollout, "diverged rollout");
    }
    const double z = x.object->position[0];
    const double v = x.object->velocity[0];
    const double hand = result.next.position[0];
    const double hand_velocity = result.next.velocity[0];
    const double a = dt * dt / m;
    const double z_pred = z + dt * v - dt * dt * dyn.gravity;

    const double z_next = internal::SolveBallPosition(
        spec, phys, z_pred, a, z, hand, hand_velocity, dt);
    const double v_next = (z_next - z) / dt;
    result.next.object =
        ObjectState{Eigen::VectorXd::Constant(1, z_next),
                    Eigen::VectorXd::Constant(1, v_next)};

    if (object_sensitivity) {
      // implicit function theorem on the backward Euler residual
      const int d = spec.dim();
      const internal::BallContact c = internal::EvaluateBallContact(
          spec, phys, z_next, z, hand, hand_velocity, dt);
      const Eigen::RowVectorXd dz = object_sensitivity->row(0);
      const Eigen::RowVectorXd dv = object_sensitivity->row(1);

      Eigen::RowVectorXd rhs = dz + dt * dv - (a * c.dvn / dt) * dz;
      for (int i = 0; i < d; ++i) {
        switch (spec.roles[i]) {
          case ParamRole::kMass:
            rhs[i] += -(dt * dt / (m * m)) * c.lambda;
            break;
          case ParamRole::kStiffness:
            rhs[i] += a * c.dparams[0];
            break;
          case ParamRole::kDamping:
            rhs[i] += a * c.dparams[1];
            break;
          default:
            break;
        }
      }
      const double lhs = 1.0 - a * (c.dphi + c.dvn / dt);
      result.object_sensitivity.resize(2, d);
      result.object_sensitivity.row(0) = rhs / lhs;
      result.object_sensitivity.row(1) = (result.object_sensitivity.row(0) - dz) / dt;
    }
  } else {
    result.next.object = x.object;
  }

  if (!result.next.AllFinite() || !std::isfinite(result.force.lambda_n)) {
    throw Error(ErrorCode::kDivergedRollout, "diverged rollout");
  }
  return result;
}

// Trajectory with T+1 states and the T pre-step contact forces.
inline Trajectory Rollout(const ScenarioSpec& spec, const RobotState& x0,
                          const std::vector<ControlInput>& controls,
                          const Eigen::VectorXd& theta) {
  if (controls.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "rollout needs at least one control");
  }
  Trajectory traj;
  traj.dt = spec.dynamics.dt;
  traj.states.reserve(controls.size() + 1);
  traj.contacts.reserve(controls.size());
  traj.states.push_back(x0);
  for (const ControlInput& u : controls) {
    StepResult r = Step(spec, traj.states.back(), u, theta);
    traj.contacts.push_back(r.force);
    traj.states.push_back(std::move(r.next));
  }
  return traj;
}

// Predicted trajectory with noiseless measurements y_t = g(x_t) for
// t = 0..T-1 and, optionally, their Jacobians dy_t/dtheta by forward
// sensitivity propagation.
struct Prediction {
  Trajectory trajectory;
  std::vector<Measurement> measurements;
  std::vector<Eigen::MatrixXd> jacobians;
};

inline Prediction Predict(const ScenarioSpec& spec, const RobotState& x0,
                          const std::vector<ControlInput>& controls,
                          const Eigen::VectorXd& theta, bool with_jacobians) {
  if (controls.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "rollout needs at least one control");
  }
  const int d = spec.dim();
  const bool has_object = spec.kind == ScenarioKind::kHefting;
  Eigen::MatrixXd sensitivity =
      has_object ? Eigen::MatrixXd::Zero(2, d) : Eigen::MatrixXd();

  Prediction out;
  out.trajectory.dt = spec.dynamics.dt;
  out.trajectory.states.push_back(x0);
  for (const ControlInput& u : controls) {
    const RobotState& x = out.trajectory.states.back();
    out.measurements.push_back(SensorEval(spec, x, theta));
    if (with_jacobians) {
      out.jacobians.push_back(SensorJacobian(spec, x, sensitivity, theta));
    }
    StepResult r = Step(spec, x, u, theta,
                        with_jacobians && has_object ? &sensitivity : nullptr);
    if (with_jacobians && has_object) sensitivity = r.object_sensitivity;
    out.trajectory.contacts.push_back(r.force);
    out.trajectory.states.push_back(std::move(r.next));
  }
  return out;
}

// Simulates an experiment under theta with noisy sensors.
inline Experiment Execute(const ScenarioSpec& spec, const RobotState& x0,
                          const std::vector<ControlInput>& controls,
                          const Eigen::VectorXd& theta,
                          const Eigen::VectorXd& noise_std, Rng& rng) {
  Experiment e;
  e.executed = Rollout(spec, x0, controls, theta);
  e.controls = controls;
  e.noise_std = noise_std;
  for (size_t t = 0; t < controls.size(); ++t) {
    e.measurements.push_back(
        SensorSample(spec, e.executed.states[t], theta, rng, noise_std));
  }
  return e;
}

// Stacked measurement model of one experiment: theta -> [y_0; ...; y_{T-1}]
// re-simulated from the known initial state under the recorded controls.
class ExperimentModel {
 public:
  ExperimentModel(ScenarioSpec spec, RobotState x0,
                  std::vector<ControlInput> controls)
      : spec_(std::move(spec)),
        x0_(std::move(x0)),
        controls_(std::move(controls)) {}

  int dim() const { return spec_.dim(); }
  int num_channels() const { return spec_.num_channels(); }
  int num_samples() const { return static_cast<int>(controls_.size()); }
  const ScenarioSpec& spec() const { return spec_; }
  const RobotState& initial_state() const { return x0_; }
  const std::vector<ControlInput>& controls() const { return controls_; }

  Eigen::VectorXd Predict(const Eigen::VectorXd& theta) const {
    return StackMeasurements(
        caoed::Predict(spec_, x0_, controls_, theta, false).measurements);
  }

  Eigen::MatrixXd Jacobian(const Eigen::VectorXd& theta) const {
    const Prediction p = caoed::Predict(spec_, x0_, controls_, theta, true);
    const int m = num_channels();
    Eigen::MatrixXd g(m * num_samples(), dim());
    for (int t = 0; t < num_samples(); ++t) {
      g.middleRows(t * m, m) = p.jacobians[t];
    }
    return g;
  }

 private:
  ScenarioSpec spec_;
  RobotState x0_;
  std::vector<ControlInput> controls_;
};

}  // namespace caoed

#endif  // CAOED_DYNAMICS_H_
