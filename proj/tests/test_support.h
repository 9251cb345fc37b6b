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

// Shared oracles for the unit tests and the acceptance binary.

#ifndef CAOED_TESTS_TEST_SUPPORT_H_
#define CAOED_TESTS_TEST_SUPPORT_H_

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "caoed/contact.h"
#include "caoed/dynamics.h"
#include "caoed/fisher.h"
#include "caoed/planner.h"
#include "caoed/rng.h"
#include "caoed/scenarios.h"

namespace caoed::testing {

struct ContactCase {
  ContactParams params;
  ContactState state;
};

inline ContactCase RandomContactCase(Rng& rng) {
  ContactCase c;
  c.params = {rng.Uniform(0.0, 1000.0), rng.Uniform(0.0, 20.0),
              rng.Uniform(0.0, 1.0), rng.Uniform(0.0, 5.0)};
  c.state.phi_n = rng.Uniform(-0.05, 0.05);
  c.state.v_n = rng.Uniform(-1.0, 1.0);
  c.state.v_t = rng.Uniform() < 0.1 ? 0.0 : rng.Uniform(0.0, 1.0);
  const double angle = rng.Uniform(0.0, 2.0 * 3.141592653589793);
  c.state.normal = Eigen::Vector3d::UnitZ();
  c.state.tangent_dir = c.state.v_t > 0.0
                            ? Eigen::Vector3d(std::cos(angle), std::sin(angle), 0)
                            : Eigen::Vector3d::Zero();
  return c;
}

// (K, C, mu, R, phi, v_n, v_t) as one vector
inline Eigen::Matrix<double, 7, 1> Pack(const ContactCase& c) {
  Eigen::Matrix<double, 7, 1> z;
  z << c.params.stiffness, c.params.damping, c.params.friction,
      c.params.resistance, c.state.phi_n, c.state.v_n, c.state.v_t;
  return z;
}

inline ContactCase Unpack(const ContactCase& base,
                          const Eigen::Matrix<double, 7, 1>& z) {
  ContactCase c = base;
  c.params = {z[0], z[1], z[2], z[3]};
  c.state.phi_n = z[4];
  c.state.v_n = z[5];
  c.state.v_t = z[6];
  return c;
}

// Which piece of the piecewise force law is active.
inline std::array<int, 4> Branch(const ContactCase& c) {
  const double arg =
      -c.params.stiffness * c.state.phi_n - c.params.damping * std::abs(c.state.v_n);
  const double lambda_n = std::max(arg, 0.0);
  return {arg > 0.0, c.state.v_n > 0.0 ? 1 : (c.state.v_n < 0.0 ? -1 : 0),
          c.params.friction * lambda_n < c.params.resistance * c.state.v_t,
          c.state.v_t > 0.0};
}

// Largest relative mismatch between the analytic force Jacobian and central
// differences; empty when a perturbation crosses a kink.
inline std::optional<double> ContactGradientError(const ContactCase& c) {
  const ContactForceJacobian jac = ContactForceGradient(c.params, c.state);
  Eigen::Matrix<double, 2, 7> analytic;
  analytic << jac.wrt_params, jac.wrt_state;

  const Eigen::Matrix<double, 7, 1> z = Pack(c);
  const std::array<int, 4> branch = Branch(c);
  auto eval = [&](const Eigen::Matrix<double, 7, 1>& zz) -> std::optional<Eigen::Vector2d> {
    const ContactCase p = Unpack(c, zz);
    if (zz[6] < 0.0 || Branch(p) != branch) return std::nullopt;
    const ContactForce f = ComputeContactForce(p.params, p.state);
    return Eigen::Vector2d(f.lambda_n, f.lambda_t.dot(c.state.tangent_dir));
  };

  double worst = 0.0;
  for (int j = 0; j < 7; ++j) {
    const double h = 1e-6 * std::max(std::abs(z[j]), 1e-2);
    Eigen::Matrix<double, 7, 1> plus = z, minus = z;
    plus[j] += h;
    minus[j] -= h;
    const auto fp = eval(plus), fm = eval(minus);
    if (!fp || !fm) return std::nullopt;
    const Eigen::Vector2d fd = (*fp - *fm) / (2.0 * h);
    for (int i = 0; i < 2; ++i) {
      const double scale = std::max(std::abs(fd[i]), std::abs(analytic(i, j)));
      const double err = std::abs(fd[i] - analytic(i, j));
      if (err <= 1e-9) continue;
      worst = std::max(worst, err / scale);
    }
  }
  return worst;
}

// x-penetrating slide along the rubbing wall; mu enters only through the
// friction cone branch.
inline RobotState SlidingStart() {
  RobotState x;
  x.position = Eigen::Vector2d(0.40, 0.55);
  x.velocity = Eigen::Vector2d::Zero();
  return x;
}

inline std::vector<ControlInput> SlidingControls(int steps = 10) {
  return std::vector<ControlInput>(steps, ControlInput{Eigen::Vector2d(-0.1, 0.8)});
}

// Random rubbing trajectory whose friction law stays on one side of the
// cone/viscous switch under +-h perturbations of mu, with at least one
// cone-limited sliding contact.
struct SmoothRubbingCase {
  RobotState x0;
  std::vector<ControlInput> controls;
  double mu = 0.0;
};

inline bool IsSmoothRubbing(const ScenarioSpec& spec, const SmoothRubbingCase& c,
                            double h) {
  const Trajectory traj = Rollout(spec, c.x0, c.controls,
                                  Eigen::VectorXd::Constant(1, c.mu));
  bool sliding = false;
  const PhysicalParams phys = Instantiate(spec, Eigen::VectorXd::Constant(1, c.mu));
  for (size_t t = 0; t < c.controls.size(); ++t) {
    const ContactState cs = ContactPairs(spec, phys, traj.states[t])[0].state;
    const double arg = -phys.contact.stiffness * cs.phi_n -
                       phys.contact.damping * std::abs(cs.v_n);
    if (arg <= 0.0 || cs.v_t <= 0.0) continue;
    const double r = phys.contact.resistance * cs.v_t;
    if (std::abs(c.mu * arg - r) <= 10.0 * h * arg) return false;
    if (c.mu * arg < r) sliding = true;  // cone branch, where mu matters
  }
  return sliding;
}

inline SmoothRubbingCase RandomSmoothRubbing(const ScenarioSpec& spec, Rng& rng,
                                             double h) {
  PlannerConfig cfg;
  for (;;) {
    SmoothRubbingCase c;
    c.x0.position = Eigen::Vector2d(rng.Uniform(0.37, 0.45), rng.Uniform(0.6, 0.9));
    c.x0.velocity = Eigen::Vector2d::Zero();
    ControlPlan plan = ZeroPlan(2, cfg, spec.dynamics.dt);
    for (int j = 0; j < plan.num_knots(); ++j) {
      plan.knots(0, j) = rng.Uniform(-0.5, 0.2);
      plan.knots(1, j) = rng.Uniform(-1.0, 1.0);
    }
    c.controls = PlanControls(plan, spec.dynamics.velocity_lower,
                              spec.dynamics.velocity_upper);
    c.mu = rng.Uniform(0.1, 0.9);
    if (IsSmoothRubbing(spec, c, h * std::max(c.mu, 1.0))) return c;
  }
}

inline double RelativeFrobenius(const Eigen::MatrixXd& a,
                                const Eigen::MatrixXd& reference) {
  return (a - reference).norm() / reference.norm();
}

// Random SPD matrix with eigenvalues spread over about four decades.
inline Eigen::MatrixXd RandomSpd(Rng& rng, int n) {
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = rng.Gaussian();
  }
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  const Eigen::MatrixXd q = qr.householderQ();
  Eigen::VectorXd e(n);
  for (int i = 0; i < n; ++i) e[i] = std::pow(10.0, rng.Uniform(-2.0, 2.0));
  Eigen::MatrixXd s = q * e.asDiagonal() * q.transpose();
  return 0.5 * (s + s.transpose());
}

}  // namespace caoed::testing

#endif  // CAOED_TESTS_TEST_SUPPORT_H_
