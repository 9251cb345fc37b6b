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

#ifndef CAOED_SCENARIOS_H_
#define CAOED_SCENARIOS_H_

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "caoed/contact.h"
#include "caoed/core.h"
#include "caoed/error.h"
#include "caoed/rng.h"

namespace caoed {

enum class ScenarioKind { kHefting, kRubbing, kPinching, kContouring };

// Physical meaning of an estimated parameter entry.
enum class ParamRole {
  kMass,
  kStiffness,
  kDamping,
  kFriction,
  kFrictionResistance,
  kBoxLength,
  kBoxWidth,
};

// Sensor channel type. Direction channels are gated by lambda_n > 0.
enum class ChannelKind { kNormalForce, kTangentForce, kNormalDirX, kNormalDirY };

struct Channel {
  ChannelKind kind = ChannelKind::kNormalForce;
  int pair = 0;  // contact pair index
};

inline const char* ScenarioName(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::kHefting:
      return "hefting";
    case ScenarioKind::kRubbing:
      return "rubbing";
    case ScenarioKind::kPinching:
      return "pinching";
    case ScenarioKind::kContouring:
      return "contouring";
  }
  return "unknown";
}

inline ScenarioKind ScenarioKindFromName(const std::string& name) {
  for (ScenarioKind kind :
       {ScenarioKind::kHefting, ScenarioKind::kRubbing, ScenarioKind::kPinching,
        ScenarioKind::kContouring}) {
    if (name == ScenarioName(kind)) return kind;
  }
  throw Error(ErrorCode::kUnknownScenario, "unknown scenario: " + name);
}

inline const char* ParamRoleName(ParamRole role) {
  switch (role) {
    case ParamRole::kMass:
      return "mass";
    case ParamRole::kStiffness:
      return "stiffness";
    case ParamRole::kDamping:
      return "damping";
    case ParamRole::kFriction:
      return "friction";
    case ParamRole::kFrictionResistance:
      return "friction_resistance";
    case ParamRole::kBoxLength:
      return "box_length";
    case ParamRole::kBoxWidth:
      return "box_width";
  }
  return "unknown";
}

inline ParamRole ParamRoleFromName(const std::string& name) {
  for (ParamRole role :
       {ParamRole::kMass, ParamRole::kStiffness, ParamRole::kDamping,
        ParamRole::kFriction, ParamRole::kFrictionResistance,
        ParamRole::kBoxLength, ParamRole::kBoxWidth}) {
    if (name == ParamRoleName(role)) return role;
  }
  throw Error(ErrorCode::kSchema, "unknown parameter role: " + name);
}

inline const char* ChannelKindName(ChannelKind kind) {
  switch (kind) {
    case ChannelKind::kNormalForce:
      return "normal_force";
    case ChannelKind::kTangentForce:
      return "tangent_force";
    case ChannelKind::kNormalDirX:
      return "normal_dir_x";
    case ChannelKind::kNormalDirY:
      return "normal_dir_y";
  }
  return "unknown";
}

inline ChannelKind ChannelKindFromName(const std::string& name) {
  for (ChannelKind kind :
       {ChannelKind::kNormalForce, ChannelKind::kTangentForce,
        ChannelKind::kNormalDirX, ChannelKind::kNormalDirY}) {
    if (name == ChannelKindName(kind)) return kind;
  }
  throw Error(ErrorCode::kSchema, "unknown channel kind: " + name);
}

struct DynamicsSpec {
  double dt = 0.02;                  // s
  Eigen::VectorXd workspace_lower;   // m
  Eigen::VectorXd workspace_upper;   // m
  Eigen::VectorXd velocity_lower;    // m/s
  Eigen::VectorXd velocity_upper;    // m/s
  std::optional<double> object_mass;  // kg, free object only
  double gravity = 9.81;              // m/s^2

  int dim() const { return static_cast<int>(workspace_lower.size()); }

  void Validate() const {
    const int n = dim();
    if (!(dt > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "dt must be positive");
    }
    if (n < 1 || workspace_upper.size() != n || velocity_lower.size() != n ||
        velocity_upper.size() != n) {
      throw Error(ErrorCode::kInvalidArgument, "dynamics bounds mismatch");
    }
    if ((workspace_lower.array() > workspace_upper.array()).any() ||
        (velocity_lower.array() > velocity_upper.array()).any()) {
      throw Error(ErrorCode::kInvalidArgument, "dynamics bounds not ordered");
    }
    if (object_mass && !(*object_mass > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "object mass must be positive");
    }
  }
};

struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::kRubbing;
  std::vector<ParamRole> roles;
  ParamVector truth;  // theta*
  ContactParams contact;
  ContactModelOptions contact_options;
  ParamBelief prior;
  DynamicsSpec dynamics;
  SignedDistanceField geometry;
  double object_radius = 0.0;  // hefted or pinched ball (m)
  RobotState initial_state;
  std::vector<Channel> channels;
  Eigen::VectorXd noise_std;  // per channel
  Eigen::Vector3d tangent_axis = Eigen::Vector3d::UnitY();

  std::string name() const { return ScenarioName(kind); }
  int dim() const { return static_cast<int>(roles.size()); }
  int num_channels() const { return static_cast<int>(channels.size()); }

  void Validate() const {
    const int d = dim();
    if (d < 1 || truth.size() != d) {
      throw Error(ErrorCode::kInvalidArgument, "scenario parameter mismatch");
    }
    prior.Validate();
    if (prior.dim() != d) {
      throw Error(ErrorCode::kInvalidArgument, "prior dimension mismatch");
    }
    if (!prior.Contains(truth.values)) {
      throw Error(ErrorCode::kInvalidArgument, "true parameters outside support");
    }
    dynamics.Validate();
    contact.Validate();
    geometry.Validate();
    if (channels.empty() || noise_std.size() != num_channels() ||
        !(noise_std.array() > 0.0).all()) {
      throw Error(ErrorCode::kInvalidArgument, "invalid sensor channels");
    }
    if (initial_state.position.size() != dynamics.dim() ||
        initial_state.velocity.size() != dynamics.dim() ||
        !initial_state.AllFinite()) {
      throw Error(ErrorCode::kInvalidArgument, "invalid initial state");
    }
    if (kind == ScenarioKind::kHefting &&
        (!initial_state.object || !dynamics.object_mass)) {
      throw Error(ErrorCode::kInvalidArgument, "hefting needs a free object");
    }
  }
};

namespace internal {

inline Eigen::VectorXd Vec(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

inline ParamBelief MakeBelief(const std::vector<std::string>& names,
                              const Eigen::VectorXd& mode,
                              const Eigen::VectorXd& variance,
                              const Eigen::VectorXd& lower,
                              const Eigen::VectorXd& upper) {
  ParamBelief belief;
  belief.mode.values = mode;
  belief.mode.names = names;
  belief.covariance = variance.asDiagonal();
  belief.lower = lower;
  belief.upper = upper;
  return belief;
}

inline void SetRobot(ScenarioSpec& spec, const Eigen::VectorXd& position) {
  spec.initial_state.position = position;
  spec.initial_state.velocity = Eigen::VectorXd::Zero(position.size());
}

}  // namespace internal

// Registry of the four tasks with their default geometry, contact
// parameters, priors and sensor channels.
inline ScenarioSpec MakeScenario(const std::string& name) {
  using internal::Vec;
  ScenarioSpec spec;
  spec.kind = ScenarioKindFromName(name);

  switch (spec.kind) {
    case ScenarioKind::kHefting: {
      // ball resting on a flat hand moving along z
      const double mass = 0.05;
      spec.roles = {ParamRole::kMass};
      spec.truth = {Vec({mass}), {"mass"}};
      spec.contact = {500.0, 0.0, 0.0, 0.0};
      spec.prior = internal::MakeBelief({"mass"}, Vec({0.15}), Vec({10.0}),
                                        Vec({0.005}), Vec({1.0}));
      spec.dynamics.workspace_lower = Vec({0.0});
      spec.dynamics.workspace_upper = Vec({0.6});
      spec.dynamics.velocity_lower = Vec({-1.0});
      spec.dynamics.velocity_upper = Vec({1.0});
      spec.dynamics.object_mass = mass;
      spec.geometry = SignedDistanceField::HalfSpace(Eigen::Vector3d::Zero(),
                                                     Eigen::Vector3d::UnitZ());
      spec.object_radius = 0.033;
      internal::SetRobot(spec, Vec({0.2}));
      // ball center at its force equilibrium on the hand
      const double sag = mass * spec.dynamics.gravity / spec.contact.stiffness;
      spec.initial_state.object =
          ObjectState{Vec({0.2 + spec.object_radius - sag}), Vec({0.0})};
      spec.channels = {{ChannelKind::kNormalForce, 0}};
      spec.noise_std = Vec({0.25});
      break;
    }
    case ScenarioKind::kRubbing: {
      // planar end effector against a wall occupying x < 0.4
      spec.roles = {ParamRole::kFriction};
      spec.truth = {Vec({0.4}), {"friction"}};
      spec.contact = {100.0, 1.0, 0.4, 2.0};
      spec.prior = internal::MakeBelief({"friction"}, Vec({0.6}), Vec({1.0}),
                                        Vec({0.0}), Vec({1.0}));
      spec.dynamics.workspace_lower = Vec({0.0, 0.5});
      spec.dynamics.workspace_upper = Vec({1.0, 1.0});
      spec.dynamics.velocity_lower = Vec({-1.0, -1.0});
      spec.dynamics.velocity_upper = Vec({1.0, 1.0});
      spec.geometry = SignedDistanceField::HalfSpace(
          Eigen::Vector3d(0.4, 0.0, 0.0), Eigen::Vector3d::UnitX());
      internal::SetRobot(spec, Vec({0.5, 0.8}));
      spec.channels = {{ChannelKind::kNormalForce, 0},
                       {ChannelKind::kTangentForce, 0}};
      spec.noise_std = Vec({0.25, 0.25});
      spec.tangent_axis = Eigen::Vector3d::UnitY();
      break;
    }
    case ScenarioKind::kPinching: {
      // two fingers closing symmetrically on a fixed ball; q is the gap
      // between each fingertip and the ball surface
      spec.roles = {ParamRole::kStiffness, ParamRole::kDamping};
      spec.truth = {Vec({800.0, 10.0}), {"stiffness", "damping"}};
      spec.contact = {800.0, 10.0, 0.0, 0.0};
      spec.prior = internal::MakeBelief(
          {"stiffness", "damping"}, Vec({720.0, 8.0}), Vec({100.0, 10.0}),
          Vec({100.0, 0.0}), Vec({2000.0, 50.0}));
      spec.dynamics.workspace_lower = Vec({-0.02});
      spec.dynamics.workspace_upper = Vec({0.04});
      spec.dynamics.velocity_lower = Vec({-0.1});
      spec.dynamics.velocity_upper = Vec({0.1});
      spec.object_radius = 0.03;
      spec.geometry = SignedDistanceField::Sphere(Eigen::Vector3d::Zero(),
                                                  spec.object_radius);
      internal::SetRobot(spec, Vec({0.004}));
      spec.channels = {{ChannelKind::kNormalForce, 0},
                       {ChannelKind::kNormalForce, 1}};
      spec.noise_std = Vec({0.25, 0.25});
      break;
    }
    case ScenarioKind::kContouring: {
      // planar point probe around a fixed box of unknown length and width
      spec.roles = {ParamRole::kBoxLength, ParamRole::kBoxWidth};
      spec.truth = {Vec({0.126, 0.05}), {"box_length", "box_width"}};
      spec.contact = {500.0, 0.0, 0.0, 0.0};
      spec.prior = internal::MakeBelief(
          {"box_length", "box_width"}, Vec({0.10, 0.07}), Vec({0.001, 0.001}),
          Vec({0.02, 0.02}), Vec({0.3, 0.2}));
      spec.dynamics.workspace_lower = Vec({0.3, -0.15});
      spec.dynamics.workspace_upper = Vec({0.8, 0.15});
      spec.dynamics.velocity_lower = Vec({-0.5, -0.5});
      spec.dynamics.velocity_upper = Vec({0.5, 0.5});
      spec.geometry = SignedDistanceField::Box(Eigen::Vector3d(0.55, 0.0, 0.0),
                                               0.126, 0.05);
      internal::SetRobot(spec, Vec({0.5, -0.1}));
      spec.channels = {{ChannelKind::kNormalForce, 0},
                       {ChannelKind::kNormalDirX, 0},
                       {ChannelKind::kNormalDirY, 0}};
      spec.noise_std = Vec({0.25, 0.05, 0.05});
      break;
    }
  }
  spec.Validate();
  return spec;
}

// Contact parameters, object mass and geometry with the estimated entries
// replaced by theta.
struct PhysicalParams {
  ContactParams contact;
  double mass = 0.0;
  SignedDistanceField field;
};

inline PhysicalParams Instantiate(const ScenarioSpec& spec,
                                  const Eigen::VectorXd& theta) {
  if (theta.size() != spec.dim()) {
    throw Error(ErrorCode::kInvalidArgument, "theta dimension mismatch");
  }
  PhysicalParams phys;
  phys.contact = spec.contact;
  phys.mass = spec.dynamics.object_mass.value_or(0.0);
  phys.field = spec.geometry;
  for (int i = 0; i < spec.dim(); ++i) {
    switch (spec.roles[i]) {
      case ParamRole::kMass:
        phys.mass = theta[i];
        break;
      case ParamRole::kStiffness:
        phys.contact.stiffness = theta[i];
        break;
      case ParamRole::kDamping:
        phys.contact.damping = theta[i];
        break;
      case ParamRole::kFriction:
        phys.contact.friction = theta[i];
        break;
      case ParamRole::kFrictionResistance:
        phys.contact.resistance = theta[i];
        break;
      case ParamRole::kBoxLength:
        phys.field.length = theta[i];
        break;
      case ParamRole::kBoxWidth:
        phys.field.width = theta[i];
        break;
    }
  }
  return phys;
}

// Contact pair kinematics of the scenario at state x.
inline std::vector<ContactKinematics> ContactPairs(const ScenarioSpec& spec,
                                                   const PhysicalParams& phys,
                                                   const RobotState& x) {
  std::vector<ContactKinematics> pairs;
  switch (spec.kind) {
    case ScenarioKind::kHefting: {
      // hand plane below the ball, normal +z
      ContactKinematics k;
      k.state.phi_n =
          x.object->position[0] - spec.object_radius - x.position[0];
      k.state.v_n = x.object->velocity[0] - x.velocity[0];
      k.state.normal = Eigen::Vector3d::UnitZ();
      pairs.push_back(k);
      break;
    }
    case ScenarioKind::kPinching: {
      const SignedDistanceField& ball = phys.field;
      for (double side : {1.0, -1.0}) {
        ContactFrameMap map;
        map.offset = ball.origin + side * ball.radius * Eigen::Vector3d::UnitX();
        map.embedding = side * Eigen::Vector3d::UnitX();
        pairs.push_back(ContactStateFrom(x, ball, map));
      }
      break;
    }
    case ScenarioKind::kRubbing:
    case ScenarioKind::kContouring: {
      ContactFrameMap map;
      map.embedding = Eigen::Matrix<double, 3, 2>::Identity();
      pairs.push_back(ContactStateFrom(x, phys.field, map));
      break;
    }
  }
  return pairs;
}

// Noiseless measurement y = g_theta(x).
inline Measurement SensorEval(const ScenarioSpec& spec, const RobotState& x,
                              const Eigen::VectorXd& theta) {
  const PhysicalParams phys = Instantiate(spec, theta);
  const std::vector<ContactKinematics> pairs = ContactPairs(spec, phys, x);
  Measurement y;
  y.values.resize(spec.num_channels());
  for (int c = 0; c < spec.num_channels(); ++c) {
    const ContactState& cs = pairs[spec.channels[c].pair].state;
    const ContactForce force =
        ComputeContactForce(phys.contact, cs, spec.contact_options);
    const double gate = force.lambda_n > 0.0 ? 1.0 : 0.0;
    switch (spec.channels[c].kind) {
      case ChannelKind::kNormalForce:
        y.values[c] = force.lambda_n;
        break;
      case ChannelKind::kTangentForce:
        y.values[c] = force.lambda_t.dot(spec.tangent_axis);
        break;
      case ChannelKind::kNormalDirX:
        y.values[c] = gate * cs.normal.x();
        break;
      case ChannelKind::kNormalDirY:
        y.values[c] = gate * cs.normal.y();
        break;
    }
  }
  return y;
}

// Measurement with i.i.d. zero-mean Gaussian noise of per-channel std.
inline Measurement SensorSample(const ScenarioSpec& spec, const RobotState& x,
                                const Eigen::VectorXd& theta, Rng& rng,
                                const Eigen::VectorXd& noise_std) {
  Measurement y = SensorEval(spec, x, theta);
  if (noise_std.size() != y.values.size()) {
    throw Error(ErrorCode::kInvalidArgument, "noise dimension mismatch");
  }
  for (Eigen::Index c = 0; c < y.values.size(); ++c) {
    y.values[c] += noise_std[c] * rng.Gaussian();
  }
  return y;
}

// dy/dtheta at x. object_sensitivity holds d(object position, velocity) /
// dtheta (2 x d) for scenarios with a free object and is empty otherwise.
// The tangent direction is held fixed, which is exact when it does not
// depend on theta.
inline Eigen::MatrixXd SensorJacobian(const ScenarioSpec& spec,
                                      const RobotState& x,
                                      const Eigen::MatrixXd& object_sensitivity,
                                      const Eigen::VectorXd& theta) {
  const int d = spec.dim();
  const PhysicalParams phys = Instantiate(spec, theta);
  const std::vector<ContactKinematics> pairs = ContactPairs(spec, phys, x);

  // d(K, C, mu, R)/dtheta
  Eigen::MatrixXd dparams = Eigen::MatrixXd::Zero(4, d);
  for (int i = 0; i < d; ++i) {
    switch (spec.roles[i]) {
      case ParamRole::kStiffness:
        dparams(0, i) = 1.0;
        break;
      case ParamRole::kDamping:
        dparams(1, i) = 1.0;
        break;
      case ParamRole::kFriction:
        dparams(2, i) = 1.0;
        break;
      case ParamRole::kFrictionResistance:
        dparams(3, i) = 1.0;
        break;
      default:
        break;
    }
  }

  // d[lambda_n; lambda_s]/dtheta per pair
  std::vector<Eigen::MatrixXd> dforce;
  for (const ContactKinematics& k : pairs) {
    Eigen::MatrixXd dstate = Eigen::MatrixXd::Zero(3, d);
    for (int i = 0; i < d; ++i) {
      int shape = -1;
      if (spec.roles[i] == ParamRole::kBoxLength) shape = 0;
      if (spec.roles[i] == ParamRole::kBoxWidth) shape = 1;
      if (shape >= 0 && shape < k.dphi_dshape.size()) {
        dstate(0, i) = k.dphi_dshape[shape];
        dstate(1, i) = k.dvn_dshape[shape];
        dstate(2, i) = k.dvt_dshape[shape];
      }
    }
    if (object_sensitivity.size() > 0) {
      dstate.row(0) += object_sensitivity.row(0);
      dstate.row(1) += object_sensitivity.row(1);
    }
    const ContactForceJacobian jac =
        ContactForceGradient(phys.contact, k.state, spec.contact_options);
    dforce.push_back(jac.wrt_params * dparams + jac.wrt_state * dstate);
  }

  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(spec.num_channels(), d);
  for (int c = 0; c < spec.num_channels(); ++c) {
    const int p = spec.channels[c].pair;
    switch (spec.channels[c].kind) {
      case ChannelKind::kNormalForce:
        g.row(c) = dforce[p].row(0);
        break;
      case ChannelKind::kTangentForce:
        g.row(c) =
            dforce[p].row(1) * pairs[p].state.tangent_dir.dot(spec.tangent_axis);
        break;
      case ChannelKind::kNormalDirX:
      case ChannelKind::kNormalDirY:
        // piecewise constant in theta wherever the gate is open
        break;
    }
  }
  return g;
}

// 100 (theta_hat - theta*) / theta*
inline Eigen::VectorXd PercentError(const Eigen::VectorXd& estimate,
                                    const Eigen::VectorXd& truth) {
  if (estimate.size() != truth.size()) {
    throw Error(ErrorCode::kInvalidArgument, "parameter dimension mismatch");
  }
  if ((truth.array() == 0.0).any()) {
    throw Error(ErrorCode::kInvalidArgument,
                "percent error undefined for zero true value");
  }
  return 100.0 * (estimate - truth).cwiseQuotient(truth);
}

// |theta_hat - theta*|
inline Eigen::VectorXd AbsError(const Eigen::VectorXd& estimate,
                                const Eigen::VectorXd& truth) {
  if (estimate.size() != truth.size()) {
    throw Error(ErrorCode::kInvalidArgument, "parameter dimension mismatch");
  }
  return (estimate - truth).cwiseAbs();
}

}  // namespace caoed

#endif  // CAOED_SCENARIOS_H_
