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

#ifndef CAOED_CONTACT_H_
#define CAOED_CONTACT_H_

#include <Eigen/Dense>
#include <cmath>

#include "caoed/core.h"
#include "caoed/error.h"

namespace caoed {

// Soft contact model coefficients.
struct ContactParams {
  double stiffness = 0.0;   // K (N/m)
  double damping = 0.0;     // C (N s/m)
  double friction = 0.0;    // mu
  double resistance = 0.0;  // R (N s/m)

  void Validate() const {
    if (!(stiffness >= 0.0) || !(damping >= 0.0) || !(friction >= 0.0) ||
        !(resistance >= 0.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "contact parameters must be nonnegative");
    }
  }
};

struct ContactModelOptions {
  // Replace max(0, x) by softplus with the given sharpness (1/N). Intended
  // for smooth landscape visualization only.
  bool smooth = false;
  double sharpness = 200.0;
  // Damp with -C v_n (approach stiffens, retreat softens) instead of the
  // symmetric -C |v_n|.
  bool signed_damping = false;
};

// Contact-frame quantities for one body pair. v_t is the tangential speed
// (>= 0) and tangent_dir the unit sliding direction, zero when v_t == 0.
struct ContactState {
  double phi_n = 0.0;
  double v_n = 0.0;
  double v_t = 0.0;
  Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
  Eigen::Vector3d tangent_dir = Eigen::Vector3d::Zero();
};

// ----- signed distance fields ----- //

enum class ShapeKind { kHalfSpace, kBox, kSphere };

// Box is a planar rectangle (length along local x, width along local y)
// extruded along world z and rotated by yaw about z.
struct SignedDistanceField {
  ShapeKind kind = ShapeKind::kHalfSpace;
  Eigen::Vector3d origin = Eigen::Vector3d::Zero();
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
  double yaw = 0.0;
  double length = 0.0;
  double width = 0.0;
  double radius = 0.0;

  static SignedDistanceField HalfSpace(const Eigen::Vector3d& point,
                                       const Eigen::Vector3d& normal) {
    SignedDistanceField f;
    f.kind = ShapeKind::kHalfSpace;
    f.origin = point;
    f.axis = normal.normalized();
    return f;
  }

  static SignedDistanceField Box(const Eigen::Vector3d& center, double length,
                                 double width, double yaw = 0.0) {
    SignedDistanceField f;
    f.kind = ShapeKind::kBox;
    f.origin = center;
    f.length = length;
    f.width = width;
    f.yaw = yaw;
    return f;
  }

  static SignedDistanceField Sphere(const Eigen::Vector3d& center,
                                    double radius) {
    SignedDistanceField f;
    f.kind = ShapeKind::kSphere;
    f.origin = center;
    f.radius = radius;
    return f;
  }

  // number of differentiable shape parameters: (l, w) for boxes
  int NumShapeParams() const { return kind == ShapeKind::kBox ? 2 : 0; }

  void Validate() const {
    if (kind == ShapeKind::kBox && !(length > 0.0 && width > 0.0)) {
      throw Error(ErrorCode::kNonpositiveShape, "nonpositive shape parameter");
    }
    if (kind == ShapeKind::kSphere && !(radius > 0.0)) {
      throw Error(ErrorCode::kNonpositiveShape, "nonpositive shape parameter");
    }
    if (kind == ShapeKind::kHalfSpace && !(axis.norm() > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "half-space normal is zero");
    }
  }
};

struct SdfSample {
  double phi = 0.0;
  Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
  Eigen::VectorXd dphi_dshape;                        // d phi / d(l, w)
  Eigen::Matrix<double, 3, Eigen::Dynamic> dnormal_dshape;  // d n / d(l, w)
};

namespace internal {

inline double SignNonnegative(double x) { return x >= 0.0 ? 1.0 : -1.0; }

inline SdfSample EvaluateBox(const SignedDistanceField& field,
                             const Eigen::Vector3d& point) {
  const double c = std::cos(field.yaw), s = std::sin(field.yaw);
  Eigen::Matrix2d rotation;
  rotation << c, -s, s, c;

  const Eigen::Vector2d d = (point - field.origin).head<2>();
  const Eigen::Vector2d p = rotation.transpose() * d;
  const Eigen::Vector2d sign(SignNonnegative(p.x()), SignNonnegative(p.y()));
  const Eigen::Vector2d half(0.5 * field.length, 0.5 * field.width);
  const Eigen::Vector2d q = p.cwiseAbs() - half;

  Eigen::Vector2d normal_local;
  Eigen::Vector2d dphi(0.0, 0.0);
  Eigen::Matrix2d dnormal_local = Eigen::Matrix2d::Zero();
  double phi;

  if (q.x() > 0.0 || q.y() > 0.0) {
    // outside: distance to the nearest point on the boundary
    const Eigen::Vector2d qp = q.cwiseMax(0.0);
    const double dist = qp.norm();
    const Eigen::Vector2d unit = qp / dist;
    phi = dist;
    normal_local = sign.cwiseProduct(unit);

    // dq/dl = (-1/2, 0), dq/dw = (0, -1/2) on components with q > 0
    const Eigen::Matrix2d projector =
        (Eigen::Matrix2d::Identity() - unit * unit.transpose()) / dist;
    for (int k = 0; k < 2; ++k) {
      if (q[k] <= 0.0) continue;
      Eigen::Vector2d dqp = Eigen::Vector2d::Zero();
      dqp[k] = -0.5;
      dphi[k] = unit.dot(dqp);
      dnormal_local.col(k) = sign.cwiseProduct(projector * dqp);
    }
  } else {
    // inside: nearest face, ties toward the lower-index axis
    const int k = q.x() >= q.y() ? 0 : 1;
    phi = q[k];
    normal_local = Eigen::Vector2d::Zero();
    normal_local[k] = sign[k];
    dphi[k] = -0.5;
  }

  SdfSample out;
  out.phi = phi;
  out.normal.head<2>() = rotation * normal_local;
  out.normal.z() = 0.0;
  out.dphi_dshape = dphi;
  out.dnormal_dshape = Eigen::Matrix<double, 3, Eigen::Dynamic>::Zero(3, 2);
  out.dnormal_dshape.topRows<2>() = rotation * dnormal_local;
  return out;
}

}  // namespace internal

// Signed distance from point to the field surface, negative inside.
inline SdfSample EvaluateSdf(const SignedDistanceField& field,
                             const Eigen::Vector3d& point) {
  if (!point.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "sdf query point not finite");
  }
  field.Validate();

  SdfSample out;
  switch (field.kind) {
    case ShapeKind::kHalfSpace: {
      const Eigen::Vector3d n = field.axis.normalized();
      out.phi = n.dot(point - field.origin);
      out.normal = n;
      break;
    }
    case ShapeKind::kSphere: {
      const Eigen::Vector3d d = point - field.origin;
      const double dist = d.norm();
      out.phi = dist - field.radius;
      out.normal = dist > 0.0 ? Eigen::Vector3d(d / dist)
                              : Eigen::Vector3d::UnitZ();
      break;
    }
    case ShapeKind::kBox:
      return internal::EvaluateBox(field, point);
  }
  out.dphi_dshape.resize(0);
  out.dnormal_dshape.resize(3, 0);
  return out;
}

// ----- contact kinematics ----- //

// Contact state together with its derivatives w.r.t. the field shape
// parameters (empty for shapes without them).
struct ContactKinematics {
  ContactState state;
  Eigen::VectorXd dphi_dshape;
  Eigen::VectorXd dvn_dshape;
  Eigen::VectorXd dvt_dshape;
  Eigen::Matrix<double, 3, Eigen::Dynamic> dnormal_dshape;
};

// Tangential speeds below this are treated as rest.
inline constexpr double kRestSpeed = 1e-12;

// Contact state of a point moving with `velocity` relative to the field.
inline ContactKinematics ContactStateFrom(const Eigen::Vector3d& point,
                                          const Eigen::Vector3d& velocity,
                                          const SignedDistanceField& field) {
  const SdfSample sdf = EvaluateSdf(field, point);
  const Eigen::Vector3d& n = sdf.normal;

  ContactKinematics out;
  out.state.phi_n = sdf.phi;
  out.state.normal = n;
  out.state.v_n = n.dot(velocity);

  const Eigen::Vector3d tangential = velocity - out.state.v_n * n;
  const double speed = tangential.norm();
  if (speed > kRestSpeed) {
    out.state.v_t = speed;
    out.state.tangent_dir = tangential / speed;
  } else {
    out.state.v_t = 0.0;
    out.state.tangent_dir.setZero();
  }

  const int ns = static_cast<int>(sdf.dphi_dshape.size());
  out.dphi_dshape = sdf.dphi_dshape;
  out.dnormal_dshape = sdf.dnormal_dshape;
  out.dvn_dshape = sdf.dnormal_dshape.transpose() * velocity;
  out.dvt_dshape = Eigen::VectorXd::Zero(ns);
  for (int k = 0; k < ns; ++k) {
    const Eigen::Vector3d dtangential =
        -out.dvn_dshape[k] * n - out.state.v_n * sdf.dnormal_dshape.col(k);
    out.dvt_dshape[k] = out.state.tangent_dir.dot(dtangential);
  }
  return out;
}

// Linear map from task-space coordinates to the world-frame contact point:
// point = offset + embedding * q, velocity = embedding * qdot.
struct ContactFrameMap {
  Eigen::Vector3d offset = Eigen::Vector3d::Zero();
  Eigen::Matrix<double, 3, Eigen::Dynamic> embedding;
};

inline ContactKinematics ContactStateFrom(const RobotState& robot,
                                          const SignedDistanceField& field,
                                          const ContactFrameMap& map) {
  const Eigen::Vector3d point = map.offset + map.embedding * robot.position;
  const Eigen::Vector3d velocity = map.embedding * robot.velocity;
  return ContactStateFrom(point, velocity, field);
}

// ----- soft contact force ----- //

namespace internal {

// max(0, x) or its softplus relaxation, with slope
struct Ramp {
  double value;
  double slope;
};

inline Ramp PositivePart(double x, const ContactModelOptions& options) {
  if (options.smooth) {
    const double z = options.sharpness * x;
    const double value =
        (z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z))) /
        options.sharpness;
    const double slope = 1.0 / (1.0 + std::exp(-z));
    return {value, slope};
  }
  // kink: derivative taken from the zero branch
  return x > 0.0 ? Ramp{x, 1.0} : Ramp{0.0, 0.0};
}

struct DampingTerm {
  double value;
  double slope;  // d/dv_n
};

inline DampingTerm Damping(double v_n, const ContactModelOptions& options) {
  if (options.signed_damping) return {v_n, 1.0};
  const double slope = v_n > 0.0 ? 1.0 : (v_n < 0.0 ? -1.0 : 0.0);
  return {std::abs(v_n), slope};
}

// min(a, b) with weights d/da, d/db
struct Minimum {
  double value;
  double weight_a;
  double weight_b;
};

inline Minimum SoftMin(double a, double b, const ContactModelOptions& options) {
  if (options.smooth) {
    // min(a, b) = b - max(0, b - a)
    const Ramp r = PositivePart(b - a, options);
    return {b - r.value, r.slope, 1.0 - r.slope};
  }
  // ties resolve to b: no friction-coefficient sensitivity at the switch
  if (a < b) return {a, 1.0, 0.0};
  return {b, 0.0, 1.0};
}

}  // namespace internal

// lambda_n = max(0, -K phi_n - C |v_n|)
// lambda_t = tangent_dir * max(-mu lambda_n, -R v_t)
inline ContactForce ComputeContactForce(
    const ContactParams& params, const ContactState& cs,
    const ContactModelOptions& options = {}) {
  const internal::DampingTerm damping = internal::Damping(cs.v_n, options);
  const internal::Ramp normal = internal::PositivePart(
      -params.stiffness * cs.phi_n - params.damping * damping.value, options);
  const internal::Minimum limit = internal::SoftMin(
      params.friction * normal.value, params.resistance * cs.v_t, options);

  ContactForce force;
  force.lambda_n = normal.value;
  force.lambda_t = -limit.value * cs.tangent_dir;
  return force;
}

// Piecewise-analytic Jacobian of [lambda_n; lambda_s] where lambda_s is the
// tangential force component along tangent_dir (lambda_t = lambda_s *
// tangent_dir). Columns: params (K, C, mu, R); state (phi_n, v_n, v_t).
struct ContactForceJacobian {
  Eigen::Matrix<double, 2, 4> wrt_params = Eigen::Matrix<double, 2, 4>::Zero();
  Eigen::Matrix<double, 2, 3> wrt_state = Eigen::Matrix<double, 2, 3>::Zero();
  double lambda_n = 0.0;
  double lambda_s = 0.0;
};

inline ContactForceJacobian ContactForceGradient(
    const ContactParams& params, const ContactState& cs,
    const ContactModelOptions& options = {}) {
  const internal::DampingTerm damping = internal::Damping(cs.v_n, options);
  const internal::Ramp normal = internal::PositivePart(
      -params.stiffness * cs.phi_n - params.damping * damping.value, options);
  const internal::Minimum limit = internal::SoftMin(
      params.friction * normal.value, params.resistance * cs.v_t, options);

  ContactForceJacobian jac;
  jac.lambda_n = normal.value;
  jac.lambda_s = cs.tangent_dir.squaredNorm() > 0.0 ? -limit.value : 0.0;

  // normal force
  jac.wrt_params(0, 0) = -normal.slope * cs.phi_n;
  jac.wrt_params(0, 1) = -normal.slope * damping.value;
  jac.wrt_state(0, 0) = -normal.slope * params.stiffness;
  jac.wrt_state(0, 1) = -normal.slope * params.damping * damping.slope;

  // tangential force along tangent_dir; zero direction carries no force
  if (cs.tangent_dir.squaredNorm() > 0.0) {
    const double wa = limit.weight_a, wb = limit.weight_b;
    const double mu = params.friction;
    jac.wrt_params(1, 0) = -wa * mu * jac.wrt_params(0, 0);
    jac.wrt_params(1, 1) = -wa * mu * jac.wrt_params(0, 1);
    jac.wrt_params(1, 2) = -wa * normal.value;
    jac.wrt_params(1, 3) = -wb * cs.v_t;
    jac.wrt_state(1, 0) = -wa * mu * jac.wrt_state(0, 0);
    jac.wrt_state(1, 1) = -wa * mu * jac.wrt_state(0, 1);
    jac.wrt_state(1, 2) = -wb * params.resistance;
  }
  return jac;
}

}  // namespace caoed

#endif  // CAOED_CONTACT_H_
