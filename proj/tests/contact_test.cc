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


#include <cmath>

#include "caoed/contact.h"
#include "caoed/error.h"
#include "caoed/rng.h"
#include "gtest/gtest.h"
#include "test_support.h"

namespace caoed {
namespace {

ContactState State(double phi, double v_n, double v_t) {
  ContactState cs;
  cs.phi_n = phi;
  cs.v_n = v_n;
  cs.v_t = v_t;
  cs.tangent_dir = v_t > 0.0 ? Eigen::Vector3d(Eigen::Vector3d::UnitY())
                             : Eigen::Vector3d(Eigen::Vector3d::Zero());
  return cs;
}

const ContactParams kRubbing{100.0, 1.0, 0.4, 2.0};

TEST(ContactForce, RubbingPenetrationAtRest) {
  const ContactForce f = ComputeContactForce(kRubbing, State(-0.01, 0.0, 0.0));
  EXPECT_NEAR(f.lambda_n, 1.0, 1e-12);
  EXPECT_EQ(f.lambda_t.norm(), 0.0);
}

TEST(ContactForce, SeparationIsForceFree) {
  const ContactForce f = ComputeContactForce(kRubbing, State(0.05, 0.0, 0.3));
  EXPECT_EQ(f.lambda_n, 0.0);
  EXPECT_EQ(f.lambda_t.norm(), 0.0);
}

TEST(ContactForce, PinchingSymmetricDamping) {
  const ContactParams p{800.0, 10.0, 0.0, 0.0};
  const ContactForce f = ComputeContactForce(p, State(-0.001, -0.02, 0.0));
  EXPECT_NEAR(f.lambda_n, 0.6, 1e-12);
}

TEST(ContactForce, PinchingSignedDamping) {
  const ContactParams p{800.0, 10.0, 0.0, 0.0};
  ContactModelOptions opts;
  opts.signed_damping = true;
  const ContactForce f = ComputeContactForce(p, State(-0.001, -0.02, 0.0), opts);
  EXPECT_NEAR(f.lambda_n, 1.0, 1e-12);
}

TEST(ContactForce, TangentialIsMinOfConeAndViscous) {
  // cone branch: mu lambda_n = 0.4 < R v_t = 1.0
  ContactForce f = ComputeContactForce(kRubbing, State(-0.01, 0.0, 0.5));
  EXPECT_NEAR(f.lambda_t.y(), -0.4, 1e-12);
  // viscous branch: R v_t = 0.2 < 0.4
  f = ComputeContactForce(kRubbing, State(-0.01, 0.0, 0.1));
  EXPECT_NEAR(f.lambda_t.y(), -0.2, 1e-12);
}

TEST(ContactForce, SmoothRelaxationApproachesRamp) {
  ContactModelOptions opts;
  opts.smooth = true;
  opts.sharpness = 1e6;
  const ContactForce f = ComputeContactForce(kRubbing, State(-0.01, 0.0, 0.5), opts);
  EXPECT_NEAR(f.lambda_n, 1.0, 1e-5);
  EXPECT_NEAR(f.lambda_t.y(), -0.4, 1e-5);
}

TEST(ContactForce, RandomizedProperties) {
  Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    const testing::ContactCase c = testing::RandomContactCase(rng);
    const ContactForce f = ComputeContactForce(c.params, c.state);
    EXPECT_GE(f.lambda_n, 0.0);
    if (c.state.phi_n > 0.0) {
      EXPECT_EQ(f.lambda_n, 0.0);
      EXPECT_EQ(f.lambda_t.norm(), 0.0);
    }
    EXPECT_LE(f.lambda_t.dot(c.state.v_t * c.state.tangent_dir), 0.0);
    EXPECT_LE(f.lambda_t.norm(), c.params.friction * f.lambda_n + 1e-12);
  }
}

TEST(ContactGradient, NormalStiffnessSlopeIsMinusPhi) {
  const ContactForceJacobian j = ContactForceGradient(kRubbing, State(-0.01, -0.1, 0.0));
  EXPECT_NEAR(j.wrt_params(0, 0), 0.01, 1e-15);
}

TEST(ContactGradient, SeparationHasZeroGradient) {
  const ContactForceJacobian j = ContactForceGradient(kRubbing, State(0.02, -0.1, 0.3));
  EXPECT_EQ(j.wrt_params.norm(), 0.0);
  EXPECT_EQ(j.wrt_state.norm(), 0.0);
}

TEST(ContactGradient, ConeBranchFrictionSlope) {
  // lambda_t = -mu lambda_n tangent_dir, so d lambda_s / d mu = -lambda_n
  const ContactForceJacobian j = ContactForceGradient(kRubbing, State(-0.01, 0.0, 0.5));
  EXPECT_NEAR(j.wrt_params(1, 2), -1.0, 1e-12);
  EXPECT_EQ(j.wrt_params(1, 3), 0.0);
}

TEST(ContactGradient, TieTakesViscousBranch) {
  // mu lambda_n = R v_t = 0.4
  const ContactForceJacobian j = ContactForceGradient(kRubbing, State(-0.01, 0.0, 0.2));
  EXPECT_EQ(j.wrt_params(1, 2), 0.0);
  EXPECT_NEAR(j.wrt_params(1, 3), -0.2, 1e-15);
}

TEST(ContactGradient, MatchesCentralDifferences) {
  Rng rng(5);
  int checked = 0;
  while (checked < 1000) {
    const testing::ContactCase c = testing::RandomContactCase(rng);
    const std::optional<double> err = testing::ContactGradientError(c);
    if (!err) continue;
    EXPECT_LT(*err, 1e-5);
    ++checked;
  }
}

TEST(Sdf, HalfSpaceDistance) {
  const SignedDistanceField plane =
      SignedDistanceField::HalfSpace(Eigen::Vector3d::Zero(), Eigen::Vector3d::UnitZ());
  const SdfSample s = EvaluateSdf(plane, Eigen::Vector3d(0.3, -0.2, 0.1));
  EXPECT_NEAR(s.phi, 0.1, 1e-15);
  EXPECT_EQ(s.normal, Eigen::Vector3d::UnitZ());
  EXPECT_EQ(s.dphi_dshape.size(), 0);
}

TEST(Sdf, SphereCenterDepth) {
  const SignedDistanceField ball = SignedDistanceField::Sphere(Eigen::Vector3d::Zero(), 0.03);
  EXPECT_NEAR(EvaluateSdf(ball, Eigen::Vector3d::Zero()).phi, -0.03, 1e-15);
  EXPECT_NEAR(EvaluateSdf(ball, Eigen::Vector3d(0.05, 0, 0)).phi, 0.02, 1e-15);
}

TEST(Sdf, BoxFaceShapeDerivative) {
  const double l = 0.126, w = 0.05;
  const Eigen::Vector3d point(l / 2, 0.01, 0.0);
  const SdfSample s = EvaluateSdf(SignedDistanceField::Box(Eigen::Vector3d::Zero(), l, w), point);
  EXPECT_NEAR(s.phi, 0.0, 1e-15);
  EXPECT_EQ(s.dphi_dshape[0], -0.5);
  EXPECT_EQ(s.dphi_dshape[1], 0.0);

  // one-sided differences away from the face kink agree from both sides
  const double h = 1e-7;
  const double up =
      EvaluateSdf(SignedDistanceField::Box(Eigen::Vector3d::Zero(), l + h, w), point).phi;
  const double down =
      EvaluateSdf(SignedDistanceField::Box(Eigen::Vector3d::Zero(), l - h, w), point).phi;
  EXPECT_NEAR(up / h, -0.5, 1e-6);
  EXPECT_NEAR(-down / h, -0.5, 1e-6);
}

TEST(Sdf, BoxShapeDerivativesMatchFiniteDifferences) {
  Rng rng(8);
  for (int i = 0; i < 200; ++i) {
    const double l = rng.Uniform(0.05, 0.2), w = rng.Uniform(0.03, 0.1);
    const double yaw = rng.Uniform(-1.0, 1.0);
    const Eigen::Vector3d c(rng.Uniform(-0.1, 0.1), rng.Uniform(-0.1, 0.1), 0.0);
    const Eigen::Vector3d p(rng.Uniform(-0.3, 0.3), rng.Uniform(-0.3, 0.3), 0.0);
    const SdfSample s = EvaluateSdf(SignedDistanceField::Box(c, l, w, yaw), p);
    const double h = 1e-7;
    const double dl = (EvaluateSdf(SignedDistanceField::Box(c, l + h, w, yaw), p).phi -
                       EvaluateSdf(SignedDistanceField::Box(c, l - h, w, yaw), p).phi) /
                      (2 * h);
    const double dw = (EvaluateSdf(SignedDistanceField::Box(c, l, w + h, yaw), p).phi -
                       EvaluateSdf(SignedDistanceField::Box(c, l, w - h, yaw), p).phi) /
                      (2 * h);
    EXPECT_NEAR(s.dphi_dshape[0], dl, 1e-6);
    EXPECT_NEAR(s.dphi_dshape[1], dw, 1e-6);
    EXPECT_NEAR(s.normal.norm(), 1.0, 1e-12);
  }
}

TEST(Sdf, NonpositiveShapeIsRejected) {
  try {
    EvaluateSdf(SignedDistanceField::Box(Eigen::Vector3d::Zero(), 0.0, 0.05),
                Eigen::Vector3d::Zero());
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonpositiveShape);
    EXPECT_STREQ(e.what(), "nonpositive shape parameter");
  }
}

const SignedDistanceField kWall =
    SignedDistanceField::HalfSpace(Eigen::Vector3d(0.4, 0, 0), Eigen::Vector3d::UnitX());

TEST(ContactStateFrom, StraightIntoWall) {
  const ContactState cs =
      ContactStateFrom(Eigen::Vector3d(0.41, 0.7, 0), Eigen::Vector3d(-0.3, 0, 0), kWall).state;
  EXPECT_NEAR(cs.phi_n, 0.01, 1e-15);
  EXPECT_NEAR(cs.v_n, -0.3, 1e-15);
  EXPECT_EQ(cs.v_t, 0.0);
  EXPECT_EQ(cs.tangent_dir.norm(), 0.0);
}

TEST(ContactStateFrom, ParallelToWall) {
  const ContactState cs =
      ContactStateFrom(Eigen::Vector3d(0.41, 0.7, 0), Eigen::Vector3d(0, 0.2, 0), kWall).state;
  EXPECT_EQ(cs.v_n, 0.0);
  EXPECT_NEAR(cs.v_t, 0.2, 1e-15);
  EXPECT_NEAR(cs.tangent_dir.norm(), 1.0, 1e-15);
}

TEST(ContactStateFrom, FortyFiveDegreeApproach) {
  const ContactState cs =
      ContactStateFrom(Eigen::Vector3d(0.41, 0.7, 0), Eigen::Vector3d(-0.1, 0.1, 0), kWall).state;
  EXPECT_NEAR(cs.v_n, -0.1, 1e-15);
  EXPECT_NEAR(cs.v_t, 0.1, 1e-15);
}

TEST(ContactStateFrom, TaskSpaceEmbedding) {
  RobotState x;
  x.position = Eigen::Vector2d(0.39, 0.6);
  x.velocity = Eigen::Vector2d(-0.1, 0.0);
  ContactFrameMap map;
  map.embedding = Eigen::Matrix<double, 3, 2>::Identity();
  const ContactState cs = ContactStateFrom(x, kWall, map).state;
  EXPECT_NEAR(cs.phi_n, -0.01, 1e-15);
  EXPECT_NEAR(cs.v_n, -0.1, 1e-15);
}

}  // namespace
}  // namespace caoed
