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

#ifndef CAOED_CORE_H_
#define CAOED_CORE_H_

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "caoed/error.h"

namespace caoed {

// ----- linear algebra helpers ----- //

// replace m with (m + m^T) / 2
inline void Symmetrize(Eigen::MatrixXd& m) {
  const Eigen::MatrixXd transposed = m.transpose();
  m = 0.5 * (m + transposed);
}

inline double MinEigenvalue(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

inline double MaxEigenvalue(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  return solver.eigenvalues().maxCoeff();
}

inline bool AllFinite(const Eigen::MatrixXd& m) { return m.allFinite(); }

inline Eigen::VectorXd ClampToBox(const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& lower,
                                  const Eigen::VectorXd& upper) {
  return x.cwiseMax(lower).cwiseMin(upper);
}

// ----- parameters ----- //

// Physical parameter vector theta with a label per entry.
struct ParamVector {
  Eigen::VectorXd values;
  std::vector<std::string> names;

  int size() const { return static_cast<int>(values.size()); }
  double operator[](int i) const { return values[i]; }
};

// Gaussian belief over parameters restricted to a box support.
struct ParamBelief {
  ParamVector mode;
  Eigen::MatrixXd covariance;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  int dim() const { return mode.size(); }

  bool Contains(const Eigen::VectorXd& theta) const {
    return (theta.array() >= lower.array()).all() &&
           (theta.array() <= upper.array()).all();
  }

  // Throws unless the belief satisfies its invariants.
  void Validate() const {
    const int d = dim();
    if (d < 1 || covariance.rows() != d || covariance.cols() != d ||
        lower.size() != d || upper.size() != d) {
      throw Error(ErrorCode::kInvalidArgument, "belief dimension mismatch");
    }
    if (!mode.values.allFinite() || !covariance.allFinite()) {
      throw Error(ErrorCode::kInvalidArgument, "belief has non-finite entries");
    }
    const double scale = covariance.cwiseAbs().maxCoeff();
    if ((covariance - covariance.transpose()).cwiseAbs().maxCoeff() >
        1e-10 * std::max(scale, 1e-300)) {
      throw Error(ErrorCode::kInvalidArgument, "belief covariance not symmetric");
    }
    if (MinEigenvalue(covariance) <= 0.0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "belief covariance not positive definite");
    }
    if (!Contains(mode.values)) {
      throw Error(ErrorCode::kInvalidArgument, "belief mode outside support");
    }
  }
};

// ----- robot and experiment data ----- //

// Free body carried or touched by the robot (e.g. the hefted ball).
struct ObjectState {
  Eigen::VectorXd position;
  Eigen::VectorXd velocity;
};

struct RobotState {
  Eigen::VectorXd position;  // task-space q (m)
  Eigen::VectorXd velocity;  // task-space qdot (m/s)
  std::optional<ObjectState> object;

  bool AllFinite() const {
    bool ok = position.allFinite() && velocity.allFinite();
    if (object) {
      ok = ok && object->position.allFinite() && object->velocity.allFinite();
    }
    return ok;
  }
};

struct ControlInput {
  Eigen::VectorXd command;  // task-space velocity command (m/s)
};

struct Measurement {
  Eigen::VectorXd values;  // sensor channels, forces in N
};

// Contact force lambda = [lambda_n; lambda_t]. lambda_t is a world-frame
// vector so that its direction is explicit.
struct ContactForce {
  double lambda_n = 0.0;
  Eigen::Vector3d lambda_t = Eigen::Vector3d::Zero();
};

// States x_0..x_T and the contact forces lambda_0..lambda_{T-1} evaluated at
// x_0..x_{T-1}.
struct Trajectory {
  std::vector<RobotState> states;
  std::vector<ContactForce> contacts;
  double dt = 0.0;

  int horizon() const { return static_cast<int>(contacts.size()); }
};

// Dataset of measurements and controls together with the executed
// trajectory. measurements[t] is taken at executed.states[t].
struct Experiment {
  std::vector<Measurement> measurements;
  std::vector<ControlInput> controls;
  Trajectory executed;
  Eigen::VectorXd noise_std;

  int size() const { return static_cast<int>(measurements.size()); }

  void Validate() const {
    if (measurements.size() != controls.size()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "experiment measurements and controls differ in length");
    }
    if (executed.states.empty()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "experiment has no initial state");
    }
  }
};

// Stack measurements into a single vector (time-major).
inline Eigen::VectorXd StackMeasurements(
    const std::vector<Measurement>& measurements) {
  Eigen::Index total = 0;
  for (const auto& m : measurements) total += m.values.size();
  Eigen::VectorXd stacked(total);
  Eigen::Index offset = 0;
  for (const auto& m : measurements) {
    stacked.segment(offset, m.values.size()) = m.values;
    offset += m.values.size();
  }
  return stacked;
}

}  // namespace caoed

#endif  // CAOED_CORE_H_
