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

#ifndef CAOED_HARNESS_H_
#define CAOED_HARNESS_H_

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "caoed/contact.h"
#include "caoed/core.h"
#include "caoed/dynamics.h"
#include "caoed/error.h"
#include "caoed/estimation.h"
#include "caoed/fisher.h"
#include "caoed/planner.h"
#include "caoed/rng.h"
#include "caoed/scenarios.h"

namespace caoed {

struct RunConfig {
  int k_max = 10;
  uint64_t seed = 0;
  double noise_scale = 1.0;  // multiplies the scenario noise std
  int steps_per_update = 0;  // executed steps per experiment, 0 = horizon
  std::optional<Eigen::VectorXd> prior_mode;  // overrides the scenario prior
  MapOptions map;

  void Validate() const {
    if (k_max < 1 || !(noise_scale > 0.0) || steps_per_update < 0) {
      throw Error(ErrorCode::kInvalidArgument, "invalid run config");
    }
  }
};

struct ExperimentRecord {
  int k = 0;
  RobotState x0;
  ControlPlan plan;
  Experiment data;
  ParamVector theta_hat;
  Eigen::MatrixXd covariance;  // posterior after this experiment
  double trace_f = 0.0;        // trace of F at theta_hat on this data
  double cumulative_trace_f = 0.0;
  // contact-aware trace of F at the true parameters on this data; the same
  // yardstick for every engine
  double true_trace_f = 0.0;
  double cumulative_true_trace_f = 0.0;
  Eigen::VectorXd percent_error;
  Eigen::VectorXd abs_error;
  double plan_score = 0.0;
  int map_iterations = 0;
  bool map_converged = false;
};

// Seconds spent per phase, summed over experiments.
struct PhaseTimes {
  double plan = 0.0;
  double execute = 0.0;
  double estimate = 0.0;
  double update = 0.0;
};

struct RunRecord {
  std::string scenario;
  FisherEngine engine;
  uint64_t seed = 0;
  ParamBelief initial_belief;
  ParamVector truth;
  Eigen::VectorXd noise_std;
  std::vector<ExperimentRecord> experiments;
  PhaseTimes wall_clock;

  int k_max() const { return static_cast<int>(experiments.size()); }
};

namespace internal {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double Lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - start_).count();
    start_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace internal

inline ParamBelief InitialBelief(const ScenarioSpec& spec,
                                 const RunConfig& run) {
  ParamBelief belief = spec.prior;
  if (run.prior_mode) belief.mode.values = *run.prior_mode;
  belief.Validate();
  return belief;
}

// Closed loop: plan under the current belief, execute with theta* and noisy
// sensors, MAP estimate warm-started at the current mode, belief update with
// F at theta_hat on the new data.
inline RunRecord RunActiveLearning(const ScenarioSpec& spec,
                                   const PlannerConfig& config,
                                   const FisherEngine& engine,
                                   const RunConfig& run) {
  spec.Validate();
  config.Validate();
  engine.Validate();
  run.Validate();

  RunRecord record;
  record.scenario = spec.name();
  record.engine = engine;
  record.seed = run.seed;
  record.truth = spec.truth;
  record.initial_belief = InitialBelief(spec, run);
  record.noise_std = run.noise_scale * spec.noise_std;

  Rng root(run.seed);
  Rng planner_rng = root.Split(1);
  Rng noise_rng = root.Split(2);

  const int steps = run.steps_per_update > 0
                        ? std::min(run.steps_per_update, config.horizon)
                        : config.horizon;
  ParamBelief belief = record.initial_belief;
  RobotState x = spec.initial_state;
  ControlPlan nominal =
      ZeroPlan(spec.dynamics.dim(), config, spec.dynamics.dt);
  double cumulative = 0.0;
  double cumulative_true = 0.0;

  for (int k = 0; k < run.k_max; ++k) {
    try {
      internal::Stopwatch watch;
      ExperimentRecord rec;
      rec.k = k;
      rec.x0 = x;

      const PlanResult plan = PlanExperiment(config, spec, x, belief, engine,
                                             planner_rng, nominal,
                                             record.noise_std);
      rec.plan = plan.plan;
      rec.plan_score = plan.score;
      record.wall_clock.plan += watch.Lap();

      const std::vector<ControlInput> controls(
          plan.controls.begin(), plan.controls.begin() + steps);
      rec.data = Execute(spec, x, controls, spec.truth.values,
                         record.noise_std, noise_rng);
      record.wall_clock.execute += watch.Lap();

      const ExperimentModel model(spec, x, controls);
      const LogPosterior<ExperimentModel> lp = MakeLogPosterior(
          model, StackMeasurements(rec.data.measurements), record.noise_std,
          belief);
      const MapResult map = CaMapSolve(lp, belief.mode, engine, run.map);
      rec.theta_hat = map.theta;
      rec.map_iterations = map.iterations;
      rec.map_converged = map.converged;
      record.wall_clock.estimate += watch.Lap();

      const InfoMatrix f =
          FimTrajectory(engine, model, map.theta.values, record.noise_std);
      belief = BeliefUpdate(belief, f.matrix, map.theta);
      rec.covariance = belief.covariance;
      rec.trace_f = f.matrix.trace();
      cumulative += rec.trace_f;
      rec.cumulative_trace_f = cumulative;
      rec.true_trace_f =
          FimTrajectory(FisherEngine{}, model, spec.truth.values,
                        record.noise_std)
              .matrix.trace();
      cumulative_true += rec.true_trace_f;
      rec.cumulative_true_trace_f = cumulative_true;
      rec.percent_error = PercentError(belief.mode.values, spec.truth.values);
      rec.abs_error = AbsError(belief.mode.values, spec.truth.values);
      record.wall_clock.update += watch.Lap();

      x = rec.data.executed.states.back();
      // A fully executed plan has no remainder to shift; reuse it as is.
      nominal = steps < config.horizon ? ShiftPlan(plan.plan, steps)
                                       : plan.plan;
      record.experiments.push_back(std::move(rec));
    } catch (const Error& e) {
      throw Error(e.code(),
                  "experiment " + std::to_string(k) + ": " + e.what());
    }
  }
  return record;
}

// One closed-loop run per initial prior mode.
inline std::vector<RunRecord> RobustnessSweep(
    const ScenarioSpec& spec, const PlannerConfig& config,
    const FisherEngine& engine, const RunConfig& run,
    const std::vector<Eigen::VectorXd>& prior_modes) {
  std::vector<RunRecord> records;
  for (const Eigen::VectorXd& mode : prior_modes) {
    if (mode.size() != spec.dim() || !spec.prior.Contains(mode)) {
      throw Error(ErrorCode::kInvalidArgument, "prior mode outside support");
    }
    RunConfig r = run;
    r.prior_mode = mode;
    records.push_back(RunActiveLearning(spec, config, engine, r));
  }
  return records;
}

// ----- statistics ----- //

inline double Median(std::vector<double> values) {
  if (values.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "median of empty sample");
  }
  std::sort(values.begin(), values.end());
  const size_t n = values.size();
  return n % 2 == 1 ? values[n / 2]
                    : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

// Two-sided sign test on paired samples; ties are discarded.
inline double SignTestPValue(const std::vector<double>& a,
                             const std::vector<double>& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kInvalidArgument, "sign test needs paired samples");
  }
  int below = 0, n = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] == b[i]) continue;
    ++n;
    if (a[i] < b[i]) ++below;
  }
  if (n == 0) return 1.0;
  const int tail = std::min(below, n - below);
  double p = 0.0;
  for (int i = 0; i <= tail; ++i) {
    p += std::exp(std::lgamma(n + 1.0) - std::lgamma(i + 1.0) -
                  std::lgamma(n - i + 1.0) - n * std::log(2.0));
  }
  return std::min(1.0, 2.0 * p);
}

// Norm of the percent-error vector after the last experiment.
inline double FinalError(const RunRecord& record) {
  return record.experiments.back().percent_error.norm();
}

struct CompareReport {
  std::vector<uint64_t> seeds;
  // index 0: contact-aware, 1: baseline; traces are true_trace_f
  std::vector<double> final_error[2];
  std::vector<double> cumulative_trace_f[2];
  std::vector<double> median_error_curve[2];  // per k
  std::vector<double> median_trace_f_curve[2];
  double median_final_error[2] = {0.0, 0.0};
  double median_cumulative_trace_f[2] = {0.0, 0.0};
  double sign_test_p = 1.0;  // on final error
};

// Paired runs of both engines over seeds 0..num_seeds-1; the planner and
// sensor noise streams depend only on the seed.
inline CompareReport CompareBaseline(const ScenarioSpec& spec,
                                     const PlannerConfig& config,
                                     const RunConfig& run, int num_seeds,
                                     double fd_relative_step = 1e-4) {
  if (num_seeds < 1) {
    throw Error(ErrorCode::kInvalidArgument, "compare needs seeds");
  }
  const FisherEngine engines[2] = {
      {FisherMode::kContactAware, fd_relative_step},
      {FisherMode::kFiniteDifference, fd_relative_step}};
  CompareReport report;
  std::vector<std::vector<double>> errors[2], traces[2];
  for (int e = 0; e < 2; ++e) {
    errors[e].resize(run.k_max);
    traces[e].resize(run.k_max);
  }
  for (int s = 0; s < num_seeds; ++s) {
    report.seeds.push_back(static_cast<uint64_t>(s));
    for (int e = 0; e < 2; ++e) {
      RunConfig r = run;
      r.seed = static_cast<uint64_t>(s);
      const RunRecord rec = RunActiveLearning(spec, config, engines[e], r);
      report.final_error[e].push_back(FinalError(rec));
      report.cumulative_trace_f[e].push_back(
          rec.experiments.back().cumulative_true_trace_f);
      for (int k = 0; k < rec.k_max(); ++k) {
        errors[e][k].push_back(rec.experiments[k].percent_error.norm());
        traces[e][k].push_back(rec.experiments[k].true_trace_f);
      }
    }
  }
  for (int e = 0; e < 2; ++e) {
    for (int k = 0; k < run.k_max; ++k) {
      report.median_error_curve[e].push_back(Median(errors[e][k]));
      report.median_trace_f_curve[e].push_back(Median(traces[e][k]));
    }
    report.median_final_error[e] = Median(report.final_error[e]);
    report.median_cumulative_trace_f[e] =
        Median(report.cumulative_trace_f[e]);
  }
  report.sign_test_p =
      SignTestPValue(report.final_error[0], report.final_error[1]);
  return report;
}

// ----- information landscape ----- //

enum class LandscapeAxes {
  kPhiVn,    // (phi_n, v_n), v_t = 0
  kVnVt,     // (v_n, v_t) at fixed penetration
  kPhiDphi,  // (phi_n, dphi_n/dt), v_t = 0
};

inline const char* LandscapeAxesName(LandscapeAxes axes) {
  switch (axes) {
    case LandscapeAxes::kPhiVn:
      return "phi-vn";
    case LandscapeAxes::kVnVt:
      return "vn-vt";
    case LandscapeAxes::kPhiDphi:
      return "phi-dphi";
  }
  return "unknown";
}

inline LandscapeAxes LandscapeAxesFromName(const std::string& name) {
  for (LandscapeAxes a : {LandscapeAxes::kPhiVn, LandscapeAxes::kVnVt,
                          LandscapeAxes::kPhiDphi}) {
    if (name == LandscapeAxesName(a)) return a;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown landscape axes: " + name);
}

inline LandscapeAxes DefaultLandscapeAxes(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::kRubbing:
      return LandscapeAxes::kVnVt;
    case ScenarioKind::kPinching:
      return LandscapeAxes::kPhiDphi;
    default:
      return LandscapeAxes::kPhiVn;
  }
}

// Penetration held fixed on the (v_n, v_t) grid.
inline constexpr double kLandscapePenetration = -0.02;

struct LandscapeGrid {
  LandscapeAxes axes = LandscapeAxes::kPhiVn;
  std::string x_name;
  std::string y_name;
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  Eigen::MatrixXd trace_f;  // (x index, y index)
};

namespace internal {

inline Eigen::VectorXd Linspace(double lo, double hi, int n) {
  if (n == 1) return Eigen::VectorXd::Constant(1, lo);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) {
    v[i] = i == n - 1 ? hi : lo + (hi - lo) * i / (n - 1);
  }
  return v;
}

}  // namespace internal

// trace(F) for one contact state. A free object (hefting) carries the
// sensitivity of the backward-Euler step that arrives at the cell from a
// parameter-independent predecessor. Kinematic scenarios add the next contact
// state with the robot velocity held.
inline double CellInformation(const ScenarioSpec& spec,
                              const Eigen::VectorXd& theta,
                              const ContactState& cell) {
  const int d = spec.dim();
  const PhysicalParams phys = Instantiate(spec, theta);
  const double dt = spec.dynamics.dt;
  const bool has_object = spec.kind == ScenarioKind::kHefting;

  Eigen::MatrixXd dparams = Eigen::MatrixXd::Zero(4, d);
  Eigen::RowVectorXd dmass = Eigen::RowVectorXd::Zero(d);
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
      case ParamRole::kMass:
        dmass[i] = 1.0;
        break;
      case ParamRole::kBoxLength:
      case ParamRole::kBoxWidth:
        throw Error(ErrorCode::kInvalidArgument,
                    "landscape not defined for shape parameters");
    }
  }

  const ContactForceJacobian j0 =
      ContactForceGradient(phys.contact, cell, spec.contact_options);
  std::vector<Eigen::MatrixXd> rows;
  if (has_object) {
    // z+ = z_pred + (dt^2/m) lambda(z+), differentiated implicitly.
    const double a = dt * dt / phys.mass;
    const double lambda_phi = j0.wrt_state(0, 0);
    const double lambda_v = j0.wrt_state(0, 1);
    const double denom = 1.0 - a * lambda_phi - a * lambda_v / dt;
    const Eigen::RowVectorXd dz =
        (a * (j0.wrt_params.row(0) * dparams) -
         (dt * dt / (phys.mass * phys.mass)) * j0.lambda_n * dmass) /
        denom;
    Eigen::MatrixXd dstate = Eigen::MatrixXd::Zero(3, d);
    dstate.row(0) = dz;
    dstate.row(1) = dz / dt;
    rows.push_back(j0.wrt_params * dparams + j0.wrt_state * dstate);
  } else {
    rows.push_back(j0.wrt_params * dparams);
    ContactState next = cell;
    next.phi_n = cell.phi_n + dt * cell.v_n;
    const ContactForceJacobian j1 =
        ContactForceGradient(phys.contact, next, spec.contact_options);
    rows.push_back(j1.wrt_params * dparams);
  }

  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(d, d);
  for (int c = 0; c < spec.num_channels(); ++c) {
    int row = -1;
    if (spec.channels[c].kind == ChannelKind::kNormalForce) row = 0;
    if (spec.channels[c].kind == ChannelKind::kTangentForce) row = 1;
    if (row < 0) continue;
    const double w = 1.0 / (spec.noise_std[c] * spec.noise_std[c]);
    for (const Eigen::MatrixXd& g : rows) {
      f += w * g.row(row).transpose() * g.row(row);
    }
  }
  return f.trace();
}

inline LandscapeGrid EmitLandscape(const ScenarioSpec& spec,
                                   LandscapeAxes axes, int resolution,
                                   const Eigen::VectorXd& theta) {
  if (resolution < 2) {
    throw Error(ErrorCode::kInvalidArgument, "landscape resolution below 2");
  }
  const DynamicsSpec& dyn = spec.dynamics;
  const double vn_lo = dyn.velocity_lower[0], vn_hi = dyn.velocity_upper[0];
  const double vt_hi = dyn.velocity_upper[dyn.dim() > 1 ? 1 : 0];
  double phi_lo = -0.01, phi_hi = 0.01;
  if (spec.kind == ScenarioKind::kPinching) {
    // the gap coordinate is the signed distance
    phi_lo = dyn.workspace_lower[0];
    phi_hi = dyn.workspace_upper[0];
  }

  LandscapeGrid grid;
  grid.axes = axes;
  switch (axes) {
    case LandscapeAxes::kPhiVn:
    case LandscapeAxes::kPhiDphi:
      grid.x_name = "phi_n";
      grid.y_name = axes == LandscapeAxes::kPhiVn ? "v_n" : "dphi_n";
      grid.x = internal::Linspace(phi_lo, phi_hi, resolution);
      grid.y = internal::Linspace(vn_lo, vn_hi, resolution);
      break;
    case LandscapeAxes::kVnVt:
      grid.x_name = "v_n";
      grid.y_name = "v_t";
      grid.x = internal::Linspace(vn_lo, vn_hi, resolution);
      grid.y = internal::Linspace(0.0, vt_hi, resolution);
      break;
  }

  grid.trace_f.resize(resolution, resolution);
  for (int i = 0; i < resolution; ++i) {
    for (int j = 0; j < resolution; ++j) {
      ContactState cs;
      if (axes == LandscapeAxes::kVnVt) {
        cs.phi_n = kLandscapePenetration;
        cs.v_n = grid.x[i];
        cs.v_t = grid.y[j];
      } else {
        cs.phi_n = grid.x[i];
        cs.v_n = grid.y[j];
        cs.v_t = 0.0;
      }
      cs.tangent_dir =
          cs.v_t > kRestSpeed ? spec.tangent_axis : Eigen::Vector3d::Zero();
      if (cs.v_t <= kRestSpeed) cs.v_t = 0.0;
      grid.trace_f(i, j) = CellInformation(spec, theta, cs);
    }
  }
  return grid;
}

}  // namespace caoed

#endif  // CAOED_HARNESS_H_
