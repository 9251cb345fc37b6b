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

#ifndef CAOED_IO_H_
#define CAOED_IO_H_

#include <Eigen/Dense>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "caoed/contact.h"
#include "caoed/core.h"
#include "caoed/error.h"
#include "caoed/estimation.h"
#include "caoed/fisher.h"
#include "caoed/harness.h"
#include "caoed/planner.h"
#include "caoed/scenarios.h"
#include "json.hpp"

namespace caoed {

using Json = nlohmann::json;

// ----- numbers and text ----- //

// 17 significant digits, enough to read back the same double.
inline std::string FormatDouble(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void WriteFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
}

inline Json ParseJson(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kSchema, origin + ": " + e.what());
  }
}

// ----- Eigen <-> JSON ----- //

inline Json ToJson(const Eigen::VectorXd& v) {
  Json j = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v[i]);
  return j;
}

inline Json ToJson(const Eigen::MatrixXd& m) {
  Json j = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    j.push_back(row);
  }
  return j;
}

inline Json ToJson(const Eigen::Vector3d& v) {
  return Json::array({v.x(), v.y(), v.z()});
}

inline Eigen::VectorXd VectorFromJson(const Json& j) {
  if (!j.is_array()) throw Error(ErrorCode::kSchema, "expected array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) v[i] = j[i].get<double>();
  return v;
}

inline Eigen::MatrixXd MatrixFromJson(const Json& j) {
  if (!j.is_array()) throw Error(ErrorCode::kSchema, "expected matrix");
  const size_t rows = j.size();
  const size_t cols = rows > 0 ? j[0].size() : 0;
  Eigen::MatrixXd m(rows, cols);
  for (size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) {
      throw Error(ErrorCode::kSchema, "ragged matrix");
    }
    for (size_t c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

inline Eigen::Vector3d Vector3FromJson(const Json& j) {
  const Eigen::VectorXd v = VectorFromJson(j);
  if (v.size() != 3) throw Error(ErrorCode::kSchema, "expected 3-vector");
  return v;
}

// ----- scenario ----- //

inline const char* ShapeKindName(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::kHalfSpace:
      return "half_space";
    case ShapeKind::kBox:
      return "box";
    case ShapeKind::kSphere:
      return "sphere";
  }
  return "unknown";
}

inline ShapeKind ShapeKindFromName(const std::string& name) {
  for (ShapeKind k : {ShapeKind::kHalfSpace, ShapeKind::kBox, ShapeKind::kSphere}) {
    if (name == ShapeKindName(k)) return k;
  }
  throw Error(ErrorCode::kSchema, "unknown shape kind: " + name);
}

inline Json ToJson(const ScenarioSpec& spec) {
  Json j;
  j["name"] = spec.name();
  Json roles = Json::array();
  for (ParamRole r : spec.roles) roles.push_back(ParamRoleName(r));
  j["roles"] = roles;
  j["param_names"] = spec.truth.names;
  j["truth"] = ToJson(spec.truth.values);
  j["prior"] = {{"mode", ToJson(spec.prior.mode.values)},
                {"covariance", ToJson(spec.prior.covariance)},
                {"lower", ToJson(spec.prior.lower)},
                {"upper", ToJson(spec.prior.upper)}};
  j["contact"] = {{"stiffness", spec.contact.stiffness},
                  {"damping", spec.contact.damping},
                  {"friction", spec.contact.friction},
                  {"resistance", spec.contact.resistance}};
  j["contact_options"] = {{"smooth", spec.contact_options.smooth},
                          {"sharpness", spec.contact_options.sharpness},
                          {"signed_damping", spec.contact_options.signed_damping}};
  const DynamicsSpec& dyn = spec.dynamics;
  j["dynamics"] = {{"dt", dyn.dt},
                   {"workspace_lower", ToJson(dyn.workspace_lower)},
                   {"workspace_upper", ToJson(dyn.workspace_upper)},
                   {"velocity_lower", ToJson(dyn.velocity_lower)},
                   {"velocity_upper", ToJson(dyn.velocity_upper)},
                   {"object_mass", dyn.object_mass ? Json(*dyn.object_mass)
                                                   : Json(nullptr)},
                   {"gravity", dyn.gravity}};
  const SignedDistanceField& g = spec.geometry;
  j["geometry"] = {{"kind", ShapeKindName(g.kind)}, {"origin", ToJson(g.origin)},
                   {"axis", ToJson(g.axis)},        {"yaw", g.yaw},
                   {"length", g.length},            {"width", g.width},
                   {"radius", g.radius}};
  j["object_radius"] = spec.object_radius;
  const RobotState& x = spec.initial_state;
  j["initial_state"] = {{"position", ToJson(x.position)},
                        {"velocity", ToJson(x.velocity)},
                        {"object", nullptr}};
  if (x.object) {
    j["initial_state"]["object"] = {{"position", ToJson(x.object->position)},
                                    {"velocity", ToJson(x.object->velocity)}};
  }
  Json channels = Json::array();
  for (const Channel& c : spec.channels) {
    channels.push_back({{"kind", ChannelKindName(c.kind)}, {"pair", c.pair}});
  }
  j["channels"] = channels;
  j["noise_std"] = ToJson(spec.noise_std);
  j["tangent_axis"] = ToJson(spec.tangent_axis);
  return j;
}

inline ScenarioSpec ScenarioFromJson(const Json& j) {
  try {
    ScenarioSpec spec;
    spec.kind = ScenarioKindFromName(j.at("name").get<std::string>());
    for (const Json& r : j.at("roles")) {
      spec.roles.push_back(ParamRoleFromName(r.get<std::string>()));
    }
    spec.truth.names = j.at("param_names").get<std::vector<std::string>>();
    spec.truth.values = VectorFromJson(j.at("truth"));
    const Json& prior = j.at("prior");
    spec.prior.mode.values = VectorFromJson(prior.at("mode"));
    spec.prior.mode.names = spec.truth.names;
    spec.prior.covariance = MatrixFromJson(prior.at("covariance"));
    spec.prior.lower = VectorFromJson(prior.at("lower"));
    spec.prior.upper = VectorFromJson(prior.at("upper"));
    const Json& c = j.at("contact");
    spec.contact = {c.at("stiffness").get<double>(), c.at("damping").get<double>(),
                    c.at("friction").get<double>(),
                    c.at("resistance").get<double>()};
    const Json& o = j.at("contact_options");
    spec.contact_options.smooth = o.at("smooth").get<bool>();
    spec.contact_options.sharpness = o.at("sharpness").get<double>();
    spec.contact_options.signed_damping = o.at("signed_damping").get<bool>();
    const Json& d = j.at("dynamics");
    spec.dynamics.dt = d.at("dt").get<double>();
    spec.dynamics.workspace_lower = VectorFromJson(d.at("workspace_lower"));
    spec.dynamics.workspace_upper = VectorFromJson(d.at("workspace_upper"));
    spec.dynamics.velocity_lower = VectorFromJson(d.at("velocity_lower"));
    spec.dynamics.velocity_upper = VectorFromJson(d.at("velocity_upper"));
    if (!d.at("object_mass").is_null()) {
      spec.dynamics.object_mass = d.at("object_mass").get<double>();
    }
    spec.dynamics.gravity = d.at("gravity").get<double>();
    const Json& g = j.at("geometry");
    spec.geometry.kind = ShapeKindFromName(g.at("kind").get<std::string>());
    spec.geometry.origin = Vector3FromJson(g.at("origin"));
    spec.geometry.axis = Vector3FromJson(g.at("axis"));
    spec.geometry.yaw = g.at("yaw").get<double>();
    spec.geometry.length = g.at("length").get<double>();
    spec.geometry.width = g.at("width").get<double>();
    spec.geometry.radius = g.at("radius").get<double>();
    spec.object_radius = j.at("object_radius").get<double>();
    const Json& x = j.at("initial_state");
    spec.initial_state.position = VectorFromJson(x.at("position"));
    spec.initial_state.velocity = VectorFromJson(x.at("velocity"));
    if (!x.at("object").is_null()) {
      spec.initial_state.object =
          ObjectState{VectorFromJson(x.at("object").at("position")),
                      VectorFromJson(x.at("object").at("velocity"))};
    }
    for (const Json& ch : j.at("channels")) {
      spec.channels.push_back(
          {ChannelKindFromName(ch.at("kind").get<std::string>()),
           ch.at("pair").get<int>()});
    }
    spec.noise_std = VectorFromJson(j.at("noise_std"));
    spec.tangent_axis = Vector3FromJson(j.at("tangent_axis"));
    spec.Validate();
    return spec;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kSchema, std::string("scenario: ") + e.what());
  }
}

// ----- run configuration ----- //

struct RunSettings {
  ScenarioSpec scenario;
  PlannerConfig planner;
  FisherEngine engine;
  RunConfig run;
};

inline Json ToJson(const RunSettings& s) {
  Json j;
  j["scenario"] = ToJson(s.scenario);
  const PlannerConfig& p = s.planner;
  j["planner"] = {{"horizon", p.horizon},
                  {"num_samples", p.num_samples},
                  {"sampling_std", p.sampling_std},
                  {"spline_knots", p.spline_knots},
                  {"effort_weight", p.effort_weight},
                  {"boundary_weight", p.boundary_weight},
                  {"boundary_margin", p.boundary_margin},
                  {"metric", DesignMetricName(p.metric)}};
  j["engine"] = {{"mode", FisherModeName(s.engine.mode)},
                 {"fd_relative_step", s.engine.fd_relative_step}};
  const RunConfig& r = s.run;
  j["run"] = {{"k_max", r.k_max},
              {"seed", r.seed},
              {"noise_scale", r.noise_scale},
              {"steps_per_update", r.steps_per_update},
              {"prior_mode", r.prior_mode ? ToJson(*r.prior_mode) : Json(nullptr)},
              {"map",
               {{"max_iters", r.map.max_iters},
                {"tol", r.map.tol},
                {"max_backtracks", r.map.max_backtracks}}}};
  return j;
}

inline RunSettings RunSettingsFromJson(const Json& j) {
  RunSettings s;
  s.scenario = ScenarioFromJson(j.at("scenario"));
  try {
    const Json& p = j.at("planner");
    s.planner.horizon = p.at("horizon").get<int>();
    s.planner.num_samples = p.at("num_samples").get<int>();
    s.planner.sampling_std = p.at("sampling_std").get<double>();
    s.planner.spline_knots = p.at("spline_knots").get<int>();
    s.planner.effort_weight = p.at("effort_weight").get<double>();
    s.planner.boundary_weight = p.at("boundary_weight").get<double>();
    s.planner.boundary_margin = p.at("boundary_margin").get<double>();
    s.planner.metric = DesignMetricFromName(p.at("metric").get<std::string>());
    const Json& e = j.at("engine");
    s.engine.mode = FisherModeFromName(e.at("mode").get<std::string>());
    s.engine.fd_relative_step = e.at("fd_relative_step").get<double>();
    const Json& r = j.at("run");
    s.run.k_max = r.at("k_max").get<int>();
    s.run.seed = r.at("seed").get<uint64_t>();
    s.run.noise_scale = r.at("noise_scale").get<double>();
    s.run.steps_per_update = r.at("steps_per_update").get<int>();
    if (!r.at("prior_mode").is_null()) {
      s.run.prior_mode = VectorFromJson(r.at("prior_mode"));
    }
    s.run.map.max_iters = r.at("map").at("max_iters").get<int>();
    s.run.map.tol = r.at("map").at("tol").get<double>();
    s.run.map.max_backtracks = r.at("map").at("max_backtracks").get<int>();
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kSchema, std::string("config: ") + e.what());
  }
  s.planner.Validate();
  s.engine.Validate();
  s.run.Validate();
  return s;
}

inline RunSettings DefaultSettings(const std::string& scenario) {
  RunSettings s;
  s.scenario = MakeScenario(scenario);
  return s;
}

// Defaults for the scenario with a JSON merge patch applied on top.
inline RunSettings SettingsWithOverrides(const std::string& scenario,
                                         const Json& patch) {
  Json j = ToJson(DefaultSettings(scenario));
  j.merge_patch(patch);
  return RunSettingsFromJson(j);
}

// ----- CSV ----- //

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int Column(const std::string& name) const {
    for (size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return static_cast<int>(i);
    }
    throw Error(ErrorCode::kSchema, "missing column: " + name);
  }
};

inline std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

inline CsvTable ReadCsv(const std::string& path) {
  std::istringstream in(ReadFile(path));
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::kSchema, "empty csv " + path);
  table.header = SplitCsvLine(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    table.rows.push_back(SplitCsvLine(line));
    if (table.rows.back().size() != table.header.size()) {
      throw Error(ErrorCode::kSchema, "ragged row in " + path);
    }
  }
  return table;
}

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) {
    Row(header);
  }
  void Row(const std::vector<std::string>& fields) {
    for (size_t i = 0; i < fields.size(); ++i) {
      if (i > 0) text_ += ',';
      text_ += fields[i];
    }
    text_ += '\n';
  }
  const std::string& text() const { return text_; }

 private:
  std::string text_;
};

// ----- run directory ----- //

inline std::string ExperimentFileName(int k) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "trajectory_k%02d.csv", k);
  return buf;
}

inline std::string ExperimentsCsv(const RunRecord& record) {
  const std::vector<std::string>& names = record.truth.names;
  std::vector<std::string> header = {"k"};
  for (const auto& n : names) header.push_back("theta_" + n);
  for (const auto& n : names) header.push_back("var_" + n);
  header.insert(header.end(), {"trace_sigma", "trace_f", "cumulative_trace_f",
                              "true_trace_f", "cumulative_true_trace_f"});
  for (const auto& n : names) header.push_back("pct_err_" + n);
  for (const auto& n : names) header.push_back("abs_err_" + n);
  header.insert(header.end(), {"plan_score", "map_iterations", "map_converged"});
  CsvWriter csv(header);
  for (const ExperimentRecord& e : record.experiments) {
    std::vector<std::string> row = {std::to_string(e.k)};
    for (Eigen::Index i = 0; i < e.theta_hat.values.size(); ++i) {
      row.push_back(FormatDouble(e.theta_hat.values[i]));
    }
    for (Eigen::Index i = 0; i < e.covariance.rows(); ++i) {
      row.push_back(FormatDouble(e.covariance(i, i)));
    }
    row.push_back(FormatDouble(e.covariance.trace()));
    row.push_back(FormatDouble(e.trace_f));
    row.push_back(FormatDouble(e.cumulative_trace_f));
    row.push_back(FormatDouble(e.true_trace_f));
    row.push_back(FormatDouble(e.cumulative_true_trace_f));
    for (Eigen::Index i = 0; i < e.percent_error.size(); ++i) {
      row.push_back(FormatDouble(e.percent_error[i]));
    }
    for (Eigen::Index i = 0; i < e.abs_error.size(); ++i) {
      row.push_back(FormatDouble(e.abs_error[i]));
    }
    row.push_back(FormatDouble(e.plan_score));
    row.push_back(std::to_string(e.map_iterations));
    row.push_back(e.map_converged ? "1" : "0");
    csv.Row(row);
  }
  return csv.text();
}

inline std::string TrajectoryCsv(const ScenarioSpec& spec,
                                 const ExperimentRecord& e) {
  const int n = spec.dynamics.dim();
  const bool has_object = e.x0.object.has_value();
  std::vector<std::string> header = {"t"};
  for (int i = 0; i < n; ++i) header.push_back("q" + std::to_string(i));
  for (int i = 0; i < n; ++i) header.push_back("qdot" + std::to_string(i));
  if (has_object) header.insert(header.end(), {"object_z", "object_vz"});
  for (int i = 0; i < n; ++i) header.push_back("u" + std::to_string(i));
  for (int c = 0; c < spec.num_channels(); ++c) {
    header.push_back("y" + std::to_string(c) + "_" +
                     ChannelKindName(spec.channels[c].kind));
  }
  header.insert(header.end(),
                {"lambda_n", "lambda_t_x", "lambda_t_y", "lambda_t_z"});
  CsvWriter csv(header);
  const Trajectory& traj = e.data.executed;
  for (size_t t = 0; t < traj.states.size(); ++t) {
    const RobotState& x = traj.states[t];
    const bool step = t < e.data.controls.size();
    std::vector<std::string> row = {std::to_string(t)};
    for (int i = 0; i < n; ++i) row.push_back(FormatDouble(x.position[i]));
    for (int i = 0; i < n; ++i) row.push_back(FormatDouble(x.velocity[i]));
    if (has_object) {
      row.push_back(FormatDouble(x.object->position[0]));
      row.push_back(FormatDouble(x.object->velocity[0]));
    }
    for (int i = 0; i < n; ++i) {
      row.push_back(step ? FormatDouble(e.data.controls[t].command[i]) : "");
    }
    for (int c = 0; c < spec.num_channels(); ++c) {
      row.push_back(step ? FormatDouble(e.data.measurements[t].values[c]) : "");
    }
    if (step) {
      const ContactForce& f = traj.contacts[t];
      row.push_back(FormatDouble(f.lambda_n));
      for (int i = 0; i < 3; ++i) row.push_back(FormatDouble(f.lambda_t[i]));
    } else {
      row.insert(row.end(), {"", "", "", ""});
    }
    csv.Row(row);
  }
  return csv.text();
}

inline Json SummaryJson(const RunRecord& record) {
  const ExperimentRecord& last = record.experiments.back();
  Json trace_f = Json::array(), trace_sigma = Json::array(),
       converged = Json::array();
  for (const ExperimentRecord& e : record.experiments) {
    trace_f.push_back(e.trace_f);
    trace_sigma.push_back(e.covariance.trace());
    converged.push_back(e.map_converged);
  }
  return {{"scenario", record.scenario},
          {"engine", FisherModeName(record.engine.mode)},
          {"seed", record.seed},
          {"k_max", record.k_max()},
          {"param_names", record.truth.names},
          {"theta_true", ToJson(record.truth.values)},
          {"prior_mode", ToJson(record.initial_belief.mode.values)},
          {"prior_covariance", ToJson(record.initial_belief.covariance)},
          {"final_theta", ToJson(last.theta_hat.values)},
          {"final_covariance", ToJson(last.covariance)},
          {"final_percent_error", ToJson(last.percent_error)},
          {"final_abs_error", ToJson(last.abs_error)},
          {"trace_f", trace_f},
          {"cumulative_trace_f", last.cumulative_trace_f},
          {"cumulative_true_trace_f", last.cumulative_true_trace_f},
          {"trace_sigma", trace_sigma},
          {"map_converged", converged}};
}

inline std::string UtcTimestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Writes config.json, experiments.csv, trajectory_kNN.csv and summary.json
// (all deterministic) plus metadata.json holding timestamps and timings.
inline void WriteRunDirectory(const std::string& dir,
                              const RunSettings& settings,
                              const RunRecord& record) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir);
  const fs::path root(dir);
  WriteFile((root / "config.json").string(), ToJson(settings).dump(2) + "\n");
  WriteFile((root / "experiments.csv").string(), ExperimentsCsv(record));
  for (const ExperimentRecord& e : record.experiments) {
    WriteFile((root / ExperimentFileName(e.k)).string(),
              TrajectoryCsv(settings.scenario, e));
  }
  WriteFile((root / "summary.json").string(), SummaryJson(record).dump(2) + "\n");
  const Json metadata = {
      {"created_utc", UtcTimestamp()},
      {"wall_clock_seconds",
       {{"plan", record.wall_clock.plan},
        {"execute", record.wall_clock.execute},
        {"estimate", record.wall_clock.estimate},
        {"update", record.wall_clock.update}}}};
  WriteFile((root / "metadata.json").string(), metadata.dump(2) + "\n");
}

// One row per (prior, experiments completed); row 0 of each prior is the
// prior itself.
inline std::string SweepCsv(const std::vector<RunRecord>& records) {
  if (records.empty()) return "";
  const std::vector<std::string>& names = records.front().truth.names;
  std::vector<std::string> header = {"prior_index"};
  for (const auto& n : names) header.push_back("prior_" + n);
  header.push_back("experiments");
  for (const auto& n : names) header.push_back("theta_" + n);
  for (const auto& n : names) header.push_back("delta_" + n);
  CsvWriter csv(header);
  for (size_t p = 0; p < records.size(); ++p) {
    const RunRecord& r = records[p];
    auto emit = [&](int count, const Eigen::VectorXd& theta) {
      std::vector<std::string> row = {std::to_string(p)};
      for (Eigen::Index i = 0; i < theta.size(); ++i) {
        row.push_back(FormatDouble(r.initial_belief.mode.values[i]));
      }
      row.push_back(std::to_string(count));
      for (Eigen::Index i = 0; i < theta.size(); ++i) {
        row.push_back(FormatDouble(theta[i]));
      }
      const Eigen::VectorXd delta = AbsError(theta, r.truth.values);
      for (Eigen::Index i = 0; i < delta.size(); ++i) {
        row.push_back(FormatDouble(delta[i]));
      }
      csv.Row(row);
    };
    emit(0, r.initial_belief.mode.values);
    for (const ExperimentRecord& e : r.experiments) {
      emit(e.k + 1, e.theta_hat.values);
    }
  }
  return csv.text();
}

inline std::string LandscapeCsv(const LandscapeGrid& grid) {
  CsvWriter csv({"i", "j", grid.x_name, grid.y_name, "trace_f"});
  for (Eigen::Index i = 0; i < grid.x.size(); ++i) {
    for (Eigen::Index j = 0; j < grid.y.size(); ++j) {
      csv.Row({std::to_string(i), std::to_string(j), FormatDouble(grid.x[i]),
               FormatDouble(grid.y[j]), FormatDouble(grid.trace_f(i, j))});
    }
  }
  return csv.text();
}

inline std::string CompareCsv(const CompareReport& report) {
  CsvWriter csv({"seed", "final_error_contact_aware", "final_error_baseline",
                 "cumulative_trace_f_contact_aware",
                 "cumulative_trace_f_baseline"});
  for (size_t s = 0; s < report.seeds.size(); ++s) {
    csv.Row({std::to_string(report.seeds[s]),
             FormatDouble(report.final_error[0][s]),
             FormatDouble(report.final_error[1][s]),
             FormatDouble(report.cumulative_trace_f[0][s]),
             FormatDouble(report.cumulative_trace_f[1][s])});
  }
  return csv.text();
}

inline std::string CompareCurvesCsv(const CompareReport& report) {
  CsvWriter csv({"k", "median_error_contact_aware", "median_error_baseline",
                 "median_trace_f_contact_aware", "median_trace_f_baseline"});
  for (size_t k = 0; k < report.median_error_curve[0].size(); ++k) {
    csv.Row({std::to_string(k), FormatDouble(report.median_error_curve[0][k]),
             FormatDouble(report.median_error_curve[1][k]),
             FormatDouble(report.median_trace_f_curve[0][k]),
             FormatDouble(report.median_trace_f_curve[1][k])});
  }
  return csv.text();
}

inline Json CompareJson(const std::string& scenario,
                        const CompareReport& report) {
  return {{"scenario", scenario},
          {"seeds", report.seeds.size()},
          {"error_metric", "norm of percent error after the last experiment"},
          {"median_final_error",
           {{"contact_aware", report.median_final_error[0]},
            {"baseline", report.median_final_error[1]}}},
          {"median_cumulative_trace_f",
           {{"contact_aware", report.median_cumulative_trace_f[0]},
            {"baseline", report.median_cumulative_trace_f[1]}}},
          {"sign_test_p", report.sign_test_p}};
}

}  // namespace caoed

#endif  // CAOED_IO_H_
