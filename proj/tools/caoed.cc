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

// Command-line front end: run, sweep, landscape, compare, config.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "caoed/error.h"
#include "caoed/harness.h"
#include "caoed/io.h"
#include "caoed/scenarios.h"

namespace {

using caoed::Error;
using caoed::ErrorCode;
using caoed::Json;

struct CommonOptions {
  std::string scenario;
  std::string config_path;
  std::optional<std::string> engine;
  std::optional<uint64_t> seed;
  std::optional<int> kmax;
  std::string out = "caoed_out";
};

// Defaults for the scenario, then the config file patch, then flags.
caoed::RunSettings LoadSettings(const CommonOptions& opt) {
  Json patch = Json::object();
  if (!opt.config_path.empty()) {
    patch = caoed::ParseJson(caoed::ReadFile(opt.config_path), opt.config_path);
    if (!patch.is_object()) {
      throw Error(ErrorCode::kSchema, "config must be a JSON object");
    }
  }
  std::string scenario = opt.scenario;
  if (scenario.empty() && patch.contains("scenario") &&
      patch["scenario"].contains("name")) {
    scenario = patch["scenario"]["name"].get<std::string>();
  }
  if (scenario.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no scenario given");
  }
  if (patch.contains("scenario") && patch["scenario"].is_object()) {
    patch["scenario"]["name"] = scenario;
  }
  caoed::RunSettings s = caoed::SettingsWithOverrides(scenario, patch);
  if (opt.engine) s.engine.mode = caoed::FisherModeFromName(*opt.engine);
  if (opt.seed) s.run.seed = *opt.seed;
  if (opt.kmax) s.run.k_max = *opt.kmax;
  s.run.Validate();
  return s;
}

void AddCommon(CLI::App* cmd, CommonOptions& opt, bool with_run_flags) {
  cmd->add_option("--scenario", opt.scenario,
                  "hefting | rubbing | pinching | contouring");
  cmd->add_option("--config", opt.config_path,
                  "JSON merge patch over the defaults")
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", opt.out, "output directory");
  if (with_run_flags) {
    cmd->add_option("--engine", opt.engine, "contact-aware | baseline");
    cmd->add_option("--seed", opt.seed, "random seed");
    cmd->add_option("--kmax", opt.kmax, "number of experiments");
  }
}

Json Ok(const std::string& out) { return {{"status", "ok"}, {"out", out}}; }

std::vector<Eigen::VectorXd> ReadPriors(const std::string& path, int dim) {
  Json j = caoed::ParseJson(caoed::ReadFile(path), path);
  if (j.is_object() && j.contains("priors")) j = j["priors"];
  if (!j.is_array() || j.empty()) {
    throw Error(ErrorCode::kSchema, "priors file must hold a non-empty array");
  }
  std::vector<Eigen::VectorXd> priors;
  for (const Json& p : j) {
    Eigen::VectorXd v = p.is_array() ? caoed::VectorFromJson(p)
                                     : Eigen::VectorXd::Constant(1, p.get<double>());
    if (v.size() != dim) {
      throw Error(ErrorCode::kSchema, "prior has wrong dimension");
    }
    priors.push_back(v);
  }
  return priors;
}

void PrintError(const std::string& code, const std::string& message) {
  std::cerr << Json({{"error", {{"code", code}, {"message", message}}}}).dump()
            << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contact-aware optimal experimental design"};
  app.require_subcommand(1);

  CommonOptions run_opt, sweep_opt, land_opt, cmp_opt;
  std::string priors_path;
  std::string axes;
  int resolution = 41;
  int seeds = 20;
  bool dump = false;
  std::string dump_scenario = "rubbing";

  CLI::App* run = app.add_subcommand("run", "closed-loop active learning run");
  AddCommon(run, run_opt, true);

  CLI::App* sweep = app.add_subcommand("sweep", "robustness sweep over priors");
  AddCommon(sweep, sweep_opt, true);
  sweep->add_option("--priors", priors_path, "JSON array of prior modes")
      ->required()
      ->check(CLI::ExistingFile);

  CLI::App* land = app.add_subcommand("landscape", "information landscape grid");
  AddCommon(land, land_opt, false);
  land->add_option("--axes", axes, "phi-vn | vn-vt | phi-dphi");
  land->add_option("--res", resolution, "cells per axis");

  CLI::App* cmp = app.add_subcommand("compare", "contact-aware vs baseline");
  AddCommon(cmp, cmp_opt, false);
  cmp->add_option("--seeds", seeds, "number of paired seeds");
  cmp->add_option("--kmax", cmp_opt.kmax, "number of experiments");

  CLI::App* config = app.add_subcommand("config", "print configuration");
  config->add_flag("--dump", dump, "print all defaults as JSON");
  config->add_option("--scenario", dump_scenario, "scenario for the defaults");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    PrintError("usage", e.what());
    return 2;
  }

  try {
    if (run->parsed()) {
      const caoed::RunSettings s = LoadSettings(run_opt);
      const caoed::RunRecord record =
          caoed::RunActiveLearning(s.scenario, s.planner, s.engine, s.run);
      caoed::WriteRunDirectory(run_opt.out, s, record);
      std::cout << Ok(run_opt.out).dump() << "\n";
    } else if (sweep->parsed()) {
      const caoed::RunSettings s = LoadSettings(sweep_opt);
      const std::vector<Eigen::VectorXd> priors =
          ReadPriors(priors_path, s.scenario.dim());
      const std::vector<caoed::RunRecord> records = caoed::RobustnessSweep(
          s.scenario, s.planner, s.engine, s.run, priors);
      const std::filesystem::path root(sweep_opt.out);
      for (size_t p = 0; p < records.size(); ++p) {
        caoed::RunSettings sp = s;
        sp.run.prior_mode = priors[p];
        char name[32];
        std::snprintf(name, sizeof(name), "prior_%02zu", p);
        caoed::WriteRunDirectory((root / name).string(), sp, records[p]);
      }
      caoed::WriteFile((root / "sweep.csv").string(), caoed::SweepCsv(records));
      std::cout << Ok(sweep_opt.out).dump() << "\n";
    } else if (land->parsed()) {
      const caoed::RunSettings s = LoadSettings(land_opt);
      const caoed::LandscapeAxes a =
          axes.empty() ? caoed::DefaultLandscapeAxes(s.scenario.kind)
                       : caoed::LandscapeAxesFromName(axes);
      const Eigen::VectorXd theta =
          s.run.prior_mode ? *s.run.prior_mode : s.scenario.prior.mode.values;
      const caoed::LandscapeGrid grid =
          caoed::EmitLandscape(s.scenario, a, resolution, theta);
      std::filesystem::create_directories(land_opt.out);
      const std::string path =
          (std::filesystem::path(land_opt.out) / "landscape.csv").string();
      caoed::WriteFile(path, caoed::LandscapeCsv(grid));
      std::cout << Ok(path).dump() << "\n";
    } else if (cmp->parsed()) {
      const caoed::RunSettings s = LoadSettings(cmp_opt);
      const caoed::CompareReport report = caoed::CompareBaseline(
          s.scenario, s.planner, s.run, seeds, s.engine.fd_relative_step);
      const std::filesystem::path root(cmp_opt.out);
      std::filesystem::create_directories(root);
      caoed::WriteFile((root / "compare.csv").string(), caoed::CompareCsv(report));
      caoed::WriteFile((root / "compare_curves.csv").string(),
                       caoed::CompareCurvesCsv(report));
      caoed::WriteFile((root / "compare.json").string(),
                       caoed::CompareJson(s.scenario.name(), report).dump(2) + "\n");
      std::cout << Ok(cmp_opt.out).dump() << "\n";
    } else if (config->parsed()) {
      std::cout << caoed::ToJson(caoed::DefaultSettings(dump_scenario)).dump(2)
                << "\n";
    }
  } catch (const Error& e) {
    PrintError(std::string(caoed::ErrorCodeName(e.code())), e.what());
    return 1;
  } catch (const std::exception& e) {
    PrintError("internal", e.what());
    return 1;
  }
  return 0;
}
