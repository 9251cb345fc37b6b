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


#include <cstdlib>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "caoed/dynamics.h"
#include "caoed/fisher.h"
#include "caoed/io.h"
#include "gtest/gtest.h"

namespace caoed {
namespace {

namespace fs = std::filesystem;

struct Cli {
  int exit_code = 0;
  std::string out;
  std::string err;
};

fs::path Scratch(const std::string& name) {
  const fs::path p = fs::path(::testing::TempDir()) / ("caoed_io_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

Cli RunCli(const std::string& args) {
  const fs::path dir = Scratch("cli_streams");
  const std::string out = (dir / "out.txt").string(), err = (dir / "err.txt").string();
  const std::string cmd =
      std::string(CAOED_CLI_PATH) + " " + args + " > " + out + " 2> " + err;
  const int status = std::system(cmd.c_str());
  Cli r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = ReadFile(out);
  r.err = ReadFile(err);
  return r;
}

std::string FirstLine(const std::string& text) { return text.substr(0, text.find('\n')); }

std::string JoinedKeys(const Json& j) {
  std::string s;
  for (auto it = j.begin(); it != j.end(); ++it) s += (s.empty() ? "" : ",") + it.key();
  return s;
}

// "# <file> (<scenario>)" or "# <file> keys (<scenario>)" followed by the
// header line, from each fenced text block of the schema document.
struct SchemaEntry {
  std::string file;
  bool keys = false;
  std::string scenario;
  std::string header;
};

std::vector<SchemaEntry> DocumentedSchema() {
  std::istringstream in(ReadFile(CAOED_SCHEMA_DOC));
  std::vector<SchemaEntry> entries;
  std::string line;
  bool in_block = false;
  while (std::getline(in, line)) {
    if (line.rfind("```", 0) == 0) {
      in_block = !in_block;
      continue;
    }
    if (!in_block || line.rfind("# ", 0) != 0) continue;
    SchemaEntry e;
    std::istringstream words(line.substr(2));
    std::string word;
    words >> e.file;
    while (words >> word) {
      if (word == "keys") e.keys = true;
      if (word.front() == '(') e.scenario = word.substr(1, word.size() - 2);
    }
    std::getline(in, e.header);
    entries.push_back(e);
  }
  return entries;
}

class Outputs : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    root_ = new fs::path(Scratch("outputs"));
    for (const char* name : {"rubbing", "hefting"}) {
      const std::string base = (*root_ / name).string();
      ASSERT_EQ(RunCli(std::string("run --scenario ") + name + " --kmax 2 --seed 3 --out " +
                       base + "/run").exit_code, 0);
      ASSERT_EQ(RunCli(std::string("landscape --scenario ") + name + " --res 5 --out " +
                       base + "/landscape").exit_code, 0);
    }
    const fs::path priors = *root_ / "priors.json";
    WriteFile(priors.string(), "[0.3, 0.5]\n");
    ASSERT_EQ(RunCli("sweep --scenario rubbing --kmax 2 --priors " + priors.string() +
                     " --out " + (*root_ / "rubbing/sweep").string()).exit_code, 0);
    ASSERT_EQ(RunCli("compare --scenario rubbing --seeds 2 --kmax 2 --out " +
                     (*root_ / "rubbing/compare").string()).exit_code, 0);
  }
  static void TearDownTestSuite() {
    fs::remove_all(*root_);
    delete root_;
  }

  static fs::path Locate(const SchemaEntry& e) {
    const fs::path base = *root_ / e.scenario;
    if (e.file == "sweep.csv") return base / "sweep" / e.file;
    if (e.file == "landscape.csv") return base / "landscape" / e.file;
    if (e.file.rfind("compare", 0) == 0) return base / "compare" / e.file;
    return base / "run" / e.file;
  }

  static fs::path* root_;
};

fs::path* Outputs::root_ = nullptr;

TEST_F(Outputs, MatchDocumentedSchema) {
  const std::vector<SchemaEntry> entries = DocumentedSchema();
  ASSERT_GE(entries.size(), 10u);
  for (const SchemaEntry& e : entries) {
    const fs::path path = Locate(e);
    ASSERT_TRUE(fs::exists(path)) << path;
    if (e.keys) {
      EXPECT_EQ(JoinedKeys(ParseJson(ReadFile(path.string()), path.string())), e.header)
          << path;
    } else {
      EXPECT_EQ(FirstLine(ReadFile(path.string())), e.header) << path;
    }
  }
}

TEST_F(Outputs, RunDirectoryLayout) {
  const fs::path run = *root_ / "rubbing/run";
  for (const char* f : {"config.json", "experiments.csv", "trajectory_k00.csv",
                        "trajectory_k01.csv", "summary.json", "metadata.json"}) {
    EXPECT_TRUE(fs::exists(run / f)) << f;
  }
  const CsvTable experiments = ReadCsv((run / "experiments.csv").string());
  EXPECT_EQ(experiments.rows.size(), 2u);
  const CsvTable traj = ReadCsv((run / "trajectory_k00.csv").string());
  EXPECT_EQ(traj.rows.size(), 11u);
  EXPECT_EQ(traj.rows.back()[traj.Column("u0")], "");
  const CsvTable sweep = ReadCsv((*root_ / "rubbing/sweep/sweep.csv").string());
  EXPECT_EQ(sweep.rows.size(), 6u);
  EXPECT_TRUE(fs::exists(*root_ / "rubbing/sweep/prior_01/summary.json"));
}

TEST_F(Outputs, ConfigSnapshotReproducesSettings) {
  const fs::path run = *root_ / "rubbing/run";
  const RunSettings s =
      RunSettingsFromJson(ParseJson(ReadFile((run / "config.json").string()), "config"));
  EXPECT_EQ(s.run.seed, 3u);
  EXPECT_EQ(s.run.k_max, 2);
  EXPECT_EQ(ToJson(s.scenario).dump(), ToJson(MakeScenario("rubbing")).dump());
}

// Re-derive trace(F) of every experiment from the persisted files alone.
TEST_F(Outputs, LoggedTraceMatchesOfflineRecomputation) {
  for (const char* name : {"rubbing", "hefting"}) {
    const fs::path run = *root_ / name / "run";
    const RunSettings s =
        RunSettingsFromJson(ParseJson(ReadFile((run / "config.json").string()), "config"));
    const ScenarioSpec& spec = s.scenario;
    const CsvTable experiments = ReadCsv((run / "experiments.csv").string());
    const int n = spec.dynamics.dim();
    for (const auto& row : experiments.rows) {
      const int k = std::stoi(row[experiments.Column("k")]);
      Eigen::VectorXd theta(spec.dim());
      for (int i = 0; i < spec.dim(); ++i) {
        theta[i] = std::stod(row[experiments.Column("theta_" + spec.truth.names[i])]);
      }
      const CsvTable traj = ReadCsv((run / ExperimentFileName(k)).string());
      RobotState x0;
      x0.position.resize(n);
      x0.velocity.resize(n);
      for (int i = 0; i < n; ++i) {
        x0.position[i] = std::stod(traj.rows[0][traj.Column("q" + std::to_string(i))]);
        x0.velocity[i] = std::stod(traj.rows[0][traj.Column("qdot" + std::to_string(i))]);
      }
      if (spec.kind == ScenarioKind::kHefting) {
        x0.object = ObjectState{
            Eigen::VectorXd::Constant(1, std::stod(traj.rows[0][traj.Column("object_z")])),
            Eigen::VectorXd::Constant(1, std::stod(traj.rows[0][traj.Column("object_vz")]))};
      }
      std::vector<ControlInput> controls;
      for (size_t t = 0; t + 1 < traj.rows.size(); ++t) {
        Eigen::VectorXd u(n);
        for (int i = 0; i < n; ++i) {
          u[i] = std::stod(traj.rows[t][traj.Column("u" + std::to_string(i))]);
        }
        controls.push_back({u});
      }
      const ExperimentModel model(spec, x0, controls);
      const double offline =
          FimTrajectory(s.engine, model, theta, s.run.noise_scale * spec.noise_std)
              .matrix.trace();
      const double logged = std::stod(row[experiments.Column("trace_f")]);
      EXPECT_NEAR(offline, logged, 1e-9 * std::max(1.0, std::abs(logged))) << name << " k=" << k;
    }
  }
}

TEST(Csv, MissingColumnIsNamed) {
  const fs::path dir = Scratch("csv");
  WriteFile((dir / "t.csv").string(), "k,trace_sigma\n0,1\n");
  const CsvTable t = ReadCsv((dir / "t.csv").string());
  try {
    t.Column("trace_f");
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSchema);
    EXPECT_STREQ(e.what(), "missing column: trace_f");
  }
  WriteFile((dir / "r.csv").string(), "a,b\n1\n");
  EXPECT_THROW(ReadCsv((dir / "r.csv").string()), Error);
}

TEST(Settings, OverridesMergeOverDefaults) {
  const Json patch = {{"planner", {{"num_samples", 3}}}, {"run", {{"seed", 9}}}};
  const RunSettings s = SettingsWithOverrides("pinching", patch);
  EXPECT_EQ(s.planner.num_samples, 3);
  EXPECT_EQ(s.run.seed, 9u);
  EXPECT_EQ(s.planner.horizon, 10);
  EXPECT_EQ(s.scenario.truth.values[0], 800.0);
  const Json bad = {{"planner", {{"horizon", "long"}}}};
  EXPECT_THROW(SettingsWithOverrides("pinching", bad), Error);
}

TEST(Cli, ConfigDumpParsesBack) {
  const Cli r = RunCli("config --dump --scenario contouring");
  ASSERT_EQ(r.exit_code, 0);
  const RunSettings s = RunSettingsFromJson(ParseJson(r.out, "dump"));
  EXPECT_EQ(ToJson(s).dump(), ToJson(DefaultSettings("contouring")).dump());
}

TEST(Cli, UnknownScenarioReportsJsonError) {
  const Cli r = RunCli("run --scenario juggling --out " + Scratch("bad").string());
  EXPECT_EQ(r.exit_code, 1);
  const Json j = ParseJson(r.err, "stderr");
  EXPECT_EQ(j.at("error").at("code"), "unknown_scenario");
  EXPECT_EQ(j.at("error").at("message"), "unknown scenario: juggling");
}

TEST(Cli, UsageErrorExitsWithTwo) {
  const Cli r = RunCli("run --no-such-flag");
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_EQ(ParseJson(r.err, "stderr").at("error").at("code"), "usage");
}

TEST(Cli, BadConfigIsSchemaError) {
  const fs::path dir = Scratch("badcfg");
  WriteFile((dir / "c.json").string(), "{\"run\": {\"k_max\": \"ten\"}}");
  const Cli r = RunCli("run --scenario rubbing --config " + (dir / "c.json").string() +
                       " --out " + (dir / "out").string());
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_EQ(ParseJson(r.err, "stderr").at("error").at("code"), "schema_error");
}

TEST(Cli, RerunsAreByteIdentical) {
  const fs::path a = Scratch("rerun_a"), b = Scratch("rerun_b");
  for (const fs::path& p : {a, b}) {
    ASSERT_EQ(RunCli("run --scenario contouring --kmax 3 --seed 11 --out " + p.string())
                  .exit_code, 0);
  }
  int compared = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    const std::string name = entry.path().filename().string();
    if (name == "metadata.json") continue;
    EXPECT_EQ(ReadFile(entry.path().string()), ReadFile((b / name).string())) << name;
    ++compared;
  }
  EXPECT_EQ(compared, 6);
}

}  // namespace
}  // namespace caoed
