// Copyright 2026 The dpnc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Command line front end:
//
//   dpnc run <config.json> --out <dir> [--seed-offset k] [--jobs j]
//            [--timing] [--noise-log]
//   dpnc validate <config.json>...

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/strings/str_cat.h"
#include "dpnc/experiment_config.h"
#include "dpnc/experiment_runner.h"
#include "dpnc/logging.h"
#include "dpnc/number_format.h"
#include "dpnc/results_csv.h"

namespace {

int Fail(const absl::Status& status) {
  std::cerr << "error: " << status << '\n';
  return 1;
}

int Run(const std::string& config_path, const std::string& out_dir,
        const dpnc::RunOptions& options, bool quiet) {
  dpnc::SetWarningsQuiet(quiet);
  auto cfg = dpnc::LoadExperimentConfig(config_path);
  if (!cfg.ok()) return Fail(cfg.status());
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    std::cerr << "error: cannot create " << out_dir << ": " << ec.message()
              << '\n';
    return 1;
  }
  auto out = dpnc::RunExperiment(*cfg, options);
  if (!out.ok()) return Fail(out.status());
  const std::filesystem::path dir(out_dir);
  const std::string csv = (dir / (cfg->id + ".csv")).string();
  if (auto s = dpnc::WriteCsv(out->rows, csv); !s.ok()) return Fail(s);
  if (options.keep_noise_logs) {
    const std::filesystem::path noise_dir = dir / (cfg->id + "_noise");
    std::filesystem::create_directories(noise_dir, ec);
    for (size_t i = 0; i < out->rows.size(); ++i) {
      const auto& row = out->rows[i];
      const std::string name =
          absl::StrCat("seed", row.seed, "_", row.knob, "_",
                       dpnc::FormatShortest(row.knob_value), ".csv");
      if (auto s = dpnc::WriteNoiseLog(out->noise_logs[i],
                                       (noise_dir / name).string());
          !s.ok()) {
        return Fail(s);
      }
    }
  }
  std::cout << "wrote " << out->rows.size() << " rows to " << csv << '\n';
  return 0;
}

int Validate(const std::vector<std::string>& paths) {
  int failures = 0;
  for (const std::string& path : paths) {
    auto cfg = dpnc::LoadExperimentConfig(path);
    if (cfg.ok()) {
      std::cout << "ok      " << path << '\n';
    } else {
      std::cout << "invalid " << cfg.status().message() << '\n';
      ++failures;
    }
  }
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private non-convex learning experiments"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run one sweep and write its CSV");
  std::string config_path;
  std::string out_dir;
  dpnc::RunOptions options;
  bool quiet = false;
  run->add_option("config", config_path, "Experiment config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--seed-offset", options.seed_offset,
                  "Added to every seed in the config");
  run->add_option("--jobs", options.jobs, "Cells run in parallel")
      ->check(CLI::PositiveNumber);
  run->add_flag("--timing", options.timing,
                "Record wall-clock ms (makes the CSV run dependent)");
  run->add_flag("--noise-log", options.keep_noise_logs,
                "Write one noise-event CSV per cell");
  run->add_flag("--quiet", quiet, "Suppress warnings on stderr");

  auto* validate = app.add_subcommand("validate", "Check configs only");
  std::vector<std::string> paths;
  validate->add_option("configs", paths, "Config files")->required();

  CLI11_PARSE(app, argc, argv);
  if (run->parsed()) return Run(config_path, out_dir, options, quiet);
  return Validate(paths);
}
