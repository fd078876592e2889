// Copyright 2026 The Authors.
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

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ocrslab/errors.hpp"
#include "ocrslab/experiments.hpp"

namespace {

// Exit codes; also documented in the README.
constexpr int kExitOk = 0;
constexpr int kExitInputError = 2;
constexpr int kExitIndeterminate = 3;
constexpr int kExitInvariant = 4;
constexpr int kExitUnexpected = 10;

struct SubArgs {
  CLI::App* app = nullptr;
  std::string config;
  std::string out = "out";
  uint64_t seed = 0;
  int64_t trials = -1;
  int threads = -1;
};

/// One machine-readable record per failure, as a single JSON line on stderr.
void report_error(const char* category, const std::string& message) {
  nlohmann::json rec;
  rec["error"] = category;
  rec["message"] = message;
  std::fprintf(stderr, "%s\n", rec.dump().c_str());
}

void attach_common(SubArgs& args) {
  args.app->add_option("--config", args.config, "Experiment config file")
      ->required()
      ->envname("OCRS_LAB_CONFIG")
      ->check(CLI::ExistingFile);
  args.app->add_option("--out", args.out, "Output directory")
      ->envname("OCRS_LAB_OUT");
  args.app->add_option("--seed", args.seed, "Master RNG seed (u64)")
      ->envname("OCRS_LAB_SEED");
  args.app
      ->add_option("--trials", args.trials,
                   "Trial count override (config value if omitted)")
      ->envname("OCRS_LAB_TRIALS");
  args.app
      ->add_option("--threads", args.threads,
                   "Worker thread count (config value if omitted)")
      ->envname("OCRS_LAB_THREADS");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "ocrs-lab: online contention resolution and prophet-inequality "
      "experiment runner"};
  app.require_subcommand(1);

  const std::vector<std::pair<std::string, std::string>> subcommands = {
      {"ocrs-select", "Estimate per-element OCRS selectability"},
      {"prophet-ratio", "Measure a gambler's competitive ratio"},
      {"girth-bound", "Hardness-instance lower-bound study"},
      {"concentration-sweep", "Empirical tail bounds for scaled vectors"},
      {"gen-instance", "Generate instance and matroid files"},
      {"verify-oracles", "Run the brute-force oracle cross-checks"},
  };

  std::vector<SubArgs> args(subcommands.size());
  for (size_t i = 0; i < subcommands.size(); ++i) {
    args[i].app = app.add_subcommand(subcommands[i].first,
                                     subcommands[i].second);
    attach_common(args[i]);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    if (code == 0) return kExitOk;  // --help and friends
    report_error("input-error", e.what());
    return kExitInputError;
  }

  try {
    for (size_t i = 0; i < subcommands.size(); ++i) {
      if (!args[i].app->parsed()) continue;
      ocrslab::RunOptions opts;
      opts.subcommand = subcommands[i].first;
      opts.config_path = args[i].config;
      opts.out_dir = args[i].out;
      opts.seed = args[i].seed;
      opts.seed_set = args[i].app->count("--seed") > 0;
      opts.trials = args[i].trials;
      opts.threads = args[i].threads;
      ocrslab::run_experiment(opts);
      std::printf("ok: artifacts written to %s\n", args[i].out.c_str());
      return kExitOk;
    }
    report_error("input-error", "no subcommand selected");
    return kExitInputError;
  } catch (const ocrslab::IndeterminateComparisonError& e) {
    report_error("indeterminate-comparison", e.what());
    return kExitIndeterminate;
  } catch (const ocrslab::InvariantError& e) {
    report_error("invariant-failure", e.what());
    return kExitInvariant;
  } catch (const ocrslab::InputError& e) {
    report_error("input-error", e.what());
    return kExitInputError;
  } catch (const ocrslab::CapabilityError& e) {
    report_error("input-error", e.what());
    return kExitInputError;
  } catch (const ocrslab::ConstructionError& e) {
    report_error("input-error", e.what());
    return kExitInputError;
  } catch (const std::exception& e) {
    report_error("unexpected", e.what());
    return kExitUnexpected;
  }
}
