// tools/lhuc.cpp
//
// Copyright 2026 lhuclab authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Command-line front end.  Every operation goes through the public C API of
// the lhuclab shared library; this translation unit contains no modelling
// code of its own.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "lhuclab.h"

namespace {

// Prints the C API's thread-local error message and converts the status to a
// process exit code.
int fail(lhuc_status status) {
  std::fprintf(stderr, "error: %s\n", lhuc_last_error());
  return status == LHUC_OK ? 1 : static_cast<int>(status);
}

void print_and_free(char* text) {
  if (text == nullptr) return;
  std::fputs(text, stdout);
  lhuc_string_free(text);
}

int cmd_run(const std::string& config_path, bool verbose) {
  if (verbose) setenv("LHUCLAB_VERBOSE", "1", 1);
  char* summary = nullptr;
  const lhuc_status s = lhuc_run_experiment_file(config_path.c_str(), &summary);
  if (s != LHUC_OK) return fail(s);
  print_and_free(summary);
  return 0;
}

int cmd_gradcheck(std::uint64_t seed, int cases, bool json) {
  int pass = 0;
  double max_rel = 0.0;
  char* report = nullptr;
  const lhuc_status s =
      lhuc_gradcheck(seed, cases, &pass, &max_rel, json ? &report : nullptr);
  if (s != LHUC_OK) return fail(s);
  if (json) {
    print_and_free(report);
  } else {
    std::printf("gradcheck %s: max relative error %.3e over %d cases (seed %llu)\n",
                pass ? "PASS" : "FAIL", max_rel, cases,
                static_cast<unsigned long long>(seed));
  }
  return pass ? 0 : 1;
}

int cmd_synth_gen(const std::string& spec_path, const std::string& out_base) {
  std::ifstream f(spec_path, std::ios::binary);
  if (!f) {
    std::fprintf(stderr, "error: cannot open %s\n", spec_path.c_str());
    return static_cast<int>(LHUC_ERR_IO);
  }
  std::ostringstream text;
  text << f.rdbuf();
  char* files = nullptr;
  const lhuc_status s =
      lhuc_synth_generate(text.str().c_str(), out_base.c_str(), &files);
  if (s != LHUC_OK) return fail(s);
  print_and_free(files);
  return 0;
}

int cmd_inspect(const std::string& path) {
  char* info = nullptr;
  if (lhuc_checkpoint_inspect(path.c_str(), &info) == LHUC_OK) {
    print_and_free(info);
    return 0;
  }
  const std::string ckpt_err = lhuc_last_error();
  const lhuc_status s = lhuc_dataset_inspect(path.c_str(), &info);
  if (s == LHUC_OK) {
    print_and_free(info);
    return 0;
  }
  std::fprintf(stderr, "error: not a readable checkpoint (%s) or dataset (%s)\n",
               ckpt_err.c_str(), lhuc_last_error());
  return static_cast<int>(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("lhuclab ") + lhuc_version() +
               " - train, adapt and probe amplitude-scaled feedforward networks"};
  app.require_subcommand(1);

  std::string config_path;
  bool verbose = false;
  CLI::App* run = app.add_subcommand("run", "Run the experiment a JSON config describes");
  run->add_option("config", config_path, "Experiment config file")->required();
  run->add_flag("-v,--verbose", verbose, "Progress notes on stderr");

  std::uint64_t seed = 0;
  int cases = 25;
  bool json = false;
  CLI::App* gc = app.add_subcommand(
      "gradcheck", "Verify analytic gradients against finite differences");
  gc->add_option("--seed", seed, "Base seed for the randomized cases");
  gc->add_option("--cases", cases, "Number of randomized cases")
      ->check(CLI::PositiveNumber);
  gc->add_flag("--json", json, "Print the full per-case report as JSON");

  std::string spec_path, out_base;
  CLI::App* sg = app.add_subcommand(
      "synth-gen", "Generate the dataset files a task spec describes");
  sg->add_option("spec", spec_path, "Task spec JSON file")->required();
  sg->add_option("out", out_base, "Output base path (extensions are appended)")
      ->required();

  std::string inspect_path;
  CLI::App* ins = app.add_subcommand(
      "inspect", "Describe a checkpoint or dataset file (checksum-verified)");
  ins->add_option("path", inspect_path, "File to inspect")->required();

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return cmd_run(config_path, verbose);
  if (gc->parsed()) return cmd_gradcheck(seed, cases, json);
  if (sg->parsed()) return cmd_synth_gen(spec_path, out_base);
  if (ins->parsed()) return cmd_inspect(inspect_path);
  return 1;
}
