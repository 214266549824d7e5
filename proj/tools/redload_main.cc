/*
 * Copyright (C) 2026 The redload Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Command-line front end: gen, analyze, merge, report.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "redload/analyzer.h"
#include "redload/errors.h"
#include "redload/profile.h"
#include "redload/report.h"
#include "redload/workload.h"

namespace {

constexpr int kUsageExit = 2;

using namespace redload;

std::ofstream OpenOutput(const std::string& path, bool binary) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw Error(path + ": cannot open for writing");
  return out;
}

void RunGen(const std::string& scenario_name,
            const std::vector<std::string>& params, const std::string& output,
            bool text) {
  Scenario s;
  s.name = ParseScenarioName(scenario_name);
  for (const std::string& kv : params) {
    const size_t eq = kv.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError("--param expects key=value, got '" + kv + "'");
    s.params[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  std::ofstream out = OpenOutput(output, !text);
  if (text) {
    Trace t = Generate(s);
    WriteTextTrace(t.events, t.source_map, out);
  } else {
    BinaryTraceWriter writer(out);
    Generate(s, writer);
  }
  out.flush();
  if (!out) throw Error(output + ": write failed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"redload: trace-driven redundant load profiler"};
  app.require_subcommand(1);

  std::string scenario;
  std::vector<std::string> params;
  std::string gen_out;
  bool gen_text = false;
  CLI::App* gen = app.add_subcommand("gen", "Generate a synthetic trace");
  gen->add_option("--scenario", scenario, "Scenario name")
      ->required()
      ->check(CLI::IsMember(ScenarioNames()));
  gen->add_option("--param", params, "Scenario parameter key=value");
  gen->add_option("-o,--output", gen_out, "Trace file")->required();
  gen->add_flag("--text", gen_text, "Write the text encoding");

  std::string trace_path;
  std::string analyze_out;
  AnalyzerConfig config;
  bool no_sampling = false;
  CLI::App* analyze = app.add_subcommand("analyze", "Analyze a trace");
  analyze->add_option("trace", trace_path, "Trace file")->required();
  analyze->add_option("-o,--output", analyze_out, "Profile file")->required();
  CLI::Option* off =
      analyze->add_flag("--no-sampling", no_sampling, "Monitor every load");
  analyze
      ->add_option("--window-enable", config.sampling.window_enable,
                   "Monitored instructions per period")
      ->excludes(off)
      ->check(CLI::PositiveNumber);
  analyze
      ->add_option("--window-disable", config.sampling.window_disable,
                   "Unmonitored instructions per period")
      ->excludes(off);
  analyze
      ->add_option("--approx-epsilon", config.approx_epsilon,
                   "Relative tolerance for FP values")
      ->check(CLI::Range(0.0, 1.0));
  analyze
      ->add_option("--scope-budget", config.scope_budget,
                   "Scope computations per context pair")
      ->check(CLI::PositiveNumber);

  std::vector<std::string> inputs;
  std::string merge_out;
  CLI::App* merge = app.add_subcommand("merge", "Merge profiles");
  merge->add_option("profiles", inputs, "Profile files")->required();
  merge->add_option("-o,--output", merge_out, "Merged profile")->required();

  std::string profile_path;
  size_t top = kDefaultReportTop;
  std::string format = "text";
  CLI::App* report = app.add_subcommand("report", "Render a ranked report");
  report->add_option("profile", profile_path, "Profile file")->required();
  report->add_option("--top", top, "Rows per kind");
  report->add_option("--format", format, "text or json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "redload: " << e.what() << "\n\n" << app.help();
    return kUsageExit;
  }

  try {
    if (gen->parsed()) {
      RunGen(scenario, params, gen_out, gen_text);
    } else if (analyze->parsed()) {
      if (no_sampling) config.sampling = SamplingConfig::Disabled();
      Validate(config.sampling);
      SaveProfile(AnalyzeFile(trace_path, config), analyze_out);
    } else if (merge->parsed()) {
      std::vector<Profile> profiles;
      for (const auto& p : inputs) profiles.push_back(LoadProfile(p));
      SaveProfile(MergeAll(profiles), merge_out);
    } else if (report->parsed()) {
      ReportFormat fmt;
      try {
        fmt = ParseReportFormat(format);
      } catch (const UsageError& e) {
        std::cerr << "redload: " << e.what() << "\n\n" << report->help();
        return kUsageExit;
      }
      std::cout << Render(BuildReport(LoadProfile(profile_path), top), fmt);
    }
  } catch (const std::exception& e) {
    std::cerr << "redload: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
