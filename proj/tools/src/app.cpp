/*
 * Copyright 2026 The picker-bench Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <CLI11.hpp>

#include "pbench_cli/cli.hpp"

namespace pbench::cli {

namespace {

void error_record(std::ostream& err, std::string_view kind, const std::string& message,
                  const std::string& field = {}, std::size_t line = 0) {
  Json j = Json::object();
  j["error"] = std::string(kind);
  if (!field.empty()) j["field"] = field;
  if (line > 0) j["line"] = line;
  j["message"] = message;
  err << j.dump() << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Seismic phase-picker benchmarking: stratified splits, pick scoring and variance analysis.",
               "picker-bench"};
  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir;
  bool quiet = false;
  app.add_option("--config", config_path, "JSON run configuration")->required();
  auto* seed_opt = app.add_option("--seed", seed, "override the configured seed");
  auto* out_opt = app.add_option("--out", out_dir, "override the configured output directory");
  app.add_flag("--quiet", quiet, "print nothing on success");
  app.require_subcommand(1, 1);
  for (const auto& name : subcommands()) app.add_subcommand(name)->fallthrough();

  std::vector<std::string> reversed(args.size() > 1 ? args.rbegin() : args.rend(), args.rend() - 1);
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    error_record(err, "usage", e.what());
    return kExitUsage;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    Overrides o;
    if (seed_opt->count() > 0) o.seed = seed;
    if (out_opt->count() > 0) o.out_dir = out_dir;
    o.quiet = quiet;
    const RunConfig config = load_config(config_path, o);
    const auto written = run_command(command, config);
    if (!config.quiet) {
      Json j = Json::object();
      j["command"] = command;
      j["out_dir"] = config.out_dir.string();
      j["outputs"] = written;
      out << j.dump() << '\n';
    }
    return kExitOk;
  } catch (const FieldError& e) {
    error_record(err, "config", e.what(), e.field());
    return kExitConfig;
  } catch (const MissingInputError& e) {
    error_record(err, "missing_input", e.what(), e.field());
    return kExitInput;
  } catch (const FormatError& e) {
    error_record(err, "format", e.what(), {}, e.line());
    return kExitData;
  } catch (const IoError& e) {
    error_record(err, "io", e.what());
    return kExitInput;
  } catch (const ValidationError& e) {
    error_record(err, "validation", e.what());
    return kExitData;
  } catch (const UndefinedMetricError& e) {
    error_record(err, "undefined_metric", e.what());
    return kExitData;
  } catch (const std::exception& e) {
    error_record(err, "internal", e.what());
    return kExitInternal;
  }
}

}  // namespace pbench::cli
