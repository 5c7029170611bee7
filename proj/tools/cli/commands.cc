// Copyright 2026 The tunectl Authors.
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

#include "cli/commands.h"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "absl/strings/str_cat.h"
#include "tunectl/common/numeric_format.h"
#include "tunectl/common/status_macros.h"
#include "tunectl/controller/control_loop.h"
#include "tunectl/controller/controllers.h"
#include "tunectl/controller/resource_store.h"
#include "tunectl/controller/resources.h"
#include "tunectl/local/local_process_backend.h"
#include "tunectl/metrics/file_store.h"
#include "tunectl/metrics/push_endpoint.h"
#include "tunectl/model/experiment_yaml.h"
#include "tunectl/sim/canned_scenarios.h"
#include "tunectl/sim/scenario.h"
#include "tunectl/sim/world.h"
#include "tunectl/suggest/algorithm.h"

namespace tunectl::cli {
namespace {

using controller::ExperimentResource;
using controller::ResourceStore;

const ValidationContext& Context() {
  return suggest::AlgorithmRegistry::Builtin().validation_context();
}

absl::StatusOr<std::string> ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot read ", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

absl::Status WriteFileAtomically(const std::filesystem::path& path, const std::string& body) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << body;
    if (!out.flush()) return absl::UnavailableError(absl::StrCat("cannot write ", tmp.string()));
  }
  std::error_code error;
  std::filesystem::rename(tmp, path, error);
  if (error) return absl::UnavailableError(absl::StrCat("cannot rename onto ", path.string()));
  return absl::OkStatus();
}

absl::StatusOr<std::unique_ptr<ResourceStore>> OpenStore(const StorePaths& store) {
  if (store.root.empty()) {
    return absl::InvalidArgumentError("no store directory; pass --store or set TUNECTL_STORE");
  }
  return ResourceStore::OpenDirectory(store.resources(), Context());
}

std::vector<ExperimentResource> Experiments(const ResourceStore& store) {
  std::vector<ExperimentResource> out;
  for (const auto& key : store.Keys("experiments/")) {
    if (auto experiment = controller::GetAs<ExperimentResource>(store, key)) {
      out.push_back(std::move(experiment->first));
    }
  }
  return out;
}

std::string FormatAssignments(const AssignmentSet& assignments) {
  std::string out;
  for (const auto& a : assignments) {
    absl::StrAppend(&out, out.empty() ? "" : " ", a.name, "=", a.value);
  }
  return out;
}

std::string SummaryOf(const ResourceStore& store) {
  std::string out;
  for (const auto& experiment : Experiments(store)) {
    const auto& spec = experiment.spec;
    const auto& status = experiment.status;
    absl::StrAppend(&out, spec.namespace_name, "/", spec.name, ": ",
                    std::string(controller::ToString(status.phase)));
    if (!status.message.empty()) absl::StrAppend(&out, " (", status.message, ")");
    absl::StrAppend(&out, "\n  trials: spawned ", status.trials_spawned, ", succeeded ",
                    status.trials_succeeded, ", failed ", status.trials_failed, ", running ",
                    status.trials_running, ", pending ", status.trials_pending, "\n");
    if (status.current_optimal) {
      absl::StrAppend(&out, "  optimal: ", status.current_optimal->trial_name, " ",
                      spec.objective.objective_metric_name, "=",
                      FormatDouble(status.current_optimal->objective_value), " [",
                      FormatAssignments(status.current_optimal->assignments), "]\n");
    } else {
      absl::StrAppend(&out, "  optimal: none\n");
    }
  }
  return out;
}

bool AnyExperiment(const ResourceStore& store) { return !store.Keys("experiments/").empty(); }

absl::Status RunSim(const RunOptions& options, std::ostream& out) {
  const StorePaths& paths = options.store;
  TUNECTL_ASSIGN_OR_RETURN(auto store, OpenStore(paths));
  TUNECTL_ASSIGN_OR_RETURN(auto metrics, metrics::FileObservationStore::Open(paths.metrics()));
  const auto& registry = suggest::AlgorithmRegistry::Builtin();

  std::unique_ptr<sim::World> world;
  if (std::filesystem::exists(paths.world())) {
    TUNECTL_ASSIGN_OR_RETURN(std::string text, ReadFile(paths.world()));
    auto snapshot = nlohmann::json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (snapshot.is_discarded()) {
      return absl::DataLossError(absl::StrCat(paths.world().string(), " is not valid JSON"));
    }
    TUNECTL_ASSIGN_OR_RETURN(world,
                             sim::World::Restore(snapshot, store.get(), metrics.get(), &registry));
  } else {
    sim::WorldConfig config;
    config.seed = options.seed;
    config.cluster.nodes = {{4, 16.0}};
    if (options.scenario) {
      TUNECTL_ASSIGN_OR_RETURN(sim::Scenario scenario,
                               sim::LoadScenario(*options.scenario, Context()));
      config = scenario.world;
      for (const auto& spec : scenario.experiments) {
        absl::Status submitted = controller::SubmitExperiment(*store, spec);
        if (!submitted.ok() && !absl::IsAlreadyExists(submitted)) return submitted;
      }
    }
    if (!AnyExperiment(*store)) {
      return absl::NotFoundError("the store holds no experiments; submit one first");
    }
    TUNECTL_ASSIGN_OR_RETURN(world,
                             sim::World::Create(config, store.get(), metrics.get(), &registry));
    TUNECTL_RETURN_IF_ERROR(world->Reconcile().status());
  }

  std::int64_t ticks = 0;
  bool interrupted = false;
  while (!world->Finished()) {
    if ((options.max_ticks && ticks >= *options.max_ticks) || (options.stop && options.stop())) {
      interrupted = true;
      break;
    }
    TUNECTL_RETURN_IF_ERROR(world->Tick());
    ++ticks;
  }
  TUNECTL_RETURN_IF_ERROR(WriteFileAtomically(paths.world(), world->Snapshot().dump()));
  out << SummaryOf(*store);
  if (interrupted) {
    out << "interrupted at tick " << world->tick() << "; run again to resume\n";
  } else {
    out << "finished at tick " << world->tick() << "\n";
  }
  return absl::OkStatus();
}

absl::Status RunLocal(const RunOptions& options, std::ostream& out) {
  const StorePaths& paths = options.store;
  TUNECTL_ASSIGN_OR_RETURN(auto store, OpenStore(paths));
  if (!AnyExperiment(*store)) {
    return absl::NotFoundError("the store holds no experiments; submit one first");
  }
  TUNECTL_ASSIGN_OR_RETURN(auto metrics, metrics::FileObservationStore::Open(paths.metrics()));
  absl::Status status;
  {
    local::LocalProcessBackend backend({paths.work(), metrics.get(),
                                        options.temporary_failure_exit_code});
    controller::ControlLoop loop(
        store.get(), {&suggest::AlgorithmRegistry::Builtin(), metrics.get(), &backend});
    status = loop.Run(std::chrono::milliseconds(50), options.stop);
  }
  out << SummaryOf(*store);
  return status;
}

std::string CsvField(std::string_view value) {
  if (value.find_first_of(",\"\n") == std::string_view::npos) return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

int ExitCodeFor(const absl::Status& status) {
  if (status.ok()) return kExitOk;
  switch (status.code()) {
    case absl::StatusCode::kInvalidArgument:
      return kExitValidation;
    case absl::StatusCode::kAlreadyExists:
    case absl::StatusCode::kAborted:
    case absl::StatusCode::kFailedPrecondition:
      return kExitConflict;
    default:
      return kExitRuntime;
  }
}

absl::StatusOr<std::string> SubmitFile(const std::filesystem::path& file, const StorePaths& store) {
  TUNECTL_ASSIGN_OR_RETURN(std::string text, ReadFile(file));
  auto spec = ParseExperiment(text, Context());
  if (!spec.ok()) {
    return absl::InvalidArgumentError(absl::StrCat(file.string(), ":\n", spec.status().message()));
  }
  TUNECTL_ASSIGN_OR_RETURN(auto resources, OpenStore(store));
  TUNECTL_RETURN_IF_ERROR(controller::SubmitExperiment(*resources, *spec));
  return controller::ExperimentKey(spec->namespace_name, spec->name);
}

absl::Status Run(const RunOptions& options, std::ostream& out) {
  return options.backend == Backend::kSim ? RunSim(options, out) : RunLocal(options, out);
}

absl::StatusOr<std::string> Summary(const StorePaths& store) {
  TUNECTL_ASSIGN_OR_RETURN(auto resources, OpenStore(store));
  return SummaryOf(*resources);
}

absl::StatusOr<std::string> ExportResults(const StorePaths& store, const std::string& ns,
                                          const std::string& experiment, ExportFormat format) {
  TUNECTL_ASSIGN_OR_RETURN(auto resources, OpenStore(store));
  auto found = controller::GetAs<ExperimentResource>(*resources,
                                                     controller::ExperimentKey(ns, experiment));
  if (!found) {
    return absl::NotFoundError(absl::StrCat("no experiment ", ns, "/", experiment));
  }
  const ExperimentSpec& spec = found->first.spec;
  std::vector<std::string> parameters;
  for (const auto& p : spec.parameters) parameters.push_back(p.name);
  if (spec.algorithm.algorithm_name == "hyperband") parameters.emplace_back(kBudgetParameter);
  std::vector<std::string> metric_columns = {spec.objective.objective_metric_name};
  for (const auto& m : spec.objective.additional_metric_names) metric_columns.push_back(m);

  std::string out;
  if (format == ExportFormat::kCsv) {
    std::vector<std::string> header = {"trial"};
    header.insert(header.end(), parameters.begin(), parameters.end());
    header.insert(header.end(), metric_columns.begin(), metric_columns.end());
    header.push_back("phase");
    header.push_back("restartCount");
    for (std::size_t i = 0; i < header.size(); ++i) {
      absl::StrAppend(&out, i ? "," : "", CsvField(header[i]));
    }
    out += "\n";
  }
  for (const auto& entry : controller::TrialsOf(*resources, ns, experiment)) {
    const auto& trial = entry.trial;
    const std::string name = entry.trial.spec.run_spec.trial_name;
    nlohmann::ordered_json row;
    row["trial"] = name;
    for (const auto& p : parameters) {
      const auto* a = FindAssignment(trial.spec.run_spec.parameter_assignments, p);
      row[p] = a ? nlohmann::ordered_json(a->value) : nlohmann::ordered_json();
    }
    for (std::size_t m = 0; m < metric_columns.size(); ++m) {
      std::optional<double> value;
      if (m == 0) {
        value = trial.status.observation;
      } else if (auto it = trial.status.additional_metrics.find(metric_columns[m]);
                 it != trial.status.additional_metrics.end()) {
        value = it->second;
      }
      row[metric_columns[m]] = value ? nlohmann::ordered_json(*value) : nlohmann::ordered_json();
    }
    row["phase"] = std::string(controller::ToString(trial.status.phase));
    row["restartCount"] = trial.status.restart_count;
    if (format == ExportFormat::kJsonl) {
      absl::StrAppend(&out, row.dump(), "\n");
      continue;
    }
    bool first = true;
    for (const auto& [key, value] : row.items()) {
      std::string cell;
      if (value.is_string()) {
        cell = value.get<std::string>();
      } else if (value.is_number_float()) {
        cell = FormatDouble(value.get<double>());
      } else if (!value.is_null()) {
        cell = value.dump();
      }
      absl::StrAppend(&out, first ? "" : ",", CsvField(cell));
      first = false;
    }
    out += "\n";
  }
  return out;
}

int Main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
         const std::function<bool()>& stop) {
  CLI::App app{"Hyperparameter tuning orchestrator", "tunectl"};
  app.require_subcommand(1);
  std::string store_dir;
  app.add_option("--store", store_dir, "Store directory")->envname("TUNECTL_STORE");

  std::string file;
  auto* submit = app.add_subcommand("submit", "Validate and store an experiment file");
  submit->add_option("file", file, "Experiment YAML")->required();

  auto* validate = app.add_subcommand("validate", "Validate a file and print its canonical form");
  validate->add_option("file", file, "Experiment YAML")->required();

  std::string backend = "sim";
  std::string scenario_file;
  std::uint64_t seed = 1;
  std::int64_t max_ticks = -1;
  int temp_exit = local::kDefaultTemporaryFailureExitCode;
  auto* run = app.add_subcommand("run", "Run the control loop until experiments finish");
  run->add_option("--backend", backend, "sim or local")->check(CLI::IsMember({"sim", "local"}));
  run->add_option("--scenario", scenario_file, "Cluster scenario for the sim backend");
  run->add_option("--seed", seed, "Simulation seed");
  run->add_option("--max-ticks", max_ticks, "Stop after this many ticks; rerun to resume");
  run->add_option("--temporary-failure-exit-code", temp_exit,
                  "Exit code by which local trials request a restart");

  std::string experiment;
  std::string ns = "default";
  auto* get = app.add_subcommand("get", "Show experiments, or one experiment in full");
  get->add_option("experiment", experiment, "Experiment name");
  get->add_option("-n,--namespace", ns, "Namespace");

  std::string format = "csv";
  std::string output;
  auto* export_cmd = app.add_subcommand("export", "Write per-trial results for plotting");
  export_cmd->add_option("experiment", experiment, "Experiment name")->required();
  export_cmd->add_option("-n,--namespace", ns, "Namespace");
  export_cmd->add_option("--format", format, "csv or jsonl")
      ->check(CLI::IsMember({"csv", "jsonl"}));
  export_cmd->add_option("-o,--output", output, "Output file; stdout when omitted");

  std::string scenario_name;
  std::string events_file;
  auto* scenario = app.add_subcommand("scenario", "Run a canned or custom scenario with checks");
  scenario->add_option("name", scenario_name, "multi-tenancy, autoscale, chaos-fail, "
                                              "chaos-kill or portability");
  scenario->add_option("--scenario", scenario_file, "Custom scenario file");
  auto* scenario_seed = scenario->add_option("--seed", seed, "Seed; overrides the file's seed");
  scenario->add_option("--events", events_file, "Write the JSON-lines event log here");

  std::string socket;
  auto* push = app.add_subcommand("push", "Send metric lines from stdin to a trial's endpoint");
  push->add_option("--socket", socket, "Endpoint path")->envname("TUNECTL_METRICS_SOCKET");

  std::vector<const char*> argv = {"tunectl"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  const StorePaths paths{store_dir};
  auto fail = [&err](const absl::Status& status) {
    err << "error: " << status.message() << "\n";
    return ExitCodeFor(status);
  };

  if (submit->parsed()) {
    auto key = SubmitFile(file, paths);
    if (!key.ok()) return fail(key.status());
    out << *key << "\n";
    return kExitOk;
  }
  if (validate->parsed()) {
    auto text = ReadFile(file);
    if (!text.ok()) return fail(text.status());
    auto spec = ParseExperiment(*text, Context());
    if (!spec.ok()) return fail(spec.status());
    out << CanonicalYaml(*spec);
    return kExitOk;
  }
  if (run->parsed()) {
    RunOptions options;
    options.store = paths;
    options.backend = backend == "local" ? Backend::kLocal : Backend::kSim;
    if (!scenario_file.empty()) options.scenario = scenario_file;
    options.seed = seed;
    if (max_ticks >= 0) options.max_ticks = max_ticks;
    options.temporary_failure_exit_code = temp_exit;
    options.stop = stop;
    absl::Status status = Run(options, out);
    return status.ok() ? kExitOk : fail(status);
  }
  if (get->parsed()) {
    auto store = OpenStore(paths);
    if (!store.ok()) return fail(store.status());
    if (experiment.empty()) {
      out << SummaryOf(**store);
      return kExitOk;
    }
    auto found = (*store)->Get(controller::ExperimentKey(ns, experiment));
    if (!found) return fail(absl::NotFoundError(absl::StrCat("no experiment ", ns, "/", experiment)));
    out << controller::ResourceToYaml(found->resource);
    for (const auto& entry : controller::TrialsOf(**store, ns, experiment)) {
      const auto& status = entry.trial.status;
      out << "# " << entry.trial.spec.run_spec.trial_name << " "
          << controller::ToString(status.phase) << " objective="
          << (status.observation ? FormatDouble(*status.observation) : std::string("-"))
          << " restarts=" << status.restart_count
          << (status.reason.empty() ? "" : " reason=" + status.reason) << "\n";
    }
    return kExitOk;
  }
  if (export_cmd->parsed()) {
    auto table = ExportResults(paths, ns, experiment,
                               format == "jsonl" ? ExportFormat::kJsonl : ExportFormat::kCsv);
    if (!table.ok()) return fail(table.status());
    if (output.empty()) {
      out << *table;
      return kExitOk;
    }
    absl::Status written = WriteFileAtomically(output, *table);
    return written.ok() ? kExitOk : fail(written);
  }
  if (scenario->parsed()) {
    absl::StatusOr<sim::ScenarioReport> report;
    if (!scenario_file.empty()) {
      auto loaded = sim::LoadScenario(scenario_file, Context());
      if (!loaded.ok()) return fail(loaded.status());
      if (scenario_seed->count() > 0) loaded->world.seed = seed;
      report = sim::RunScenarioWithChecks(*loaded);
    } else if (!scenario_name.empty()) {
      report = sim::RunCannedScenario(scenario_name, seed);
    } else {
      return fail(absl::InvalidArgumentError("name a canned scenario or pass --scenario"));
    }
    if (!report.ok()) return fail(report.status());
    out << "scenario " << report->scenario << " seed " << report->seed << "\n";
    for (const auto& a : report->assertions) {
      out << (a.passed ? "PASS " : "FAIL ") << a.name
          << (a.detail.empty() ? "" : " (" + a.detail + ")") << "\n";
    }
    out << "summary " << report->summary.dump() << "\n";
    if (!events_file.empty()) {
      absl::Status written = WriteFileAtomically(events_file, report->events);
      if (!written.ok()) return fail(written);
    }
    return report->passed() ? kExitOk : kExitScenarioFailed;
  }
  if (push->parsed()) {
    if (socket.empty()) {
      return fail(absl::InvalidArgumentError("no socket; pass --socket or set "
                                             "TUNECTL_METRICS_SOCKET"));
    }
    std::stringstream lines;
    lines << std::cin.rdbuf();
    absl::Status pushed = metrics::PushMetricLines(socket, lines.str());
    return pushed.ok() ? kExitOk : fail(pushed);
  }
  return kExitUsage;
}

}  // namespace tunectl::cli
