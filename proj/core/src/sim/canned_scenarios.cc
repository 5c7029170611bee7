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

#include "tunectl/sim/canned_scenarios.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <glog/logging.h>

#include "absl/strings/str_cat.h"
#include "absl/strings/substitute.h"
#include "tunectl/common/numeric_format.h"
#include "tunectl/common/rng.h"
#include "tunectl/common/status_macros.h"
#include "tunectl/controller/controllers.h"
#include "tunectl/controller/resources.h"
#include "tunectl/model/experiment_yaml.h"
#include "tunectl/sim/objectives.h"

namespace tunectl::sim {
namespace {

using controller::ExperimentPhase;
using controller::ExperimentResource;
using controller::TrialPhase;

constexpr double kChaosRates[] = {0.0, 0.05, 0.5, 1.0};
constexpr int kPortabilitySeeds = 20;

// $0 name, $1 namespace, $2 random_state, $3 parallel, $4 max trials,
// $5 duration ticks.
constexpr char kMnistExperiment[] = R"(
name: $0
namespace: $1
objective:
  type: maximize
  objectiveMetricName: Validation-accuracy
  additionalMetricNames: [accuracy]
algorithm:
  algorithmName: random
  settings: {random_state: "$2"}
parallelTrialCount: $3
maxTrialCount: $4
maxFailedTrialCount: 3
parameters:
  - {name: lr, parameterType: double, feasibleSpace: {min: "0.01", max: "0.5"}}
  - {name: num-layers, parameterType: int, feasibleSpace: {min: "2", max: "8"}}
  - {name: optimizer, parameterType: categorical, feasibleSpace: {list: [sgd, adam, ftrl]}}
trialTemplate:
  kind: simulated
  workerCount: 1
  cpuPerWorker: 2
  simulatedObjective: {functionName: mnist-surrogate, durationTicks: $5, noiseStdDev: 0.002}
)";

// $0 algorithm, $1 random_state, $2 max trials, $3 max failed, $4 workers,
// $5 cpu per worker, $6 restart policy, $7 duration ticks.
constexpr char kSphereExperiment[] = R"(
name: sphere
namespace: default
objective:
  type: minimize
  objectiveMetricName: loss
algorithm:
  algorithmName: $0
  settings: {random_state: "$1"}
parallelTrialCount: 10
maxTrialCount: $2
maxFailedTrialCount: $3
parameters:
  - {name: x, parameterType: double, feasibleSpace: {min: "-5", max: "5"}}
  - {name: y, parameterType: double, feasibleSpace: {min: "-5", max: "5"}}
  - {name: z, parameterType: double, feasibleSpace: {min: "-5", max: "5"}}
trialTemplate:
  kind: simulated
  workerCount: $4
  cpuPerWorker: $5
  restartPolicy: $6
  simulatedObjective: {functionName: sphere, durationTicks: $7, noiseStdDev: 0.01}
)";

// $0 name, $1 algorithm, $2 random_state, $3 max trials, then the ranges:
// $4 lr max, $5 layers min, $6 layers max, $7 batch min, $8 batch max,
// $9 optimizer list.
constexpr char kPortabilityExperiment[] = R"(
name: $0
namespace: default
objective:
  type: maximize
  objectiveMetricName: Validation-accuracy
  additionalMetricNames: [accuracy]
algorithm:
  algorithmName: $1
  settings: {random_state: "$2"}
parallelTrialCount: 3
maxTrialCount: $3
maxFailedTrialCount: 3
parameters:
  - {name: lr, parameterType: double, feasibleSpace: {min: "0.01", max: "$4"}}
  - {name: num-layers, parameterType: int, feasibleSpace: {min: "$5", max: "$6"}}
  - {name: batch-size, parameterType: int, feasibleSpace: {min: "$7", max: "$8"}}
  - {name: optimizer, parameterType: categorical, feasibleSpace: {list: [$9]}}
trialTemplate:
  kind: simulated
  workerCount: 2
  cpuPerWorker: 1
  simulatedObjective: {functionName: mnist-surrogate, durationTicks: 5, noiseStdDev: 0.001}
)";

ExperimentSpec MustParse(const std::string& text) {
  auto spec = ParseExperiment(text);
  CHECK(spec.ok()) << spec.status() << "\n" << text;
  return *std::move(spec);
}

// Seeds fed into experiments must stay within the signed range the YAML
// reader accepts.
std::uint64_t StateFor(std::uint64_t seed, std::string_view tag) {
  return DeriveSeed(seed, tag) >> 1;
}

ScenarioReport NewReport(std::string name, std::uint64_t seed) {
  ScenarioReport report;
  report.scenario = std::move(name);
  report.seed = seed;
  return report;
}

AssertionResult Check(std::string name, bool passed, std::string detail) {
  return {std::move(name), passed, std::move(detail)};
}

std::vector<controller::TrialEntry> Trials(const ScenarioRun& run, const ExperimentSpec& spec) {
  return controller::TrialsOf(*run.store, spec.namespace_name, spec.name);
}

ExperimentResource Final(const ScenarioRun& run, const ExperimentSpec& spec) {
  auto experiment = controller::GetAs<ExperimentResource>(
      *run.store, controller::ExperimentKey(spec.namespace_name, spec.name));
  CHECK(experiment.has_value());
  return experiment->first;
}

std::string KeyOf(const ExperimentSpec& spec) {
  return absl::StrCat(spec.namespace_name, "/", spec.name);
}

void AppendEvents(ScenarioReport& report, const ScenarioRun& run, nlohmann::json marker) {
  EventLog header;
  header.Append(0, "run", std::move(marker));
  absl::StrAppend(&report.events, header.ToJsonl(), run.world->events().ToJsonl());
}

double Median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n == 0) return std::numeric_limits<double>::quiet_NaN();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

// Noise-free surrogate accuracy of the experiment's optimal assignment, so
// measurement noise cannot flatter the comparison with the optimum.
double TrueBestOf(const ScenarioRun& run, const ExperimentSpec& spec) {
  auto optimal = Final(run, spec).status.current_optimal;
  if (!optimal) return 0.0;
  const auto& a = optimal->assignments;
  auto number = [&a](std::string_view name) {
    return ParseDouble(FindAssignment(a, name)->value).value_or(0.0);
  };
  return MnistSurrogateAccuracy(number("lr"), number("num-layers"), number("batch-size"),
                                FindAssignment(a, "optimizer")->value);
}

absl::StatusOr<ScenarioReport> MultiTenancy(std::uint64_t seed) {
  const Scenario scenario = MultiTenancyScenario(seed);
  TUNECTL_ASSIGN_OR_RETURN(ScenarioRun run, RunScenario(scenario));
  ScenarioReport report = NewReport("multi-tenancy", seed);
  report.assertions = InvariantAssertions(scenario, run);
  const int expected_peak[] = {8, 2};
  for (std::size_t i = 0; i < scenario.experiments.size(); ++i) {
    const ExperimentSpec& spec = scenario.experiments[i];
    int peak = 0;
    for (const auto& stats : run.world->stats()) {
      auto it = stats.running_trials.find(spec.namespace_name);
      if (it != stats.running_trials.end()) peak = std::max(peak, it->second);
    }
    report.summary["peakConcurrency"][spec.namespace_name] = peak;
    report.assertions.push_back(Check(
        absl::StrCat(spec.namespace_name, " peak concurrency is ", expected_peak[i]),
        peak == expected_peak[i], absl::StrCat("observed ", peak)));
    const auto status = Final(run, spec).status;
    report.assertions.push_back(
        Check(absl::StrCat(spec.namespace_name, " runs all 12 trials to success"),
              status.phase == ExperimentPhase::kSucceeded && status.trials_succeeded == 12,
              absl::StrCat("phase ", std::string(controller::ToString(status.phase)), ", ",
                           status.trials_succeeded, " succeeded")));
  }
  report.summary["ticks"] = run.world->tick();
  AppendEvents(report, run, {{"scenario", "multi-tenancy"}});
  return report;
}

absl::StatusOr<ScenarioReport> Autoscale(std::uint64_t seed) {
  const Scenario scenario = AutoscaleScenario(seed);
  TUNECTL_ASSIGN_OR_RETURN(ScenarioRun run, RunScenario(scenario));
  ScenarioReport report = NewReport("autoscale", seed);
  report.assertions = InvariantAssertions(scenario, run);
  const ExperimentSpec& spec = scenario.experiments.front();
  const auto& grace = scenario.world.autoscaler->scale_down_grace_ticks;

  int peak = 0;
  std::optional<std::int64_t> completed_at;
  std::optional<std::int64_t> returned_at;
  for (const auto& stats : run.world->stats()) {
    peak = std::max(peak, stats.nodes);
    auto it = stats.experiments.find(KeyOf(spec));
    if (!completed_at && it != stats.experiments.end() &&
        (it->second.phase == "Succeeded" || it->second.phase == "Failed")) {
      completed_at = stats.tick;
    }
    if (completed_at && !returned_at && stats.nodes == 3) returned_at = stats.tick;
  }
  report.summary["peakNodes"] = peak;
  report.summary["completedAt"] = completed_at ? nlohmann::json(*completed_at) : nlohmann::json();
  report.summary["returnedAt"] = returned_at ? nlohmann::json(*returned_at) : nlohmann::json();
  report.assertions.push_back(Check("node count reaches 50", peak == 50,
                                    absl::StrCat("peak ", peak)));
  report.assertions.push_back(Check(
      "node count returns to 3 within the grace period",
      completed_at && returned_at && *returned_at - *completed_at <= grace,
      absl::StrCat("completed at ", completed_at.value_or(-1), ", back to 3 at ",
                   returned_at.value_or(-1), ", grace ", grace)));
  const auto status = Final(run, spec).status;
  report.assertions.push_back(
      Check("all 250 trials succeed",
            status.phase == ExperimentPhase::kSucceeded && status.trials_succeeded == 250,
            absl::StrCat(status.trials_succeeded, " succeeded, ", status.trials_failed,
                         " failed")));
  report.summary["ticks"] = run.world->tick();
  AppendEvents(report, run, {{"scenario", "autoscale"}});
  return report;
}

absl::StatusOr<ScenarioReport> ChaosFail(std::uint64_t seed) {
  ScenarioReport report = NewReport("chaos-fail", seed);
  for (double rate : kChaosRates) {
    const Scenario scenario = ChaosFailScenario(rate, seed);
    TUNECTL_ASSIGN_OR_RETURN(ScenarioRun run, RunScenario(scenario));
    const std::string label = absl::StrCat("rate ", rate * 100, "%");
    for (auto& result : InvariantAssertions(scenario, run)) {
      result.name = absl::StrCat(label, ": ", result.name);
      report.assertions.push_back(std::move(result));
    }
    const ExperimentSpec& spec = scenario.experiments.front();
    const auto trials = Trials(run, spec);

    // The reported optimum at every tick must equal the best succeeded
    // trial finished by then, and must never get worse.
    bool consistent = true;
    bool monotone = true;
    std::optional<double> previous;
    std::string first_problem;
    for (const auto& stats : run.world->stats()) {
      std::optional<double> expected;
      for (const auto& t : trials) {
        if (t.trial.status.phase != TrialPhase::kSucceeded || !t.trial.status.finish_time ||
            *t.trial.status.finish_time > stats.tick) {
          continue;
        }
        const double value = *t.trial.status.observation;
        if (!expected || value < *expected) expected = value;
      }
      auto it = stats.experiments.find(KeyOf(spec));
      const std::optional<double> reported =
          it == stats.experiments.end() ? std::nullopt : it->second.best;
      if (reported != expected && consistent) {
        consistent = false;
        first_problem = absl::StrCat("tick ", stats.tick);
      }
      if (previous && (!reported || *reported > *previous)) monotone = false;
      if (reported) previous = reported;
    }
    const auto status = Final(run, spec).status;
    const bool within_budget = status.trials_failed <= spec.max_failed_trial_count;
    report.assertions.push_back(Check(absl::StrCat(label, ": best-so-far is non-increasing"),
                                      monotone && consistent,
                                      consistent ? "" : "optimum disagrees at " + first_problem));
    report.assertions.push_back(Check(
        absl::StrCat(label, ": Succeeded whenever failures stay within budget"),
        within_budget ? status.phase == ExperimentPhase::kSucceeded
                      : status.phase == ExperimentPhase::kFailed,
        absl::StrCat(status.trials_failed, " failed, phase ",
                     std::string(controller::ToString(status.phase)))));
    report.assertions.push_back(Check(
        absl::StrCat(label, rate > 0 ? ": failures occur" : ": no failures"),
        rate > 0 ? status.trials_failed > 0 : status.trials_failed == 0,
        absl::StrCat(status.trials_failed, " failed")));
    report.summary["failedTrials"][absl::StrCat(rate)] = status.trials_failed;
    report.summary["succeededTrials"][absl::StrCat(rate)] = status.trials_succeeded;
    report.summary["best"][absl::StrCat(rate)] =
        previous ? nlohmann::json(*previous) : nlohmann::json();
    AppendEvents(report, run, {{"scenario", "chaos-fail"}, {"fraction", rate}});
  }
  return report;
}

absl::StatusOr<ScenarioReport> ChaosKill(std::uint64_t seed) {
  const Scenario scenario = ChaosKillScenario(seed);
  TUNECTL_ASSIGN_OR_RETURN(ScenarioRun run, RunScenario(scenario));
  ScenarioReport report = NewReport("chaos-kill", seed);
  report.assertions = InvariantAssertions(scenario, run);
  const ExperimentSpec& spec = scenario.experiments.front();
  int failed = 0;
  int restarted = 0;
  for (const auto& t : Trials(run, spec)) {
    failed += t.trial.status.phase == TrialPhase::kFailed ? 1 : 0;
    restarted += t.trial.status.restart_count > 0 ? 1 : 0;
  }
  const auto status = Final(run, spec).status;
  report.assertions.push_back(Check("no trial ends Failed", failed == 0,
                                    absl::StrCat(failed, " failed")));
  report.assertions.push_back(Check("some trials restarted", restarted > 0,
                                    absl::StrCat(restarted, " restarted")));
  report.assertions.push_back(Check("experiment succeeds",
                                    status.phase == ExperimentPhase::kSucceeded,
                                    std::string(controller::ToString(status.phase))));
  report.summary["restartedTrials"] = restarted;
  report.summary["ticks"] = run.world->tick();
  AppendEvents(report, run, {{"scenario", "chaos-kill"}});
  return report;
}

absl::StatusOr<ScenarioReport> Portability(std::uint64_t seed) {
  ScenarioReport report = NewReport("portability", seed);
  Scenario base;
  base.world.cluster.nodes = {{3, 8.0}};
  base.max_ticks = 20000;

  std::vector<double> wide_best;
  std::vector<double> narrow_best;
  bool reparsed_equal = true;
  for (int k = 0; k < kPortabilitySeeds; ++k) {
    const std::uint64_t run_seed = DeriveSeed(seed, "portability", k);
    Scenario wide = base;
    wide.world.seed = run_seed;
    wide.experiments = {PortabilityWideExperiment(run_seed)};
    TUNECTL_ASSIGN_OR_RETURN(ScenarioRun first, RunScenario(wide));

    // Phase two travels as a file: emit, re-read, then run what was read.
    const ExperimentSpec narrow = PortabilityNarrowExperiment(run_seed);
    TUNECTL_ASSIGN_OR_RETURN(ExperimentSpec reread, ParseExperiment(CanonicalYaml(narrow)));
    reparsed_equal = reparsed_equal && reread == narrow;
    Scenario second_scenario = base;
    second_scenario.world.seed = run_seed;
    second_scenario.experiments = {reread};
    TUNECTL_ASSIGN_OR_RETURN(ScenarioRun second, RunScenario(second_scenario));

    wide_best.push_back(TrueBestOf(first, wide.experiments.front()));
    narrow_best.push_back(TrueBestOf(second, reread));
    AppendEvents(report, first, {{"scenario", "portability"}, {"phase", 1}, {"run", k}});
    AppendEvents(report, second, {{"scenario", "portability"}, {"phase", 2}, {"run", k}});
  }
  const double optimum = MnistSurrogateOptimum();
  const double wide_median = Median(wide_best);
  const double narrow_median = Median(narrow_best);
  const double narrow_top = *std::max_element(narrow_best.begin(), narrow_best.end());
  report.summary = {{"phase1MedianBest", wide_median},
                    {"phase2MedianBest", narrow_median},
                    {"phase2Best", narrow_top},
                    {"surrogateOptimum", optimum},
                    {"phase1Best", wide_best},
                    {"phase2BestPerSeed", narrow_best}};
  report.assertions.push_back(Check("canonical YAML round-trips the phase-2 experiment",
                                    reparsed_equal, ""));
  report.assertions.push_back(Check("phase-2 median best >= phase-1 median best",
                                    narrow_median >= wide_median,
                                    absl::StrCat(narrow_median, " vs ", wide_median)));
  report.assertions.push_back(Check("phase-2 best within 1% of the surrogate optimum",
                                    narrow_top >= 0.99 * optimum,
                                    absl::StrCat(narrow_top, " vs optimum ", optimum)));
  return report;
}

}  // namespace

bool ScenarioReport::passed() const {
  return std::all_of(assertions.begin(), assertions.end(),
                     [](const AssertionResult& a) { return a.passed; });
}

const std::vector<std::string>& CannedScenarioNames() {
  static const auto* names = new std::vector<std::string>{
      "multi-tenancy", "autoscale", "chaos-fail", "chaos-kill", "portability"};
  return *names;
}

Scenario MultiTenancyScenario(std::uint64_t seed) {
  Scenario scenario;
  scenario.name = "multi-tenancy";
  scenario.world.seed = seed;
  scenario.world.cluster.nodes = {{3, 8.0}};
  scenario.world.cluster.namespaces = {{"user1", 18.0}, {"user2", 6.0}};
  scenario.world.algorithm_service_cpu = 0.5;
  scenario.max_ticks = 1000;
  for (const std::string ns : {"user1", "user2"}) {
    scenario.experiments.push_back(MustParse(absl::Substitute(
        kMnistExperiment, absl::StrCat("mnist-", ns), ns, StateFor(seed, ns), 12, 12, 10)));
  }
  return scenario;
}

Scenario AutoscaleScenario(std::uint64_t seed) {
  Scenario scenario;
  scenario.name = "autoscale";
  scenario.world.seed = seed;
  scenario.world.cluster.nodes = {{3, 4.0}};
  scenario.world.autoscaler = AutoscalerConfig{3, 50, 4.0, 10};
  scenario.settle_ticks = 11;
  scenario.max_ticks = 5000;
  scenario.experiments.push_back(MustParse(absl::Substitute(
      kMnistExperiment, "mnist-autoscale", "default", StateFor(seed, "autoscale"), 250, 250, 20)));
  return scenario;
}

Scenario ChaosFailScenario(double fraction, std::uint64_t seed) {
  Scenario scenario;
  scenario.name = "chaos-fail";
  scenario.world.seed = seed;
  scenario.world.cluster.nodes = {{3, 8.0}};
  scenario.world.chaos = ChaosConfig{ChaosMode::kFailTrial, fraction, 20};
  scenario.max_ticks = 20000;
  scenario.experiments.push_back(MustParse(absl::Substitute(
      kSphereExperiment, "tpe", StateFor(seed, "chaos-fail"), 150, 100, 1, 1, "never", 5)));
  return scenario;
}

Scenario ChaosKillScenario(std::uint64_t seed) {
  Scenario scenario;
  scenario.name = "chaos-kill";
  scenario.world.seed = seed;
  scenario.world.cluster.nodes = {{3, 8.0}};
  scenario.world.cluster.gang_scheduling = true;
  scenario.world.chaos = ChaosConfig{ChaosMode::kKillWorker, 0.05, 20};
  scenario.max_ticks = 20000;
  scenario.experiments.push_back(
      MustParse(absl::Substitute(kSphereExperiment, "random", StateFor(seed, "chaos-kill"), 60, 0,
                                 2, 1, "on-temporary-failure", 30)));
  return scenario;
}

ExperimentSpec PortabilityWideExperiment(std::uint64_t seed) {
  return MustParse(absl::Substitute(kPortabilityExperiment, "mnist-wide", "random",
                                    StateFor(seed, "wide"), 15, "1.0", 1, 8, 100, 2000,
                                    "sgd, adam, ftrl"));
}

ExperimentSpec PortabilityNarrowExperiment(std::uint64_t seed) {
  return MustParse(absl::Substitute(kPortabilityExperiment, "mnist-narrow", "bayesianoptimization",
                                    StateFor(seed, "narrow"), 50, "0.3", 2, 5, 500, 1500,
                                    "sgd, adam"));
}

double MnistSurrogateOptimum() {
  double best = -std::numeric_limits<double>::infinity();
  for (std::string_view optimizer : {"sgd", "adam", "ftrl"}) {
    for (int i = 0; i <= 990; ++i) {
      const double lr = 0.01 + 0.001 * i;
      for (int layers = 1; layers <= 8; ++layers) {
        for (int batch = 100; batch <= 2000; batch += 10) {
          best = std::max(best, MnistSurrogateAccuracy(lr, layers, batch, optimizer));
        }
      }
    }
  }
  return best;
}

std::vector<AssertionResult> InvariantAssertions(const Scenario& scenario, const ScenarioRun& run) {
  std::vector<AssertionResult> out;
  const auto& violations = run.world->violations();
  out.push_back(Check("capacity, quota and gang invariants hold", violations.empty(),
                      violations.empty() ? "" : violations.front()));
  if (scenario.world.autoscaler) {
    const auto& a = *scenario.world.autoscaler;
    int low = std::numeric_limits<int>::max();
    int high = 0;
    for (const auto& stats : run.world->stats()) {
      low = std::min(low, stats.nodes);
      high = std::max(high, stats.nodes);
    }
    out.push_back(Check(absl::StrCat("node count stays within [", a.min_nodes, ", ", a.max_nodes,
                                     "]"),
                        low >= a.min_nodes && high <= a.max_nodes,
                        absl::StrCat("observed [", low, ", ", high, "]")));
  }
  out.push_back(Check("every experiment finishes", run.finished,
                      absl::StrCat("stopped at tick ", run.world->tick())));
  return out;
}

absl::StatusOr<ScenarioReport> RunCannedScenario(std::string_view name, std::uint64_t seed) {
  if (name == "multi-tenancy") return MultiTenancy(seed);
  if (name == "autoscale") return Autoscale(seed);
  if (name == "chaos-fail") return ChaosFail(seed);
  if (name == "chaos-kill") return ChaosKill(seed);
  if (name == "portability") return Portability(seed);
  return absl::NotFoundError(absl::StrCat("unknown scenario '", std::string(name), "'"));
}

absl::StatusOr<ScenarioReport> RunScenarioWithChecks(const Scenario& scenario) {
  TUNECTL_ASSIGN_OR_RETURN(ScenarioRun run, RunScenario(scenario));
  ScenarioReport report = NewReport(scenario.name, scenario.world.seed);
  report.assertions = InvariantAssertions(scenario, run);
  for (const auto& spec : scenario.experiments) {
    const auto status = Final(run, spec).status;
    report.summary["experiments"][KeyOf(spec)] = {
        {"phase", std::string(controller::ToString(status.phase))},
        {"succeeded", status.trials_succeeded},
        {"failed", status.trials_failed},
        {"best", status.current_optimal ? nlohmann::json(status.current_optimal->objective_value)
                                        : nlohmann::json()}};
  }
  report.summary["ticks"] = run.world->tick();
  AppendEvents(report, run, {{"scenario", scenario.name}});
  return report;
}

}  // namespace tunectl::sim
