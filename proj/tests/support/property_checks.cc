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

#include "property_checks.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <utility>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "test_support.h"
#include "tunectl/common/numeric_format.h"
#include "tunectl/common/rng.h"
#include "tunectl/controller/control_loop.h"
#include "tunectl/controller/controllers.h"
#include "tunectl/controller/resource_store.h"
#include "tunectl/metrics/best_objective.h"
#include "tunectl/metrics/file_store.h"
#include "tunectl/metrics/memory_store.h"
#include "tunectl/metrics/metric_parser.h"
#include "tunectl/metrics/push_endpoint.h"
#include "tunectl/sim/world.h"
#include "tunectl/suggest/search_space.h"

namespace tunectl::testing {
namespace {

using suggest::SuggestionRequest;

std::string Describe(const AssignmentSet& assignments) {
  return absl::StrJoin(assignments, ",", [](std::string* out, const ParameterAssignment& a) {
    absl::StrAppend(out, a.name, "=", a.value);
  });
}

double Median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

// One value list per parameter, computed without the library's lattice code.
std::vector<std::vector<std::string>> OracleGridAxes(const ExperimentSpec& spec) {
  std::vector<std::vector<std::string>> axes;
  for (const auto& parameter : spec.parameters) {
    std::vector<std::string> axis;
    if (const auto* list = parameter.list()) {
      axis = list->values;
    } else {
      const Range& range = *parameter.range();
      const double step = range.step.value_or(1.0);
      for (int k = 0;; ++k) {
        const double value = range.min + k * step;
        if (value > range.max + 1e-9 * std::max(1.0, std::abs(range.max))) break;
        axis.push_back(FormatDouble(value));
      }
    }
    axes.push_back(std::move(axis));
  }
  return axes;
}

bool SameValue(const ParameterSpec& parameter, const std::string& a, const std::string& b) {
  if (parameter.list()) return a == b;
  auto x = ParseDouble(a);
  auto y = ParseDouble(b);
  return x && y && std::abs(*x - *y) <= 1e-9 * std::max(1.0, std::abs(*y));
}

}  // namespace

absl::StatusOr<DriveRecord> DriveAlgorithm(const ExperimentSpec& spec,
                                           const suggest::AlgorithmRegistry& registry,
                                           const DriveOptions& options) {
  DriveRecord record;
  std::vector<suggest::TrialObservation> history;
  std::string state;
  Rng batches(DeriveSeed(options.salt, "batches"));
  const auto max = static_cast<std::size_t>(options.max_suggestions);

  while (record.suggestions.size() < max && !record.exhausted) {
    const int want = static_cast<int>(
        std::min<std::int64_t>(batches.UniformInt(1, 3),
                               static_cast<std::int64_t>(max - record.suggestions.size())));
    std::vector<AssignmentSet> batch;
    auto call = [&](int count) -> absl::StatusOr<std::size_t> {
      SuggestionRequest request;
      request.experiment = &spec;
      request.history = history;
      request.pending = batch;
      request.count = count;
      request.state = state;
      auto result = suggest::GetSuggestions(registry, request);
      if (!result.ok()) return result.status();
      state = result->state;
      record.states.push_back(state);
      record.exhausted = result->exhausted;
      for (auto& assignments : result->assignments) batch.push_back(std::move(assignments));
      return result->assignments.size();
    };
    if (options.split_batches) {
      for (int j = 0; j < want && !record.exhausted; ++j) {
        auto produced = call(1);
        if (!produced.ok()) return produced.status();
        if (*produced == 0) break;
      }
    } else {
      auto produced = call(want);
      if (!produced.ok()) return produced.status();
    }
    if (batch.empty() && !record.exhausted) {
      return absl::InternalError("the algorithm produced nothing with no results outstanding");
    }
    for (const auto& assignments : batch) {
      history.push_back(SyntheticOutcome(assignments, options.salt));
      record.suggestions.push_back(assignments);
    }
  }
  return record;
}

CheckResult CheckSuggestionFeasibility(int cases, std::uint64_t seed) {
  const auto& registry = suggest::AlgorithmRegistry::Builtin();
  std::map<std::string, int> per_algorithm;
  long suggestions = 0;
  for (int i = 0; i < cases; ++i) {
    const ExperimentSpec spec = RandomValidSpec(DeriveSeed(seed, "feasibility", i));
    const bool hyperband = spec.algorithm.algorithm_name == "hyperband";
    auto record = DriveAlgorithm(spec, registry, {.salt = DeriveSeed(seed, i)});
    if (!record.ok()) {
      return {false, absl::StrCat("case ", i, " (", spec.algorithm.algorithm_name,
                                  "): ", record.status().ToString())};
    }
    const auto hb = suggest::HyperbandSettings::FromSpec(spec);
    for (const auto& assignments : record->suggestions) {
      bool ok = suggest::IsFeasible(spec.parameters, assignments,
                                    hyperband ? std::vector<std::string>{"budget"}
                                              : std::vector<std::string>{});
      if (ok && hyperband) {
        const auto* budget = FindAssignment(assignments, kBudgetParameter);
        auto value = budget ? ParseDouble(budget->value) : std::nullopt;
        ok = value && *value > 0 && *value <= static_cast<double>(hb.max_resource) + 1e-9 &&
             assignments.size() == spec.parameters.size() + 1;
      }
      if (!ok) {
        return {false, absl::StrCat("case ", i, " (", spec.algorithm.algorithm_name,
                                    ") infeasible suggestion ", Describe(assignments))};
      }
      ++suggestions;
    }
    ++per_algorithm[spec.algorithm.algorithm_name];
  }
  std::string mix = absl::StrJoin(per_algorithm, " ", absl::PairFormatter("="));
  return {true, absl::StrCat(cases, " specs, ", suggestions, " suggestions feasible [", mix, "]")};
}

CheckResult CheckSuggestionDeterminism(int cases, std::uint64_t seed) {
  const auto& registry = suggest::AlgorithmRegistry::Builtin();
  for (int i = 0; i < cases; ++i) {
    const ExperimentSpec spec = RandomValidSpec(DeriveSeed(seed, "determinism", i));
    const DriveOptions batched{.max_suggestions = 15, .split_batches = false,
                               .salt = DeriveSeed(seed, i)};
    DriveOptions split = batched;
    split.split_batches = true;
    auto first = DriveAlgorithm(spec, registry, batched);
    auto second = DriveAlgorithm(spec, registry, batched);
    auto single = DriveAlgorithm(spec, registry, split);
    if (!first.ok() || !second.ok() || !single.ok()) {
      return {false, absl::StrCat("case ", i, ": drive failed")};
    }
    if (first->suggestions != second->suggestions || first->states != second->states) {
      return {false, absl::StrCat("case ", i, " (", spec.algorithm.algorithm_name,
                                  "): repeated run differs")};
    }
    if (first->suggestions != single->suggestions) {
      return {false, absl::StrCat("case ", i, " (", spec.algorithm.algorithm_name,
                                  "): single-suggestion calls differ from batches")};
    }
  }
  return {true, absl::StrCat(cases, " specs reproduced byte for byte, batched and split")};
}

CheckResult CheckGridCompleteness(int cases, std::uint64_t seed) {
  const auto& registry = suggest::AlgorithmRegistry::Builtin();
  long points = 0;
  for (int i = 0; i < cases; ++i) {
    const ExperimentSpec spec =
        RandomValidSpec(DeriveSeed(seed, "grid", i), {.algorithm = "grid"});
    const auto axes = OracleGridAxes(spec);
    std::size_t total = 1;
    for (const auto& axis : axes) total *= axis.size();
    auto record = DriveAlgorithm(spec, registry,
                                 {.max_suggestions = static_cast<int>(total) + 10,
                                  .salt = DeriveSeed(seed, i)});
    if (!record.ok()) return {false, absl::StrCat("case ", i, ": ", record.status().ToString())};
    if (!record->exhausted || record->suggestions.size() != total) {
      return {false, absl::StrCat("case ", i, ": ", record->suggestions.size(), " of ", total,
                                  " points, exhausted=", record->exhausted)};
    }
    std::set<AssignmentSet> distinct(record->suggestions.begin(), record->suggestions.end());
    if (distinct.size() != total) return {false, absl::StrCat("case ", i, ": duplicate points")};
    // Mixed-radix counter with the first parameter as the most significant
    // digit.
    std::vector<std::size_t> digits(axes.size(), 0);
    for (std::size_t n = 0; n < total; ++n) {
      const AssignmentSet& got = record->suggestions[n];
      for (std::size_t p = 0; p < axes.size(); ++p) {
        if (got[p].name != spec.parameters[p].name ||
            !SameValue(spec.parameters[p], got[p].value, axes[p][digits[p]])) {
          return {false, absl::StrCat("case ", i, ": point ", n, " is ", Describe(got),
                                      ", expected ", spec.parameters[p].name, "=",
                                      axes[p][digits[p]])};
        }
      }
      for (std::size_t p = axes.size(); p-- > 0;) {
        if (++digits[p] < axes[p].size()) break;
        digits[p] = 0;
      }
    }
    points += static_cast<long>(total);
  }
  return {true, absl::StrCat(cases, " grids, ", points, " points, each exactly once in order")};
}

double SphereBestOfRun(std::string_view algorithm, std::uint64_t random_state, int dimensions,
                       int trials) {
  const ExperimentSpec spec = SphereExperiment(algorithm, random_state, dimensions, trials, 1);
  const auto& registry = suggest::AlgorithmRegistry::Builtin();
  SuggestionRequest request;
  request.experiment = &spec;
  double best = INFINITY;
  for (int t = 0; t < trials; ++t) {
    auto batch = suggest::GetSuggestions(registry, request);
    if (!batch.ok() || batch->assignments.empty()) return NAN;
    request.state = batch->state;
    const AssignmentSet& assignments = batch->assignments.front();
    double value = 0.0;
    for (const auto& assignment : assignments) value += std::pow(*ParseDouble(assignment.value), 2);
    best = std::min(best, value);
    request.history.push_back({assignments, value, suggest::ObservationStatus::kSucceeded, {}});
  }
  return best;
}

CheckResult CheckSphereDominance(int seeds, int trials) {
  std::map<std::string, std::vector<double>> bests;
  for (int s = 0; s < seeds; ++s) {
    for (const char* algorithm : {"random", "bayesianoptimization", "tpe"}) {
      bests[algorithm].push_back(SphereBestOfRun(algorithm, 1000 + s, 3, trials));
    }
  }
  const double random = Median(bests["random"]);
  const double bo = Median(bests["bayesianoptimization"]);
  const double tpe = Median(bests["tpe"]);
  const bool passed = !std::isnan(random) && bo <= random && tpe <= random;
  return {passed, absl::StrCat("median best over ", seeds, " seeds x ", trials,
                               " trials: random ", random, ", bo ", bo, ", tpe ", tpe)};
}

std::vector<std::vector<suggest::HyperbandRung>> OracleHyperbandTable(std::int64_t max_resource,
                                                                       std::int64_t eta) {
  int smax = 0;
  for (std::int64_t power = eta; power <= max_resource; power *= eta) ++smax;
  std::vector<std::vector<suggest::HyperbandRung>> table;
  for (int s = smax; s >= 0; --s) {
    const double eta_s = std::pow(static_cast<double>(eta), s);
    const auto n = static_cast<std::int64_t>(std::ceil((smax + 1.0) / (s + 1.0) * eta_s - 1e-9));
    const double r = static_cast<double>(max_resource) / eta_s;
    std::vector<suggest::HyperbandRung> bracket;
    for (int i = 0; i <= s; ++i) {
      const double eta_i = std::pow(static_cast<double>(eta), i);
      bracket.push_back({s, i, static_cast<std::int64_t>(std::floor(n / eta_i + 1e-9)),
                         r * eta_i});
    }
    table.push_back(std::move(bracket));
  }
  return table;
}

CheckResult CheckHyperbandTable(std::int64_t max_resource, std::int64_t eta) {
  const auto got = suggest::HyperbandSchedule(max_resource, eta);
  const auto want = OracleHyperbandTable(max_resource, eta);
  std::string rendered;
  bool same = got.size() == want.size();
  for (std::size_t b = 0; b < got.size(); ++b) {
    absl::StrAppend(&rendered, b ? "; " : "", "s=", got[b].front().bracket, ":");
    for (const auto& rung : got[b]) absl::StrAppend(&rendered, " ", rung.configs, "@", rung.resource);
    if (!same || got[b].size() != want[b].size()) {
      same = false;
      continue;
    }
    for (std::size_t i = 0; i < got[b].size(); ++i) {
      const auto& g = got[b][i];
      const auto& w = want[b][i];
      same = same && g.bracket == w.bracket && g.rung == w.rung && g.configs == w.configs &&
             std::abs(g.resource - w.resource) <= 1e-9 * w.resource;
    }
  }
  return {same, absl::StrCat("R=", max_resource, " eta=", eta, " -> ", rendered)};
}

CheckResult CheckStorageDifferential(int sequences, std::uint64_t seed,
                                     const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const std::string trials[] = {"t1", "t2", "t3"};
  const std::string metrics[] = {"accuracy", "loss", "Validation-accuracy"};
  long operations = 0;
  for (int q = 0; q < sequences; ++q) {
    Rng rng(DeriveSeed(seed, "storage", q));
    const auto path = dir / absl::StrCat("sequence-", q, ".jsonl");
    auto file = metrics::FileObservationStore::Open(path);
    if (!file.ok()) return {false, file.status().ToString()};
    metrics::MemoryObservationStore memory;
    auto fail = [&](std::string_view what) {
      return CheckResult{false, absl::StrCat("sequence ", q, ": ", std::string(what))};
    };
    auto random_point = [&](const std::string& trial) {
      metrics::MetricPoint point;
      point.trial_name = trial;
      point.metric_name = metrics[rng.Index(3)];
      point.timestamp = rng.UniformInt(0, 12);
      // A coarse value grid makes exact duplicates common.
      point.value = rng.UniformInt(0, 1) ? static_cast<double>(rng.UniformInt(0, 4)) / 4
                                         : rng.Uniform(-1e6, 1e6);
      return point;
    };
    auto random_filter = [&] {
      metrics::ObservationFilter filter;
      if (rng.UniformInt(0, 1)) filter.start_timestamp = rng.UniformInt(0, 12);
      if (rng.UniformInt(0, 1)) filter.end_timestamp = rng.UniformInt(0, 12);
      if (rng.UniformInt(0, 2) == 0) {
        filter.metric_names.emplace();
        for (const auto& metric : metrics) {
          if (rng.UniformInt(0, 1)) filter.metric_names->push_back(metric);
        }
      }
      return filter;
    };
    auto compare_gets = [&](metrics::ObservationStore& a, metrics::ObservationStore& b,
                            const std::string& trial,
                            const metrics::ObservationFilter& filter) -> bool {
      auto x = a.Get(trial, filter);
      auto y = b.Get(trial, filter);
      if (x.ok() != y.ok()) return false;
      if (!x.ok()) return x.status().code() == y.status().code();
      return *x == *y;
    };

    const auto steps = rng.UniformInt(1, 12);
    for (std::int64_t step = 0; step < steps; ++step, ++operations) {
      const std::string& trial = trials[rng.Index(3)];
      switch (rng.UniformInt(0, 9)) {
        case 0:
        case 1:
        case 2:
        case 3: {
          std::vector<metrics::MetricPoint> points;
          const auto count = rng.UniformInt(0, 4);
          for (std::int64_t k = 0; k < count; ++k) points.push_back(random_point(trial));
          // Occasionally malformed: a foreign trial or a non-finite value.
          if (!points.empty() && rng.UniformInt(0, 19) == 0) points.back().trial_name = "other";
          if (!points.empty() && rng.UniformInt(0, 19) == 0) points.front().value = NAN;
          const absl::Status a = memory.Register(points);
          const absl::Status b = (*file)->Register(points);
          if (a.code() != b.code()) {
            return fail(absl::StrCat("register: memory ", a.ToString(), " vs file ", b.ToString()));
          }
          break;
        }
        case 4: {
          const absl::Status a = memory.Delete(trial);
          const absl::Status b = (*file)->Delete(trial);
          if (a.code() != b.code()) return fail("delete status differs");
          break;
        }
        default:
          if (!compare_gets(memory, **file, trial, random_filter())) return fail("get differs");
          break;
      }
    }
    file->reset();
    auto reopened = metrics::FileObservationStore::Open(path);
    if (!reopened.ok()) return fail(reopened.status().ToString());
    for (const auto& trial : trials) {
      if (!compare_gets(memory, **reopened, trial, {})) return fail("reopened file store differs");
    }
    reopened->reset();
    std::filesystem::remove(path);
  }
  return {true, absl::StrCat(sequences, " sequences, ", operations,
                             " operations answered identically")};
}

CheckResult CheckPushPullEquivalence(int streams, std::uint64_t seed,
                                     const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const std::vector<std::string> watched = {"Validation-accuracy", "accuracy"};
  for (int s = 0; s < streams; ++s) {
    Rng rng(DeriveSeed(seed, "push-pull", s));
    const std::string trial = absl::StrCat("trial-", s);
    std::vector<metrics::MetricPoint> truth;
    std::string text;
    std::int64_t ts = rng.UniformInt(0, 5);
    const auto lines = rng.UniformInt(1, 40);
    for (std::int64_t k = 0; k < lines; ++k) {
      if (rng.UniformInt(0, 4) == 0) absl::StrAppend(&text, "INFO epoch ", k, " starting\n");
      if (rng.UniformInt(0, 6) == 0) absl::StrAppend(&text, ts, " loss=", rng.Uniform01(), "\n");
      const std::string& metric = watched[rng.Index(2)];
      // Full-precision values exercise the shortest round-trip formatting.
      const double value = rng.Uniform01() * std::pow(10.0, static_cast<double>(rng.UniformInt(-3, 3)));
      truth.push_back({trial, metric, ts, value});
      absl::StrAppend(&text, metrics::FormatMetricLine(ts, metric, value), "\n");
      ts += rng.UniformInt(0, 3);
    }

    metrics::MemoryObservationStore pulled;
    const auto parsed = metrics::ParseMetricLines(text, trial, watched);
    if (!parsed.points.empty()) {
      if (absl::Status st = pulled.Register(parsed.points); !st.ok()) {
        return {false, st.ToString()};
      }
    }

    metrics::MemoryObservationStore pushed;
    {
      auto endpoint = metrics::PushEndpoint::Start(dir / absl::StrCat("push-", s, ".sock"), trial,
                                                   watched, &pushed);
      if (!endpoint.ok()) return {false, endpoint.status().ToString()};
      if (absl::Status st = metrics::PushMetricLines((*endpoint)->path(), text); !st.ok()) {
        return {false, absl::StrCat("push: ", st.ToString())};
      }
    }

    auto a = pulled.Get(trial, {});
    auto b = pushed.Get(trial, {});
    if (!a.ok() || !b.ok()) return {false, "get failed"};
    metrics::MemoryObservationStore direct;
    if (absl::Status st = direct.Register(truth); !st.ok()) return {false, st.ToString()};
    auto c = direct.Get(trial, {});
    for (MetricStrategy strategy :
         {MetricStrategy::kLatest, MetricStrategy::kMax, MetricStrategy::kMin}) {
      ObjectiveSpec objective;
      objective.objective_metric_name = "Validation-accuracy";
      objective.metric_strategy = strategy;
      const auto x = metrics::BestObjective(*a, objective);
      const auto y = metrics::BestObjective(*b, objective);
      const auto z = metrics::BestObjective(*c, objective);
      // Compared with ==, so a single differing bit fails.
      if (x != y || x != z) {
        return {false, absl::StrCat("stream ", s, " strategy ", std::string(ToString(strategy)),
                                    ": pull ", x.value_or(NAN), " push ", y.value_or(NAN),
                                    " registered ", z.value_or(NAN))};
      }
    }
  }
  return {true, absl::StrCat(streams, " streams, best objective bit-identical for "
                             "latest, max and min")};
}

namespace {

struct Outcome {
  std::string phase;
  std::optional<controller::OptimalTrial> optimal;
  std::multiset<std::string> trial_phases;

  bool operator==(const Outcome&) const = default;
};

ExperimentSpec RecoveryExperiment(std::string name, std::string ns, std::string algorithm,
                                  std::uint64_t random_state, int max_trials, int parallel,
                                  int max_failed, RestartPolicy policy) {
  ExperimentSpec spec = SphereExperiment(algorithm, random_state, 2, max_trials, parallel);
  spec.name = std::move(name);
  spec.namespace_name = std::move(ns);
  spec.max_failed_trial_count = max_failed;
  spec.trial_template.worker_count = 2;
  spec.trial_template.restart_policy = policy;
  return spec;
}

struct RecoveryWorld {
  std::unique_ptr<controller::ResourceStore> store;
  metrics::MemoryObservationStore metrics;
  std::unique_ptr<sim::World> world;
};

absl::Status Prepare(RecoveryWorld& run, std::uint64_t seed) {
  sim::WorldConfig config;
  config.seed = seed;
  config.cluster.nodes = {{2, 6.0}};
  config.chaos = sim::ChaosConfig{sim::ChaosMode::kKillWorker, 0.25, 4};
  auto world = sim::World::Create(config, run.store.get(), &run.metrics,
                                  &suggest::AlgorithmRegistry::Builtin());
  if (!world.ok()) return world.status();
  run.world = std::move(*world);
  for (const auto& spec :
       {RecoveryExperiment("restartable", "team-a", "tpe", seed, 14, 3, 0,
                           RestartPolicy::kOnTemporaryFailure),
        RecoveryExperiment("fragile", "team-b", "random", seed + 1, 10, 2, 1,
                           RestartPolicy::kNever)}) {
    if (absl::Status st = controller::SubmitExperiment(*run.store, spec); !st.ok()) return st;
  }
  return absl::OkStatus();
}

std::map<std::string, Outcome> Outcomes(const controller::ResourceStore& store) {
  std::map<std::string, Outcome> out;
  for (const auto& key : store.Keys(controller::kExperimentPrefix)) {
    auto experiment = controller::GetAs<controller::ExperimentResource>(store, key);
    if (!experiment) continue;
    Outcome& outcome = out[key];
    outcome.phase = std::string(controller::ToString(experiment->first.status.phase));
    outcome.optimal = experiment->first.status.current_optimal;
    const auto& spec = experiment->first.spec;
    for (const auto& entry : controller::TrialsOf(store, spec.namespace_name, spec.name)) {
      outcome.trial_phases.insert(std::string(controller::ToString(entry.trial.status.phase)));
    }
  }
  return out;
}

constexpr std::int64_t kRecoveryTickLimit = 5000;

}  // namespace

CheckResult CheckRecoveryEquivalence(int kill_points, std::uint64_t seed,
                                     const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  // Reference run, counting every reconcile.
  RecoveryWorld reference;
  reference.store = controller::ResourceStore::InMemory();
  if (absl::Status st = Prepare(reference, seed); !st.ok()) return {false, st.ToString()};
  std::int64_t reconciles = 0;
  auto count = [&reconciles] {
    ++reconciles;
    return false;
  };
  if (auto st = reference.world->Reconcile(count); !st.ok()) return {false, st.status().ToString()};
  while (!reference.world->Finished() && reference.world->tick() < kRecoveryTickLimit) {
    if (auto st = reference.world->AdvancePhysics(); !st.ok()) return {false, st.ToString()};
    if (auto st = reference.world->Reconcile(count); !st.ok()) return {false, st.status().ToString()};
  }
  if (!reference.world->Finished()) return {false, "reference run did not finish"};
  const auto expected = Outcomes(*reference.store);

  Rng rng(DeriveSeed(seed, "kill-points"));
  for (int k = 0; k < kill_points; ++k) {
    const std::int64_t kill_at = rng.UniformInt(1, reconciles);
    const auto store_dir = dir / absl::StrCat("recovery-", k);
    RecoveryWorld run;
    auto opened = controller::ResourceStore::OpenDirectory(store_dir);
    if (!opened.ok()) return {false, opened.status().ToString()};
    run.store = std::move(*opened);
    if (absl::Status st = Prepare(run, seed); !st.ok()) return {false, st.ToString()};

    std::int64_t calls = 0;
    bool killed = false;
    auto stop = [&] { return !killed && ++calls >= kill_at; };
    bool first = true;
    while (first || (!run.world->Finished() && run.world->tick() < kRecoveryTickLimit)) {
      if (!first) {
        if (auto st = run.world->AdvancePhysics(); !st.ok()) return {false, st.ToString()};
      }
      first = false;
      auto done = run.world->Reconcile(stop);
      if (!done.ok()) return {false, done.status().ToString()};
      if (!*done) {
        // The controller process dies; only the directory survives it.
        killed = true;
        run.store.reset();
        auto reopened = controller::ResourceStore::OpenDirectory(store_dir);
        if (!reopened.ok()) return {false, reopened.status().ToString()};
        run.store = std::move(*reopened);
        run.world->AttachStore(run.store.get());
        auto resumed = run.world->Reconcile();
        if (!resumed.ok()) return {false, resumed.status().ToString()};
      }
    }
    if (!killed) return {false, absl::StrCat("kill point ", kill_at, " was never reached")};
    const auto actual = Outcomes(*run.store);
    if (actual != expected) {
      std::string detail = absl::StrCat("kill after reconcile ", kill_at, ":");
      for (const auto& [key, outcome] : actual) {
        const auto it = expected.find(key);
        absl::StrAppend(&detail, " ", key, " ", outcome.phase, " vs ",
                        it == expected.end() ? "missing" : it->second.phase);
      }
      return {false, detail};
    }
    std::filesystem::remove_all(store_dir);
  }
  std::string phases;
  for (const auto& [key, outcome] : expected) {
    absl::StrAppend(&phases, phases.empty() ? "" : ", ", key, "=", outcome.phase);
  }
  return {true, absl::StrCat(kill_points, " kill points over ", reconciles,
                             " reconciles all matched (", phases, ")")};
}

}  // namespace tunectl::testing
