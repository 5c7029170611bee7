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

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "property_checks.h"
#include "test_support.h"
#include "tunectl/common/numeric_format.h"
#include "tunectl/model/experiment_yaml.h"
#include "tunectl/suggest/algorithm.h"
#include "tunectl/suggest/bayesian_optimization.h"
#include "tunectl/suggest/gaussian_process.h"
#include "tunectl/suggest/grid_search.h"
#include "tunectl/suggest/hyperband.h"
#include "tunectl/suggest/search_space.h"
#include "tunectl/suggest/tpe.h"

namespace tunectl::suggest {
namespace {

using ::testing::ElementsAre;
using ::testing::HasSubstr;
using ::testing::IsEmpty;
using ::testing::SizeIs;
using ::tunectl::testing::CategoricalParameter;
using ::tunectl::testing::DoubleParameter;
using ::tunectl::testing::IntParameter;

const AlgorithmRegistry& Registry() { return AlgorithmRegistry::Builtin(); }

ExperimentSpec SpecWith(std::string algorithm, std::vector<ParameterSpec> parameters,
                        std::optional<std::uint64_t> random_state = std::nullopt) {
  ExperimentSpec spec = tunectl::testing::SphereExperiment(algorithm, 0, 0, 100, 1);
  spec.algorithm.settings.clear();
  if (random_state) spec.algorithm.settings["random_state"] = std::to_string(*random_state);
  spec.parameters = std::move(parameters);
  return spec;
}

SuggestionBatch Suggest(const ExperimentSpec& spec, int count,
                        std::vector<TrialObservation> history = {}, std::string state = "") {
  SuggestionRequest request;
  request.experiment = &spec;
  request.count = count;
  request.history = std::move(history);
  request.state = std::move(state);
  auto batch = GetSuggestions(Registry(), request);
  EXPECT_TRUE(batch.ok()) << batch.status();
  return batch.ok() ? *batch : SuggestionBatch{};
}

std::vector<ParameterSpec> MnistParameters() {
  return {DoubleParameter("lr", 0.0, 1.0), IntParameter("batch-size", 10, 1000),
          IntParameter("num-layers", 1, 5),
          CategoricalParameter("optimizer", {"SGD", "Adam", "FTRL"})};
}

TrialObservation Succeeded(AssignmentSet assignments, double value) {
  return {std::move(assignments), value, ObservationStatus::kSucceeded, std::nullopt};
}

TrialObservation Failed(AssignmentSet assignments) {
  return {std::move(assignments), std::nullopt, ObservationStatus::kFailed, std::nullopt};
}

// --- random -----------------------------------------------------------------

TEST(RandomSearchTest, TwoFeasibleSetsFromFreshState) {
  const ExperimentSpec spec = SpecWith("random", MnistParameters(), 10);
  const SuggestionBatch batch = Suggest(spec, 2);
  ASSERT_THAT(batch.assignments, SizeIs(2));
  for (const auto& assignments : batch.assignments) {
    ASSERT_THAT(assignments, SizeIs(4));
    EXPECT_TRUE(IsFeasible(spec.parameters, assignments));
  }
  EXPECT_NE(batch.assignments[0], batch.assignments[1]);
}

TEST(RandomSearchTest, OnlyFeasiblePoint) {
  const ExperimentSpec spec = SpecWith("random", {CategoricalParameter("optimizer", {"sgd"})});
  const SuggestionBatch batch = Suggest(spec, 1);
  EXPECT_THAT(batch.assignments, ElementsAre(AssignmentSet{{"optimizer", "sgd"}}));
}

TEST(RandomSearchTest, DegenerateListAlwaysSameValue) {
  const ExperimentSpec spec = SpecWith("random", {CategoricalParameter("x", {"x"})}, 3);
  for (const auto& assignments : Suggest(spec, 20).assignments) {
    EXPECT_EQ(assignments, (AssignmentSet{{"x", "x"}}));
  }
}

TEST(RandomSearchTest, IdenticalRequestsIdenticalOutput) {
  const ExperimentSpec spec = SpecWith("random", MnistParameters(), 10);
  const SuggestionBatch a = Suggest(spec, 5);
  const SuggestionBatch b = Suggest(spec, 5);
  EXPECT_EQ(a.assignments, b.assignments);
  EXPECT_EQ(a.state, b.state);
}

TEST(RandomSearchTest, FifteenSamplesInBounds) {
  const ExperimentSpec spec = SpecWith("random", MnistParameters(), 7);
  const SuggestionBatch batch = Suggest(spec, 15);
  ASSERT_THAT(batch.assignments, SizeIs(15));
  for (const auto& assignments : batch.assignments) {
    const double lr = *ParseDouble(assignments[0].value);
    const auto batch_size = *ParseInt(assignments[1].value);
    const auto layers = *ParseInt(assignments[2].value);
    EXPECT_GE(lr, 0.0);
    EXPECT_LE(lr, 1.0);
    EXPECT_GE(batch_size, 10);
    EXPECT_LE(batch_size, 1000);
    EXPECT_GE(layers, 1);
    EXPECT_LE(layers, 5);
    EXPECT_THAT((std::vector<std::string>{"SGD", "Adam", "FTRL"}),
                ::testing::Contains(assignments[3].value));
  }
}

// Produced once by a reference run and pinned; any change to sampling or
// seeding shows up here.
TEST(RandomSearchTest, SeedFortyTwoMatchesFixture) {
  const ExperimentSpec spec = SpecWith("random", MnistParameters(), 42);
  const SuggestionBatch batch = Suggest(spec, 3);
  std::vector<std::string> rendered;
  for (const auto& assignments : batch.assignments) {
    std::string line;
    for (const auto& a : assignments) line += a.name + "=" + a.value + " ";
    rendered.push_back(line);
  }
  EXPECT_THAT(rendered,
              ElementsAre("lr=0.3373698665978072 batch-size=34 num-layers=5 optimizer=Adam ",
                          "lr=0.7241751697062702 batch-size=942 num-layers=1 optimizer=FTRL ",
                          "lr=0.7054784401262055 batch-size=196 num-layers=4 optimizer=SGD "));
}

TEST(RandomSearchTest, ForeignStateRejected) {
  const ExperimentSpec grid = SpecWith("grid", {IntParameter("x", 0, 3)});
  const SuggestionBatch grid_batch = Suggest(grid, 1);
  const ExperimentSpec random = SpecWith("random", {IntParameter("x", 0, 3)});
  SuggestionRequest request;
  request.experiment = &random;
  request.state = grid_batch.state;
  auto batch = GetSuggestions(Registry(), request);
  EXPECT_EQ(batch.status().code(), absl::StatusCode::kFailedPrecondition);
}

TEST(RandomSearchTest, UnknownAlgorithmIsNotFound) {
  ExperimentSpec spec = SpecWith("annealing", {IntParameter("x", 0, 3)});
  SuggestionRequest request;
  request.experiment = &spec;
  EXPECT_EQ(GetSuggestions(Registry(), request).status().code(), absl::StatusCode::kNotFound);
}

// --- grid ---------------------------------------------------------------------

TEST(GridSearchTest, LexicographicOrder) {
  ParameterSpec lr{"lr", ParameterType::kDiscrete, ValueList{{"0.1", "0.2"}}};
  const ExperimentSpec spec =
      SpecWith("grid", {lr, CategoricalParameter("optimizer", {"sgd", "adam"})});
  const SuggestionBatch batch = Suggest(spec, 4);
  EXPECT_THAT(batch.assignments,
              ElementsAre(AssignmentSet{{"lr", "0.1"}, {"optimizer", "sgd"}},
                          AssignmentSet{{"lr", "0.1"}, {"optimizer", "adam"}},
                          AssignmentSet{{"lr", "0.2"}, {"optimizer", "sgd"}},
                          AssignmentSet{{"lr", "0.2"}, {"optimizer", "adam"}}));
  EXPECT_EQ(GridSize(spec), 4u);
}

TEST(GridSearchTest, CursorResumesAndSignalsExhaustion) {
  ParameterSpec lr{"lr", ParameterType::kDiscrete, ValueList{{"0.1", "0.2"}}};
  const ExperimentSpec spec =
      SpecWith("grid", {lr, CategoricalParameter("optimizer", {"sgd", "adam"})});
  const SuggestionBatch first = Suggest(spec, 3);
  EXPECT_THAT(first.assignments, SizeIs(3));
  EXPECT_FALSE(first.exhausted);
  const SuggestionBatch second = Suggest(spec, 3, {}, first.state);
  EXPECT_THAT(second.assignments,
              ElementsAre(AssignmentSet{{"lr", "0.2"}, {"optimizer", "adam"}}));
  EXPECT_TRUE(second.exhausted);
}

TEST(GridSearchTest, DoubleStepLattice) {
  ParameterSpec x{"x", ParameterType::kDouble, Range{0.0, 1.0, 0.5}};
  EXPECT_THAT(GridValues(x), ElementsAre("0", "0.5", "1"));
  const SuggestionBatch batch = Suggest(SpecWith("grid", {x}), 5);
  EXPECT_THAT(batch.assignments, SizeIs(3));
  EXPECT_TRUE(batch.exhausted);
}

TEST(GridSearchTest, TenthStepsAreExactDecimals) {
  ParameterSpec x{"x", ParameterType::kDouble, Range{0.1, 0.5, 0.1}};
  EXPECT_THAT(GridValues(x), ElementsAre("0.1", "0.2", "0.3", "0.4", "0.5"));
}

// --- bayesian optimization --------------------------------------------------

TEST(BayesianOptimizationTest, EmptyHistoryBehavesAsRandom) {
  const ExperimentSpec bo = SpecWith("bayesianoptimization", MnistParameters(), 10);
  const ExperimentSpec random = SpecWith("random", MnistParameters(), 10);
  EXPECT_EQ(Suggest(bo, 4).assignments, Suggest(random, 4).assignments);
}

TEST(BayesianOptimizationTest, FallsBackBelowMinimumHistory) {
  const auto parameters = std::vector<ParameterSpec>{DoubleParameter("x", 0, 1),
                                                     DoubleParameter("y", 0, 1)};
  const ExperimentSpec bo = SpecWith("bayesianoptimization", parameters, 4);
  const ExperimentSpec random = SpecWith("random", parameters, 4);
  std::vector<TrialObservation> history;
  // dim + 1 successes plus failures: still random.
  for (int i = 0; i < 3; ++i) {
    history.push_back(Succeeded({{"x", FormatDouble(0.1 * i)}, {"y", "0.5"}}, i));
    history.push_back(Failed({{"x", FormatDouble(0.1 * i + 0.05)}, {"y", "0.2"}}));
  }
  EXPECT_EQ(Suggest(bo, 2, history).assignments, Suggest(random, 2, history).assignments);
  EXPECT_FALSE(BoSurrogate::Fit(bo, history, {}).has_value());
}

TEST(BayesianOptimizationTest, OneDimensionalQuadraticFollowsAcquisition) {
  const ExperimentSpec spec = [] {
    ExperimentSpec s = SpecWith("bayesianoptimization", {DoubleParameter("x", 0, 1)}, 5);
    s.objective.type = ObjectiveType::kMinimize;
    return s;
  }();
  std::vector<TrialObservation> history;
  double best_observed = INFINITY;
  for (int i = 0; i < 10; ++i) {
    const double x = 0.05 + 0.1 * i;
    history.push_back(Succeeded({{"x", FormatDouble(x)}}, (x - 0.3) * (x - 0.3)));
    best_observed = std::min(best_observed, (x - 0.3) * (x - 0.3));
  }
  auto surrogate = BoSurrogate::Fit(spec, history, {});
  ASSERT_TRUE(surrogate.has_value());

  // Dense-grid oracle over the acquisition and the surrogate mean.
  double best_ei = 0.0;
  for (int k = 0; k <= 10000; ++k) {
    best_ei = std::max(best_ei, surrogate->ExpectedImprovementAt({{"x", FormatDouble(k / 1e4)}}));
  }
  const SuggestionBatch batch = Suggest(spec, 1, history);
  ASSERT_THAT(batch.assignments, SizeIs(1));
  const AssignmentSet& chosen = batch.assignments[0];
  EXPECT_GE(surrogate->ExpectedImprovementAt(chosen), 0.9 * best_ei);
  EXPECT_LE(surrogate->PredictAt(chosen).mean, best_observed);
  EXPECT_NEAR(*ParseDouble(chosen[0].value), 0.3, 0.1);
}

TEST(BayesianOptimizationTest, ToleratesFailedHistory) {
  const ExperimentSpec spec = SpecWith("bayesianoptimization", MnistParameters(), 1);
  std::vector<TrialObservation> history;
  Rng rng(1);
  for (int i = 0; i < 12; ++i) {
    auto assignments = SampleAssignment(spec.parameters, rng);
    history.push_back(i % 2 ? Failed(assignments) : Succeeded(assignments, rng.Uniform01()));
  }
  const SuggestionBatch batch = Suggest(spec, 3, history);
  EXPECT_THAT(batch.assignments, SizeIs(3));
}

// --- gaussian process ---------------------------------------------------------

TEST(GaussianProcessTest, ExpectedImprovementClosedForm) {
  EXPECT_NEAR(ExpectedImprovement(0.0, 1.0, 0.0), 1.0 / std::sqrt(2 * std::numbers::pi), 1e-12);
  EXPECT_DOUBLE_EQ(ExpectedImprovement(1.0, 0.0, 3.0), 2.0);
  EXPECT_DOUBLE_EQ(ExpectedImprovement(3.0, 0.0, 1.0), 0.0);
  // Improvement z = 1: 1 * Phi(1) + phi(1).
  EXPECT_NEAR(ExpectedImprovement(0.0, 1.0, 1.0), 0.8413447460685429 + 0.24197072451914337,
              1e-12);
}

TEST(GaussianProcessTest, InterpolatesTrainingPoints) {
  const std::vector<std::vector<double>> x = {{0.0}, {0.25}, {0.5}, {0.75}, {1.0}};
  const std::vector<double> y = {1.0, 0.2, -0.3, 0.4, 2.0};
  auto gp = GaussianProcess::FitMaxLikelihood(x, y, 1e-6);
  ASSERT_TRUE(gp.ok()) << gp.status();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto prediction = gp->Predict(x[i]);
    EXPECT_NEAR(prediction.mean, y[i], 1e-3);
    EXPECT_LT(prediction.stddev, 0.05);
  }
  EXPECT_GT(gp->Predict({0.125}).stddev, gp->Predict({0.25}).stddev);
  const auto grid = LengthScaleGrid();
  EXPECT_THAT(grid, SizeIs(11));
  EXPECT_NE(std::find(grid.begin(), grid.end(), gp->length_scale()), grid.end());
}

TEST(GaussianProcessTest, RejectsDuplicatePointsWithoutNoise) {
  auto gp = GaussianProcess::Fit({{0.5}, {0.5}}, {1.0, 2.0}, 1.0, 0.0);
  EXPECT_FALSE(gp.ok());
}

// --- tpe ---------------------------------------------------------------------

TEST(TpeTest, EmptyHistoryBehavesAsRandom) {
  const ExperimentSpec tpe = SpecWith("tpe", MnistParameters(), 10);
  const ExperimentSpec random = SpecWith("random", MnistParameters(), 10);
  EXPECT_EQ(Suggest(tpe, 4).assignments, Suggest(random, 4).assignments);
}

TEST(TpeTest, FavorsCategoryOfGoodQuantile) {
  const auto parameters = std::vector<ParameterSpec>{
      DoubleParameter("x", 0, 1), CategoricalParameter("optimizer", {"sgd", "adam", "ftrl"})};
  std::vector<TrialObservation> history;
  const char* optimizers[] = {"sgd", "adam", "ftrl"};
  Rng rng(3);
  // 40 results: the best 10 all use sgd, the rest are spread evenly.
  for (int i = 0; i < 40; ++i) {
    const std::string optimizer = i < 10 ? "sgd" : optimizers[i % 3];
    const double score = i < 10 ? 0.9 + 0.01 * i : 0.1 + 0.01 * i;
    history.push_back(
        Succeeded({{"x", FormatDouble(rng.Uniform01())}, {"optimizer", optimizer}}, score));
  }
  std::map<std::string, int> counts;
  constexpr int kDraws = 1000;
  for (int d = 0; d < kDraws; ++d) {
    ExperimentSpec spec = SpecWith("tpe", parameters, 100 + d);
    spec.objective.type = ObjectiveType::kMaximize;
    const SuggestionBatch batch = Suggest(spec, 1, history);
    ASSERT_THAT(batch.assignments, SizeIs(1));
    ++counts[batch.assignments[0][1].value];
  }
  double chi_square = 0.0;
  for (const char* optimizer : optimizers) {
    const double expected = kDraws / 3.0;
    chi_square += std::pow(counts[optimizer] - expected, 2) / expected;
  }
  EXPECT_GT(counts["sgd"], kDraws / 3);
  // 99.9th percentile of chi-square with two degrees of freedom.
  EXPECT_GT(chi_square, 13.816) << "sgd " << counts["sgd"] << " adam " << counts["adam"]
                                << " ftrl " << counts["ftrl"];
}

TEST(TpeTest, ParzenDensityIsNormalizedOnUnitInterval) {
  ParzenDensity density({0.2, 0.25, 0.8});
  double mass = 0.0;
  constexpr int kSteps = 20000;
  for (int k = 0; k < kSteps; ++k) mass += std::exp(density.LogDensity((k + 0.5) / kSteps)) / kSteps;
  EXPECT_NEAR(mass, 1.0, 1e-3);
  Rng rng(9);
  for (int k = 0; k < 1000; ++k) {
    const double x = density.Sample(rng);
    ASSERT_GE(x, 0.0);
    ASSERT_LE(x, 1.0);
  }
}

TEST(TpeTest, CategoryDensitySmoothsCounts) {
  CategoryDensity density({0, 0, 0, 2}, 3);
  double total = 0.0;
  for (double w : density.weights()) total += w;
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_GT(density.LogDensity(0), density.LogDensity(2));
  EXPECT_GT(density.LogDensity(2), density.LogDensity(1));
  EXPECT_GT(density.weights()[1], 0.0);
}

// --- failure tolerance --------------------------------------------------------

TEST(HistorySafetyTest, FailedObservationsNeverError) {
  for (const char* algorithm : {"random", "grid", "bayesianoptimization", "tpe"}) {
    const ExperimentSpec spec = SpecWith(algorithm, {IntParameter("a", 0, 9), IntParameter("b", 0, 9)}, 2);
    std::vector<TrialObservation> history;
    for (int i = 0; i < 30; ++i) {
      history.push_back(Failed({{"a", std::to_string(i % 10)}, {"b", std::to_string(i / 10)}}));
      SuggestionRequest request;
      request.experiment = &spec;
      request.history = history;
      auto batch = GetSuggestions(Registry(), request);
      ASSERT_TRUE(batch.ok()) << algorithm << ": " << batch.status();
    }
  }
}

TEST(HistorySafetyTest, ObjectiveMustMatchStatus) {
  const ExperimentSpec spec = SpecWith("random", {IntParameter("a", 0, 9)});
  SuggestionRequest request;
  request.experiment = &spec;
  request.history.push_back({{{"a", "1"}}, std::nullopt, ObservationStatus::kSucceeded, {}});
  EXPECT_EQ(GetSuggestions(Registry(), request).status().code(),
            absl::StatusCode::kInvalidArgument);
  request.count = 0;
  request.history.clear();
  EXPECT_EQ(GetSuggestions(Registry(), request).status().code(),
            absl::StatusCode::kInvalidArgument);
}

// --- hyperband ---------------------------------------------------------------

TEST(HyperbandTest, TableForEightyOneAndThree) {
  const auto table = HyperbandSchedule(81, 3);
  std::vector<std::string> rows;
  for (const auto& bracket : table) {
    std::string row = "s=" + std::to_string(bracket.front().bracket) + ":";
    for (const auto& rung : bracket) row += " " + std::to_string(rung.configs) + "@" + FormatDouble(rung.resource);
    rows.push_back(row);
  }
  EXPECT_THAT(rows, ElementsAre("s=4: 81@1 27@3 9@9 3@27 1@81", "s=3: 34@3 11@9 3@27 1@81",
                                "s=2: 15@9 5@27 1@81", "s=1: 8@27 2@81", "s=0: 5@81"));
  EXPECT_TRUE(tunectl::testing::CheckHyperbandTable(81, 3).passed);
}

TEST(HyperbandTest, MatchesOracleAcrossSettings) {
  for (std::int64_t eta = 2; eta <= 5; ++eta) {
    for (std::int64_t r = 1; r <= 300; r += (r < 30 ? 1 : 17)) {
      const auto check = tunectl::testing::CheckHyperbandTable(r, eta);
      EXPECT_TRUE(check.passed) << check.detail;
    }
  }
}

TEST(HyperbandTest, SingleResourceIsOneRung) {
  const auto table = HyperbandSchedule(1, 3);
  ASSERT_THAT(table, SizeIs(1));
  EXPECT_THAT(table[0], ElementsAre(HyperbandRung{0, 0, 1, 1.0}));
}

TEST(HyperbandTest, PromotesTopThirdOfNine) {
  const std::vector<std::optional<double>> scores = {0.5, 0.1, 0.9, std::nullopt, 0.3,
                                                      0.8, 0.05, 0.7, 0.6};
  EXPECT_THAT(PromoteTop(scores, 9 / 3), ElementsAre(6, 1, 4));
}

TEST(HyperbandTest, FailuresRankLast) {
  const std::vector<std::optional<double>> scores = {std::nullopt, 2.0, std::nullopt};
  EXPECT_THAT(PromoteTop(scores, 2), ElementsAre(1, 0));
}

TEST(HyperbandTest, RequiresResourceConsumed) {
  ExperimentSpec spec = SpecWith("hyperband", {DoubleParameter("x", 0, 1)});
  SuggestionRequest request;
  request.experiment = &spec;
  request.history.push_back(Succeeded({{"x", "0.5"}, {"budget", "1"}}, 0.3));
  auto batch = GetSuggestions(Registry(), request);
  EXPECT_EQ(batch.status().code(), absl::StatusCode::kInvalidArgument);
  EXPECT_THAT(batch.status().message(), HasSubstr("resourceConsumed"));
}

TEST(HyperbandTest, RunsEveryRungAndPromotesTheBest) {
  ExperimentSpec spec = SpecWith("hyperband", {DoubleParameter("x", 0, 1)}, 8);
  spec.objective.type = ObjectiveType::kMinimize;
  spec.algorithm.settings["max_resource"] = "9";
  spec.algorithm.settings["eta"] = "3";
  const auto schedule = HyperbandSchedule(9, 3);

  std::vector<TrialObservation> history;
  std::string state;
  std::vector<AssignmentSet> issued;
  bool exhausted = false;
  while (!exhausted) {
    const SuggestionBatch batch = Suggest(spec, 4, history, state);
    state = batch.state;
    exhausted = batch.exhausted;
    ASSERT_TRUE(!batch.assignments.empty() || exhausted);
    for (const auto& assignments : batch.assignments) {
      issued.push_back(assignments);
      const double x = *ParseDouble(assignments[0].value);
      const double budget = *ParseDouble(assignments[1].value);
      TrialObservation observation = Succeeded(assignments, x / budget);
      observation.resource_consumed = budget;
      history.push_back(observation);
    }
  }

  // Walk the issued sequence rung by rung and re-derive every promotion.
  std::size_t cursor = 0;
  for (const auto& bracket : schedule) {
    std::vector<AssignmentSet> previous;
    std::vector<double> previous_scores;
    for (const auto& rung : bracket) {
      ASSERT_LE(cursor + rung.configs, issued.size());
      std::vector<AssignmentSet> configs;
      std::vector<double> scores;
      for (std::int64_t c = 0; c < rung.configs; ++c) {
        const AssignmentSet& assignments = issued[cursor++];
        ASSERT_EQ(*ParseDouble(assignments[1].value), rung.resource);
        configs.push_back({assignments[0]});
        scores.push_back(*ParseDouble(assignments[0].value) / rung.resource);
      }
      if (rung.rung > 0) {
        std::vector<std::size_t> order(previous.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
          return previous_scores[a] < previous_scores[b];
        });
        std::set<AssignmentSet> expected;
        for (std::int64_t k = 0; k < rung.configs; ++k) expected.insert(previous[order[k]]);
        EXPECT_EQ(std::set<AssignmentSet>(configs.begin(), configs.end()), expected)
            << "bracket " << rung.bracket << " rung " << rung.rung;
      }
      previous = configs;
      previous_scores = scores;
    }
  }
  EXPECT_EQ(cursor, issued.size());
  EXPECT_EQ(HyperbandResourceFraction(spec, issued.front()), 1.0 / 9.0);
}

// --- plugin interface ---------------------------------------------------------

class ConstantAlgorithm : public SuggestionAlgorithm {
 public:
  std::string_view name() const override { return "constant"; }
  absl::StatusOr<SuggestionBatch> GetSuggestions(const SuggestionRequest& request) const override {
    SuggestionBatch batch;
    for (int i = 0; i < request.count; ++i) {
      AssignmentSet assignments;
      for (const auto& parameter : request.experiment->parameters) {
        assignments.push_back({parameter.name, GridValues(parameter).front()});
      }
      batch.assignments.push_back(std::move(assignments));
    }
    return batch;
  }
};

TEST(AlgorithmRegistryTest, CustomAlgorithmPlugsIn) {
  auto registry = AlgorithmRegistry::WithBuiltins();
  registry->Register(AlgorithmRules{{"level"}, {}}, std::make_unique<ConstantAlgorithm>());
  ExperimentSpec spec = SpecWith("constant", {IntParameter("x", 3, 9)});
  spec.algorithm.settings["level"] = "1";
  EXPECT_THAT(ValidateExperiment(spec, registry->validation_context()), IsEmpty());
  EXPECT_THAT(ValidateExperiment(spec, BuiltinValidationContext()), SizeIs(1));
  SuggestionRequest request;
  request.experiment = &spec;
  request.count = 2;
  auto batch = GetSuggestions(*registry, request);
  ASSERT_TRUE(batch.ok());
  EXPECT_THAT(batch->assignments, ElementsAre(AssignmentSet{{"x", "3"}}, AssignmentSet{{"x", "3"}}));
}

// --- search space helpers -----------------------------------------------------

TEST(SearchSpaceTest, UnitEncoderRoundTrip) {
  const std::vector<ParameterSpec> parameters = {
      DoubleParameter("lr", 0.01, 0.03), IntParameter("layers", 2, 5),
      CategoricalParameter("optimizer", {"sgd", "adam", "ftrl"})};
  UnitEncoder encoder(parameters);
  EXPECT_EQ(encoder.dimension(), 5);
  const AssignmentSet assignments = {{"lr", "0.02"}, {"layers", "4"}, {"optimizer", "adam"}};
  const auto point = encoder.Encode(assignments);
  EXPECT_THAT(point, ElementsAre(::testing::DoubleNear(0.5, 1e-12),
                                 ::testing::DoubleNear(2.0 / 3.0, 1e-12), 0.0, 1.0, 0.0));
  EXPECT_EQ(encoder.Decode(point), assignments);
}

TEST(SearchSpaceTest, IntStepLattice) {
  ParameterSpec p{"n", ParameterType::kInt, Range{1, 10, 3}};
  EXPECT_THAT(GridValues(p), ElementsAre("1", "4", "7", "10"));
  EXPECT_TRUE(IsFeasible(p, "7"));
  EXPECT_FALSE(IsFeasible(p, "8"));
  EXPECT_FALSE(IsFeasible(p, "13"));
}

}  // namespace
}  // namespace tunectl::suggest
