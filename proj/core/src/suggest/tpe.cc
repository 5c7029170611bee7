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

#include "tunectl/suggest/tpe.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <variant>

#include "tunectl/common/numeric_format.h"
#include "tunectl/common/status_macros.h"
#include "tunectl/suggest/search_space.h"

namespace tunectl::suggest {
namespace {

constexpr double kMinBandwidth = 0.01;
constexpr double kPriorMean = 0.5;
constexpr double kPriorBandwidth = 1.0;
constexpr int kMaxAttempts = 10;

double NormalCdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double KernelMass(double mean, double bandwidth) {
  return NormalCdf((1.0 - mean) / bandwidth) - NormalCdf(-mean / bandwidth);
}

int CategoryIndex(const ValueList& list, const std::string& value) {
  auto it = std::find(list.values.begin(), list.values.end(), value);
  return it == list.values.end() ? 0 : static_cast<int>(it - list.values.begin());
}

double UnitValue(const ParameterSpec& parameter, const std::string& value) {
  return ToUnit(*parameter.range(), ParseDouble(value).value_or(parameter.range()->min));
}

using Density = std::variant<ParzenDensity, CategoryDensity>;

Density BuildDensity(const ParameterSpec& parameter,
                     const std::vector<const TrialObservation*>& observations) {
  if (const auto* list = parameter.list()) {
    std::vector<int> categories;
    for (const auto* observation : observations) {
      if (const auto* a = FindAssignment(observation->assignments, parameter.name)) {
        categories.push_back(CategoryIndex(*list, a->value));
      }
    }
    return CategoryDensity(categories, static_cast<int>(list->values.size()));
  }
  std::vector<double> values;
  for (const auto* observation : observations) {
    if (const auto* a = FindAssignment(observation->assignments, parameter.name)) {
      values.push_back(UnitValue(parameter, a->value));
    }
  }
  return ParzenDensity(std::move(values));
}

struct Candidate {
  AssignmentSet assignments;
  double score;
};

}  // namespace

ParzenDensity::ParzenDensity(std::vector<double> observations) {
  std::sort(observations.begin(), observations.end());
  const std::size_t n = observations.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double left = i == 0 ? 0.0 : observations[i - 1];
    const double right = i + 1 == n ? 1.0 : observations[i + 1];
    const double gap = std::max(observations[i] - left, right - observations[i]);
    means_.push_back(observations[i]);
    bandwidths_.push_back(std::clamp(gap, kMinBandwidth, 1.0));
  }
  means_.push_back(kPriorMean);
  bandwidths_.push_back(kPriorBandwidth);
  for (std::size_t j = 0; j < means_.size(); ++j) {
    masses_.push_back(KernelMass(means_[j], bandwidths_[j]));
  }
}

double ParzenDensity::LogDensity(double x) const {
  double total = 0.0;
  for (std::size_t j = 0; j < means_.size(); ++j) {
    const double z = (x - means_[j]) / bandwidths_[j];
    total += std::exp(-0.5 * z * z) / (bandwidths_[j] * masses_[j]);
  }
  total /= static_cast<double>(means_.size()) * std::sqrt(2.0 * std::numbers::pi);
  return std::log(std::max(total, 1e-300));
}

double ParzenDensity::Sample(Rng& rng) const {
  const std::size_t j = rng.Index(means_.size());
  for (int attempt = 0; attempt < 100; ++attempt) {
    const double x = means_[j] + bandwidths_[j] * rng.Normal();
    if (x >= 0.0 && x <= 1.0) return x;
  }
  return std::clamp(means_[j], 0.0, 1.0);
}

CategoryDensity::CategoryDensity(const std::vector<int>& observations, int categories)
    : weights_(static_cast<std::size_t>(categories), 1.0) {
  for (int c : observations) weights_[static_cast<std::size_t>(c)] += 1.0;
  const double total = static_cast<double>(observations.size() + categories);
  for (double& w : weights_) w /= total;
}

double CategoryDensity::LogDensity(int category) const {
  return std::log(weights_[static_cast<std::size_t>(category)]);
}

int CategoryDensity::Sample(Rng& rng) const {
  const double u = rng.Uniform01();
  double acc = 0.0;
  for (std::size_t c = 0; c < weights_.size(); ++c) {
    acc += weights_[c];
    if (u < acc) return static_cast<int>(c);
  }
  return static_cast<int>(weights_.size()) - 1;
}

absl::StatusOr<SuggestionBatch> TreeParzenEstimator::GetSuggestions(
    const SuggestionRequest& request) const {
  TUNECTL_RETURN_IF_ERROR(CheckRequest(request));
  TUNECTL_ASSIGN_OR_RETURN(nlohmann::json state, LoadState(*this, request));
  const ExperimentSpec& spec = *request.experiment;
  const std::uint64_t random_state = RandomState(spec);
  std::uint64_t issued = IssuedCount(state);
  std::vector<AssignmentSet> taken = TakenAssignments(request);

  std::vector<const TrialObservation*> ranked;
  for (const auto& observation : request.history) {
    if (observation.status == ObservationStatus::kSucceeded) ranked.push_back(&observation);
  }
  std::stable_sort(ranked.begin(), ranked.end(), [&spec](const auto* a, const auto* b) {
    return Minimized(spec, *a->objective_value) < Minimized(spec, *b->objective_value);
  });

  std::vector<Density> good;
  std::vector<Density> bad;
  const bool use_model = ranked.size() >= static_cast<std::size_t>(kTpeMinHistory);
  if (use_model) {
    const auto n_good = static_cast<std::ptrdiff_t>(
        std::ceil(kTpeGamma * static_cast<double>(ranked.size())));
    const std::vector<const TrialObservation*> good_set(ranked.begin(), ranked.begin() + n_good);
    const std::vector<const TrialObservation*> bad_set(ranked.begin() + n_good, ranked.end());
    for (const auto& parameter : spec.parameters) {
      good.push_back(BuildDensity(parameter, good_set));
      bad.push_back(BuildDensity(parameter, bad_set));
    }
  }

  SuggestionBatch batch;
  for (int i = 0; i < request.count; ++i, ++issued) {
    AssignmentSet choice;
    if (!use_model) {
      choice = SampleDistinct(spec, issued, taken);
    } else {
      for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        Rng rng(DeriveSeed(random_state, "tpe", issued, attempt));
        std::vector<Candidate> candidates;
        for (int c = 0; c < kTpeCandidates; ++c) {
          Candidate candidate{{}, 0.0};
          for (std::size_t p = 0; p < spec.parameters.size(); ++p) {
            const ParameterSpec& parameter = spec.parameters[p];
            std::string value;
            if (const auto* l = std::get_if<CategoryDensity>(&good[p])) {
              const int category = l->Sample(rng);
              value = parameter.list()->values[static_cast<std::size_t>(category)];
              candidate.score +=
                  l->LogDensity(category) - std::get<CategoryDensity>(bad[p]).LogDensity(category);
            } else {
              const auto& l_num = std::get<ParzenDensity>(good[p]);
              value = FromUnit(parameter, l_num.Sample(rng));
              const double x = UnitValue(parameter, value);
              candidate.score += l_num.LogDensity(x) - std::get<ParzenDensity>(bad[p]).LogDensity(x);
            }
            candidate.assignments.push_back({parameter.name, std::move(value)});
          }
          candidates.push_back(std::move(candidate));
        }
        std::stable_sort(candidates.begin(), candidates.end(),
                         [](const Candidate& a, const Candidate& b) { return a.score > b.score; });
        choice = candidates.front().assignments;
        auto fresh = std::find_if(candidates.begin(), candidates.end(), [&](const Candidate& c) {
          return !ContainsAssignment(taken, c.assignments);
        });
        if (fresh != candidates.end()) {
          choice = fresh->assignments;
          break;
        }
      }
    }
    taken.push_back(choice);
    batch.assignments.push_back(std::move(choice));
  }
  state["issued"] = issued;
  batch.state = state.dump();
  return batch;
}

}  // namespace tunectl::suggest
