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

#include "tunectl/model/trial_template.h"

#include <functional>

#include "absl/strings/str_cat.h"

namespace tunectl {
namespace {

absl::Status ForEachSegment(
    std::string_view text,
    const std::function<void(std::string_view literal)>& on_literal,
    const std::function<absl::Status(std::string_view placeholder)>& on_placeholder) {
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t open = text.find("${", pos);
    if (open == std::string_view::npos) {
      on_literal(text.substr(pos));
      break;
    }
    on_literal(text.substr(pos, open - pos));
    const std::size_t close = text.find('}', open + 2);
    if (close == std::string_view::npos) {
      return absl::InvalidArgumentError(
          absl::StrCat("unterminated placeholder at offset ", open));
    }
    const std::string_view name = text.substr(open + 2, close - open - 2);
    if (name.empty()) {
      return absl::InvalidArgumentError(absl::StrCat("empty placeholder at offset ", open));
    }
    if (absl::Status status = on_placeholder(name); !status.ok()) return status;
    pos = close + 1;
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<std::vector<std::string>> ListPlaceholders(std::string_view text) {
  std::vector<std::string> names;
  absl::Status status = ForEachSegment(
      text, [](std::string_view) {},
      [&names](std::string_view name) {
        names.emplace_back(name);
        return absl::OkStatus();
      });
  if (!status.ok()) return status;
  return names;
}

absl::StatusOr<TrialRunSpec> RenderTrialSpec(const TrialTemplate& trial_template,
                                             const AssignmentSet& assignments,
                                             std::string_view trial_name,
                                             std::string_view namespace_name) {
  TrialRunSpec run;
  run.trial_name = std::string(trial_name);
  run.namespace_name = std::string(namespace_name);
  run.parameter_assignments = assignments;

  if (const auto* sim = std::get_if<SimObjectiveDescriptor>(&trial_template.payload)) {
    run.resolved_payload = *sim;
    return run;
  }

  const auto& command = std::get<CommandTemplate>(trial_template.payload).command;
  std::string out;
  absl::Status status = ForEachSegment(
      command, [&out](std::string_view literal) { out.append(literal); },
      [&](std::string_view name) -> absl::Status {
        if (name == kTrialNamePlaceholder) {
          out.append(std::string(trial_name));
        } else if (name == kTrialNamespacePlaceholder) {
          out.append(namespace_name);
        } else if (name == kHyperparametersPlaceholder) {
          bool first = true;
          for (const auto& assignment : assignments) {
            if (!first) out.push_back(' ');
            absl::StrAppend(&out, "--", assignment.name, "=", assignment.value);
            first = false;
          }
        } else if (const auto* assignment = FindAssignment(assignments, name)) {
          out.append(assignment->value);
        } else {
          return absl::InvalidArgumentError(
              absl::StrCat("missing assignment for placeholder ${", std::string(name), "}"));
        }
        return absl::OkStatus();
      });
  if (!status.ok()) return status;
  run.resolved_payload = std::move(out);
  return run;
}

}  // namespace tunectl
