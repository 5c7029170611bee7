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

#include "tunectl/metrics/metric_parser.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/ascii.h"
#include "absl/strings/str_cat.h"
#include "absl/time/time.h"
#include "tunectl/common/numeric_format.h"

namespace tunectl::metrics {
namespace {

bool IsSpace(char c) { return c == ' ' || c == '\t' || c == '\r'; }

std::string_view Trim(std::string_view text) {
  while (!text.empty() && IsSpace(text.front())) text.remove_prefix(1);
  while (!text.empty() && IsSpace(text.back())) text.remove_suffix(1);
  return text;
}

}  // namespace

std::optional<std::int64_t> ParseTimestamp(std::string_view text) {
  if (auto tick = ParseInt(text)) return *tick;
  absl::Time time;
  std::string error;
  const absl::string_view input(text.data(), text.size());
  if (absl::ParseTime(absl::RFC3339_full, input, &time, &error)) return absl::ToUnixMillis(time);
  return std::nullopt;
}

ParsedLines ParseMetricLines(std::string_view text, std::string_view trial_name,
                             const std::vector<std::string>& watched) {
  ParsedLines out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = Trim(text.substr(pos, end - pos));
    pos = end + 1;

    const std::size_t gap = line.find_first_of(" \t");
    if (gap == std::string_view::npos) continue;
    const std::string_view stamp = line.substr(0, gap);
    const std::string_view rest = Trim(line.substr(gap));
    if (rest.find_first_of(" \t") != std::string_view::npos) continue;
    const std::size_t eq = rest.find('=');
    if (eq == std::string_view::npos) continue;

    const std::string_view name = rest.substr(0, eq);
    const auto timestamp = ParseTimestamp(stamp);
    const auto value = ParseDouble(rest.substr(eq + 1));
    if (name.empty() || !timestamp || !value || !std::isfinite(*value)) {
      ++out.malformed;
      continue;
    }
    if (std::find(watched.begin(), watched.end(), name) == watched.end()) continue;
    out.points.push_back({std::string(trial_name), std::string(name), *timestamp, *value});
  }
  return out;
}

std::string FormatMetricLine(std::int64_t timestamp, std::string_view name, double value) {
  return absl::StrCat(timestamp, " ", std::string(name), "=", FormatDouble(value));
}

}  // namespace tunectl::metrics
