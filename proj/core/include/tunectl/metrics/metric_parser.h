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

#ifndef TUNECTL_METRICS_METRIC_PARSER_H_
#define TUNECTL_METRICS_METRIC_PARSER_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tunectl/metrics/metric_point.h"

namespace tunectl::metrics {

// Wire format, one metric per line: `<ts> <name>=<value>`, where <ts> is an
// integer or an ISO-8601 instant (converted to epoch milliseconds).
struct ParsedLines {
  std::vector<MetricPoint> points;
  // Lines shaped like `<token> <name>=<value>` that failed to parse.
  int malformed = 0;
};

// Keeps only metrics in `watched`. Lines of any other shape are ignored.
ParsedLines ParseMetricLines(std::string_view text, std::string_view trial_name,
                             const std::vector<std::string>& watched);

std::optional<std::int64_t> ParseTimestamp(std::string_view text);

std::string FormatMetricLine(std::int64_t timestamp, std::string_view name, double value);

}  // namespace tunectl::metrics

#endif  // TUNECTL_METRICS_METRIC_PARSER_H_
