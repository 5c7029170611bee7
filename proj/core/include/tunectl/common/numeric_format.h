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

#ifndef TUNECTL_COMMON_NUMERIC_FORMAT_H_
#define TUNECTL_COMMON_NUMERIC_FORMAT_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace tunectl {

// Shortest decimal string that parses back to exactly `value`.
std::string FormatDouble(double value);

// Rounds to 12 significant digits before formatting, so lattice points such
// as 0.1 + 2 * 0.1 print as "0.3".
std::string FormatLatticeValue(double value);

// Strict full-string parsers; leading/trailing whitespace is rejected.
std::optional<double> ParseDouble(std::string_view text);
std::optional<std::int64_t> ParseInt(std::string_view text);

}  // namespace tunectl

#endif  // TUNECTL_COMMON_NUMERIC_FORMAT_H_
