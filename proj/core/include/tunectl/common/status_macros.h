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

#ifndef TUNECTL_COMMON_STATUS_MACROS_H_
#define TUNECTL_COMMON_STATUS_MACROS_H_

#include <utility>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

#define TUNECTL_STATUS_CONCAT_INNER(a, b) a##b
#define TUNECTL_STATUS_CONCAT(a, b) TUNECTL_STATUS_CONCAT_INNER(a, b)

#define TUNECTL_RETURN_IF_ERROR(expr)                 \
  do {                                                \
    ::absl::Status tunectl_status_ = (expr);          \
    if (!tunectl_status_.ok()) return tunectl_status_; \
  } while (false)

#define TUNECTL_ASSIGN_OR_RETURN_IMPL(tmp, lhs, rexpr) \
  auto tmp = (rexpr);                                  \
  if (!tmp.ok()) return tmp.status();                  \
  lhs = std::move(tmp).value()

#define TUNECTL_ASSIGN_OR_RETURN(lhs, rexpr) \
  TUNECTL_ASSIGN_OR_RETURN_IMPL(             \
      TUNECTL_STATUS_CONCAT(tunectl_statusor_, __LINE__), lhs, rexpr)

#endif  // TUNECTL_COMMON_STATUS_MACROS_H_
