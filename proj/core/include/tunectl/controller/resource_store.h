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

#ifndef TUNECTL_CONTROLLER_RESOURCE_STORE_H_
#define TUNECTL_CONTROLLER_RESOURCE_STORE_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "tunectl/controller/resources.h"

namespace tunectl::controller {

struct StoredResource {
  Resource resource;
  // Starts at 1 on creation; every accepted update increments it.
  std::uint64_t generation = 0;
};

struct Mutation {
  std::string key;
  // 0 creates a new key; otherwise the generation the writer last read.
  std::uint64_t expected_generation = 0;
  Resource value;
};

// Versioned key-value store of resources with compare-and-swap batches.
// Optionally mirrors every resource to `<dir>/<key>.yaml` plus
// `<dir>/index.yaml` holding generations, written via temporary files.
class ResourceStore {
 public:
  static std::unique_ptr<ResourceStore> InMemory();
  // Loads existing content from `dir` or starts empty.
  static absl::StatusOr<std::unique_ptr<ResourceStore>> OpenDirectory(
      std::filesystem::path dir, const ValidationContext& context = BuiltinValidationContext());

  std::optional<StoredResource> Get(std::string_view key) const;
  // Keys with the given prefix in lexicographic order.
  std::vector<std::string> Keys(std::string_view prefix) const;

  // All mutations commit or none do. Aborted when a generation does not
  // match, AlreadyExists when creating an existing key.
  absl::Status Apply(const std::vector<Mutation>& mutations);

  // Number of committed Apply calls; a cheap change detector.
  std::uint64_t revision() const;

 private:
  ResourceStore() = default;
  absl::Status Persist(const std::vector<std::string>& keys) const;

  mutable std::mutex mu_;
  std::map<std::string, StoredResource, std::less<>> resources_;
  std::optional<std::filesystem::path> dir_;
  std::uint64_t revision_ = 0;
};

// Typed helpers; nullopt when absent or of another kind.
template <typename T>
std::optional<std::pair<T, std::uint64_t>> GetAs(const ResourceStore& store, std::string_view key) {
  auto stored = store.Get(key);
  if (!stored) return std::nullopt;
  if (auto* value = std::get_if<T>(&stored->resource)) {
    return std::make_pair(std::move(*value), stored->generation);
  }
  return std::nullopt;
}

}  // namespace tunectl::controller

#endif  // TUNECTL_CONTROLLER_RESOURCE_STORE_H_
