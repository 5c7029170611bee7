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

#include "tunectl/controller/resource_store.h"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <sstream>

#include "absl/strings/str_cat.h"

namespace tunectl::controller {
namespace {

constexpr char kIndexFile[] = "index.yaml";

absl::Status WriteAtomically(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc | std::ios::binary);
    out << content;
    out.flush();
    if (!out) return absl::UnavailableError(absl::StrCat("cannot write ", tmp.string()));
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) return absl::UnavailableError(absl::StrCat("cannot rename ", tmp.string(), ": ", ec.message()));
  return absl::OkStatus();
}

absl::StatusOr<std::string> ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot read ", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

std::unique_ptr<ResourceStore> ResourceStore::InMemory() {
  return std::unique_ptr<ResourceStore>(new ResourceStore());
}

absl::StatusOr<std::unique_ptr<ResourceStore>> ResourceStore::OpenDirectory(
    std::filesystem::path dir, const ValidationContext& context) {
  std::unique_ptr<ResourceStore> store(new ResourceStore());
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) return absl::UnavailableError(absl::StrCat("cannot create ", dir.string(), ": ", ec.message()));
  store->dir_ = dir;
  const std::filesystem::path index_path = dir / kIndexFile;
  if (!std::filesystem::exists(index_path)) return store;

  auto index_text = ReadFile(index_path);
  if (!index_text.ok()) return index_text.status();
  YAML::Node index;
  try {
    index = YAML::Load(*index_text);
  } catch (const YAML::Exception& e) {
    return absl::DataLossError(absl::StrCat("corrupt ", index_path.string(), ": ", e.what()));
  }
  if (index["revision"].IsScalar()) store->revision_ = index["revision"].as<std::uint64_t>();
  for (const auto& entry : index["generations"]) {
    const std::string key = entry.first.Scalar();
    auto text = ReadFile(dir / (key + ".yaml"));
    if (!text.ok()) return text.status();
    auto resource = ResourceFromYaml(*text, context);
    if (!resource.ok()) {
      return absl::DataLossError(absl::StrCat(key, ": ", resource.status().message()));
    }
    store->resources_.emplace(key, StoredResource{*std::move(resource),
                                                  entry.second.as<std::uint64_t>()});
  }
  return store;
}

std::optional<StoredResource> ResourceStore::Get(std::string_view key) const {
  std::lock_guard lock(mu_);
  auto it = resources_.find(key);
  if (it == resources_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> ResourceStore::Keys(std::string_view prefix) const {
  std::lock_guard lock(mu_);
  std::vector<std::string> keys;
  for (auto it = resources_.lower_bound(prefix);
       it != resources_.end() && std::string_view(it->first).starts_with(prefix); ++it) {
    keys.push_back(it->first);
  }
  return keys;
}

std::uint64_t ResourceStore::revision() const {
  std::lock_guard lock(mu_);
  return revision_;
}

absl::Status ResourceStore::Apply(const std::vector<Mutation>& mutations) {
  if (mutations.empty()) return absl::OkStatus();
  std::lock_guard lock(mu_);
  std::map<std::string, StoredResource, std::less<>> staged;
  for (const auto& mutation : mutations) {
    auto prior = staged.find(mutation.key);
    const StoredResource* current = nullptr;
    if (prior != staged.end()) {
      current = &prior->second;
    } else if (auto it = resources_.find(mutation.key); it != resources_.end()) {
      current = &it->second;
    }
    if (mutation.expected_generation == 0) {
      if (current != nullptr) {
        return absl::AlreadyExistsError(absl::StrCat(mutation.key, " already exists"));
      }
    } else if (current == nullptr || current->generation != mutation.expected_generation) {
      return absl::AbortedError(absl::StrCat("generation conflict on ", mutation.key));
    }
    staged[mutation.key] = StoredResource{mutation.value, mutation.expected_generation + 1};
  }
  std::vector<std::string> keys;
  for (auto& [key, stored] : staged) {
    keys.push_back(key);
    resources_.insert_or_assign(key, std::move(stored));
  }
  ++revision_;
  return Persist(keys);
}

absl::Status ResourceStore::Persist(const std::vector<std::string>& keys) const {
  if (!dir_) return absl::OkStatus();
  for (const auto& key : keys) {
    const auto& stored = resources_.find(key)->second;
    if (absl::Status status = WriteAtomically(*dir_ / (key + ".yaml"), ResourceToYaml(stored.resource));
        !status.ok()) {
      return status;
    }
  }
  YAML::Emitter out;
  out << YAML::BeginMap << YAML::Key << "revision" << YAML::Value << revision_;
  out << YAML::Key << "generations" << YAML::Value << YAML::BeginMap;
  for (const auto& [key, stored] : resources_) out << YAML::Key << key << YAML::Value << stored.generation;
  out << YAML::EndMap << YAML::EndMap;
  return WriteAtomically(*dir_ / kIndexFile, std::string(out.c_str()) + "\n");
}

}  // namespace tunectl::controller
