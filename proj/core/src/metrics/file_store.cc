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

#include "tunectl/metrics/file_store.h"

#include <cerrno>
#include <cstring>
#include <fstream>
#include <string>

#include <glog/logging.h>

#include "absl/strings/str_cat.h"

namespace tunectl::metrics {
namespace {

absl::Status IoError(std::string_view what, const std::filesystem::path& path) {
  return absl::UnavailableError(
      absl::StrCat(std::string(what), " ", path.string(), ": ", std::strerror(errno)));
}

}  // namespace

absl::StatusOr<std::unique_ptr<FileObservationStore>> FileObservationStore::Open(
    std::filesystem::path path) {
  std::unique_ptr<FileObservationStore> store(new FileObservationStore(std::move(path)));
  std::ifstream in(store->path_);
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    nlohmann::json json = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
    auto point = PointFromJson(json);
    if (!point.ok()) {
      LOG(WARNING) << store->path_ << ":" << line_number << ": skipping unreadable record";
      continue;
    }
    store->index_.Insert(std::span(&*point, 1));
  }
  if (absl::Status status = store->OpenForAppend(); !status.ok()) return status;
  return store;
}

FileObservationStore::~FileObservationStore() {
  if (file_ != nullptr) std::fclose(file_);
}

absl::Status FileObservationStore::OpenForAppend() {
  file_ = std::fopen(path_.c_str(), "a");
  if (file_ == nullptr) return IoError("cannot open", path_);
  return absl::OkStatus();
}

absl::Status FileObservationStore::Register(std::span<const MetricPoint> points) {
  if (absl::Status status = CheckBatch(points); !status.ok()) return status;
  std::lock_guard lock(mu_);
  if (file_ == nullptr) {
    if (absl::Status status = OpenForAppend(); !status.ok()) return status;
  }
  // Write first so an I/O failure leaves the index untouched.
  const std::vector<MetricPoint> added = index_.Novel(points);
  std::string buffer;
  for (const auto& point : added) absl::StrAppend(&buffer, ToJson(point).dump(), "\n");
  if (!buffer.empty() &&
      (std::fwrite(buffer.data(), 1, buffer.size(), file_) != buffer.size() ||
       std::fflush(file_) != 0)) {
    return IoError("cannot append to", path_);
  }
  index_.Insert(added);
  return absl::OkStatus();
}

absl::StatusOr<std::vector<MetricPoint>> FileObservationStore::Get(
    std::string_view trial_name, const ObservationFilter& filter) {
  if (absl::Status status = filter.Validate(); !status.ok()) return status;
  std::lock_guard lock(mu_);
  return index_.Query(trial_name, filter);
}

absl::Status FileObservationStore::Delete(std::string_view trial_name) {
  std::lock_guard lock(mu_);
  if (index_.Query(trial_name, {}).empty()) return absl::OkStatus();
  ObservationIndex remaining = index_;
  remaining.Erase(trial_name);

  const std::filesystem::path tmp = path_.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    for (const auto& point : remaining.All()) out << ToJson(point).dump() << "\n";
    out.flush();
    if (!out) return IoError("cannot write", tmp);
  }
  if (file_ != nullptr) {
    std::fclose(file_);
    file_ = nullptr;
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path_, ec);
  if (ec) {
    return absl::UnavailableError(absl::StrCat("cannot replace ", path_.string(), ": ", ec.message()));
  }
  index_ = std::move(remaining);
  return OpenForAppend();
}

}  // namespace tunectl::metrics
