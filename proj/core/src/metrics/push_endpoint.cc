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

#include "tunectl/metrics/push_endpoint.h"

#include <fcntl.h>
#include <poll.h>
#include <sys/socket.h>
#include <sys/un.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include <glog/logging.h>

#include "absl/strings/str_cat.h"
#include "tunectl/metrics/metric_parser.h"

namespace tunectl::metrics {
namespace {

absl::StatusOr<sockaddr_un> SocketAddress(const std::filesystem::path& path) {
  sockaddr_un address{};
  address.sun_family = AF_UNIX;
  const std::string text = path.string();
  if (text.size() >= sizeof(address.sun_path)) {
    return absl::InvalidArgumentError(absl::StrCat("socket path too long: ", text));
  }
  std::memcpy(address.sun_path, text.c_str(), text.size() + 1);
  return address;
}

bool WriteAll(int fd, std::string_view data) {
  while (!data.empty()) {
    const ssize_t n = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
  return true;
}

}  // namespace

absl::StatusOr<std::unique_ptr<PushEndpoint>> PushEndpoint::Start(
    std::filesystem::path socket_path, std::string trial_name, std::vector<std::string> watched,
    ObservationStore* store) {
  std::unique_ptr<PushEndpoint> endpoint(new PushEndpoint());
  endpoint->path_ = std::move(socket_path);
  endpoint->trial_name_ = std::move(trial_name);
  endpoint->watched_ = std::move(watched);
  endpoint->store_ = store;

  auto address = SocketAddress(endpoint->path_);
  if (!address.ok()) return address.status();
  std::error_code ec;
  std::filesystem::remove(endpoint->path_, ec);
  endpoint->listen_fd_ = ::socket(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0);
  if (endpoint->listen_fd_ < 0 ||
      ::bind(endpoint->listen_fd_, reinterpret_cast<const sockaddr*>(&*address),
             sizeof(*address)) != 0 ||
      ::listen(endpoint->listen_fd_, 8) != 0 || ::pipe2(endpoint->wake_pipe_, O_CLOEXEC) != 0) {
    return absl::UnavailableError(
        absl::StrCat("cannot listen on ", endpoint->path_.string(), ": ", std::strerror(errno)));
  }
  endpoint->thread_ = std::thread([raw = endpoint.get()] { raw->Serve(); });
  return endpoint;
}

PushEndpoint::~PushEndpoint() {
  if (thread_.joinable()) {
    const char byte = 0;
    [[maybe_unused]] ssize_t ignored = ::write(wake_pipe_[1], &byte, 1);
    thread_.join();
  }
  for (int fd : {listen_fd_, wake_pipe_[0], wake_pipe_[1]}) {
    if (fd >= 0) ::close(fd);
  }
  std::error_code ec;
  std::filesystem::remove(path_, ec);
}

void PushEndpoint::Serve() {
  while (true) {
    pollfd fds[2] = {{listen_fd_, POLLIN, 0}, {wake_pipe_[0], POLLIN, 0}};
    if (::poll(fds, 2, -1) < 0) {
      if (errno == EINTR) continue;
      LOG(ERROR) << "push endpoint poll failed: " << std::strerror(errno);
      return;
    }
    if (fds[1].revents != 0) return;
    if (fds[0].revents & POLLIN) {
      const int fd = ::accept4(listen_fd_, nullptr, nullptr, SOCK_CLOEXEC);
      if (fd < 0) continue;
      ServeConnection(fd);
      ::close(fd);
    }
  }
}

void PushEndpoint::ServeConnection(int fd) {
  std::string buffer;
  char chunk[4096];
  while (true) {
    pollfd fds[2] = {{fd, POLLIN, 0}, {wake_pipe_[0], POLLIN, 0}};
    if (::poll(fds, 2, -1) < 0) {
      if (errno == EINTR) continue;
      return;
    }
    if (fds[1].revents != 0) return;
    const ssize_t n = ::recv(fd, chunk, sizeof(chunk), 0);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) {
      if (!buffer.empty()) HandleLine(fd, buffer);
      return;
    }
    buffer.append(chunk, static_cast<std::size_t>(n));
    std::size_t newline;
    while ((newline = buffer.find('\n')) != std::string::npos) {
      HandleLine(fd, std::string_view(buffer).substr(0, newline));
      buffer.erase(0, newline + 1);
    }
  }
}

void PushEndpoint::HandleLine(int fd, std::string_view line) {
  ParsedLines parsed = ParseMetricLines(line, trial_name_, watched_);
  malformed_ += parsed.malformed;
  std::string reply = "ack\n";
  if (!parsed.points.empty()) {
    if (absl::Status status = store_->Register(parsed.points); !status.ok()) {
      reply = absl::StrCat("err ", std::string(status.message()), "\n");
    }
  }
  WriteAll(fd, reply);
}

absl::Status PushMetricLines(const std::filesystem::path& socket_path, std::string_view lines) {
  auto address = SocketAddress(socket_path);
  if (!address.ok()) return address.status();
  const int fd = ::socket(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0);
  if (fd < 0 ||
      ::connect(fd, reinterpret_cast<const sockaddr*>(&*address), sizeof(*address)) != 0) {
    const std::string reason = std::strerror(errno);
    if (fd >= 0) ::close(fd);
    return absl::UnavailableError(absl::StrCat("cannot connect to ", socket_path.string(), ": ", reason));
  }
  absl::Status result = absl::OkStatus();
  std::size_t pos = 0;
  while (pos < lines.size() && result.ok()) {
    std::size_t end = lines.find('\n', pos);
    if (end == std::string_view::npos) end = lines.size();
    const std::string line = absl::StrCat(std::string(lines.substr(pos, end - pos)), "\n");
    pos = end + 1;
    if (!WriteAll(fd, line)) {
      result = absl::UnavailableError("push connection closed");
      break;
    }
    std::string reply;
    char c;
    while (true) {
      const ssize_t n = ::recv(fd, &c, 1, 0);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0 || c == '\n') break;
      reply.push_back(c);
    }
    if (reply != "ack") result = absl::UnavailableError(absl::StrCat("push rejected: ", reply));
  }
  ::close(fd);
  return result;
}

}  // namespace tunectl::metrics
