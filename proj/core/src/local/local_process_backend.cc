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

#include "tunectl/local/local_process_backend.h"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <fstream>

#include <boost/program_options/parsers.hpp>
#include <glog/logging.h>

#include "absl/strings/str_cat.h"
#include "tunectl/metrics/metric_parser.h"

extern char** environ;

namespace tunectl::local {
namespace {

using controller::JobPhase;

constexpr int kPollMillis = 20;

std::vector<std::string> Environment(const std::vector<std::pair<std::string, std::string>>& extra) {
  std::vector<std::string> env;
  for (char** e = environ; *e != nullptr; ++e) {
    const std::string_view entry(*e);
    bool overridden = false;
    for (const auto& [key, value] : extra) {
      if (entry.substr(0, key.size() + 1) == key + "=") overridden = true;
    }
    if (!overridden) env.emplace_back(entry);
  }
  for (const auto& [key, value] : extra) env.push_back(key + "=" + value);
  return env;
}

std::vector<char*> Pointers(std::vector<std::string>& strings) {
  std::vector<char*> out;
  for (auto& s : strings) out.push_back(s.data());
  out.push_back(nullptr);
  return out;
}

void KillAll(const std::vector<pid_t>& pids) {
  for (pid_t pid : pids) {
    // Each worker leads its own process group, so children it spawned die
    // with it instead of holding the stdout pipe open.
    if (pid > 0) ::kill(-pid, SIGKILL);
  }
}

}  // namespace

LocalProcessBackend::LocalProcessBackend(LocalBackendOptions options)
    : options_(std::move(options)) {
  std::error_code ignored;
  std::filesystem::create_directories(options_.work_dir, ignored);
}

LocalProcessBackend::~LocalProcessBackend() {
  std::vector<std::thread> monitors;
  {
    std::lock_guard<std::mutex> lock(mu_);
    for (auto& [name, job] : jobs_) {
      KillAll(job->pids);
      if (job->monitor.joinable()) monitors.push_back(std::move(job->monitor));
    }
    for (auto& t : retired_monitors_) monitors.push_back(std::move(t));
  }
  for (auto& t : monitors) t.join();
}

absl::Status LocalProcessBackend::Submit(const controller::JobRequest& request) {
  std::lock_guard<std::mutex> lock(mu_);
  const std::string& name = request.run_spec.trial_name;
  if (jobs_.count(name) > 0) return absl::OkStatus();
  auto job = std::make_unique<Job>();
  job->request = request;
  Launch(*job);
  jobs_.emplace(name, std::move(job));
  return absl::OkStatus();
}

void LocalProcessBackend::Launch(Job& job) {
  const std::string& trial = job.request.run_spec.trial_name;
  auto fail = [&job](std::string reason) {
    job.status.phase = JobPhase::kPermanentFailure;
    job.status.reason = std::move(reason);
  };
  const auto* command = std::get_if<std::string>(&job.request.run_spec.resolved_payload);
  if (command == nullptr) return fail("the local backend runs commands, not simulated objectives");
  std::vector<std::string> args = boost::program_options::split_unix(*command);
  if (args.empty()) return fail("empty command");

  std::unique_ptr<metrics::PushEndpoint> endpoint;
  std::vector<std::pair<std::string, std::string>> extra = {
      {"TUNECTL_TRIAL_NAME", trial},
      {"TUNECTL_RESTART_COUNT", std::to_string(job.status.attempt)}};
  if (job.request.collector == MetricCollectorKind::kPush) {
    const auto socket = options_.work_dir / (trial + ".sock");
    auto started = metrics::PushEndpoint::Start(socket, trial, job.request.watched_metrics,
                                                options_.metrics);
    if (!started.ok()) return fail(absl::StrCat("push endpoint: ", started.status().message()));
    endpoint = *std::move(started);
    extra.push_back({"TUNECTL_METRICS_SOCKET", socket.string()});
  }

  int pipe_fds[2];
  if (::pipe2(pipe_fds, O_CLOEXEC) != 0) return fail(absl::StrCat("pipe: ", std::strerror(errno)));

  std::vector<pid_t> pids;
  for (int worker = 0; worker < job.request.worker_count; ++worker) {
    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    const std::string log =
        (options_.work_dir / absl::StrCat(trial, "-worker", worker, ".log")).string();
    if (worker == 0) {
      posix_spawn_file_actions_adddup2(&actions, pipe_fds[1], STDOUT_FILENO);
    } else {
      posix_spawn_file_actions_addopen(&actions, STDOUT_FILENO, log.c_str(),
                                       O_WRONLY | O_CREAT | O_APPEND, 0644);
    }
    auto worker_extra = extra;
    worker_extra.push_back({"TUNECTL_WORKER_INDEX", std::to_string(worker)});
    std::vector<std::string> env = Environment(worker_extra);
    std::vector<char*> argv = Pointers(args);
    std::vector<char*> envp = Pointers(env);
    pid_t pid = 0;
    posix_spawnattr_t attributes;
    posix_spawnattr_init(&attributes);
    posix_spawnattr_setflags(&attributes, POSIX_SPAWN_SETPGROUP);
    posix_spawnattr_setpgroup(&attributes, 0);
    const int rc =
        ::posix_spawnp(&pid, argv[0], &actions, &attributes, argv.data(), envp.data());
    posix_spawnattr_destroy(&attributes);
    posix_spawn_file_actions_destroy(&actions);
    if (rc != 0) {
      KillAll(pids);
      for (pid_t p : pids) ::waitpid(p, nullptr, 0);
      ::close(pipe_fds[0]);
      ::close(pipe_fds[1]);
      return fail(absl::StrCat("spawn failed: ", args[0], ": ", std::strerror(rc)));
    }
    pids.push_back(pid);
  }
  ::close(pipe_fds[1]);

  job.pids = pids;
  job.status.phase = JobPhase::kRunning;
  job.status.reason.clear();
  if (job.monitor.joinable()) retired_monitors_.push_back(std::move(job.monitor));
  job.monitor = std::thread(&LocalProcessBackend::Monitor, this, trial, job.status.attempt,
                            std::move(pids), pipe_fds[0], std::move(endpoint));
}

void LocalProcessBackend::Monitor(std::string trial_name, int attempt, std::vector<pid_t> pids,
                                  int stdout_fd, std::unique_ptr<metrics::PushEndpoint> endpoint) {
  std::vector<std::string> watched;
  bool pull = false;
  {
    std::lock_guard<std::mutex> lock(mu_);
    const Job& job = *jobs_.find(trial_name)->second;
    watched = job.request.watched_metrics;
    pull = job.request.collector == MetricCollectorKind::kPull;
  }
  std::ofstream log(options_.work_dir / (trial_name + ".log"), std::ios::app);

  std::string buffer;
  auto consume = [&](bool flush_partial) {
    std::size_t start = 0;
    for (std::size_t nl; (nl = buffer.find('\n', start)) != std::string::npos; start = nl + 1) {
      const std::string_view line(buffer.data() + start, nl - start);
      log << line << '\n';
      if (!pull) continue;
      auto parsed = metrics::ParseMetricLines(line, trial_name, watched);
      if (!parsed.points.empty()) {
        if (absl::Status s = options_.metrics->Register(parsed.points); !s.ok()) {
          LOG(WARNING) << "dropping metrics of " << trial_name << ": " << s;
        }
      }
    }
    buffer.erase(0, start);
    if (flush_partial && !buffer.empty()) {
      buffer.push_back('\n');
      return true;
    }
    return false;
  };

  std::vector<int> exit_status(pids.size(), -1);
  std::vector<bool> reaped(pids.size(), false);
  bool open = true;
  std::size_t remaining = pids.size();
  std::string failure;
  JobPhase phase = JobPhase::kSucceeded;
  while (open || remaining > 0) {
    if (open) {
      pollfd pfd{stdout_fd, POLLIN, 0};
      if (::poll(&pfd, 1, kPollMillis) > 0) {
        char chunk[4096];
        const ssize_t n = ::read(stdout_fd, chunk, sizeof(chunk));
        if (n > 0) {
          buffer.append(chunk, static_cast<std::size_t>(n));
          consume(false);
        } else if (n == 0 || (errno != EINTR && errno != EAGAIN)) {
          open = false;
          if (consume(true)) consume(false);
        }
      }
    } else {
      std::this_thread::sleep_for(std::chrono::milliseconds(kPollMillis));
    }
    for (std::size_t i = 0; i < pids.size(); ++i) {
      if (reaped[i]) continue;
      int status = 0;
      if (::waitpid(pids[i], &status, WNOHANG) != pids[i]) continue;
      reaped[i] = true;
      --remaining;
      if (WIFEXITED(status) && WEXITSTATUS(status) == 0) continue;
      if (phase == JobPhase::kSucceeded) {
        if (WIFEXITED(status) && WEXITSTATUS(status) == options_.temporary_failure_exit_code) {
          phase = JobPhase::kTemporaryFailure;
        } else {
          phase = JobPhase::kPermanentFailure;
        }
        failure = WIFEXITED(status)
                      ? absl::StrCat("worker ", i, " exited with code ", WEXITSTATUS(status))
                      : absl::StrCat("worker ", i, " killed by signal ", WTERMSIG(status));
        std::vector<pid_t> others;
        for (std::size_t j = 0; j < pids.size(); ++j) {
          if (!reaped[j]) others.push_back(pids[j]);
        }
        KillAll(others);
      }
    }
  }
  ::close(stdout_fd);
  endpoint.reset();
  Finish(trial_name, attempt, phase, failure);
}

void LocalProcessBackend::Finish(const std::string& trial_name, int attempt, JobPhase phase,
                                 std::string reason) {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = jobs_.find(trial_name);
  if (it == jobs_.end() || it->second->status.attempt != attempt) return;
  it->second->status.phase = phase;
  it->second->status.reason = std::move(reason);
  it->second->pids.clear();
}

controller::JobStatus LocalProcessBackend::Status(std::string_view trial_name) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = jobs_.find(trial_name);
  return it == jobs_.end() ? controller::JobStatus{} : it->second->status;
}

absl::Status LocalProcessBackend::Restart(std::string_view trial_name, int attempt) {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = jobs_.find(trial_name);
  if (it == jobs_.end()) {
    return absl::NotFoundError(absl::StrCat("no job ", std::string(trial_name)));
  }
  Job& job = *it->second;
  if (attempt <= job.status.attempt) return absl::OkStatus();
  if (job.status.phase != JobPhase::kTemporaryFailure) {
    return absl::FailedPreconditionError(
        absl::StrCat("job ", std::string(trial_name), " is not temporarily failed"));
  }
  job.status.attempt = attempt;
  Launch(job);
  return absl::OkStatus();
}

absl::Status LocalProcessBackend::EnsureAlgorithmService(std::string_view ns,
                                                         std::string_view experiment) {
  std::lock_guard<std::mutex> lock(mu_);
  services_.insert(absl::StrCat(std::string(ns), "/", std::string(experiment)));
  return absl::OkStatus();
}

bool LocalProcessBackend::AlgorithmServiceReady(std::string_view ns,
                                                std::string_view experiment) const {
  std::lock_guard<std::mutex> lock(mu_);
  return services_.count(absl::StrCat(std::string(ns), "/", std::string(experiment))) > 0;
}

void LocalProcessBackend::ReleaseAlgorithmService(std::string_view ns,
                                                  std::string_view experiment) {
  std::lock_guard<std::mutex> lock(mu_);
  services_.erase(absl::StrCat(std::string(ns), "/", std::string(experiment)));
}

std::int64_t LocalProcessBackend::Now() const {
  return std::chrono::duration_cast<std::chrono::seconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

void LocalProcessBackend::WaitIdle() const {
  for (;;) {
    {
      std::lock_guard<std::mutex> lock(mu_);
      bool busy = false;
      for (const auto& [name, job] : jobs_) {
        busy = busy || job->status.phase == JobPhase::kRunning ||
               job->status.phase == JobPhase::kPending;
      }
      if (!busy) return;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(kPollMillis));
  }
}

}  // namespace tunectl::local
