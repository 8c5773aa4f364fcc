/*
 * Copyright 2026 The erx Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "erx/bridge.hpp"

#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <thread>

#include "httplib.h"
#include "json.hpp"

namespace erx {

using Clock = std::chrono::steady_clock;

std::string EncodeBridgeRequest(const RecordPair& pair) {
  auto side = [](const Record& record) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (int i = 0; i < record.schema().size(); ++i) {
      obj[record.schema().attribute(i)] = record.value(i);
    }
    return obj;
  };
  nlohmann::ordered_json request;
  request["l"] = side(pair.left);
  request["r"] = side(pair.right);
  return request.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

double ParseBridgeScore(std::string_view line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) {
    line.remove_suffix(1);
  }
  while (!line.empty() && line.front() == ' ') line.remove_prefix(1);
  if (line.starts_with("{")) {
    std::string message(line);
    auto parsed = nlohmann::json::parse(line, nullptr, false);
    if (!parsed.is_discarded() && parsed.is_object() && parsed.contains("error")) {
      message = parsed["error"].is_string() ? parsed["error"].get<std::string>()
                                            : parsed["error"].dump();
    }
    throw Error(ErrorCode::kProtocol, "adapter reported an error: " + message);
  }
  double score = 0.0;
  auto [end, ec] = std::from_chars(line.data(), line.data() + line.size(), score);
  if (ec != std::errc() || end != line.data() + line.size() || line.empty() ||
      !std::isfinite(score) || score < 0.0 || score > 1.0) {
    throw Error(ErrorCode::kProtocol,
                "malformed score line '" + std::string(line) + "'");
  }
  return score;
}

std::string FormatBridgeScore(double score) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.9f", score);
  return buffer;
}

namespace {

void CheckHandshake(std::string_view reply) {
  auto parsed = nlohmann::json::parse(reply, nullptr, false);
  if (parsed.is_discarded() || !parsed.is_object() || !parsed.contains("ok") ||
      parsed["ok"] != true) {
    throw Error(ErrorCode::kProtocol,
                "bad handshake reply '" + std::string(reply) + "'");
  }
}

constexpr std::string_view kHello = "{\"op\":\"hello\"}\n";

}  // namespace

ProcessBridgeClassifier::ProcessBridgeClassifier(std::string command,
                                                 BridgeOptions options)
    : command_(std::move(command)), options_(options) {}

ProcessBridgeClassifier::~ProcessBridgeClassifier() { Stop(); }

void ProcessBridgeClassifier::Start() {
  int fds[2];
  if (socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, fds) != 0) {
    throw Error(ErrorCode::kTransport,
                std::string("socketpair failed: ") + std::strerror(errno));
  }
  pid_t pid = fork();
  if (pid < 0) {
    close(fds[0]);
    close(fds[1]);
    throw Error(ErrorCode::kTransport, std::string("fork failed: ") + std::strerror(errno));
  }
  if (pid == 0) {
    // Child: its end of the socket becomes stdin and stdout.
    setpgid(0, 0);
    dup2(fds[1], STDIN_FILENO);
    dup2(fds[1], STDOUT_FILENO);
    execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  setpgid(pid, pid);
  close(fds[1]);
  fd_ = fds[0];
  pid_ = pid;
  buffer_.clear();

  SendAll(kHello);
  CheckHandshake(ReadLine(Clock::now() + options_.timeout));
}

void ProcessBridgeClassifier::Stop(bool graceful) {
  if (fd_ >= 0) {
    shutdown(fd_, SHUT_WR);
  }
  if (pid_ > 0 && !graceful) kill(-pid_, SIGKILL);
  if (pid_ > 0) {
    int status = 0;
    auto deadline = Clock::now() + std::chrono::seconds(2);
    while (waitpid(pid_, &status, WNOHANG) == 0) {
      if (Clock::now() > deadline) {
        kill(-pid_, SIGKILL);
        waitpid(pid_, &status, 0);
        break;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
  }
  if (fd_ >= 0) close(fd_);
  fd_ = -1;
  pid_ = -1;
  buffer_.clear();
}

void ProcessBridgeClassifier::Connect() {
  if (fd_ >= 0) return;
  for (int attempt = 0;; ++attempt) {
    try {
      Start();
      return;
    } catch (const Error& e) {
      Stop(/*graceful=*/false);
      if (e.code() != ErrorCode::kTransport || attempt >= options_.retries) throw;
    }
  }
}

void ProcessBridgeClassifier::SendAll(std::string_view data) {
  while (!data.empty()) {
    ssize_t n = send(fd_, data.data(), data.size(), MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::kTransport,
                  std::string("write to adapter failed: ") + std::strerror(errno));
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
}

std::string ProcessBridgeClassifier::ReadLine(Clock::time_point deadline) {
  for (;;) {
    auto newline = buffer_.find('\n');
    if (newline != std::string::npos) {
      std::string line = buffer_.substr(0, newline);
      buffer_.erase(0, newline + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - Clock::now());
    if (remaining.count() <= 0) {
      throw Error(ErrorCode::kTransport, "timed out waiting for the adapter");
    }
    pollfd pfd{fd_, POLLIN, 0};
    int ready = poll(&pfd, 1, static_cast<int>(remaining.count()));
    if (ready < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::kTransport, std::string("poll failed: ") + std::strerror(errno));
    }
    if (ready == 0) continue;
    char chunk[8192];
    ssize_t n = read(fd_, chunk, sizeof(chunk));
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::kTransport,
                  std::string("read from adapter failed: ") + std::strerror(errno));
    }
    if (n == 0) throw Error(ErrorCode::kTransport, "adapter closed its output");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

std::vector<double> ProcessBridgeClassifier::Exchange(
    std::span<const RecordPair> pairs) {
  // Bounded chunks keep both socket buffers from filling up at once.
  constexpr std::size_t kChunk = 32;
  std::vector<double> scores;
  scores.reserve(pairs.size());
  for (std::size_t begin = 0; begin < pairs.size(); begin += kChunk) {
    const std::size_t end = std::min(pairs.size(), begin + kChunk);
    std::string request;
    for (std::size_t i = begin; i < end; ++i) {
      request += EncodeBridgeRequest(pairs[i]);
      request += '\n';
    }
    SendAll(request);
    auto deadline = Clock::now() + options_.timeout;
    for (std::size_t i = begin; i < end; ++i) {
      scores.push_back(ParseBridgeScore(ReadLine(deadline)));
    }
  }
  return scores;
}

std::vector<double> ProcessBridgeClassifier::PredictBatch(
    std::span<const RecordPair> pairs) {
  if (pairs.empty()) return {};
  for (int attempt = 0;; ++attempt) {
    try {
      if (fd_ < 0) Start();
      return Exchange(pairs);
    } catch (const Error& e) {
      // The stream position is unknown after any failure.
      Stop(/*graceful=*/false);
      if (e.code() != ErrorCode::kTransport || attempt >= options_.retries) throw;
    }
  }
}

HttpBridgeClassifier::HttpBridgeClassifier(const std::string& url,
                                           BridgeOptions options)
    : options_(options) {
  std::string_view rest(url);
  if (!rest.starts_with("http://")) {
    throw Error(ErrorCode::kInvalidArgument,
                "bridge URL must start with http://, got '" + url + "'");
  }
  rest.remove_prefix(7);
  auto slash = rest.find('/');
  std::string host_port(rest.substr(0, slash));
  path_ = slash == std::string_view::npos ? "/" : std::string(rest.substr(slash));
  if (host_port.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "bridge URL has no host: '" + url + "'");
  }
  client_ = std::make_unique<httplib::Client>("http://" + host_port);
  auto seconds = std::chrono::duration_cast<std::chrono::seconds>(options_.timeout);
  auto micros = std::chrono::duration_cast<std::chrono::microseconds>(
      options_.timeout - seconds);
  client_->set_connection_timeout(seconds.count(), micros.count());
  client_->set_read_timeout(seconds.count(), micros.count());
  client_->set_write_timeout(seconds.count(), micros.count());
}

HttpBridgeClassifier::~HttpBridgeClassifier() = default;

std::string HttpBridgeClassifier::Post(const std::string& body) {
  for (int attempt = 0;; ++attempt) {
    auto result = client_->Post(path_, body, "application/x-ndjson");
    if (result && result->status == 200) return result->body;
    bool transient = !result || result->status == 502 || result->status == 503 ||
                     result->status == 504;
    std::string what = result ? "HTTP status " + std::to_string(result->status)
                              : "HTTP " + httplib::to_string(result.error());
    if (!transient) {
      throw Error(ErrorCode::kProtocol, "bridge request rejected: " + what);
    }
    if (attempt >= options_.retries) {
      throw Error(ErrorCode::kTransport, "bridge unreachable: " + what);
    }
  }
}

void HttpBridgeClassifier::Connect() {
  if (connected_) return;
  std::string reply = Post(std::string(kHello));
  while (!reply.empty() && (reply.back() == '\n' || reply.back() == '\r')) {
    reply.pop_back();
  }
  CheckHandshake(reply);
  connected_ = true;
}

std::vector<double> HttpBridgeClassifier::PredictBatch(
    std::span<const RecordPair> pairs) {
  if (pairs.empty()) return {};
  Connect();
  std::string body;
  for (const auto& pair : pairs) {
    body += EncodeBridgeRequest(pair);
    body += '\n';
  }
  std::string reply = Post(body);
  std::vector<double> scores;
  scores.reserve(pairs.size());
  std::size_t pos = 0;
  while (pos < reply.size() && scores.size() < pairs.size()) {
    auto newline = reply.find('\n', pos);
    if (newline == std::string::npos) newline = reply.size();
    scores.push_back(ParseBridgeScore(std::string_view(reply).substr(pos, newline - pos)));
    pos = newline + 1;
  }
  if (scores.size() != pairs.size()) {
    throw Error(ErrorCode::kProtocol,
                "bridge returned " + std::to_string(scores.size()) +
                    " scores for " + std::to_string(pairs.size()) + " requests");
  }
  return scores;
}

}  // namespace erx
