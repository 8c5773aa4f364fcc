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

// Classifiers hosted outside the process.
//
// Wire protocol (UTF-8, newline-terminated lines):
//   engine -> adapter   {"op":"hello"}
//   adapter -> engine   {"ok":true}
//   engine -> adapter   {"l":{attr:value,...},"r":{attr:value,...}}   one per pair
//   adapter -> engine   <decimal score in [0,1]>                      one per request
// An adapter may answer a request with {"error":"..."} instead of a score.
//
// The same framing is used over a child process's stdin/stdout and as the
// body of an HTTP POST (one request body per batch, one response body with
// one score line per pair).

#ifndef ERX_BRIDGE_HPP_
#define ERX_BRIDGE_HPP_

#include <chrono>
#include <memory>
#include <string>
#include <string_view>
#include <sys/types.h>

#include "erx/classifier.hpp"

namespace httplib {
class Client;
}

namespace erx {

struct BridgeOptions {
  std::chrono::milliseconds timeout{30000};
  // Extra attempts after a transport failure (the process is restarted or the
  // request re-sent). Protocol errors are never retried.
  int retries = 2;
};

std::string EncodeBridgeRequest(const RecordPair& pair);
// Parses one response line; throws kProtocol on anything but a real in [0,1].
double ParseBridgeScore(std::string_view line);
// Nine fractional digits, the precision scores are cached at.
std::string FormatBridgeScore(double score);

// Adapter running as a child process (`/bin/sh -c <command>`), owned by this
// object: spawned on Connect(), terminated on destruction.
class ProcessBridgeClassifier : public Classifier {
 public:
  explicit ProcessBridgeClassifier(std::string command, BridgeOptions options = {});
  ~ProcessBridgeClassifier() override;

  ProcessBridgeClassifier(const ProcessBridgeClassifier&) = delete;
  ProcessBridgeClassifier& operator=(const ProcessBridgeClassifier&) = delete;

  // Spawns the adapter and performs the handshake if not already connected.
  void Connect();
  std::vector<double> PredictBatch(std::span<const RecordPair> pairs) override;
  bool concurrent() const override { return false; }

  pid_t pid() const { return pid_; }

 private:
  void Start();
  void Stop(bool graceful = true);
  void SendAll(std::string_view data);
  std::string ReadLine(std::chrono::steady_clock::time_point deadline);
  std::vector<double> Exchange(std::span<const RecordPair> pairs);

  std::string command_;
  BridgeOptions options_;
  pid_t pid_ = -1;
  int fd_ = -1;
  std::string buffer_;
};

// Adapter reachable over HTTP; `url` is http://host[:port][/path].
class HttpBridgeClassifier : public Classifier {
 public:
  explicit HttpBridgeClassifier(const std::string& url, BridgeOptions options = {});
  ~HttpBridgeClassifier() override;

  void Connect();
  std::vector<double> PredictBatch(std::span<const RecordPair> pairs) override;
  bool concurrent() const override { return false; }

 private:
  std::string Post(const std::string& body);

  std::string path_;
  BridgeOptions options_;
  std::unique_ptr<httplib::Client> client_;
  bool connected_ = false;
};

}  // namespace erx

#endif  // ERX_BRIDGE_HPP_
