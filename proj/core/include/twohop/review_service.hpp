// Copyright 2026 The twohop Authors.
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

#ifndef TWOHOP_REVIEW_SERVICE_HPP_
#define TWOHOP_REVIEW_SERVICE_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "twohop/error.hpp"
#include "twohop/merge.hpp"
#include "twohop/quality.hpp"

namespace twohop {

// Service-level failure with a stable machine code and an HTTP status.
class ServiceError : public Error {
 public:
  ServiceError(int status, std::string code, const std::string& message)
      : Error(message), status_(status), code_(std::move(code)) {}
  int status() const { return status_; }
  const std::string& code() const { return code_; }

 private:
  int status_;
  std::string code_;
};

struct SampleRef {
  std::string dataset;  // canonical path
  std::size_t n = 0;
  std::uint64_t seed = 0;

  bool operator==(const SampleRef&) const = default;
};

struct ReviewSession {
  std::string session_id;
  std::string annotator_id;
  SampleRef sample;
  std::size_t cursor = 0;

  bool complete() const { return cursor == sample.n; }
};

struct NextItem {
  std::size_t index = 0;
  std::size_t total = 0;
  std::optional<MergedQuestion> question;  // empty once the session is done
};

struct SubmitAck {
  std::string question_id;
  std::size_t cursor = 0;
  bool complete = false;
};

// Annotation sessions over seeded samples of a merged-question dataset.
// State lives in `data_dir`: sessions.jsonl (one line per created session)
// and annotations.jsonl (the annotation store). Cursors are rebuilt from
// the store on construction. All methods are thread-safe.
class ReviewService {
 public:
  explicit ReviewService(std::filesystem::path data_dir);

  ReviewSession create_session(const std::string& annotator_id,
                               const std::filesystem::path& dataset,
                               std::size_t n, std::uint64_t seed);
  NextItem next_item(const std::string& session_id);
  SubmitAck submit_score(const std::string& session_id,
                         const std::string& question_id, const Rubric& rubric);
  AgreementReport session_report(const std::filesystem::path& dataset,
                                 std::size_t n, std::uint64_t seed);

  ReviewSession session(const std::string& session_id) const;
  const std::filesystem::path& store_path() const { return store_.path(); }

 private:
  struct SessionState {
    ReviewSession info;
    std::vector<MergedQuestion> items;
  };

  SampleRef make_ref(const std::filesystem::path& dataset, std::size_t n,
                     std::uint64_t seed) const;
  const std::vector<MergedQuestion>& dataset_locked(const std::string& path);
  std::vector<MergedQuestion> sample_locked(const SampleRef& ref);
  SessionState& find_locked(const std::string& session_id);
  const SessionState& find_locked(const std::string& session_id) const;

  std::filesystem::path data_dir_;
  std::filesystem::path sessions_path_;
  AnnotationStore store_;
  mutable std::mutex mutex_;
  std::map<std::string, SessionState> sessions_;
  std::map<std::string, std::vector<MergedQuestion>> datasets_;
  std::set<std::pair<std::string, std::string>> scored_;
  std::size_t next_session_number_ = 1;
};

// HTTP+JSON front end:
//   POST /sessions                 {"annotator_id","dataset","n","seed"}
//   GET  /sessions/{id}/next
//   POST /sessions/{id}/scores     {"question_id","rubric":{...}}
//   GET  /reports?dataset=&n=&seed=
// Errors are {"code","message"} with a matching status.
class ReviewHttpServer {
 public:
  explicit ReviewHttpServer(ReviewService& service);
  ~ReviewHttpServer();
  ReviewHttpServer(const ReviewHttpServer&) = delete;
  ReviewHttpServer& operator=(const ReviewHttpServer&) = delete;

  // Serves files under `dir` at "/" (e.g. a built annotation UI).
  bool set_static_dir(const std::filesystem::path& dir);

  // Binds; port 0 picks a free port. Returns the bound port or -1.
  int bind(const std::string& host, int port);
  // Blocks until stop() is called.
  bool listen();
  void stop();
  void wait_until_ready() const;

 private:
  class Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace twohop

#endif  // TWOHOP_REVIEW_SERVICE_HPP_
