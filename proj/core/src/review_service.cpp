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

#include "twohop/review_service.hpp"

#include <fstream>
#include <set>

#include "httplib.h"
#include "json.hpp"
#include "twohop/log.hpp"

namespace twohop {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

ServiceError not_found(const std::string& code, const std::string& msg) {
  return ServiceError(404, code, msg);
}
ServiceError conflict(const std::string& code, const std::string& msg) {
  return ServiceError(409, code, msg);
}
ServiceError bad_request(const std::string& msg) {
  return ServiceError(400, "bad_request", msg);
}

ordered_json session_json(const ReviewSession& s) {
  ordered_json j;
  j["session_id"] = s.session_id;
  j["annotator_id"] = s.annotator_id;
  j["dataset"] = s.sample.dataset;
  j["n"] = s.sample.n;
  j["seed"] = s.sample.seed;
  j["cursor"] = s.cursor;
  j["status"] = s.complete() ? "complete" : "open";
  return j;
}

ordered_json question_json(const MergedQuestion& q) {
  ordered_json j;
  j["id"] = q.id();
  j["text"] = q.text;
  j["answer"] = q.answer;
  j["bridge_answer"] = q.bridge_answer;
  j["host_qid"] = q.host_qid;
  j["guest_qid"] = q.guest_qid;
  j["show"] = q.episode_key.show;
  j["season"] = q.episode_key.season;
  j["episode"] = q.episode_key.episode;
  j["segs"] = {q.segments[0], q.segments[1]};
  return j;
}

void append_line(const std::filesystem::path& path, const std::string& line) {
  std::ofstream out(path, std::ios::app | std::ios::binary);
  if (!out) throw DataError("cannot append to " + path.string());
  out << line << '\n';
  out.flush();
  if (!out) throw DataError("write to " + path.string() + " failed");
}

}  // namespace

ReviewService::ReviewService(std::filesystem::path data_dir)
    : data_dir_(std::move(data_dir)),
      sessions_path_(data_dir_ / "sessions.jsonl"),
      store_(data_dir_ / "annotations.jsonl") {
  std::filesystem::create_directories(data_dir_);
  for (const auto& rec : store_.read_all()) {
    scored_.insert({rec.annotator_id, rec.question_id});
  }
  std::ifstream in(sessions_path_);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    SessionState state;
    state.info.session_id = j.at("session_id").get<std::string>();
    state.info.annotator_id = j.at("annotator_id").get<std::string>();
    state.info.sample = {j.at("dataset").get<std::string>(),
                         j.at("n").get<std::size_t>(),
                         j.at("seed").get<std::uint64_t>()};
    state.items = sample_locked(state.info.sample);
    while (state.info.cursor < state.items.size() &&
           scored_.contains({state.info.annotator_id,
                             state.items[state.info.cursor].id()})) {
      ++state.info.cursor;
    }
    sessions_.emplace(state.info.session_id, std::move(state));
    ++next_session_number_;
  }
}

SampleRef ReviewService::make_ref(const std::filesystem::path& dataset,
                                  std::size_t n, std::uint64_t seed) const {
  std::error_code ec;
  auto canonical = std::filesystem::weakly_canonical(dataset, ec);
  return {(ec ? dataset : canonical).string(), n, seed};
}

const std::vector<MergedQuestion>& ReviewService::dataset_locked(
    const std::string& path) {
  auto it = datasets_.find(path);
  if (it != datasets_.end()) return it->second;
  if (!std::filesystem::exists(path)) {
    throw not_found("dataset_not_found", "dataset " + path + " does not exist");
  }
  return datasets_.emplace(path, load_merged(path)).first->second;
}

std::vector<MergedQuestion> ReviewService::sample_locked(const SampleRef& ref) {
  const auto& dataset = dataset_locked(ref.dataset);
  if (ref.n > dataset.size()) {
    throw ServiceError(400, "sample_too_large",
                       "requested " + std::to_string(ref.n) +
                           " questions but dataset holds " +
                           std::to_string(dataset.size()));
  }
  return sample_questions(dataset, ref.n, ref.seed);
}

ReviewService::SessionState& ReviewService::find_locked(
    const std::string& session_id) {
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) {
    throw not_found("unknown_session", "no session " + session_id);
  }
  return it->second;
}

const ReviewService::SessionState& ReviewService::find_locked(
    const std::string& session_id) const {
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) {
    throw not_found("unknown_session", "no session " + session_id);
  }
  return it->second;
}

ReviewSession ReviewService::create_session(
    const std::string& annotator_id, const std::filesystem::path& dataset,
    std::size_t n, std::uint64_t seed) {
  if (annotator_id.empty()) throw bad_request("annotator_id is empty");
  std::lock_guard<std::mutex> lock(mutex_);
  for (const auto& [id, s] : sessions_) {
    if (s.info.annotator_id == annotator_id && !s.info.complete()) {
      throw conflict("session_open", "annotator " + annotator_id +
                                         " already has open session " + id);
    }
  }
  SessionState state;
  state.info.sample = make_ref(dataset, n, seed);
  state.items = sample_locked(state.info.sample);
  state.info.annotator_id = annotator_id;
  state.info.session_id = "s" + std::to_string(next_session_number_);
  while (state.info.cursor < state.items.size() &&
         scored_.contains(
             {annotator_id, state.items[state.info.cursor].id()})) {
    ++state.info.cursor;
  }

  ordered_json line;
  line["session_id"] = state.info.session_id;
  line["annotator_id"] = annotator_id;
  line["dataset"] = state.info.sample.dataset;
  line["n"] = n;
  line["seed"] = seed;
  append_line(sessions_path_, line.dump());
  ++next_session_number_;

  ReviewSession info = state.info;
  sessions_.emplace(info.session_id, std::move(state));
  return info;
}

ReviewSession ReviewService::session(const std::string& session_id) const {
  std::lock_guard<std::mutex> lock(mutex_);
  return find_locked(session_id).info;
}

NextItem ReviewService::next_item(const std::string& session_id) {
  std::lock_guard<std::mutex> lock(mutex_);
  const auto& s = find_locked(session_id);
  NextItem item;
  item.index = s.info.cursor;
  item.total = s.info.sample.n;
  if (!s.info.complete()) item.question = s.items[s.info.cursor];
  return item;
}

SubmitAck ReviewService::submit_score(const std::string& session_id,
                                      const std::string& question_id,
                                      const Rubric& rubric) {
  std::lock_guard<std::mutex> lock(mutex_);
  auto& s = find_locked(session_id);
  if (scored_.contains({s.info.annotator_id, question_id})) {
    throw conflict("duplicate_score", "annotator " + s.info.annotator_id +
                                          " already scored " + question_id);
  }
  if (s.info.complete()) {
    throw conflict("session_complete", "session " + session_id +
                                           " has no remaining questions");
  }
  const std::string expected = s.items[s.info.cursor].id();
  if (question_id != expected) {
    throw conflict("out_of_order", "expected question " + expected +
                                       ", got " + question_id);
  }
  store_.append(AnnotationRecord{s.info.annotator_id, question_id, rubric,
                                 utc_timestamp()});
  scored_.insert({s.info.annotator_id, question_id});
  ++s.info.cursor;
  return SubmitAck{question_id, s.info.cursor, s.info.complete()};
}

AgreementReport ReviewService::session_report(
    const std::filesystem::path& dataset, std::size_t n, std::uint64_t seed) {
  std::lock_guard<std::mutex> lock(mutex_);
  const SampleRef ref = make_ref(dataset, n, seed);
  std::set<std::string> annotators;
  std::set<std::string> question_ids;
  for (const auto& [id, s] : sessions_) {
    if (s.info.sample != ref) continue;
    annotators.insert(s.info.annotator_id);
    for (const auto& q : s.items) question_ids.insert(q.id());
  }
  if (annotators.empty()) {
    throw not_found("no_sessions", "no sessions on this sample");
  }
  std::vector<AnnotationRecord> records;
  for (auto& rec : store_.read_all()) {
    if (annotators.contains(rec.annotator_id) &&
        question_ids.contains(rec.question_id)) {
      records.push_back(std::move(rec));
    }
  }
  if (records.empty()) {
    throw conflict("no_scores", "no scores recorded on this sample yet");
  }
  return agreement_report(records);
}

// ---------------------------------------------------------------------------

class ReviewHttpServer::Impl {
 public:
  explicit Impl(ReviewService& service) : service_(service) { routes(); }

  httplib::Server server;

 private:
  template <typename Fn>
  httplib::Server::Handler guarded(Fn fn) {
    return [fn](const httplib::Request& req, httplib::Response& res) {
      try {
        fn(req, res);
      } catch (const ServiceError& e) {
        reply_error(res, e.status(), e.code(), e.what());
      } catch (const RubricError& e) {
        reply_error(res, 422, "invalid_rubric", e.what());
      } catch (const json::exception& e) {
        reply_error(res, 400, "bad_request", e.what());
      } catch (const UsageError& e) {
        reply_error(res, 400, "bad_request", e.what());
      } catch (const DataError& e) {
        reply_error(res, 422, "data_error", e.what());
      } catch (const std::exception& e) {
        reply_error(res, 500, "internal", e.what());
      }
    };
  }

  static void reply(httplib::Response& res, int status,
                    const ordered_json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  static void reply_error(httplib::Response& res, int status,
                          const std::string& code, const std::string& msg) {
    ordered_json body;
    body["code"] = code;
    body["message"] = msg;
    reply(res, status, body);
  }

  static json parse_body(const httplib::Request& req) {
    json body = json::parse(req.body);
    if (!body.is_object()) throw bad_request("request body must be an object");
    return body;
  }

  static Rubric rubric_from(const json& j) {
    if (!j.is_object()) throw bad_request("rubric must be an object");
    std::array<int, kDimensionCount> values{};
    for (std::size_t i = 0; i < kDimensionCount; ++i) {
      const char* key = dimension_key(kAllDimensions[i]);
      auto it = j.find(key);
      if (it == j.end() || !it->is_number_integer()) {
        throw bad_request(std::string("rubric.") + key +
                          " must be an integer");
      }
      const auto v = it->get<long long>();
      if (v < INT32_MIN || v > INT32_MAX) {
        throw RubricError(std::string("rubric ") + key + " is out of range");
      }
      values[i] = static_cast<int>(v);
    }
    return Rubric(values);
  }

  static std::uint64_t parse_u64(const std::string& text, const char* what) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(text, &used);
      if (used != text.size()) throw std::invalid_argument(what);
      return v;
    } catch (const std::exception&) {
      throw bad_request(std::string(what) + " must be a non-negative integer");
    }
  }

  void routes() {
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
    server.Options(R"(/.*)", [](const httplib::Request&,
                                httplib::Response& res) {
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
      res.status = 204;
    });

    server.Post("/sessions", guarded([this](const httplib::Request& req,
                                            httplib::Response& res) {
      const json body = parse_body(req);
      const auto annotator = body.at("annotator_id").get<std::string>();
      const auto dataset = body.at("dataset").get<std::string>();
      const auto n = body.at("n").get<std::size_t>();
      const auto seed = body.value("seed", std::uint64_t{0});
      reply(res, 201,
            session_json(service_.create_session(annotator, dataset, n, seed)));
    }));

    server.Get(R"(/sessions/([^/]+)/next)",
               guarded([this](const httplib::Request& req,
                              httplib::Response& res) {
                 const std::string id = req.matches[1];
                 const auto item = service_.next_item(id);
                 ordered_json body;
                 body["session_id"] = id;
                 body["done"] = !item.question.has_value();
                 body["index"] = item.index;
                 body["total"] = item.total;
                 if (item.question) body["question"] = question_json(*item.question);
                 reply(res, 200, body);
               }));

    server.Post(R"(/sessions/([^/]+)/scores)",
                guarded([this](const httplib::Request& req,
                               httplib::Response& res) {
                  const std::string id = req.matches[1];
                  const json body = parse_body(req);
                  const auto qid = body.at("question_id").get<std::string>();
                  const Rubric rubric = rubric_from(body.at("rubric"));
                  const auto ack = service_.submit_score(id, qid, rubric);
                  ordered_json out;
                  out["accepted"] = true;
                  out["question_id"] = ack.question_id;
                  out["cursor"] = ack.cursor;
                  out["status"] = ack.complete ? "complete" : "open";
                  reply(res, 200, out);
                }));

    server.Get("/reports", guarded([this](const httplib::Request& req,
                                          httplib::Response& res) {
      for (const char* key : {"dataset", "n", "seed"}) {
        if (!req.has_param(key)) {
          throw bad_request(std::string("missing query parameter ") + key);
        }
      }
      const auto report = service_.session_report(
          req.get_param_value("dataset"),
          static_cast<std::size_t>(parse_u64(req.get_param_value("n"), "n")),
          parse_u64(req.get_param_value("seed"), "seed"));
      res.status = 200;
      res.set_content(agreement_to_json(report), "application/json");
    }));
  }

  ReviewService& service_;
};

ReviewHttpServer::ReviewHttpServer(ReviewService& service)
    : impl_(std::make_unique<Impl>(service)) {}

ReviewHttpServer::~ReviewHttpServer() { stop(); }

bool ReviewHttpServer::set_static_dir(const std::filesystem::path& dir) {
  return impl_->server.set_mount_point("/", dir.string());
}

int ReviewHttpServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool ReviewHttpServer::listen() { return impl_->server.listen_after_bind(); }

void ReviewHttpServer::stop() {
  if (impl_) impl_->server.stop();
}

void ReviewHttpServer::wait_until_ready() const {
  impl_->server.wait_until_ready();
}

}  // namespace twohop
