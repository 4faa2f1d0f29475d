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

#include <algorithm>

#include "json.hpp"
#include "twohop/judge.hpp"

namespace twohop {

HttpEmbeddingProvider::HttpEmbeddingProvider(JudgeEndpointConfig cfg)
    : cfg_(std::move(cfg)), transport_(make_http_transport(cfg_)) {
  cfg_.validate();
}

HttpEmbeddingProvider::HttpEmbeddingProvider(
    JudgeEndpointConfig cfg, std::unique_ptr<HttpTransport> transport)
    : cfg_(std::move(cfg)), transport_(std::move(transport)) {
  cfg_.validate();
}

Vector HttpEmbeddingProvider::embed_sentence(const std::string& text) {
  return embed({text}).front();
}

std::vector<Vector> HttpEmbeddingProvider::embed_tokens(
    const TokenSequence& tokens) {
  if (tokens.empty()) return {};
  return embed(tokens);
}

std::vector<Vector> HttpEmbeddingProvider::embed(
    const std::vector<std::string>& inputs) {
  using nlohmann::json;
  nlohmann::ordered_json req;
  req["model"] = cfg_.embedding_model;
  req["input"] = inputs;
  const std::string body = post_with_retry(
      *transport_, cfg_, cfg_.embedding_route, req.dump(), auth_headers(cfg_));
  try {
    const json res = json::parse(body);
    const auto& data = res.at("data");
    if (!data.is_array() || data.size() != inputs.size()) {
      throw RemoteError("embedding response holds " +
                        std::to_string(data.is_array() ? data.size() : 0) +
                        " vectors for " + std::to_string(inputs.size()) +
                        " inputs");
    }
    std::vector<Vector> out(inputs.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
      const std::size_t slot = data[i].value("index", i);
      if (slot >= out.size()) throw RemoteError("embedding index out of range");
      out[slot] = data[i].at("embedding").get<Vector>();
    }
    return out;
  } catch (const json::exception& e) {
    throw RemoteError(std::string("unexpected embedding response: ") +
                      e.what());
  }
}

}  // namespace twohop
