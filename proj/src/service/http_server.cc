// Copyright 2026 The Authors.
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

#include "clarify/service/http_server.h"

#include <spdlog/spdlog.h>

#include "clarify/common/errors.h"
#include "httplib.h"

namespace clarify {

namespace {

using nlohmann::json;

void Reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

json ParseBody(const httplib::Request& req) {
  json body = json::parse(req.body, nullptr, /*allow_exceptions=*/false);
  if (body.is_discarded() || !body.is_object()) {
    throw ValidationError("request body must be a JSON object");
  }
  return body;
}

bool IsTrue(const json& body, const char* key) {
  auto it = body.find(key);
  return it != body.end() && it->is_boolean() && it->get<bool>();
}

// Runs a handler and maps service errors onto HTTP status codes.
template <typename Fn>
httplib::Server::Handler Guard(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const NotFoundError& e) {
      Reply(res, 404, {{"error", e.what()}});
    } catch (const StateError& e) {
      Reply(res, 409, {{"error", e.what()}});
    } catch (const Error& e) {
      Reply(res, 400, {{"error", e.what()}});
    } catch (const json::exception& e) {
      Reply(res, 400, {{"error", e.what()}});
    }
  };
}

}  // namespace

HttpServer::HttpServer(ClarificationService& service, HttpConfig cfg)
    : service_(service),
      cfg_(std::move(cfg)),
      server_(std::make_unique<httplib::Server>()) {
  Routes();
}

HttpServer::~HttpServer() { Stop(); }

void HttpServer::Routes() {
  httplib::Server& s = *server_;
  const std::string origin = cfg_.cors_origin;
  s.set_default_headers({{"Access-Control-Allow-Origin", origin},
                         {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                         {"Access-Control-Allow-Headers", "Content-Type"}});
  s.Options(R"(/v1/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
  });

  s.Post("/v1/session", Guard([this](const httplib::Request& req,
                                     httplib::Response& res) {
           const json body = ParseBody(req);
           if (!body.contains("query") || !body["query"].is_string()) {
             throw ValidationError("body needs a string 'query'");
           }
           const StartResult started =
               service_.StartSession(body["query"].get<std::string>());
           json labels = json::array();
           for (LabelId x : started.labels) {
             labels.push_back({{"id", x.value()},
                               {"phrase", service_.inventory().label(x).phrase}});
           }
           Reply(res, 200,
                 {{"session_id", started.session_id},
                  {"labels", labels},
                  {"none_option", true}});
         }));

  s.Post(R"(/v1/session/([^/]+)/label)",
         Guard([this](const httplib::Request& req, httplib::Response& res) {
           const json body = ParseBody(req);
           std::optional<LabelId> choice;
           if (IsTrue(body, "none")) {
             if (body.contains("label_id")) {
               throw ValidationError("give either 'label_id' or 'none'");
             }
           } else if (body.contains("label_id") &&
                      body["label_id"].is_number_integer()) {
             choice = LabelId(body["label_id"].get<int32_t>());
           } else {
             throw ValidationError("body needs an integer 'label_id' or none");
           }
           const std::vector<IntentId> intents =
               service_.SelectLabel(req.matches[1], choice);
           json out = json::array();
           for (IntentId s : intents) {
             const Intent& intent = service_.inventory().intent(s);
             out.push_back({{"id", s.value()},
                            {"text", intent.text},
                            {"answer", intent.answer}});
           }
           Reply(res, 200, {{"intents", out}});
         }));

  s.Post(R"(/v1/session/([^/]+)/resolve)",
         Guard([this](const httplib::Request& req, httplib::Response& res) {
           const json body = ParseBody(req);
           std::optional<IntentId> intent;
           if (IsTrue(body, "transfer")) {
             if (body.contains("intent_id")) {
               throw ValidationError("give either 'intent_id' or 'transfer'");
             }
           } else if (body.contains("intent_id") &&
                      body["intent_id"].is_number_integer()) {
             intent = IntentId(body["intent_id"].get<int32_t>());
           } else {
             throw ValidationError(
                 "body needs an integer 'intent_id' or transfer");
           }
           const SessionStatus status =
               service_.Resolve(req.matches[1], intent);
           Reply(res, 200, {{"status", SessionStatusName(status)}});
         }));

  s.Get(R"(/v1/session/([^/]+))",
        Guard([this](const httplib::Request& req, httplib::Response& res) {
          Reply(res, 200, service_.Get(req.matches[1]).ToJson());
        }));

  s.Get("/v1/metrics", Guard([this](const httplib::Request&,
                                    httplib::Response& res) {
          json out = service_.Metrics().ToJson();
          out["note"] =
              "every query is clarified; no ambiguity classifier routes "
              "queries, so t counts all sessions";
          Reply(res, 200, out);
        }));

  s.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) {
      Reply(res, res.status, {{"error", httplib::status_message(res.status)}});
    }
  });
}

int HttpServer::Bind() {
  int port = cfg_.port;
  if (port == 0) {
    port = server_->bind_to_any_port(cfg_.host);
  } else if (!server_->bind_to_port(cfg_.host, port)) {
    port = -1;
  }
  if (port < 0) {
    throw Error("cannot bind " + cfg_.host + ":" + std::to_string(cfg_.port));
  }
  spdlog::info("serving on http://{}:{}", cfg_.host, port);
  return port;
}

void HttpServer::Serve() { server_->listen_after_bind(); }

void HttpServer::WaitUntilReady() const { server_->wait_until_ready(); }

void HttpServer::Stop() {
  if (server_ && server_->is_running()) server_->stop();
}

}  // namespace clarify
