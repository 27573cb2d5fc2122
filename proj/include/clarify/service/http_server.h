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

#ifndef CLARIFY_SERVICE_HTTP_SERVER_H_
#define CLARIFY_SERVICE_HTTP_SERVER_H_

#include <memory>
#include <string>

#include "clarify/service/session.h"

namespace httplib {
class Server;
}

namespace clarify {

struct HttpConfig {
  std::string host = "127.0.0.1";
  // 0 binds an ephemeral port.
  int port = 8080;
  std::string cors_origin = "*";
};

// JSON API over a ClarificationService:
//   POST /v1/session               {query}
//   POST /v1/session/{id}/label    {label_id} | {none: true}
//   POST /v1/session/{id}/resolve  {intent_id} | {transfer: true}
//   GET  /v1/session/{id}
//   GET  /v1/metrics
// Errors are {error} with 400 (bad request), 404 (unknown session) or
// 409 (not legal in the session's state).
class HttpServer {
 public:
  HttpServer(ClarificationService& service, HttpConfig cfg = {});
  ~HttpServer();

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Binds the socket and returns the bound port. Throws Error on failure.
  int Bind();
  // Serves until Stop(); call Bind() first.
  void Serve();
  // Blocks until Serve() accepts connections.
  void WaitUntilReady() const;
  void Stop();

 private:
  void Routes();

  ClarificationService& service_;
  HttpConfig cfg_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace clarify

#endif  // CLARIFY_SERVICE_HTTP_SERVER_H_
