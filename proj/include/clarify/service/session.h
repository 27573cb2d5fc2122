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

#ifndef CLARIFY_SERVICE_SESSION_H_
#define CLARIFY_SERVICE_SESSION_H_

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "clarify/eval/simulate.h"
#include "clarify/inventory/inventory.h"
#include "clarify/policy/recommender.h"
#include "clarify/service/event_log.h"
#include "clarify/service/retrieval.h"
#include "json.hpp"

namespace clarify {

struct ServiceConfig {
  int labels = kLabelsShown;
  int intents = kIntentsShown;
  // Clarification rounds allowed before the session must close. The state
  // machine admits one round per session, so values above 1 only matter once
  // multi-round sessions exist.
  int max_rounds = 3;
  Bm25Params bm25;
  // Empty disables the event log.
  std::filesystem::path log_dir;
  std::string checkpoint_id;

  void Validate() const;
  nlohmann::json ToJson() const;
  static ServiceConfig FromJson(const nlohmann::json& j);
};

struct Session {
  std::string id;
  std::string query;
  std::string checkpoint_id;
  SessionStatus status = SessionStatus::kOpen;
  int round = 0;
  std::vector<LabelId> labels;
  std::vector<IntentId> intents;
  std::vector<SessionEvent> transcript;

  bool closed() const {
    return status == SessionStatus::kResolved ||
           status == SessionStatus::kTransferred;
  }
  nlohmann::json ToJson() const;
};

struct StartResult {
  std::string session_id;
  std::vector<LabelId> labels;
};

// The two-stage pipeline: labels for a query, then intents for the query
// refined by the chosen label. Every query is clarified; there is no
// ambiguity classifier in front of the service.
class ClarificationService {
 public:
  // Restores the counters from log_dir when it holds earlier logs.
  ClarificationService(std::shared_ptr<const Inventory> inv,
                       std::shared_ptr<const Recommender> recommender,
                       ServiceConfig cfg = {});

  // Throws ValidationError on an empty query.
  StartResult StartSession(const std::string& query);

  // nullopt is none of the above: retrieval on the raw query. Throws
  // NotFoundError, StateError on a repeated selection, ValidationError on a
  // label that was not shown.
  std::vector<IntentId> SelectLabel(const std::string& id,
                                    std::optional<LabelId> choice);

  // nullopt transfers to a human agent. Throws NotFoundError, StateError
  // before intents are shown or after closing, ValidationError on an intent
  // that was not shown.
  SessionStatus Resolve(const std::string& id, std::optional<IntentId> intent);

  Session Get(const std::string& id) const;
  SimCounters Metrics() const;

  const Inventory& inventory() const { return *inv_; }
  const Bm25Index& index() const { return index_; }
  const ServiceConfig& config() const { return cfg_; }

 private:
  struct Entry {
    std::mutex mu;
    Session session;
  };

  Entry& Find(const std::string& id) const;
  void Record(Session& session, EventType type, nlohmann::json payload);

  std::shared_ptr<const Inventory> inv_;
  std::shared_ptr<const Recommender> recommender_;
  ServiceConfig cfg_;
  Bm25Index index_;
  std::unique_ptr<EventLog> log_;

  mutable std::shared_mutex table_mu_;
  std::map<std::string, std::unique_ptr<Entry>> sessions_;
  std::atomic<uint64_t> next_id_{1};

  std::atomic<size_t> t_{0};
  std::atomic<size_t> c_{0};
  std::atomic<size_t> n_{0};
  std::atomic<size_t> m_{0};
};

}  // namespace clarify

#endif  // CLARIFY_SERVICE_SESSION_H_
