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

#include "clarify/service/session.h"

#include <algorithm>

#include <fmt/format.h>

#include "clarify/common/errors.h"

namespace clarify {

void ServiceConfig::Validate() const {
  if (labels < 1) throw ConfigError("service needs labels >= 1");
  if (intents < 1) throw ConfigError("service needs intents >= 1");
  if (max_rounds < 1) throw ConfigError("service needs max_rounds >= 1");
}

nlohmann::json ServiceConfig::ToJson() const {
  return {{"labels", labels},
          {"intents", intents},
          {"max_rounds", max_rounds},
          {"bm25_k1", bm25.k1},
          {"bm25_b", bm25.b},
          {"log_dir", log_dir.string()},
          {"checkpoint_id", checkpoint_id}};
}

ServiceConfig ServiceConfig::FromJson(const nlohmann::json& j) {
  ServiceConfig cfg;
  cfg.labels = j.value("labels", cfg.labels);
  cfg.intents = j.value("intents", cfg.intents);
  cfg.max_rounds = j.value("max_rounds", cfg.max_rounds);
  cfg.bm25.k1 = j.value("bm25_k1", cfg.bm25.k1);
  cfg.bm25.b = j.value("bm25_b", cfg.bm25.b);
  cfg.log_dir = j.value("log_dir", std::string());
  cfg.checkpoint_id = j.value("checkpoint_id", cfg.checkpoint_id);
  cfg.Validate();
  return cfg;
}

nlohmann::json Session::ToJson() const {
  nlohmann::json j = {{"session_id", id},
                      {"query", query},
                      {"checkpoint_id", checkpoint_id},
                      {"status", SessionStatusName(status)},
                      {"round", round},
                      {"transcript", nlohmann::json::array()}};
  for (const SessionEvent& e : transcript) {
    nlohmann::json entry = e.payload.is_object() ? e.payload
                                                 : nlohmann::json::object();
    entry["type"] = EventTypeName(e.type);
    j["transcript"].push_back(std::move(entry));
  }
  return j;
}

ClarificationService::ClarificationService(
    std::shared_ptr<const Inventory> inv,
    std::shared_ptr<const Recommender> recommender, ServiceConfig cfg)
    : inv_(std::move(inv)),
      recommender_(std::move(recommender)),
      cfg_(std::move(cfg)),
      index_(inv_, cfg_.bm25) {
  cfg_.Validate();
  if (!recommender_) throw PreconditionError("service needs a recommender");
  if (cfg_.log_dir.empty()) return;
  const ReplayResult replay = ReplayEventLog(cfg_.log_dir);
  t_ = replay.counters.t;
  c_ = replay.counters.c;
  n_ = replay.counters.n;
  m_ = replay.counters.m;
  uint64_t last = 0;
  for (const auto& [id, events] : replay.sessions) {
    unsigned long long value = 0;
    if (std::sscanf(id.c_str(), "s%llu", &value) == 1) {
      last = std::max<uint64_t>(last, value);
    }
  }
  next_id_ = last + 1;
  log_ = std::make_unique<EventLog>(cfg_.log_dir);
}

ClarificationService::Entry& ClarificationService::Find(
    const std::string& id) const {
  std::shared_lock lock(table_mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw NotFoundError("unknown session '" + id + "'");
  return *it->second;
}

void ClarificationService::Record(Session& session, EventType type,
                                  nlohmann::json payload) {
  session.status =
      ApplyEvent(session.status, type, session.transcript.empty());
  session.transcript.push_back({type, std::move(payload)});
  if (log_) {
    log_->Append(session.id, session.transcript.size() - 1,
                 session.transcript.back());
  }
}

StartResult ClarificationService::StartSession(const std::string& query) {
  if (Tokenize(query, TokenizerScheme::kWhitespace).empty()) {
    throw ValidationError("query text is empty");
  }
  auto entry = std::make_unique<Entry>();
  Session& session = entry->session;
  session.id = fmt::format("s{:08d}", next_id_.fetch_add(1));
  session.query = query;
  session.checkpoint_id = cfg_.checkpoint_id;
  session.labels = recommender_->Recommend(query, cfg_.labels).labels();

  nlohmann::json shown = nlohmann::json::array();
  for (LabelId x : session.labels) shown.push_back(x.value());
  Record(session, EventType::kUserMessage, {{"text", query}});
  Record(session, EventType::kLabelsShown, {{"labels", shown}});
  ++t_;

  StartResult out{session.id, session.labels};
  std::unique_lock lock(table_mu_);
  sessions_.emplace(out.session_id, std::move(entry));
  return out;
}

std::vector<IntentId> ClarificationService::SelectLabel(
    const std::string& id, std::optional<LabelId> choice) {
  Entry& entry = Find(id);
  std::lock_guard<std::mutex> lock(entry.mu);
  Session& session = entry.session;
  if (session.status != SessionStatus::kLabelsShown) {
    throw StateError(fmt::format("session {} is {}, not awaiting a label",
                                 id, SessionStatusName(session.status)));
  }
  if (session.round >= cfg_.max_rounds) {
    throw StateError("session " + id + " used all clarification rounds");
  }
  std::string retrieval_query = session.query;
  if (choice) {
    if (std::find(session.labels.begin(), session.labels.end(), *choice) ==
        session.labels.end()) {
      throw ValidationError(
          fmt::format("label {} was not shown in session {}", choice->value(),
                      id));
    }
    retrieval_query = ConcatenateQuery(session.query, inv_->label(*choice).phrase);
    Record(session, EventType::kLabelSelected, {{"label", choice->value()}});
    ++c_;
  } else {
    Record(session, EventType::kNoneSelected, nlohmann::json::object());
  }
  ++session.round;

  session.intents.clear();
  nlohmann::json shown = nlohmann::json::array();
  for (const ScoredIntent& s :
       index_.Retrieve(retrieval_query, static_cast<size_t>(cfg_.intents))
           .intents) {
    session.intents.push_back(s.id);
    shown.push_back(s.id.value());
  }
  Record(session, EventType::kIntentsShown,
         {{"intents", shown}, {"retrieval_query", retrieval_query}});
  return session.intents;
}

SessionStatus ClarificationService::Resolve(const std::string& id,
                                            std::optional<IntentId> intent) {
  Entry& entry = Find(id);
  std::lock_guard<std::mutex> lock(entry.mu);
  Session& session = entry.session;
  if (session.status != SessionStatus::kIntentsShown) {
    throw StateError(fmt::format("session {} is {}, cannot resolve", id,
                                 SessionStatusName(session.status)));
  }
  if (intent) {
    if (std::find(session.intents.begin(), session.intents.end(), *intent) ==
        session.intents.end()) {
      throw ValidationError(fmt::format(
          "intent {} was not shown in session {}", intent->value(), id));
    }
    Record(session, EventType::kIntentSelected, {{"intent", intent->value()}});
  } else {
    Record(session, EventType::kTransferred, nlohmann::json::object());
    ++m_;
  }
  ++n_;
  return session.status;
}

Session ClarificationService::Get(const std::string& id) const {
  Entry& entry = Find(id);
  std::lock_guard<std::mutex> lock(entry.mu);
  return entry.session;
}

SimCounters ClarificationService::Metrics() const {
  SimCounters out;
  out.t = t_.load();
  out.c = c_.load();
  out.n = n_.load();
  out.m = m_.load();
  return out;
}

}  // namespace clarify
