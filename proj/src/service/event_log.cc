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

#include "clarify/service/event_log.h"

#include <algorithm>
#include <array>
#include <ctime>
#include <fstream>

#include <fmt/format.h>

#include "clarify/common/errors.h"

namespace clarify {

namespace {

constexpr std::array<const char*, 7> kEventNames = {
    "user_message",  "labels_shown",    "label_selected", "none_selected",
    "intents_shown", "intent_selected", "transferred"};

std::tm UtcTime(std::chrono::system_clock::time_point when) {
  const std::time_t t = std::chrono::system_clock::to_time_t(when);
  std::tm tm{};
  gmtime_r(&t, &tm);
  return tm;
}

}  // namespace

const char* EventTypeName(EventType type) {
  return kEventNames[static_cast<size_t>(type)];
}

EventType ParseEventType(const std::string& name) {
  for (size_t i = 0; i < kEventNames.size(); ++i) {
    if (name == kEventNames[i]) return static_cast<EventType>(i);
  }
  throw ParseError("unknown event type '" + name + "'");
}

const char* SessionStatusName(SessionStatus status) {
  switch (status) {
    case SessionStatus::kOpen:
      return "open";
    case SessionStatus::kLabelsShown:
      return "labels_shown";
    case SessionStatus::kAwaitingIntents:
      return "label_chosen";
    case SessionStatus::kIntentsShown:
      return "intents_shown";
    case SessionStatus::kResolved:
      return "resolved";
    case SessionStatus::kTransferred:
      return "transferred";
  }
  return "unknown";
}

SessionStatus ApplyEvent(SessionStatus status, EventType type, bool first) {
  if (first != (type == EventType::kUserMessage)) {
    throw StateError("a transcript starts with exactly one user message");
  }
  auto fail = [&]() -> SessionStatus {
    throw StateError(fmt::format("event {} not allowed in state {}",
                                 EventTypeName(type),
                                 SessionStatusName(status)));
  };
  switch (type) {
    case EventType::kUserMessage:
      return SessionStatus::kOpen;
    case EventType::kLabelsShown:
      return status == SessionStatus::kOpen ? SessionStatus::kLabelsShown
                                            : fail();
    case EventType::kLabelSelected:
    case EventType::kNoneSelected:
      return status == SessionStatus::kLabelsShown
                 ? SessionStatus::kAwaitingIntents
                 : fail();
    case EventType::kIntentsShown:
      return status == SessionStatus::kAwaitingIntents
                 ? SessionStatus::kIntentsShown
                 : fail();
    case EventType::kIntentSelected:
      return status == SessionStatus::kIntentsShown ? SessionStatus::kResolved
                                                    : fail();
    case EventType::kTransferred:
      return status == SessionStatus::kIntentsShown
                 ? SessionStatus::kTransferred
                 : fail();
  }
  return fail();
}

std::string ValidateTranscript(const std::vector<SessionEvent>& events) {
  if (events.empty()) return "empty transcript";
  SessionStatus status = SessionStatus::kOpen;
  for (size_t i = 0; i < events.size(); ++i) {
    try {
      status = ApplyEvent(status, events[i].type, i == 0);
    } catch (const StateError& e) {
      return fmt::format("event {}: {}", i, e.what());
    }
  }
  return "";
}

EventLog::EventLog(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

std::string LogFileName(std::chrono::system_clock::time_point when) {
  const std::tm tm = UtcTime(when);
  return fmt::format("events-{:04d}-{:02d}-{:02d}.jsonl", tm.tm_year + 1900,
                     tm.tm_mon + 1, tm.tm_mday);
}

void EventLog::Append(const std::string& session, size_t seq,
                      const SessionEvent& event,
                      std::chrono::system_clock::time_point when) {
  const std::tm tm = UtcTime(when);
  nlohmann::json line = {
      {"session", session},
      {"seq", seq},
      {"time", fmt::format("{:04d}-{:02d}-{:02d}T{:02d}:{:02d}:{:02d}Z",
                           tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                           tm.tm_hour, tm.tm_min, tm.tm_sec)},
      {"type", EventTypeName(event.type)}};
  if (event.payload.is_object()) {
    for (const auto& [key, value] : event.payload.items()) line[key] = value;
  }
  std::lock_guard<std::mutex> lock(mu_);
  std::ofstream out(dir_ / LogFileName(when), std::ios::app);
  if (!out) throw Error("cannot open event log in " + dir_.string());
  out << line.dump() << '\n';
  out.flush();
}

ReplayResult ReplayEventLog(const std::filesystem::path& dir) {
  ReplayResult result;
  if (!std::filesystem::exists(dir)) return result;
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.starts_with("events-") && name.ends_with(".jsonl")) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());

  std::map<std::string, std::vector<std::pair<size_t, SessionEvent>>> raw;
  for (const auto& path : files) {
    std::ifstream in(path);
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      try {
        nlohmann::json j = nlohmann::json::parse(line);
        const std::string session = j.at("session").get<std::string>();
        const size_t seq = j.at("seq").get<size_t>();
        SessionEvent event{ParseEventType(j.at("type").get<std::string>()),
                           j};
        for (const char* key : {"session", "seq", "time", "type"}) {
          event.payload.erase(key);
        }
        raw[session].emplace_back(seq, std::move(event));
      } catch (const nlohmann::json::exception& e) {
        throw ParseError(fmt::format("{}:{}: {}", path.string(), line_no,
                                     e.what()));
      }
    }
  }

  for (auto& [session, entries] : raw) {
    std::stable_sort(entries.begin(), entries.end(),
                     [](const auto& a, const auto& b) {
                       return a.first < b.first;
                     });
    std::vector<SessionEvent> events;
    for (auto& [seq, event] : entries) {
      switch (event.type) {
        case EventType::kLabelsShown:
          ++result.counters.t;
          break;
        case EventType::kLabelSelected:
          ++result.counters.c;
          break;
        case EventType::kIntentSelected:
          ++result.counters.n;
          break;
        case EventType::kTransferred:
          ++result.counters.n;
          ++result.counters.m;
          break;
        default:
          break;
      }
      events.push_back(std::move(event));
    }
    std::string reason = ValidateTranscript(events);
    if (!reason.empty()) result.invalid.emplace(session, std::move(reason));
    result.sessions.emplace(session, std::move(events));
  }
  return result;
}

}  // namespace clarify
