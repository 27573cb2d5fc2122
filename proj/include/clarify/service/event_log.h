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

#ifndef CLARIFY_SERVICE_EVENT_LOG_H_
#define CLARIFY_SERVICE_EVENT_LOG_H_

#include <chrono>
#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "clarify/eval/simulate.h"
#include "json.hpp"

namespace clarify {

// Transcript event kinds, in the order the state machine admits them.
enum class EventType {
  kUserMessage,
  kLabelsShown,
  kLabelSelected,
  kNoneSelected,
  kIntentsShown,
  kIntentSelected,
  kTransferred,
};

const char* EventTypeName(EventType type);
EventType ParseEventType(const std::string& name);

enum class SessionStatus {
  kOpen,
  kLabelsShown,
  kAwaitingIntents,  // a selection is recorded, intents not yet shown
  kIntentsShown,
  kResolved,
  kTransferred,
};

const char* SessionStatusName(SessionStatus status);

// Applies one event; throws StateError when the state machine forbids it.
//   open -user_message-> open -labels_shown-> labels_shown
//   -label_selected|none_selected-> (awaiting) -intents_shown-> intents_shown
//   -intent_selected-> resolved | -transferred-> transferred
// The first event must be user_message.
SessionStatus ApplyEvent(SessionStatus status, EventType type, bool first);

struct SessionEvent {
  EventType type;
  nlohmann::json payload;
};

// Empty when the transcript is legal, else the reason.
std::string ValidateTranscript(const std::vector<SessionEvent>& events);

// Append-only JSON lines, one file per UTC day: events-YYYY-MM-DD.jsonl.
// Each line is {session, seq, time, type, ...payload}.
class EventLog {
 public:
  explicit EventLog(std::filesystem::path dir);

  void Append(const std::string& session, size_t seq,
              const SessionEvent& event,
              std::chrono::system_clock::time_point when =
                  std::chrono::system_clock::now());

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  std::mutex mu_;
};

std::string LogFileName(std::chrono::system_clock::time_point when);

struct ReplayResult {
  SimCounters counters;
  std::map<std::string, std::vector<SessionEvent>> sessions;
  // Sessions whose transcript breaks the state machine, with the reason.
  std::map<std::string, std::string> invalid;
};

// Reads every log file in `dir` in name order. Counters follow the service:
// t per labels_shown, c per label_selected, n per closed session, m per
// transfer. Throws ParseError on a malformed line.
ReplayResult ReplayEventLog(const std::filesystem::path& dir);

}  // namespace clarify

#endif  // CLARIFY_SERVICE_EVENT_LOG_H_
