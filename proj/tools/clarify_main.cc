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

// clarify: corpus generation, training, evaluation and the live service.

#include <spdlog/spdlog.h>

#include <csignal>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "clarify/common/errors.h"
#include "clarify/config/config.h"
#include "clarify/eval/offline.h"
#include "clarify/eval/simulate.h"
#include "clarify/inventory/generator.h"
#include "clarify/policy/checkpoint.h"
#include "clarify/search/search.h"
#include "clarify/service/http_server.h"
#include "clarify/service/session.h"

namespace clarify {
namespace {

ExperimentConfig LoadConfig(const std::string& path,
                            std::optional<uint64_t> seed) {
  ExperimentConfig cfg =
      path.empty() ? ExperimentConfig() : ExperimentConfig::Load(path);
  return seed ? cfg.WithSeed(*seed) : cfg;
}

void WriteText(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  WriteFileBytes(path, text);
}

struct NamedRecommender {
  std::string name;
  std::unique_ptr<Recommender> recommender;
};

// Method name is the checkpoint's file stem.
std::vector<NamedRecommender> LoadRecommenders(
    const std::vector<std::string>& paths,
    const std::shared_ptr<const Inventory>& inv) {
  std::vector<NamedRecommender> out;
  for (const std::string& path : paths) {
    const std::string name = std::filesystem::path(path).stem().string();
    out.push_back({name, MakeRecommender(LoadCheckpoint(path), inv, name)});
  }
  return out;
}

std::vector<const Recommender*> Pointers(
    const std::vector<NamedRecommender>& methods) {
  std::vector<const Recommender*> out;
  for (const NamedRecommender& m : methods) out.push_back(m.recommender.get());
  return out;
}

int RunGen(const std::string& config, std::optional<uint64_t> seed,
           const std::string& out) {
  const ExperimentConfig cfg = LoadConfig(config, seed);
  const Benchmark bench = GenerateBenchmark(cfg.generator, cfg.seed);
  SaveCorpus(bench.corpus, out);
  spdlog::info("wrote {} intents, {} labels, {} queries to {}",
               bench.corpus.inventory->num_intents(),
               bench.corpus.inventory->num_labels(),
               bench.corpus.queries.size(), out);
  return 0;
}

int RunSelfplay(const std::string& corpus_dir, const std::string& config,
                std::optional<uint64_t> seed, const std::string& out) {
  const ExperimentConfig cfg = LoadConfig(config, seed);
  const Corpus corpus = LoadCorpus(corpus_dir);
  std::ofstream file(out);
  if (!file) throw Error("cannot write " + out);
  size_t pairs = 0;
  size_t skipped = 0;
  const std::vector<const AnnotatedQuery*> train = corpus.Train();
  for (size_t i = 0; i < train.size(); ++i) {
    Rng rng = MakeRng(MixSeed(cfg.search.seed, cfg.train.seed), i);
    try {
      const Episode episode = SelfPlayEpisode(*corpus.inventory, *train[i],
                                              cfg.search, cfg.reward, rng);
      for (const TrainingPair& pair : episode.pairs) {
        file << pair.ToJson().dump() << '\n';
        ++pairs;
      }
    } catch (const NoCandidatesError&) {
      ++skipped;
    }
  }
  spdlog::info("wrote {} pairs from {} queries ({} without candidates)",
               pairs, train.size(), skipped);
  return 0;
}

int RunTrain(const std::string& corpus_dir, const std::string& config,
             std::optional<uint64_t> seed, const std::string& method,
             const std::string& out, const std::string& log_path) {
  const ExperimentConfig cfg = LoadConfig(config, seed);
  const Corpus corpus = LoadCorpus(corpus_dir);
  const TrainedMethod trained = TrainMethod(method, corpus, cfg);
  WriteFileBytes(out, trained.checkpoint);
  if (!log_path.empty()) WriteText(log_path, trained.log.ToJson().dump(2));
  spdlog::info("wrote {} checkpoint to {}", method, out);
  return 0;
}

int RunRecommend(const std::string& ckpt, const std::string& inventory,
                 const std::string& query, int n) {
  auto inv = std::make_shared<const Inventory>(LoadInventory(inventory));
  const auto rec = MakeRecommender(LoadCheckpoint(ckpt), inv, "model");
  const Trajectory tau = rec->Recommend(query, n);
  nlohmann::json out = nlohmann::json::array();
  for (LabelId x : tau.labels()) {
    out.push_back({{"id", x.value()}, {"phrase", inv->label(x).phrase}});
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

int RunEval(const std::vector<std::string>& ckpts, const std::string& corpus_dir,
            const std::string& out, const std::string& table, int threads) {
  const Corpus corpus = LoadCorpus(corpus_dir);
  const auto methods = LoadRecommenders(ckpts, corpus.inventory);
  OfflineEvalConfig cfg;
  cfg.threads = threads;
  const OfflineReport report = RunOfflineEval(corpus, Pointers(methods), cfg);
  WriteText(out, report.ToJson().dump(2) + "\n");
  WriteText(table, report.ToText());
  return 0;
}

int RunSimulate(const std::vector<std::string>& ckpts,
                const std::string& corpus_dir, size_t sessions,
                const std::string& click_model, double p, uint64_t seed,
                const std::string& out, int threads) {
  const Corpus corpus = LoadCorpus(corpus_dir);
  const auto methods = LoadRecommenders(ckpts, corpus.inventory);
  const Bm25Index index(corpus.inventory);
  const SimReport report =
      SimulateOnline(corpus, index, Pointers(methods),
                     ClickModel::Parse(click_model, p), sessions, seed, threads);
  if (!out.empty()) WriteText(out, report.ToJson().dump(2) + "\n");
  std::cout << report.ToText();
  return 0;
}

HttpServer* g_server = nullptr;

void StopServer(int) {
  if (g_server != nullptr) g_server->Stop();
}

std::unique_ptr<ClarificationService> MakeService(const std::string& ckpt,
                                                  const std::string& inventory,
                                                  const std::string& config,
                                                  const std::string& log_dir) {
  auto inv = std::make_shared<const Inventory>(LoadInventory(inventory));
  const std::string bytes = ReadFileBytes(ckpt);
  const Checkpoint checkpoint = DecodeCheckpoint(bytes);
  std::shared_ptr<const Recommender> rec =
      MakeRecommender(checkpoint, inv, checkpoint.method());
  ServiceConfig cfg = LoadConfig(config, std::nullopt).service;
  if (!log_dir.empty()) cfg.log_dir = log_dir;
  cfg.checkpoint_id = HexHash(Fnv1a(std::span<const uint8_t>(
      reinterpret_cast<const uint8_t*>(bytes.data()), bytes.size())));
  return std::make_unique<ClarificationService>(inv, rec, cfg);
}

int RunServe(const std::string& ckpt, const std::string& inventory,
             const std::string& config, const std::string& log_dir,
             const std::string& host, int port) {
  auto service = MakeService(ckpt, inventory, config, log_dir);
  HttpServer server(*service, {host, port, "*"});
  server.Bind();
  g_server = &server;
  std::signal(SIGINT, StopServer);
  std::signal(SIGTERM, StopServer);
  server.Serve();
  g_server = nullptr;
  return 0;
}

// Reads one choice; returns -1 for none, -2 on end of input.
int ReadChoice(size_t count, const char* prompt) {
  std::string line;
  while (true) {
    std::cout << prompt << std::flush;
    if (!std::getline(std::cin, line)) return -2;
    try {
      const int k = std::stoi(line);
      if (k >= 0 && static_cast<size_t>(k) <= count) return k - 1;
    } catch (const std::exception&) {
    }
    std::cout << "enter a number from 0 to " << count << "\n";
  }
}

int RunDemo(const std::string& ckpt, const std::string& inventory,
            const std::string& config) {
  auto service = MakeService(ckpt, inventory, config, "");
  const Inventory& inv = service->inventory();
  std::string query;
  while (true) {
    std::cout << "\nquestion (empty line quits)> " << std::flush;
    if (!std::getline(std::cin, query) || query.empty()) break;
    StartResult started;
    try {
      started = service->StartSession(query);
    } catch (const ValidationError& e) {
      std::cout << e.what() << "\n";
      continue;
    }
    for (size_t i = 0; i < started.labels.size(); ++i) {
      std::cout << "  " << i + 1 << ". " << inv.label(started.labels[i]).phrase
                << "\n";
    }
    std::cout << "  0. none of the above\n";
    const int label = ReadChoice(started.labels.size(), "label> ");
    if (label == -2) break;
    std::optional<LabelId> choice;
    if (label >= 0) choice = started.labels[label];
    const std::vector<IntentId> intents =
        service->SelectLabel(started.session_id, choice);
    for (size_t i = 0; i < intents.size(); ++i) {
      std::cout << "  " << i + 1 << ". " << inv.intent(intents[i]).text << "\n";
    }
    std::cout << "  0. transfer to a human agent\n";
    const int pick = ReadChoice(intents.size(), "intent> ");
    if (pick == -2) break;
    std::optional<IntentId> intent;
    if (pick >= 0) {
      intent = intents[pick];
      std::cout << inv.intent(*intent).answer << "\n";
    }
    service->Resolve(started.session_id, intent);
    const SimCounters k = service->Metrics();
    std::cout << "CTR " << k.ctr() << "  THA " << k.tha() << "\n";
  }
  return 0;
}

}  // namespace
}  // namespace clarify

int main(int argc, char** argv) {
  using namespace clarify;
  CLI::App app{"Label-based clarification of ambiguous questions"};
  app.require_subcommand(1);
  std::string level = "info";
  app.add_option("--log-level", level, "trace|debug|info|warn|error");

  std::string config, corpus, out, ckpt, inventory, method = "rl", log_path;
  std::vector<std::string> ckpts;
  std::optional<uint64_t> seed;
  int threads = 1;

  auto* gen = app.add_subcommand("gen", "Generate a synthetic benchmark corpus");
  gen->add_option("--config", config);
  gen->add_option("--seed", seed);
  gen->add_option("--out", out)->required();

  auto* selfplay = app.add_subcommand("selfplay", "Emit self-play training pairs");
  selfplay->add_option("--corpus", corpus)->required();
  selfplay->add_option("--config", config);
  selfplay->add_option("--seed", seed);
  selfplay->add_option("--out", out)->required();

  auto* train = app.add_subcommand("train", "Train one method");
  train->add_option("--corpus", corpus)->required();
  train->add_option("--config", config);
  train->add_option("--seed", seed);
  train->add_option("--method", method)
      ->check(CLI::IsMember(TrainableMethods()));
  train->add_option("--out", out)->required();
  train->add_option("--log", log_path, "Per-epoch training log (JSON)");

  std::string query;
  int n = 6;
  auto* recommend = app.add_subcommand("recommend", "Recommend labels");
  recommend->add_option("--ckpt", ckpt)->required();
  recommend->add_option("--inventory", inventory)->required();
  recommend->add_option("--query", query)->required();
  recommend->add_option("-n", n)->check(CLI::PositiveNumber);

  std::string table;
  auto* eval = app.add_subcommand("eval", "Offline recall and complementarity");
  eval->add_option("--ckpt", ckpts)->required();
  eval->add_option("--corpus", corpus)->required();
  eval->add_option("--out", out, "JSON report")->required();
  eval->add_option("--table", table, "Text tables (default stdout)");
  eval->add_option("--threads", threads);

  size_t sessions = 10000;
  std::string click_model = "oracle";
  double p = 0.9;
  uint64_t sim_seed = 11;
  auto* simulate = app.add_subcommand("simulate", "Simulated online experiment");
  simulate->add_option("--ckpt", ckpts)->required();
  simulate->add_option("--corpus", corpus)->required();
  simulate->add_option("--sessions", sessions);
  simulate->add_option("--click-model", click_model)
      ->check(CLI::IsMember({"oracle", "noisy", "noisy-oracle"}));
  simulate->add_option("--p", p, "Click-through probability of noisy-oracle");
  simulate->add_option("--seed", sim_seed);
  simulate->add_option("--out", out, "JSON report");
  simulate->add_option("--threads", threads);

  std::string host = "127.0.0.1", log_dir;
  int port = 8080;
  auto* serve = app.add_subcommand("serve", "Run the HTTP clarification service");
  serve->add_option("--ckpt", ckpt)->required();
  serve->add_option("--inventory", inventory)->required();
  serve->add_option("--config", config);
  serve->add_option("--host", host);
  serve->add_option("--port", port);
  serve->add_option("--log-dir", log_dir, "Event log directory");

  auto* demo = app.add_subcommand("demo", "Interactive terminal session");
  demo->add_option("--ckpt", ckpt)->required();
  demo->add_option("--inventory", inventory)->required();
  demo->add_option("--config", config);

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::from_str(level));

  try {
    if (*gen) return RunGen(config, seed, out);
    if (*selfplay) return RunSelfplay(corpus, config, seed, out);
    if (*train) return RunTrain(corpus, config, seed, method, out, log_path);
    if (*recommend) return RunRecommend(ckpt, inventory, query, n);
    if (*eval) return RunEval(ckpts, corpus, out, table, threads);
    if (*simulate) {
      return RunSimulate(ckpts, corpus, sessions, click_model, p, sim_seed,
                         out, threads);
    }
    if (*serve) return RunServe(ckpt, inventory, config, log_dir, host, port);
    if (*demo) return RunDemo(ckpt, inventory, config);
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
