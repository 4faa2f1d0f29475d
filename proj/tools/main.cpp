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

// twohop: build two-hop question datasets and evaluate them.
//
// Exit codes: 0 ok, 1 usage, 2 data error, 3 remote error.

#include <pthread.h>
#include <signal.h>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "twohop/error.hpp"
#include "twohop/judge.hpp"
#include "twohop/log.hpp"
#include "twohop/pipeline.hpp"
#include "twohop/review_service.hpp"

namespace {

using twohop::PipelineConfig;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitRemote = 3;

// Flag values as given on the command line, applied on top of the config
// file once parsing is done.
class Overrides {
 public:
  CLI::Option* add(CLI::App* app, const std::string& flag,
                   const std::string& key, const std::string& help) {
    return app->add_option_function<std::string>(
        flag, [this, key](const std::string& v) { values_.emplace_back(key, v); },
        help);
  }

  void apply(PipelineConfig& cfg) const {
    for (const auto& [k, v] : values_) twohop::apply_setting(cfg, k, v);
  }

 private:
  std::vector<std::pair<std::string, std::string>> values_;
};

void print_line(const std::string& s) { std::cout << s << std::endl; }

int serve(const PipelineConfig& cfg, const std::string& static_dir) {
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  twohop::ReviewService service(cfg.output_dir);
  twohop::ReviewHttpServer server(service);
  if (!static_dir.empty() && !server.set_static_dir(static_dir)) {
    throw twohop::UsageError("static directory " + static_dir +
                             " does not exist");
  }
  const int port = server.bind(cfg.host, cfg.port);
  if (port < 0) {
    throw twohop::UsageError("cannot bind " + cfg.host + ":" +
                             std::to_string(cfg.port));
  }
  std::thread waiter([&server, signals] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  });
  waiter.detach();
  std::cerr << "serving on http://" << cfg.host << ":" << port
            << " (data in " << cfg.output_dir.string() << ")" << std::endl;
  server.listen();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-hop video question dataset construction and evaluation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "twohop 0.1.0");

  std::string config_path;
  app.add_option("--config", config_path,
                 "Key/value configuration file; flags override it")
      ->check(CLI::ExistingFile);

  Overrides overrides;
  auto common = [&](CLI::App* sub, bool needs_input) {
    auto* in = overrides.add(sub, "-i,--input", "input", "Input file");
    if (needs_input) in->check(CLI::ExistingFile);
    overrides.add(sub, "-o,--out", "out", "Output directory");
    sub->add_option("--config", config_path, "Configuration file")
        ->check(CLI::ExistingFile);
  };

  auto* ingest = app.add_subcommand("ingest", "Validate a QA corpus and normalize it");
  common(ingest, true);

  auto* split = app.add_subcommand("split", "Episode-disjoint train/validation/test split");
  common(split, true);
  overrides.add(split, "--seed", "split.seed", "Shuffle seed");
  overrides.add(split, "--ratios", "ratios", "Train,validation,test ratios");

  auto* merge = app.add_subcommand("merge", "Generate merged two-hop questions");
  common(merge, true);
  overrides.add(merge, "--max-q-words", "max_q_words", "Question word limit");
  overrides.add(merge, "--max-a-words", "max_a_words", "Bridge answer word limit");
  overrides.add(merge, "--threads", "threads", "Worker threads");

  auto* stats = app.add_subcommand("stats", "Summarize a merged dataset");
  common(stats, true);

  auto* sample = app.add_subcommand("sample", "Seeded sample of a merged dataset");
  common(sample, true);
  overrides.add(sample, "--n", "n", "Sample size");
  overrides.add(sample, "--seed", "sample.seed", "Sample seed");

  auto* eval_metrics =
      app.add_subcommand("eval-metrics", "Score hypotheses against references");
  common(eval_metrics, true);
  overrides.add(eval_metrics, "--ref", "ref", "Reference file, one text per line")
      ->check(CLI::ExistingFile);
  overrides.add(eval_metrics, "--endpoint", "endpoint",
                "Embedding endpoint base URL (enables embedding columns)");

  auto* eval_judge = app.add_subcommand("eval-judge", "Rate questions with an LLM judge");
  common(eval_judge, true);
  overrides.add(eval_judge, "--endpoint", "endpoint", "Chat endpoint base URL");

  auto* serve_cmd = app.add_subcommand("serve", "Run the annotation review service");
  overrides.add(serve_cmd, "-o,--out", "out", "Data directory for sessions and scores");
  overrides.add(serve_cmd, "--host", "host", "Bind address");
  overrides.add(serve_cmd, "--port", "port", "Port (0 picks a free one)");
  serve_cmd->add_option("--config", config_path, "Configuration file")
      ->check(CLI::ExistingFile);
  std::string static_dir;
  serve_cmd->add_option("--static", static_dir, "Directory served at /");

  auto* report = app.add_subcommand("report", "Agreement report over an annotation store");
  common(report, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  CLI::App* cmd = app.get_subcommands().front();
  try {
    PipelineConfig cfg =
        config_path.empty() ? PipelineConfig{} : twohop::load_config_file(config_path);
    overrides.apply(cfg);

    std::vector<std::string> args(argv + 1, argv + argc);
    const std::string name = cmd->get_name();
    if (cmd != serve_cmd) {
      std::filesystem::create_directories(cfg.output_dir);
      twohop::write_run_metadata(cfg.output_dir, name, args);
    }

    if (cmd == ingest) {
      const auto s = twohop::run_ingest(cfg);
      print_line("records: " + std::to_string(s.records) +
                 ", episodes: " + std::to_string(s.episodes));
    } else if (cmd == split) {
      const auto corpus = twohop::load_corpus(cfg.input);
      const auto a = twohop::run_split(cfg);
      const auto counts = a.question_counts(corpus);
      print_line("train: " + std::to_string(counts[0]) +
                 ", validation: " + std::to_string(counts[1]) +
                 ", test: " + std::to_string(counts[2]));
    } else if (cmd == merge) {
      cfg.merge.validate();
      const auto run = twohop::run_merge(cfg);
      std::cout << twohop::stats_to_json(run.stats);
    } else if (cmd == stats) {
      std::cout << twohop::stats_to_json(twohop::run_stats(cfg));
    } else if (cmd == sample) {
      const auto s = twohop::run_sample(cfg);
      print_line("sampled: " + std::to_string(s.size()));
    } else if (cmd == eval_metrics) {
      std::unique_ptr<twohop::HttpEmbeddingProvider> provider;
      if (cfg.endpoint_set) {
        provider = std::make_unique<twohop::HttpEmbeddingProvider>(cfg.endpoint);
      }
      const auto r = twohop::run_eval(cfg, provider.get());
      std::cout << twohop::report_to_table(r);
    } else if (cmd == eval_judge) {
      const auto run = twohop::run_judge(cfg);
      if (run.means) std::cout << twohop::means_to_table(cfg.endpoint.model, *run.means);
      print_line("judged: " + std::to_string(run.verdicts.size()) +
                 ", failed: " + std::to_string(run.failures));
      if (run.failures > 0) return kExitRemote;
    } else if (cmd == serve_cmd) {
      return serve(cfg, static_dir);
    } else if (cmd == report) {
      std::cout << twohop::agreement_to_table(twohop::run_report(cfg));
    }
    return kExitOk;
  } catch (const twohop::UsageError& e) {
    std::cerr << "twohop " << cmd->get_name() << ": " << e.what() << "\n";
    return kExitUsage;
  } catch (const twohop::RemoteError& e) {
    std::cerr << "twohop " << cmd->get_name() << ": " << e.what() << "\n";
    return kExitRemote;
  } catch (const twohop::Error& e) {
    std::cerr << "twohop " << cmd->get_name() << ": " << e.what() << "\n";
    return kExitData;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "twohop " << cmd->get_name() << ": " << e.what() << "\n";
    return kExitData;
  }
}
