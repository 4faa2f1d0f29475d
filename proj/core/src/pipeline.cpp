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

#include "twohop/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <unordered_map>

#include "json.hpp"
#include "twohop/log.hpp"
#include "twohop/words.hpp"

namespace twohop {
namespace {

using nlohmann::ordered_json;

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw UsageError("invalid value \"" + std::string(text) + "\" for " +
                     std::string(key));
  }
  return value;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "on" || text == "1" || text == "yes") {
    return true;
  }
  if (text == "false" || text == "off" || text == "0" || text == "no") {
    return false;
  }
  throw UsageError("invalid boolean \"" + std::string(text) + "\" for " +
                   std::string(key));
}

using Setter = std::function<void(PipelineConfig&, std::string_view,
                                  std::string_view)>;

const std::unordered_map<std::string, Setter>& setters() {
  static const std::unordered_map<std::string, Setter> table = [] {
    std::unordered_map<std::string, Setter> t;
    auto path = [](std::filesystem::path PipelineConfig::*field) {
      return [field](PipelineConfig& c, auto, std::string_view v) {
        c.*field = std::filesystem::path(std::string(v));
      };
    };
    t["input"] = path(&PipelineConfig::input);
    t["out"] = t["output_dir"] = path(&PipelineConfig::output_dir);
    t["ref"] = t["reference"] = path(&PipelineConfig::reference);

    t["max_q_words"] = t["merge.max_question_words"] =
        [](PipelineConfig& c, auto k, auto v) {
          c.merge.max_question_words = parse_number<int>(k, v);
        };
    t["max_a_words"] = t["merge.max_bridge_answer_words"] =
        [](PipelineConfig& c, auto k, auto v) {
          c.merge.max_bridge_answer_words = parse_number<int>(k, v);
        };
    t["merge.connector_prefix"] = [](PipelineConfig& c, auto, auto v) {
      c.merge.connector_prefix = std::string(v);
    };
    t["merge.connector_suffix"] = [](PipelineConfig& c, auto, auto v) {
      c.merge.connector_suffix = std::string(v);
    };
    t["merge.case_insensitive"] = [](PipelineConfig& c, auto k, auto v) {
      c.merge.case_insensitive_match = parse_bool(k, v);
    };
    t["threads"] = t["merge.threads"] = [](PipelineConfig& c, auto k, auto v) {
      c.threads = parse_number<unsigned>(k, v);
    };

    t["ratios"] = t["split.ratios"] = [](PipelineConfig& c, auto, auto v) {
      c.ratios = parse_ratios(v);
    };
    t["split.seed"] = [](PipelineConfig& c, auto k, auto v) {
      c.split_seed = parse_number<std::uint64_t>(k, v);
    };
    t["n"] = t["sample.n"] = [](PipelineConfig& c, auto k, auto v) {
      c.sample_n = parse_number<std::size_t>(k, v);
    };
    t["sample.seed"] = [](PipelineConfig& c, auto k, auto v) {
      c.sample_seed = parse_number<std::uint64_t>(k, v);
    };
    t["seed"] = [](PipelineConfig& c, auto k, auto v) {
      c.split_seed = c.sample_seed = parse_number<std::uint64_t>(k, v);
    };

    t["endpoint"] = t["endpoint.url"] = [](PipelineConfig& c, auto, auto v) {
      c.endpoint.base_url = std::string(v);
      c.endpoint_set = !v.empty();
    };
    t["endpoint.model"] = [](PipelineConfig& c, auto, auto v) {
      c.endpoint.model = std::string(v);
    };
    t["endpoint.token_env"] = [](PipelineConfig& c, auto, auto v) {
      c.endpoint.token_env = std::string(v);
    };
    t["endpoint.timeout_seconds"] = [](PipelineConfig& c, auto k, auto v) {
      c.endpoint.timeout_seconds = parse_number<double>(k, v);
    };
    t["endpoint.max_retries"] = [](PipelineConfig& c, auto k, auto v) {
      c.endpoint.max_retries = parse_number<int>(k, v);
    };
    t["endpoint.backoff_ms"] = [](PipelineConfig& c, auto k, auto v) {
      c.endpoint.backoff_base_ms = parse_number<int>(k, v);
    };
    t["endpoint.max_in_flight"] = [](PipelineConfig& c, auto k, auto v) {
      c.endpoint.max_in_flight = parse_number<unsigned>(k, v);
    };
    t["endpoint.temperature"] = [](PipelineConfig& c, auto k, auto v) {
      c.endpoint.temperature = parse_number<double>(k, v);
    };
    t["endpoint.chat_route"] = [](PipelineConfig& c, auto, auto v) {
      c.endpoint.chat_route = std::string(v);
    };
    t["endpoint.embedding_route"] = [](PipelineConfig& c, auto, auto v) {
      c.endpoint.embedding_route = std::string(v);
    };
    t["endpoint.embedding_model"] = [](PipelineConfig& c, auto, auto v) {
      c.endpoint.embedding_model = std::string(v);
    };

    t["host"] = t["serve.host"] = [](PipelineConfig& c, auto, auto v) {
      c.host = std::string(v);
    };
    t["port"] = t["serve.port"] = [](PipelineConfig& c, auto k, auto v) {
      c.port = parse_number<int>(k, v);
    };
    return t;
  }();
  return table;
}

std::filesystem::path out_path(const PipelineConfig& cfg,
                               std::string_view name) {
  return cfg.output_dir / std::string(name);
}

void require_input(const PipelineConfig& cfg) {
  if (cfg.input.empty()) throw UsageError("no input file given (--input)");
}

ordered_json counts_json(const std::map<std::string, std::size_t>& m) {
  ordered_json j = ordered_json::object();
  for (const auto& [k, v] : m) j[k] = v;
  return j;
}

}  // namespace

namespace {

// `value` is used as given, so quoted config values keep their spaces.
void apply_untrimmed(PipelineConfig& cfg, std::string_view key,
                     std::string_view value) {
  std::string k(trim(key));
  std::replace(k.begin(), k.end(), '-', '_');
  auto it = setters().find(k);
  if (it == setters().end()) {
    throw UsageError("unknown configuration key \"" + k + "\"");
  }
  it->second(cfg, k, value);
}

}  // namespace

void apply_setting(PipelineConfig& cfg, std::string_view key,
                   std::string_view value) {
  apply_untrimmed(cfg, key, trim(value));
}

void apply_config_text(PipelineConfig& cfg, std::string_view text) {
  std::string section;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw UsageError("config line " + std::to_string(line_no) +
                         ": unterminated section header");
      }
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw UsageError("config line " + std::to_string(line_no) +
                       ": expected key = value");
    }
    const auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"') {
      const auto close = value.find('"', 1);
      if (close == std::string_view::npos) {
        throw UsageError("config line " + std::to_string(line_no) +
                         ": unterminated string");
      }
      value = value.substr(1, close - 1);
    } else if (const auto hash = value.find(" #");
               hash != std::string_view::npos) {
      value = trim(value.substr(0, hash));
    }
    const std::string full =
        section.empty() ? std::string(key) : section + "." + std::string(key);
    try {
      apply_untrimmed(cfg, full, value);
    } catch (const UsageError& e) {
      throw UsageError("config line " + std::to_string(line_no) + ": " +
                       e.what());
    }
  }
}

PipelineConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  PipelineConfig cfg;
  apply_config_text(cfg, text.str());
  return cfg;
}

SplitRatios parse_ratios(std::string_view text) {
  std::array<double, 3> r{};
  std::size_t count = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const auto piece = trim(text.substr(
        pos, comma == std::string_view::npos ? std::string_view::npos
                                             : comma - pos));
    if (count == 3) throw UsageError("ratios need exactly three values");
    r[count++] = parse_number<double>("ratios", piece);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  if (count != 3) throw UsageError("ratios need exactly three values");
  for (double x : r) {
    if (!(x >= 0)) throw UsageError("split ratios must be non-negative");
  }
  if (std::abs(r[0] + r[1] + r[2] - 1.0) > 1e-9) {
    throw UsageError("split ratios must sum to 1");
  }
  return SplitRatios{r[0], r[1], r[2]};
}

MergeStats compute_stats(std::span<const MergedQuestion> questions) {
  MergeStats stats;
  stats.total = questions.size();
  if (questions.empty()) return stats;
  std::vector<std::size_t> lengths;
  lengths.reserve(questions.size());
  double sum = 0;
  for (const auto& q : questions) {
    ++stats.per_show[q.episode_key.show];
    lengths.push_back(word_count(q.text));
    sum += static_cast<double>(lengths.back());
  }
  stats.mean_words = sum / static_cast<double>(lengths.size());
  std::sort(lengths.begin(), lengths.end());
  const std::size_t mid = lengths.size() / 2;
  stats.median_words =
      lengths.size() % 2 == 1
          ? static_cast<double>(lengths[mid])
          : (static_cast<double>(lengths[mid - 1]) +
             static_cast<double>(lengths[mid])) /
                2.0;
  return stats;
}

std::string stats_to_json(const MergeStats& stats) {
  ordered_json j;
  j["total"] = stats.total;
  j["per_show"] = counts_json(stats.per_show);
  j["mean_words"] = stats.mean_words;
  j["median_words"] = stats.median_words;
  return j.dump(2) + "\n";
}

void write_text_file(const std::filesystem::path& path,
                     std::string_view content) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << content;
  if (!out) throw DataError("write to " + path.string() + " failed");
}

IngestSummary run_ingest(const PipelineConfig& cfg) {
  require_input(cfg);
  const Corpus corpus = load_corpus(cfg.input);
  IngestSummary summary;
  summary.records = corpus.size();
  summary.episodes = corpus.episode_index().size();
  for (const auto& r : corpus.records()) ++summary.per_show[r.show];
  write_corpus(out_path(cfg, "corpus.jsonl"), corpus.records());
  return summary;
}

SplitAssignment run_split(const PipelineConfig& cfg) {
  require_input(cfg);
  const Corpus corpus = load_corpus(cfg.input);
  const auto assignment = make_splits(corpus, cfg.ratios, cfg.split_seed);
  for (auto split : {Split::kTrain, Split::kValidation, Split::kTest}) {
    write_corpus(out_path(cfg, std::string(split_name(split)) + ".jsonl"),
                 assignment.records_in(corpus, split));
  }
  ordered_json j;
  j["seed"] = assignment.seed;
  j["ratios"] = {cfg.ratios.train, cfg.ratios.validation, cfg.ratios.test};
  const auto counts = assignment.question_counts(corpus);
  j["questions"] = {{"train", counts[0]},
                    {"validation", counts[1]},
                    {"test", counts[2]}};
  ordered_json episodes = ordered_json::object();
  for (const auto& [key, split] : assignment.by_episode) {
    episodes[key.to_string()] = split_name(split);
  }
  j["episodes"] = episodes;
  write_text_file(out_path(cfg, "splits.json"), j.dump(2) + "\n");
  return assignment;
}

MergeRun run_merge(const PipelineConfig& cfg) {
  require_input(cfg);
  const Corpus corpus = load_corpus(cfg.input);
  MergeRun run;
  run.questions = generate_dataset(corpus, cfg.merge, {cfg.threads});
  run.stats = compute_stats(run.questions);
  std::ostringstream lines;
  write_merged(lines, run.questions);
  write_text_file(out_path(cfg, "merged.jsonl"), lines.str());
  write_text_file(out_path(cfg, "stats.json"), stats_to_json(run.stats));
  return run;
}

MergeStats run_stats(const PipelineConfig& cfg) {
  require_input(cfg);
  const auto stats = compute_stats(load_merged(cfg.input));
  write_text_file(out_path(cfg, "stats.json"), stats_to_json(stats));
  return stats;
}

std::vector<MergedQuestion> run_sample(const PipelineConfig& cfg) {
  require_input(cfg);
  const auto dataset = load_merged(cfg.input);
  auto sample = sample_questions(dataset, cfg.sample_n, cfg.sample_seed);
  std::ostringstream lines;
  write_merged(lines, sample);
  write_text_file(out_path(cfg, "sample.jsonl"), lines.str());
  return sample;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

MetricReport run_eval(const PipelineConfig& cfg, EmbeddingProvider* provider) {
  require_input(cfg);
  if (cfg.reference.empty()) {
    throw UsageError("no reference file given (--ref)");
  }
  const auto hyps = read_lines(cfg.input);
  const auto refs = read_lines(cfg.reference);
  if (hyps.size() != refs.size()) {
    throw DataError("hypothesis file has " + std::to_string(hyps.size()) +
                    " lines but reference file has " +
                    std::to_string(refs.size()));
  }
  std::vector<TextPair> pairs;
  pairs.reserve(hyps.size());
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    pairs.push_back({hyps[i], refs[i]});
  }
  const auto report = evaluate_corpus(pairs, provider);
  for (const auto& w : report.warnings) warn(w);
  write_text_file(out_path(cfg, "metrics.json"), report_to_json(report));
  write_text_file(out_path(cfg, "metrics.txt"), report_to_table(report));
  return report;
}

std::string judge_context(const MergedQuestion& q) {
  std::ostringstream os;
  os << "Show: " << q.episode_key.show << ", season " << q.episode_key.season
     << ", episode " << q.episode_key.episode << ". Segments: "
     << q.segments[0] << " and " << q.segments[1]
     << ". Bridge answer: " << q.bridge_answer << ". Answer: " << q.answer
     << ".";
  return os.str();
}

JudgeRun run_judge(const PipelineConfig& cfg, HttpTransport& transport,
                   const JudgeBatchOptions& opts) {
  require_input(cfg);
  if (!cfg.endpoint_set) throw UsageError("no judge endpoint (--endpoint)");
  const auto dataset = load_merged(cfg.input);
  std::vector<JudgeItem> items;
  items.reserve(dataset.size());
  for (const auto& q : dataset) items.push_back({q.text, judge_context(q)});

  JudgeRun run;
  run.outcomes = judge_batch(items, cfg.endpoint, transport, opts);
  std::ostringstream lines;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (const auto* v = std::get_if<JudgeVerdict>(&run.outcomes[i])) {
      // No timestamp: verdict files are reproducible byte for byte.
      AnnotationRecord rec{cfg.endpoint.model, dataset[i].id(), v->rubric, ""};
      lines << to_json_line(rec) << '\n';
      run.verdicts.push_back(std::move(rec));
    } else {
      const auto& err = std::get<JudgeItemError>(run.outcomes[i]);
      warn("judge failed on " + dataset[i].id() + ": " + err.message);
      ++run.failures;
    }
  }
  write_text_file(out_path(cfg, "verdicts.jsonl"), lines.str());
  std::string summary;
  if (!run.verdicts.empty()) {
    run.means = aggregate_scores(run.verdicts);
    summary = means_to_table(cfg.endpoint.model, *run.means);
  } else {
    summary = "no verdicts\n";
  }
  summary += "judged: " + std::to_string(run.verdicts.size()) +
             ", failed: " + std::to_string(run.failures) + "\n";
  write_text_file(out_path(cfg, "judge_summary.txt"), summary);
  return run;
}

JudgeRun run_judge(const PipelineConfig& cfg) {
  auto transport = make_http_transport(cfg.endpoint);
  return run_judge(cfg, *transport);
}

AgreementReport run_report(const PipelineConfig& cfg) {
  require_input(cfg);
  const auto records = load_annotations(cfg.input);
  const auto report = agreement_report(records);
  write_text_file(out_path(cfg, "report.json"), agreement_to_json(report));
  write_text_file(out_path(cfg, "report.txt"), agreement_to_table(report));
  return report;
}

void write_run_metadata(const std::filesystem::path& out_dir,
                        std::string_view command,
                        const std::vector<std::string>& args) {
  ordered_json j;
  j["command"] = std::string(command);
  j["args"] = args;
  j["timestamp"] = utc_timestamp();
  write_text_file(out_dir / "run.meta.json", j.dump(2) + "\n");
}

}  // namespace twohop
