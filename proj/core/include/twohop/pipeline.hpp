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

#ifndef TWOHOP_PIPELINE_HPP_
#define TWOHOP_PIPELINE_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "twohop/corpus.hpp"
#include "twohop/judge.hpp"
#include "twohop/merge.hpp"
#include "twohop/metrics.hpp"
#include "twohop/quality.hpp"

namespace twohop {

// Everything a subcommand may need. Defaults: 15/3 word thresholds,
// 0.8/0.1/0.1 split, 200-question sample.
struct PipelineConfig {
  std::filesystem::path input;
  std::filesystem::path output_dir = ".";
  std::filesystem::path reference;  // eval-metrics reference file
  MergeConfig merge;
  SplitRatios ratios;
  std::uint64_t split_seed = 0;
  std::size_t sample_n = 200;
  std::uint64_t sample_seed = 0;
  JudgeEndpointConfig endpoint;
  bool endpoint_set = false;  // enables the judge and embedding provider
  unsigned threads = 1;
  std::string host = "127.0.0.1";
  int port = 8080;
};

// Applies one "key = value" setting. Unknown keys throw UsageError.
void apply_setting(PipelineConfig& cfg, std::string_view key,
                   std::string_view value);
// Parses a flat key/value document: "key = value" lines, '#' comments,
// optional double quotes around values, [section] headers prefix keys
// with "section.".
void apply_config_text(PipelineConfig& cfg, std::string_view text);
PipelineConfig load_config_file(const std::filesystem::path& path);

// "0.8,0.1,0.1"
SplitRatios parse_ratios(std::string_view text);

struct MergeStats {
  std::size_t total = 0;
  std::map<std::string, std::size_t> per_show;
  double mean_words = 0;
  double median_words = 0;
};

MergeStats compute_stats(std::span<const MergedQuestion> questions);
std::string stats_to_json(const MergeStats& stats);

struct IngestSummary {
  std::size_t records = 0;
  std::size_t episodes = 0;
  std::map<std::string, std::size_t> per_show;
};

// Validates the input corpus and writes a normalized copy to
// <out>/corpus.jsonl.
IngestSummary run_ingest(const PipelineConfig& cfg);

// Writes <out>/{train,validation,test}.jsonl and <out>/splits.json.
SplitAssignment run_split(const PipelineConfig& cfg);

struct MergeRun {
  std::vector<MergedQuestion> questions;
  MergeStats stats;
};

// Writes <out>/merged.jsonl and <out>/stats.json.
MergeRun run_merge(const PipelineConfig& cfg);

// Reads a merged dataset from cfg.input; writes <out>/stats.json.
MergeStats run_stats(const PipelineConfig& cfg);

// Writes <out>/sample.jsonl.
std::vector<MergedQuestion> run_sample(const PipelineConfig& cfg);

// Non-empty lines are not required; every line is one text.
std::vector<std::string> read_lines(const std::filesystem::path& path);

// Hypotheses from cfg.input, references from cfg.reference, one per line.
// Writes <out>/metrics.json and <out>/metrics.txt. Throws DataError when
// the line counts differ.
MetricReport run_eval(const PipelineConfig& cfg,
                      EmbeddingProvider* provider = nullptr);

struct JudgeRun {
  std::vector<JudgeOutcome> outcomes;
  std::vector<AnnotationRecord> verdicts;
  std::optional<DimensionMeans> means;
  std::size_t failures = 0;
};

// Evaluation context shown to the judge for a merged question.
std::string judge_context(const MergedQuestion& q);

// Judges every question in cfg.input. Writes <out>/verdicts.jsonl and
// <out>/judge_summary.txt; failures are logged as warnings.
JudgeRun run_judge(const PipelineConfig& cfg, HttpTransport& transport,
                   const JudgeBatchOptions& opts = {});
JudgeRun run_judge(const PipelineConfig& cfg);

// Agreement over the annotation store at cfg.input. Writes
// <out>/report.json and <out>/report.txt.
AgreementReport run_report(const PipelineConfig& cfg);

// <out>/run.meta.json: command, arguments, timestamp. Outputs proper never
// carry timestamps.
void write_run_metadata(const std::filesystem::path& out_dir,
                        std::string_view command,
                        const std::vector<std::string>& args);

// Writes `content` to `path`, creating parent directories.
void write_text_file(const std::filesystem::path& path,
                     std::string_view content);

}  // namespace twohop

#endif  // TWOHOP_PIPELINE_HPP_
