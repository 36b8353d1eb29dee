// Copyright 2026-present the acm project
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

#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "acm/baselines.hpp"
#include "acm/classifier.hpp"
#include "acm/learner.hpp"
#include "acm/metrics.hpp"
#include "acm/stream.hpp"

namespace acm::harness {

enum class Method { Acm, Ncm, Slda, SgdLogistic, SgdHinge, BruteKnn };
enum class ReportFormat { Csv, Jsonl };

std::string_view to_string(Method m) noexcept;
Method parse_method(std::string_view name);
ReportFormat parse_format(std::string_view name);

struct DatasetSource {
    std::optional<std::filesystem::path> feature_file;
    std::optional<stream::DriftConfig> drift;
};

struct PreprocessConfig {
    bool scaler = true;
    std::optional<std::filesystem::path> projection_weights;
    std::uint32_t target_dim = 0;  ///< random projection when set and no weights file
};

struct MetricConfig {
    std::size_t h = 0;        ///< 0 = the whole test split
    std::size_t delay = 100;  ///< near-future delay, 0 disables
    std::size_t buckets = 20;
};

struct OutputConfig {
    std::optional<std::filesystem::path> dir;
    ReportFormat format = ReportFormat::Csv;
    std::string prefix = "run";
};

/// Everything a run depends on. `seed` drives the split, the graph levels and the
/// random projection; drift streams keep their own seed as part of the dataset identity.
struct ExperimentConfig {
    DatasetSource dataset;
    stream::SplitSpec split;
    Method method = Method::Acm;
    learner::AcmConfig acm;
    baselines::SldaConfig slda;
    double sgd_learning_rate = 1e-2;
    PreprocessConfig preprocess;
    MetricConfig metrics;
    OutputConfig output;
    bool timing = true;
    std::uint64_t seed = 0;

    void validate() const;
};

}  // namespace acm::harness

namespace acm::stream {
void to_json(nlohmann::json& j, const DriftConfig& c);
void from_json(const nlohmann::json& j, DriftConfig& c);
}  // namespace acm::stream

namespace acm::harness {

void to_json(nlohmann::json& j, const ExperimentConfig& c);
void from_json(const nlohmann::json& j, ExperimentConfig& c);

ExperimentConfig load_config(const std::filesystem::path& path);

std::unique_ptr<OnlineClassifier> make_method(const ExperimentConfig& config, std::size_t dim);

struct StepRow {
    PredictionOutcome outcome;
    std::size_t current_k = 0;

    friend bool operator==(const StepRow&, const StepRow&) = default;
};

struct LatencyStats {
    std::int64_t median_ns = 0;
    std::int64_t p99_ns = 0;
};

/// Lower median and nearest-rank 99th percentile. Empty input gives nullopt.
std::optional<LatencyStats> latency_stats(std::vector<std::int64_t> samples);

struct RunSummary {
    std::string method;
    std::size_t online_steps = 0;
    std::size_t pretrain_size = 0;
    std::size_t test_size = 0;
    std::optional<double> online_accuracy;
    std::optional<double> ir_h;
    std::size_t h = 0;
    std::optional<double> test_accuracy;
    std::vector<metrics::TimeBucket> ir_buckets;
    std::optional<double> near_future_accuracy;
    std::size_t delay = 0;
    std::optional<LatencyStats> predict_latency;
    std::optional<LatencyStats> learn_latency;
    std::size_t peak_memory_count = 0;
    bool interrupted = false;
};

struct RunReport {
    std::vector<StepRow> rows;
    std::vector<std::optional<bool>> near_future;
    std::vector<double> accuracy_curve;
    RunSummary summary;
};

/// Row-derived summary fields (accuracy, latencies); the rest is left default.
RunSummary summarize_rows(std::span<const StepRow> rows);

/// Pretrain (scaler fit + warm start, unlogged), online predict-then-learn loop, then
/// frozen-model retention on the test split. Setting `*stop` ends the online loop early
/// and the partial report is returned with `interrupted` set.
RunReport run_experiment(const ExperimentConfig& config, const std::atomic<bool>* stop = nullptr);

struct EmittedFiles {
    std::filesystem::path steps;
    std::filesystem::path summary;
    std::filesystem::path accuracy;
};

/// Steps as CSV or JSON lines (timestep, predicted, truth, correct, predict_ns,
/// learn_ns, current_k; abstentions are -1 in CSV and null in JSONL), the summary as
/// one JSON document, and a (t, a_t) curve.
EmittedFiles emit_report(const RunReport& report, ReportFormat format, const std::filesystem::path& dir,
                         const std::string& prefix);

nlohmann::json summary_to_json(const RunSummary& s);

std::vector<StepRow> parse_steps_csv(const std::filesystem::path& path);

inline constexpr const char* kStepColumns = "timestep,predicted,truth,correct,predict_ns,learn_ns,current_k";

}  // namespace acm::harness
