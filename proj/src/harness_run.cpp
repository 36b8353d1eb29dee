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

#include <algorithm>
#include <cmath>

#include "acm/ann/graph_util.hpp"
#include "acm/harness.hpp"
#include "acm/preprocess.hpp"

namespace acm::harness {

namespace {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    ann::SplitMix64 mix(seed ^ (stream * 0xD1B54A32D192ED03ULL));
    return mix();
}

std::vector<StreamRecord> apply_pipeline(const preprocess::Pipeline& pipeline, std::vector<StreamRecord> records) {
    for (StreamRecord& r : records) {
        r.feature = pipeline.apply(r.feature.view());
    }
    return records;
}

}  // namespace

std::unique_ptr<OnlineClassifier> make_method(const ExperimentConfig& config, std::size_t dim) {
    switch (config.method) {
        case Method::Acm:
        case Method::BruteKnn: {
            learner::AcmConfig a = config.acm;
            a.backend = config.method == Method::Acm ? learner::Backend::Hnsw : learner::Backend::BruteForce;
            a.hnsw.rng_seed = derive_seed(config.seed, 2);
            return std::make_unique<learner::AcmLearner>(dim, a);
        }
        case Method::Ncm:
            return std::make_unique<baselines::NcmClassifier>(dim);
        case Method::Slda:
            return std::make_unique<baselines::SldaClassifier>(dim, config.slda);
        case Method::SgdLogistic:
            return std::make_unique<baselines::LinearSgdClassifier>(
                dim, baselines::SgdConfig{baselines::SgdLoss::Logistic, config.sgd_learning_rate});
        case Method::SgdHinge:
            return std::make_unique<baselines::LinearSgdClassifier>(
                dim, baselines::SgdConfig{baselines::SgdLoss::Hinge, config.sgd_learning_rate});
    }
    throw Error(ErrorCode::InvalidConfig, "unknown method");
}

std::optional<LatencyStats> latency_stats(std::vector<std::int64_t> samples) {
    if (samples.empty()) {
        return std::nullopt;
    }
    std::sort(samples.begin(), samples.end());
    const std::size_t n = samples.size();
    const std::size_t rank99 = (99 * n + 99) / 100;  // ceil(0.99 n)
    return LatencyStats{samples[(n - 1) / 2], samples[rank99 - 1]};
}

RunSummary summarize_rows(std::span<const StepRow> rows) {
    RunSummary s;
    s.online_steps = rows.size();
    if (rows.empty()) {
        return s;
    }
    std::uint64_t correct = 0;
    std::vector<std::int64_t> predict_ns;
    std::vector<std::int64_t> learn_ns;
    predict_ns.reserve(rows.size());
    learn_ns.reserve(rows.size());
    for (const StepRow& r : rows) {
        correct += r.outcome.correct ? 1 : 0;
        predict_ns.push_back(r.outcome.predict_latency_ns);
        learn_ns.push_back(r.outcome.learn_latency_ns);
    }
    s.online_accuracy = static_cast<double>(correct) / static_cast<double>(rows.size());
    s.predict_latency = latency_stats(std::move(predict_ns));
    s.learn_latency = latency_stats(std::move(learn_ns));
    return s;
}

RunReport run_experiment(const ExperimentConfig& config, const std::atomic<bool>* stop) {
    config.validate();

    stream::Dataset data = config.dataset.feature_file ? stream::load_feature_file(*config.dataset.feature_file)
                                                       : stream::generate_drift_stream(*config.dataset.drift);
    stream::SplitSpec split_spec = config.split;
    split_spec.seed = derive_seed(config.seed, 1);
    stream::Split split = stream::chronological_split(data.records, split_spec);
    data.records.clear();

    std::optional<preprocess::ProjectionWeights> projection;
    if (config.preprocess.projection_weights) {
        projection = preprocess::ProjectionWeights::load_file(*config.preprocess.projection_weights);
    } else if (config.preprocess.target_dim > 0 && config.preprocess.target_dim != data.dim) {
        projection = preprocess::ProjectionWeights::random(data.dim, config.preprocess.target_dim,
                                                           derive_seed(config.seed, 3));
    }
    preprocess::Pipeline pipeline(data.dim, std::move(projection), config.preprocess.scaler);
    if (pipeline.uses_scaler()) {
        if (split.pretrain.empty()) {
            throw Error(ErrorCode::InvalidConfig, "the online scaler is fit on the pretrain split, which is empty");
        }
        for (const StreamRecord& r : split.pretrain) {
            pipeline.fit(r.feature.view());
        }
    }
    const auto pretrain = apply_pipeline(pipeline, std::move(split.pretrain));
    const auto online = apply_pipeline(pipeline, std::move(split.online));
    const auto test = apply_pipeline(pipeline, std::move(split.test));

    auto model = make_method(config, pipeline.output_dim());
    for (const StreamRecord& r : pretrain) {
        model->learn(r.feature.view(), r.label);
    }

    RunReport report;
    report.rows.reserve(online.size());
    const std::size_t delay = config.metrics.delay;
    const bool track_near_future = delay > 0 && delay < online.size();
    if (track_near_future) {
        report.near_future.assign(online.size(), std::nullopt);
    }
    for (std::size_t i = 0; i < online.size(); ++i) {
        if (stop != nullptr && stop->load(std::memory_order_relaxed)) {
            report.summary.interrupted = true;
            break;
        }
        StepRow row;
        row.outcome = learner::step(*model, online[i], i + 1, config.timing);
        row.current_k = model->current_k();
        report.rows.push_back(row);
        if (track_near_future && i + delay < online.size()) {
            const StreamRecord& ahead = online[i + delay];
            const auto guess = model->predict(ahead.feature.view());
            report.near_future[i] = guess.has_value() && *guess == ahead.label;
        }
    }
    if (report.summary.interrupted && track_near_future) {
        report.near_future.resize(report.rows.size());
    }

    const bool interrupted = report.summary.interrupted;
    report.summary = summarize_rows(report.rows);
    report.summary.interrupted = interrupted;
    report.summary.method = std::string(model->name());
    report.summary.pretrain_size = pretrain.size();
    report.summary.test_size = test.size();
    report.summary.peak_memory_count = model->memory_count();
    report.summary.delay = delay;
    if (!report.rows.empty()) {
        std::vector<PredictionOutcome> log;
        log.reserve(report.rows.size());
        for (const StepRow& r : report.rows) {
            log.push_back(r.outcome);
        }
        report.accuracy_curve = metrics::online_accuracy(log);
    }
    if (track_near_future && delay < report.near_future.size()) {
        const auto curve = metrics::near_future_accuracy(report.near_future, delay);
        if (!curve.empty()) {
            report.summary.near_future_accuracy = curve.back();
        }
    }
    if (!test.empty()) {
        const std::size_t h = std::min(config.metrics.h == 0 ? test.size() : config.metrics.h, test.size());
        const auto retention = metrics::information_retention(*model, test, h, config.metrics.buckets);
        report.summary.h = retention.h;
        report.summary.ir_h = retention.ir_h;
        report.summary.test_accuracy = retention.overall;
        report.summary.ir_buckets = retention.buckets;
    }
    return report;
}

}  // namespace acm::harness
