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

#include "acm/metrics.hpp"

#include <algorithm>
#include <string>

namespace acm::metrics {

void validate_log(std::span<const PredictionOutcome> log) {
    for (std::size_t i = 1; i < log.size(); ++i) {
        if (log[i].timestep <= log[i - 1].timestep) {
            throw Error(ErrorCode::InvalidConfig,
                        "outcome timesteps must increase strictly (index " + std::to_string(i) + ")");
        }
    }
}

std::vector<double> online_accuracy(std::span<const PredictionOutcome> log) {
    if (log.empty()) {
        throw Error(ErrorCode::EmptyLog, "online accuracy of an empty log");
    }
    validate_log(log);
    std::vector<double> a(log.size());
    std::uint64_t hits = 0;
    for (std::size_t t = 0; t < log.size(); ++t) {
        hits += log[t].correct ? 1 : 0;
        a[t] = static_cast<double>(hits) / static_cast<double>(t + 1);
    }
    return a;
}

RetentionReport summarize_retention(std::span<const std::int64_t> timestamps, const std::vector<bool>& correct,
                                    std::size_t h, std::size_t buckets) {
    const std::size_t n = correct.size();
    if (n == 0) {
        throw Error(ErrorCode::EmptyTestSet, "retention needs at least one test record");
    }
    check_dim(n, timestamps.size());
    if (h == 0) {
        h = n;
    }
    if (h > n) {
        throw Error(ErrorCode::InvalidConfig, "retention window h exceeds the test set size");
    }
    if (buckets == 0) {
        throw Error(ErrorCode::InvalidConfig, "need at least one time bucket");
    }

    RetentionReport report;
    report.h = h;
    report.correct = correct;
    const auto total = static_cast<std::size_t>(std::count(correct.begin(), correct.end(), true));
    const auto tail = static_cast<std::size_t>(std::count(correct.end() - static_cast<std::ptrdiff_t>(h), correct.end(), true));
    report.overall = static_cast<double>(total) / static_cast<double>(n);
    report.ir_h = static_cast<double>(tail) / static_cast<double>(h);

    const std::int64_t lo = timestamps.front();
    const std::int64_t hi = timestamps.back();
    // Integer bucket edges: edge_b = lo + floor(b * width / B).
    const auto width = static_cast<__int128>(hi) - lo;
    report.buckets.resize(buckets);
    for (std::size_t b = 0; b < buckets; ++b) {
        report.buckets[b].begin = static_cast<std::int64_t>(lo + width * static_cast<__int128>(b) / static_cast<__int128>(buckets));
        report.buckets[b].end = static_cast<std::int64_t>(lo + width * static_cast<__int128>(b + 1) / static_cast<__int128>(buckets));
    }
    std::vector<std::int64_t> ends(buckets - 1);
    for (std::size_t b = 0; b + 1 < buckets; ++b) {
        ends[b] = report.buckets[b].end;
    }
    for (std::size_t i = 0; i < n; ++i) {
        // first bucket whose (exclusive) end lies beyond the timestamp; the last bucket is closed
        const auto b = static_cast<std::size_t>(
            std::upper_bound(ends.begin(), ends.end(), timestamps[i]) - ends.begin());
        ++report.buckets[b].count;
        report.buckets[b].correct += correct[i] ? 1 : 0;
    }
    for (TimeBucket& bucket : report.buckets) {
        if (bucket.count > 0) {
            bucket.accuracy = static_cast<double>(bucket.correct) / static_cast<double>(bucket.count);
        }
    }
    return report;
}

RetentionReport information_retention(const OnlineClassifier& model, std::span<const StreamRecord> test,
                                      std::size_t h, std::size_t buckets) {
    if (test.empty()) {
        throw Error(ErrorCode::EmptyTestSet, "retention needs at least one test record");
    }
    std::vector<const StreamRecord*> order(test.size());
    std::transform(test.begin(), test.end(), order.begin(), [](const StreamRecord& r) { return &r; });
    std::stable_sort(order.begin(), order.end(), [](const StreamRecord* a, const StreamRecord* b) {
        return a->timestamp != b->timestamp ? a->timestamp < b->timestamp : a->id < b->id;
    });
    std::vector<std::int64_t> timestamps(order.size());
    std::vector<bool> correct(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        timestamps[i] = order[i]->timestamp;
        const auto predicted = model.predict(order[i]->feature.view());
        correct[i] = predicted.has_value() && *predicted == order[i]->label;
    }
    return summarize_retention(timestamps, correct, h, buckets);
}

std::vector<double> near_future_accuracy(std::span<const std::optional<bool>> delayed_correct,
                                         std::size_t delay) {
    if (delay < 1) {
        throw Error(ErrorCode::InvalidConfig, "near-future delay must be at least 1");
    }
    if (delay >= delayed_correct.size()) {
        throw Error(ErrorCode::DelayTooLarge, "delay must be smaller than the stream length");
    }
    std::vector<double> out;
    out.reserve(delayed_correct.size() - delay);
    std::uint64_t hits = 0;
    std::uint64_t seen = 0;
    for (const auto& c : delayed_correct) {
        if (!c.has_value()) {
            continue;
        }
        ++seen;
        hits += *c ? 1 : 0;
        out.push_back(static_cast<double>(hits) / static_cast<double>(seen));
    }
    return out;
}

}  // namespace acm::metrics
