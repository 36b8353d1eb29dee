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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "acm/classifier.hpp"
#include "acm/core.hpp"

namespace acm::metrics {

using OutcomeLog = std::vector<PredictionOutcome>;

/// Throws InvalidConfig unless timesteps are strictly increasing.
void validate_log(std::span<const PredictionOutcome> log);

/// a_t: running mean of the correct flags. Throws EmptyLog.
std::vector<double> online_accuracy(std::span<const PredictionOutcome> log);

struct TimeBucket {
    std::int64_t begin = 0;  ///< inclusive
    std::int64_t end = 0;    ///< exclusive, except the last bucket which is closed
    std::uint64_t count = 0;
    std::uint64_t correct = 0;
    std::optional<double> accuracy;  ///< empty for buckets with no records
};

struct RetentionReport {
    std::size_t h = 0;
    double ir_h = 0.0;
    double overall = 0.0;
    std::vector<TimeBucket> buckets;
    std::vector<bool> correct;  ///< per test record, in timestamp order
};

/// Per-record correctness -> IR over the last h records plus equal-width time buckets.
/// `timestamps` and `correct` must already be in timestamp order.
RetentionReport summarize_retention(std::span<const std::int64_t> timestamps, const std::vector<bool>& correct,
                                    std::size_t h, std::size_t buckets = 20);

/// Evaluates a frozen model on the test records (sorted here by timestamp, then id).
/// h = 0 means every test record. Throws EmptyTestSet, or InvalidConfig when h > |test|.
RetentionReport information_retention(const OnlineClassifier& model, std::span<const StreamRecord> test,
                                      std::size_t h, std::size_t buckets = 20);

/// `delayed_correct[t]` is whether the model after step t classified record t + delay
/// correctly; positions without a record t + delay are empty and skipped. Returns the
/// running mean over the defined positions. Throws DelayTooLarge if delay >= length.
std::vector<double> near_future_accuracy(std::span<const std::optional<bool>> delayed_correct,
                                         std::size_t delay);

}  // namespace acm::metrics
