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

#include "acm/error.hpp"

namespace acm {

using Label = std::uint32_t;
using EntryId = std::uint32_t;
using FeatureView = std::span<const float>;

/// Fixed-dimension feature vector. Construction rejects NaN/Inf entries.
class FeatureVector {
public:
    FeatureVector() = default;
    explicit FeatureVector(std::vector<float> values);
    explicit FeatureVector(FeatureView values)
        : FeatureVector(std::vector<float>(values.begin(), values.end())) {}

    std::size_t dim() const noexcept { return values_.size(); }
    FeatureView view() const noexcept { return values_; }
    const std::vector<float>& values() const noexcept { return values_; }
    float operator[](std::size_t i) const noexcept { return values_[i]; }

    operator FeatureView() const noexcept { return values_; }  // NOLINT

    friend bool operator==(const FeatureVector&, const FeatureVector&) = default;

private:
    std::vector<float> values_;
};

struct StreamRecord {
    std::uint64_t id = 0;
    std::int64_t timestamp = 0;
    Label label = 0;
    FeatureVector feature;

    friend bool operator==(const StreamRecord&, const StreamRecord&) = default;
};

struct NeighborHit {
    EntryId entry_id = 0;
    Label label = 0;
    float distance = 0.0F;

    friend bool operator==(const NeighborHit&, const NeighborHit&) = default;
};

/// One online step. `predicted` is empty when the method abstained.
struct PredictionOutcome {
    std::uint64_t timestep = 0;
    std::optional<Label> predicted;
    Label truth = 0;
    bool correct = false;
    std::int64_t predict_latency_ns = 0;
    std::int64_t learn_latency_ns = 0;

    friend bool operator==(const PredictionOutcome&, const PredictionOutcome&) = default;
};

bool all_finite(FeatureView v) noexcept;

/// Throws ZeroVector when the norm is below 1e-12.
FeatureVector l2_normalize(FeatureView v);

/// In-place variant used on hot paths.
void l2_normalize_inplace(std::span<float> v);

float squared_l2(const float* a, const float* b, std::size_t dim) noexcept;

/// Distance between unit vectors, 1 - <u,v>, evaluated as |u - v|^2 / 2 so that
/// identical inputs give exactly zero and the result is never negative.
inline float cosine_distance_unchecked(const float* a, const float* b, std::size_t dim) noexcept {
    return 0.5F * squared_l2(a, b, dim);
}

float cosine_distance(FeatureView u, FeatureView v);

double dot(FeatureView u, FeatureView v);

void check_dim(std::size_t expected, std::size_t actual);

}  // namespace acm
