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

#include "acm/core.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace acm {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::ZeroVector: return "ZeroVector";
        case ErrorCode::NonFiniteFeature: return "NonFiniteFeature";
        case ErrorCode::DimMismatch: return "DimMismatch";
        case ErrorCode::EmptyIndex: return "EmptyIndex";
        case ErrorCode::NotFitted: return "NotFitted";
        case ErrorCode::InsufficientMemory: return "InsufficientMemory";
        case ErrorCode::EmptyLog: return "EmptyLog";
        case ErrorCode::EmptyTestSet: return "EmptyTestSet";
        case ErrorCode::DelayTooLarge: return "DelayTooLarge";
        case ErrorCode::BadMagic: return "BadMagic";
        case ErrorCode::TruncatedFile: return "TruncatedFile";
        case ErrorCode::LabelOutOfRange: return "LabelOutOfRange";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

FeatureVector::FeatureVector(std::vector<float> values) : values_(std::move(values)) {
    if (!all_finite(values_)) {
        throw Error(ErrorCode::NonFiniteFeature, "feature vector contains NaN or Inf");
    }
}

bool all_finite(FeatureView v) noexcept {
    for (float x : v) {
        if (!std::isfinite(x)) {
            return false;
        }
    }
    return true;
}

void check_dim(std::size_t expected, std::size_t actual) {
    if (expected != actual) {
        throw Error(ErrorCode::DimMismatch,
                    "expected dim " + std::to_string(expected) + ", got " + std::to_string(actual));
    }
}

void l2_normalize_inplace(std::span<float> v) {
    double sq = 0.0;
    for (float x : v) {
        sq += static_cast<double>(x) * x;
    }
    const double norm = std::sqrt(sq);
    if (!(norm >= 1e-12)) {
        throw Error(ErrorCode::ZeroVector, "cannot normalize a vector with norm < 1e-12");
    }
    for (float& x : v) {
        x = static_cast<float>(x / norm);
    }
}

FeatureVector l2_normalize(FeatureView v) {
    std::vector<float> out(v.begin(), v.end());
    l2_normalize_inplace(out);
    return FeatureVector(std::move(out));
}

float squared_l2(const float* a, const float* b, std::size_t dim) noexcept {
    constexpr std::size_t kLanes = 16;
    float acc[kLanes] = {};
    std::size_t i = 0;
    for (; i + kLanes <= dim; i += kLanes) {
        for (std::size_t j = 0; j < kLanes; ++j) {
            const float t = a[i + j] - b[i + j];
            acc[j] += t * t;
        }
    }
    float sum = 0.0F;
    for (; i < dim; ++i) {
        const float t = a[i] - b[i];
        sum += t * t;
    }
    for (float x : acc) {
        sum += x;
    }
    return sum;
}

float cosine_distance(FeatureView u, FeatureView v) {
    check_dim(u.size(), v.size());
    return cosine_distance_unchecked(u.data(), v.data(), u.size());
}

double dot(FeatureView u, FeatureView v) {
    check_dim(u.size(), v.size());
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        s += static_cast<double>(u[i]) * v[i];
    }
    return s;
}

}  // namespace acm
