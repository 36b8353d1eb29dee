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
#include <optional>
#include <string_view>

#include "acm/core.hpp"

namespace acm {

/// Predict-then-learn contract shared by every streaming method.
///
/// `predict` sees only the feature; the label arrives afterwards through `learn`.
/// `predict` is const so a frozen model can be evaluated from several threads.
class OnlineClassifier {
public:
    virtual ~OnlineClassifier() = default;

    virtual std::optional<Label> predict(FeatureView z) const = 0;
    virtual void learn(FeatureView z, Label y) = 0;

    virtual std::string_view name() const noexcept = 0;
    /// Neighbor count in use, 0 for methods without one.
    virtual std::size_t current_k() const noexcept { return 0; }
    /// Number of stored samples, 0 for parametric methods.
    virtual std::size_t memory_count() const noexcept { return 0; }
};

}  // namespace acm
