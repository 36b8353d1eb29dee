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
#include <ostream>
#include <vector>

#include "acm/core.hpp"

namespace acm::ann {

/// Append-only labeled vector store with k-nearest-neighbor retrieval over unit vectors.
///
/// Single writer, many readers: `search` may run concurrently with other `search`
/// calls, never with `insert`.
class NeighborIndex {
public:
    virtual ~NeighborIndex() = default;

    virtual EntryId insert(FeatureView feature, Label label) = 0;

    /// Up to `k` hits sorted by ascending (distance, entry_id). Throws EmptyIndex.
    virtual std::vector<NeighborHit> search(FeatureView query, std::size_t k) const = 0;

    virtual std::size_t size() const noexcept = 0;
    virtual std::size_t dim() const noexcept = 0;

    virtual void save(std::ostream& out) const = 0;
};

}  // namespace acm::ann
