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
#include <istream>
#include <ostream>
#include <vector>

#include "acm/ann/neighbor_index.hpp"

namespace acm::ann {

/// Exact linear-scan index. Ties in distance go to the lower entry id.
class BruteForceIndex final : public NeighborIndex {
public:
    explicit BruteForceIndex(std::size_t dim);

    EntryId insert(FeatureView feature, Label label) override;
    std::vector<NeighborHit> search(FeatureView query, std::size_t k) const override;

    std::size_t size() const noexcept override { return labels_.size(); }
    std::size_t dim() const noexcept override { return dim_; }

    FeatureView feature(EntryId id) const noexcept {
        return {vectors_.data() + static_cast<std::size_t>(id) * dim_, dim_};
    }
    Label label(EntryId id) const noexcept { return labels_[id]; }

    void reserve(std::size_t n);

    /// "ACMBF1\0\0", dim, count, then (label, feature) per entry.
    void save(std::ostream& out) const override;
    static BruteForceIndex load(std::istream& in);

private:
    std::size_t dim_;
    std::vector<float> vectors_;
    std::vector<Label> labels_;
};

std::vector<NeighborHit> brute_search(const BruteForceIndex& index, FeatureView query, std::size_t k);

}  // namespace acm::ann
