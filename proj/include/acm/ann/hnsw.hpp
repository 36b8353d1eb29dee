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
#include <istream>
#include <memory>
#include <mutex>
#include <ostream>
#include <vector>

#include "acm/ann/graph_util.hpp"
#include "acm/ann/neighbor_index.hpp"

namespace acm::ann {

struct HnswParams {
    std::uint32_t m = 100;                ///< max degree on levels >= 1
    std::uint32_t m0 = 200;               ///< max degree on level 0
    std::uint32_t ef_construction = 500;
    std::uint32_t ef_search = 500;
    double level_multiplier = 0.21714724095162588;  ///< 1 / ln(100)
    std::uint64_t rng_seed = 42;

    /// Derives m0 = 2m and mL = 1/ln(m) from `m`.
    static HnswParams with_degree(std::uint32_t m, std::uint32_t ef_construction,
                                  std::uint32_t ef_search, std::uint64_t seed = 42);

    void validate() const;

    friend bool operator==(const HnswParams&, const HnswParams&) = default;
};

/// Report produced by HnswIndex::check_invariants.
struct GraphCheck {
    bool ok = true;
    std::vector<std::string> violations;
};

/// Hierarchical navigable small-world graph over unit vectors (cosine distance).
///
/// Layer 0 adjacency lives in one flat array with stride m0 + 1 (size word followed by
/// ids); upper layers are per-node arrays with stride m + 1. There is no delete.
class HnswIndex final : public NeighborIndex {
public:
    HnswIndex(std::size_t dim, HnswParams params = {});
    ~HnswIndex() override;

    HnswIndex(HnswIndex&&) noexcept;
    HnswIndex& operator=(HnswIndex&&) noexcept;

    EntryId insert(FeatureView feature, Label label) override;

    std::vector<NeighborHit> search(FeatureView query, std::size_t k) const override {
        return search(query, k, params_.ef_search);
    }
    /// Beam width is max(ef, k).
    std::vector<NeighborHit> search(FeatureView query, std::size_t k, std::size_t ef) const;

    std::size_t size() const noexcept override { return labels_.size(); }
    std::size_t dim() const noexcept override { return dim_; }
    const HnswParams& params() const noexcept { return params_; }
    void set_ef_search(std::uint32_t ef) noexcept { params_.ef_search = ef; }

    EntryId entry_point() const noexcept { return entry_point_; }
    std::uint32_t max_level() const noexcept { return max_level_; }
    std::uint32_t level(EntryId id) const noexcept { return levels_[id]; }
    Label label(EntryId id) const noexcept { return labels_[id]; }
    FeatureView feature(EntryId id) const noexcept {
        return {vectors_.data() + static_cast<std::size_t>(id) * dim_, dim_};
    }
    std::span<const EntryId> neighbors(EntryId id, std::uint32_t level) const noexcept;

    /// Walks the whole graph and verifies every structural invariant.
    GraphCheck check_invariants() const;

    void reserve(std::size_t n);

    /// Snapshot: "ACMIDX1\0", params, rng state, count, dim, entry point, max level,
    /// node records (level, label, feature), then per node, per level, length-prefixed
    /// id arrays. All fields little-endian.
    void save(std::ostream& out) const override;
    static HnswIndex load(std::istream& in);

private:
    class VisitedPool;

    std::uint32_t* links(EntryId id, std::uint32_t level) noexcept;
    const std::uint32_t* links(EntryId id, std::uint32_t level) const noexcept;
    float distance_to(const float* query, EntryId id) const noexcept {
        return cosine_distance_unchecked(query, vectors_.data() + static_cast<std::size_t>(id) * dim_,
                                         dim_);
    }
    Candidate greedy_descend(const float* query, Candidate start, std::uint32_t from_level,
                             std::uint32_t to_level) const;
    std::vector<Candidate> search_layer(const float* query, Candidate entry, std::size_t ef,
                                        std::uint32_t level) const;
    void connect(EntryId from, EntryId to, std::uint32_t level);
    void set_links(EntryId id, std::uint32_t level, std::span<const Candidate> neighbors);

    std::size_t dim_;
    HnswParams params_;
    SplitMix64 rng_;
    std::vector<float> vectors_;
    std::vector<Label> labels_;
    std::vector<std::uint32_t> levels_;
    std::vector<std::uint32_t> layer0_;
    std::vector<std::vector<std::uint32_t>> upper_;
    EntryId entry_point_ = 0;
    std::uint32_t max_level_ = 0;
    std::unique_ptr<VisitedPool> visited_;
};

}  // namespace acm::ann
