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

#include "acm/ann/brute_force.hpp"

#include <algorithm>
#include <string_view>

#include "acm/binary_io.hpp"

namespace acm::ann {

namespace {
constexpr std::string_view kMagic{"ACMBF1\0\0", 8};

bool hit_less(const NeighborHit& a, const NeighborHit& b) noexcept {
    return a.distance < b.distance || (a.distance == b.distance && a.entry_id < b.entry_id);
}
}  // namespace

BruteForceIndex::BruteForceIndex(std::size_t dim) : dim_(dim) {
    if (dim == 0) {
        throw Error(ErrorCode::InvalidConfig, "index dim must be positive");
    }
}

void BruteForceIndex::reserve(std::size_t n) {
    vectors_.reserve(n * dim_);
    labels_.reserve(n);
}

EntryId BruteForceIndex::insert(FeatureView feature, Label label) {
    check_dim(dim_, feature.size());
    const auto id = static_cast<EntryId>(labels_.size());
    vectors_.insert(vectors_.end(), feature.begin(), feature.end());
    labels_.push_back(label);
    return id;
}

std::vector<NeighborHit> BruteForceIndex::search(FeatureView query, std::size_t k) const {
    check_dim(dim_, query.size());
    if (labels_.empty()) {
        throw Error(ErrorCode::EmptyIndex, "search on an empty index");
    }
    const std::size_t n = labels_.size();
    k = std::min(k, n);
    std::vector<NeighborHit> hits;
    hits.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto id = static_cast<EntryId>(i);
        hits.push_back({id, labels_[i],
                        cosine_distance_unchecked(query.data(), vectors_.data() + i * dim_, dim_)});
    }
    std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(k), hits.end(),
                      hit_less);
    hits.resize(k);
    return hits;
}

void BruteForceIndex::save(std::ostream& out) const {
    io::Writer w(out);
    w.put_bytes(kMagic);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(dim_));
    w.put<std::uint64_t>(labels_.size());
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        w.put<std::uint32_t>(labels_[i]);
        w.put_array<float>(feature(static_cast<EntryId>(i)));
    }
}

BruteForceIndex BruteForceIndex::load(std::istream& in) {
    io::Reader r(in);
    r.expect_magic(kMagic);
    const auto dim = r.get<std::uint32_t>();
    const auto count = r.get<std::uint64_t>();
    BruteForceIndex index(dim);
    std::vector<float> buf(dim);
    for (std::uint64_t i = 0; i < count; ++i) {
        const auto label = r.get<std::uint32_t>();
        r.get_array<float>(buf);
        index.insert(buf, label);
    }
    return index;
}

std::vector<NeighborHit> brute_search(const BruteForceIndex& index, FeatureView query, std::size_t k) {
    return index.search(query, k);
}

}  // namespace acm::ann
