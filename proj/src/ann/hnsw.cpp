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

#include "acm/ann/hnsw.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>
#include <string_view>

#include "acm/binary_io.hpp"

namespace acm::ann {

namespace {
constexpr std::string_view kMagic{"ACMIDX1\0", 8};

using MinQueue = std::priority_queue<Candidate, std::vector<Candidate>, std::greater<>>;
using MaxQueue = std::priority_queue<Candidate>;
}  // namespace

HnswParams HnswParams::with_degree(std::uint32_t m, std::uint32_t ef_construction,
                                   std::uint32_t ef_search, std::uint64_t seed) {
    HnswParams p;
    p.m = m;
    p.m0 = 2 * m;
    p.ef_construction = ef_construction;
    p.ef_search = ef_search;
    p.level_multiplier = m > 1 ? 1.0 / std::log(static_cast<double>(m)) : 0.0;
    p.rng_seed = seed;
    return p;
}

void HnswParams::validate() const {
    if (m < 2) {
        throw Error(ErrorCode::InvalidConfig, "hnsw m must be >= 2");
    }
    if (m0 < m) {
        throw Error(ErrorCode::InvalidConfig, "hnsw m0 must be >= m");
    }
    if (ef_construction < m) {
        throw Error(ErrorCode::InvalidConfig, "hnsw ef_construction must be >= m");
    }
    if (ef_search < 1) {
        throw Error(ErrorCode::InvalidConfig, "hnsw ef_search must be >= 1");
    }
    if (!(level_multiplier >= 0.0) || !std::isfinite(level_multiplier)) {
        throw Error(ErrorCode::InvalidConfig, "hnsw level multiplier must be finite and >= 0");
    }
}

// Epoch-tagged visited sets, recycled across searches so concurrent readers each get one.
class HnswIndex::VisitedPool {
public:
    class List {
    public:
        void prepare(std::size_t n) {
            if (marks_.size() < n) {
                marks_.resize(std::max(n, marks_.size() * 2), 0);
            }
            if (++epoch_ == 0) {
                std::fill(marks_.begin(), marks_.end(), 0);
                epoch_ = 1;
            }
        }
        bool test_and_set(EntryId id) noexcept {
            if (marks_[id] == epoch_) {
                return true;
            }
            marks_[id] = epoch_;
            return false;
        }

    private:
        std::vector<std::uint16_t> marks_;
        std::uint16_t epoch_ = 0;
    };

    class Lease {
    public:
        Lease(VisitedPool& pool, std::unique_ptr<List> list) : pool_(pool), list_(std::move(list)) {}
        ~Lease() { pool_.give_back(std::move(list_)); }
        Lease(const Lease&) = delete;
        Lease& operator=(const Lease&) = delete;
        List& operator*() noexcept { return *list_; }
        List* operator->() noexcept { return list_.get(); }

    private:
        VisitedPool& pool_;
        std::unique_ptr<List> list_;
    };

    Lease acquire(std::size_t n) {
        std::unique_ptr<List> list;
        {
            std::lock_guard lock(mutex_);
            if (!free_.empty()) {
                list = std::move(free_.back());
                free_.pop_back();
            }
        }
        if (!list) {
            list = std::make_unique<List>();
        }
        list->prepare(n);
        return Lease(*this, std::move(list));
    }

private:
    void give_back(std::unique_ptr<List> list) {
        std::lock_guard lock(mutex_);
        free_.push_back(std::move(list));
    }

    std::mutex mutex_;
    std::vector<std::unique_ptr<List>> free_;
};

HnswIndex::HnswIndex(std::size_t dim, HnswParams params)
    : dim_(dim), params_(params), rng_(params.rng_seed), visited_(std::make_unique<VisitedPool>()) {
    if (dim == 0) {
        throw Error(ErrorCode::InvalidConfig, "index dim must be positive");
    }
    params_.validate();
}

HnswIndex::~HnswIndex() = default;
HnswIndex::HnswIndex(HnswIndex&&) noexcept = default;
HnswIndex& HnswIndex::operator=(HnswIndex&&) noexcept = default;

void HnswIndex::reserve(std::size_t n) {
    vectors_.reserve(n * dim_);
    labels_.reserve(n);
    levels_.reserve(n);
    layer0_.reserve(n * (params_.m0 + 1));
    upper_.reserve(n);
}

std::uint32_t* HnswIndex::links(EntryId id, std::uint32_t level) noexcept {
    if (level == 0) {
        return layer0_.data() + static_cast<std::size_t>(id) * (params_.m0 + 1);
    }
    return upper_[id].data() + static_cast<std::size_t>(level - 1) * (params_.m + 1);
}

const std::uint32_t* HnswIndex::links(EntryId id, std::uint32_t level) const noexcept {
    return const_cast<HnswIndex*>(this)->links(id, level);
}

std::span<const EntryId> HnswIndex::neighbors(EntryId id, std::uint32_t level) const noexcept {
    if (id >= size() || level > levels_[id]) {
        return {};
    }
    const std::uint32_t* l = links(id, level);
    return {l + 1, l[0]};
}

Candidate HnswIndex::greedy_descend(const float* query, Candidate cur, std::uint32_t from_level,
                                    std::uint32_t to_level) const {
    for (std::uint32_t level = from_level + 1; level-- > to_level;) {
        bool changed = true;
        while (changed) {
            changed = false;
            const std::uint32_t* l = links(cur.id, level);
            for (std::uint32_t i = 1; i <= l[0]; ++i) {
                const Candidate c{distance_to(query, l[i]), l[i]};
                if (c < cur) {
                    cur = c;
                    changed = true;
                }
            }
        }
    }
    return cur;
}

std::vector<Candidate> HnswIndex::search_layer(const float* query, Candidate entry, std::size_t ef,
                                               std::uint32_t level) const {
    auto visited = visited_->acquire(size());
    MinQueue frontier;
    MaxQueue best;
    visited->test_and_set(entry.id);
    frontier.push(entry);
    best.push(entry);

    while (!frontier.empty()) {
        const Candidate current = frontier.top();
        if (best.size() >= ef && best.top() < current) {
            break;
        }
        frontier.pop();
        const std::uint32_t* l = links(current.id, level);
        const std::uint32_t n = l[0];
        for (std::uint32_t i = 1; i <= n; ++i) {
            if (i < n) {
                __builtin_prefetch(vectors_.data() + static_cast<std::size_t>(l[i + 1]) * dim_);
            }
            const EntryId e = l[i];
            if (visited->test_and_set(e)) {
                continue;
            }
            const Candidate c{distance_to(query, e), e};
            if (best.size() < ef || c < best.top()) {
                frontier.push(c);
                best.push(c);
                if (best.size() > ef) {
                    best.pop();
                }
            }
        }
    }

    std::vector<Candidate> out(best.size());
    for (std::size_t i = out.size(); i-- > 0;) {
        out[i] = best.top();
        best.pop();
    }
    return out;
}

void HnswIndex::set_links(EntryId id, std::uint32_t level, std::span<const Candidate> neighbors) {
    std::uint32_t* l = links(id, level);
    l[0] = static_cast<std::uint32_t>(neighbors.size());
    for (std::size_t i = 0; i < neighbors.size(); ++i) {
        l[i + 1] = neighbors[i].id;
    }
}

void HnswIndex::connect(EntryId from, EntryId to, std::uint32_t level) {
    const std::uint32_t cap = level == 0 ? params_.m0 : params_.m;
    std::uint32_t* l = links(from, level);
    if (l[0] < cap) {
        l[++l[0]] = to;
        return;
    }
    const float* base = vectors_.data() + static_cast<std::size_t>(from) * dim_;
    std::vector<Candidate> candidates;
    candidates.reserve(l[0] + 1);
    for (std::uint32_t i = 1; i <= l[0]; ++i) {
        candidates.push_back({distance_to(base, l[i]), l[i]});
    }
    candidates.push_back({distance_to(base, to), to});
    std::sort(candidates.begin(), candidates.end());
    const auto kept = select_neighbors(candidates, cap, SelectStrategy::Heuristic,
                                       [this](EntryId a, EntryId b) {
                                           return distance_to(vectors_.data() + static_cast<std::size_t>(a) * dim_, b);
                                       });
    set_links(from, level, kept);
}

EntryId HnswIndex::insert(FeatureView feature, Label label) {
    check_dim(dim_, feature.size());
    const auto id = static_cast<EntryId>(labels_.size());
    const std::uint32_t level = assign_level(rng_, params_.level_multiplier);

    vectors_.insert(vectors_.end(), feature.begin(), feature.end());
    labels_.push_back(label);
    levels_.push_back(level);
    layer0_.resize(layer0_.size() + params_.m0 + 1, 0);
    upper_.emplace_back(static_cast<std::size_t>(level) * (params_.m + 1), 0);

    if (id == 0) {
        entry_point_ = 0;
        max_level_ = level;
        return id;
    }

    const float* query = vectors_.data() + static_cast<std::size_t>(id) * dim_;
    Candidate cur{distance_to(query, entry_point_), entry_point_};
    if (level < max_level_) {
        cur = greedy_descend(query, cur, max_level_, level + 1);
    }
    auto pair_distance = [this](EntryId a, EntryId b) {
        return distance_to(vectors_.data() + static_cast<std::size_t>(a) * dim_, b);
    };
    for (std::uint32_t lc = std::min(level, max_level_) + 1; lc-- > 0;) {
        const auto found = search_layer(query, cur, params_.ef_construction, lc);
        const auto chosen = select_neighbors(found, params_.m, SelectStrategy::Heuristic, pair_distance);
        set_links(id, lc, chosen);
        for (const Candidate& c : chosen) {
            connect(c.id, id, lc);
        }
        cur = found.front();
    }
    if (level > max_level_) {
        max_level_ = level;
        entry_point_ = id;
    }
    return id;
}

std::vector<NeighborHit> HnswIndex::search(FeatureView query, std::size_t k, std::size_t ef) const {
    check_dim(dim_, query.size());
    if (labels_.empty()) {
        throw Error(ErrorCode::EmptyIndex, "search on an empty index");
    }
    const std::size_t want = std::min(k, size());
    ef = std::max(ef, k);
    Candidate cur{distance_to(query.data(), entry_point_), entry_point_};
    if (max_level_ > 0) {
        cur = greedy_descend(query.data(), cur, max_level_, 1);
    }
    auto found = search_layer(query.data(), cur, ef, 0);
    if (found.size() < want) {
        // Reachable component smaller than k: complete the result exactly.
        std::vector<Candidate> all;
        all.reserve(size());
        for (std::size_t i = 0; i < size(); ++i) {
            all.push_back({distance_to(query.data(), static_cast<EntryId>(i)), static_cast<EntryId>(i)});
        }
        std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(want), all.end());
        all.resize(want);
        found = std::move(all);
    }
    std::vector<NeighborHit> hits;
    hits.reserve(want);
    for (std::size_t i = 0; i < want; ++i) {
        hits.push_back({found[i].id, labels_[found[i].id], found[i].distance});
    }
    return hits;
}

GraphCheck HnswIndex::check_invariants() const {
    GraphCheck report;
    auto fail = [&report](std::string msg) {
        report.ok = false;
        if (report.violations.size() < 32) {
            report.violations.push_back(std::move(msg));
        }
    };
    const std::size_t n = size();
    if (levels_.size() != n || upper_.size() != n || vectors_.size() != n * dim_ ||
        layer0_.size() != n * (params_.m0 + 1)) {
        fail("storage sizes disagree with node count");
        return report;
    }
    std::uint32_t top = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto id = static_cast<EntryId>(i);
        const std::uint32_t lvl = levels_[i];
        top = std::max(top, lvl);
        if (upper_[i].size() != static_cast<std::size_t>(lvl) * (params_.m + 1)) {
            fail("node " + std::to_string(i) + " has lists for the wrong number of levels");
            continue;
        }
        for (std::uint32_t l = 0; l <= lvl; ++l) {
            const auto nb = neighbors(id, l);
            const std::uint32_t cap = l == 0 ? params_.m0 : params_.m;
            if (nb.size() > cap) {
                fail("node " + std::to_string(i) + " exceeds degree bound on level " + std::to_string(l));
            }
            std::vector<EntryId> sorted(nb.begin(), nb.end());
            std::sort(sorted.begin(), sorted.end());
            if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
                fail("node " + std::to_string(i) + " has duplicate links on level " + std::to_string(l));
            }
            for (EntryId e : nb) {
                if (e >= n) {
                    fail("node " + std::to_string(i) + " links to missing node " + std::to_string(e));
                } else if (e == id) {
                    fail("node " + std::to_string(i) + " links to itself");
                } else if (levels_[e] < l) {
                    fail("node " + std::to_string(i) + " links to node " + std::to_string(e) +
                         " above its top level");
                }
            }
        }
    }
    if (n > 0) {
        if (top != max_level_) {
            fail("recorded max level differs from the highest node level");
        }
        if (entry_point_ >= n || levels_[entry_point_] != max_level_) {
            fail("entry point does not sit on the top level");
        }
    }
    return report;
}

void HnswIndex::save(std::ostream& out) const {
    io::Writer w(out);
    w.put_bytes(kMagic);
    w.put<std::uint32_t>(params_.m);
    w.put<std::uint32_t>(params_.m0);
    w.put<std::uint32_t>(params_.ef_construction);
    w.put<std::uint32_t>(params_.ef_search);
    w.put<double>(params_.level_multiplier);
    w.put<std::uint64_t>(params_.rng_seed);
    w.put<std::uint64_t>(rng_.state());
    w.put<std::uint64_t>(size());
    w.put<std::uint32_t>(static_cast<std::uint32_t>(dim_));
    w.put<std::uint32_t>(entry_point_);
    w.put<std::uint32_t>(max_level_);
    for (std::size_t i = 0; i < size(); ++i) {
        w.put<std::uint32_t>(levels_[i]);
        w.put<std::uint32_t>(labels_[i]);
        w.put_array<float>(feature(static_cast<EntryId>(i)));
    }
    for (std::size_t i = 0; i < size(); ++i) {
        for (std::uint32_t l = 0; l <= levels_[i]; ++l) {
            const auto nb = neighbors(static_cast<EntryId>(i), l);
            w.put<std::uint32_t>(static_cast<std::uint32_t>(nb.size()));
            w.put_array<std::uint32_t>(nb);
        }
    }
}

HnswIndex HnswIndex::load(std::istream& in) {
    io::Reader r(in);
    r.expect_magic(kMagic);
    HnswParams p;
    p.m = r.get<std::uint32_t>();
    p.m0 = r.get<std::uint32_t>();
    p.ef_construction = r.get<std::uint32_t>();
    p.ef_search = r.get<std::uint32_t>();
    p.level_multiplier = r.get<double>();
    p.rng_seed = r.get<std::uint64_t>();
    const auto rng_state = r.get<std::uint64_t>();
    const auto count = r.get<std::uint64_t>();
    const auto dim = r.get<std::uint32_t>();

    HnswIndex index(dim, p);
    index.rng_.set_state(rng_state);
    index.entry_point_ = r.get<std::uint32_t>();
    index.max_level_ = r.get<std::uint32_t>();
    index.reserve(count);
    std::vector<float> buf(dim);
    for (std::uint64_t i = 0; i < count; ++i) {
        const auto level = r.get<std::uint32_t>();
        if (level > kMaxLevel) {
            throw Error(ErrorCode::TruncatedFile, "corrupt node level in index snapshot");
        }
        index.levels_.push_back(level);
        index.labels_.push_back(r.get<std::uint32_t>());
        r.get_array<float>(buf);
        index.vectors_.insert(index.vectors_.end(), buf.begin(), buf.end());
        index.upper_.emplace_back(static_cast<std::size_t>(level) * (p.m + 1), 0);
    }
    index.layer0_.assign(count * (p.m0 + 1), 0);
    for (std::uint64_t i = 0; i < count; ++i) {
        for (std::uint32_t l = 0; l <= index.levels_[i]; ++l) {
            const auto len = r.get<std::uint32_t>();
            const std::uint32_t cap = l == 0 ? p.m0 : p.m;
            if (len > cap) {
                throw Error(ErrorCode::TruncatedFile, "corrupt adjacency list in index snapshot");
            }
            std::uint32_t* dst = index.links(static_cast<EntryId>(i), l);
            dst[0] = len;
            r.get_array<std::uint32_t>(std::span<std::uint32_t>(dst + 1, len));
        }
    }
    if (count > 0 && (index.entry_point_ >= count || index.levels_[index.entry_point_] != index.max_level_)) {
        throw Error(ErrorCode::TruncatedFile, "inconsistent entry point in index snapshot");
    }
    return index;
}

}  // namespace acm::ann
