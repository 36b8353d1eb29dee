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

#include "acm/learner.hpp"

#include <algorithm>
#include <chrono>
#include <string_view>
#include <unordered_map>

#include "acm/ann/brute_force.hpp"
#include "acm/binary_io.hpp"

namespace acm::learner {

namespace {
constexpr std::string_view kMagic{"ACMLRN1\0", 8};

std::unique_ptr<ann::NeighborIndex> make_memory(std::size_t dim, const AcmConfig& config) {
    if (config.backend == Backend::Hnsw) {
        return std::make_unique<ann::HnswIndex>(dim, config.hnsw);
    }
    return std::make_unique<ann::BruteForceIndex>(dim);
}
}  // namespace

void AcmConfig::validate() const {
    if (k_initial < 1 || k_max < 1 || k_initial > k_max) {
        throw Error(ErrorCode::InvalidConfig, "need 1 <= k_initial <= k_max");
    }
    if (recalib_interval > 0 && recalib_window < 1) {
        throw Error(ErrorCode::InvalidConfig, "recalibration window must be positive");
    }
    if (backend == Backend::Hnsw) {
        hnsw.validate();
    }
}

std::vector<std::uint32_t> candidate_ks(std::uint32_t k_max) {
    std::vector<std::uint32_t> ks;
    for (std::uint64_t k = 1; k <= k_max; k *= 2) {
        ks.push_back(static_cast<std::uint32_t>(k));
    }
    return ks;
}

bool VoteCounter::beats(const Tally& a, const Tally& b) noexcept {
    if (a.votes != b.votes) {
        return a.votes > b.votes;
    }
    if (a.nearest != b.nearest) {
        return a.nearest < b.nearest;
    }
    return a.first < b.first;
}

void VoteCounter::clear() {
    tallies_.clear();
    leader_.reset();
    leader_slot_ = 0;
    seen_ = 0;
}

void VoteCounter::add(const NeighborHit& hit) {
    // Distinct labels among k <= a few hundred hits: a linear scan beats hashing here.
    std::size_t slot = tallies_.size();
    for (std::size_t i = 0; i < tallies_.size(); ++i) {
        if (tallies_[i].label == hit.label) {
            slot = i;
            break;
        }
    }
    if (slot == tallies_.size()) {
        tallies_.push_back({hit.label, 1, hit.distance, seen_});
    } else {
        Tally& t = tallies_[slot];
        ++t.votes;
        t.nearest = std::min(t.nearest, hit.distance);
    }
    ++seen_;
    // Only this label's tally moved, and only in its favor.
    if (!leader_ || (slot != leader_slot_ && beats(tallies_[slot], tallies_[leader_slot_]))) {
        leader_slot_ = slot;
        leader_ = tallies_[slot].label;
    }
}

std::optional<Label> majority_vote(std::span<const NeighborHit> hits, std::size_t k) {
    VoteCounter counter;
    const std::size_t n = std::min(k, hits.size());
    for (std::size_t i = 0; i < n; ++i) {
        counter.add(hits[i]);
    }
    return counter.leader();
}

AcmLearner::AcmLearner(std::size_t dim, AcmConfig config)
    : dim_(dim), config_(config), memory_(make_memory(dim, config)), k_(config.k_initial) {
    config_.validate();
    if (config_.recalib_interval > 0) {
        recent_features_.resize(static_cast<std::size_t>(config_.recalib_window) * dim_);
        recent_meta_.resize(config_.recalib_window);
    }
}

std::size_t AcmLearner::effective_k() const noexcept {
    return std::min<std::size_t>(k_, memory_->size());
}

void AcmLearner::set_k(std::uint32_t k) {
    if (k < 1 || k > config_.k_max) {
        throw Error(ErrorCode::InvalidConfig, "k must lie in [1, k_max]");
    }
    k_ = k;
}

Prediction AcmLearner::predict_with_hits(FeatureView z) const {
    check_dim(dim_, z.size());
    Prediction out;
    if (memory_->size() == 0) {
        return out;
    }
    out.hits = memory_->search(z, effective_k());
    if (config_.exact_match_shortcircuit && !out.hits.empty() && out.hits.front().distance <= 1e-9F) {
        out.label = out.hits.front().label;
        return out;
    }
    out.label = majority_vote(out.hits, out.hits.size());
    return out;
}

void AcmLearner::remember(FeatureView z, Label y, EntryId id) {
    if (recent_meta_.empty()) {
        return;
    }
    std::copy(z.begin(), z.end(), recent_features_.begin() + static_cast<std::ptrdiff_t>(recent_head_ * dim_));
    recent_meta_[recent_head_] = {id, y};
    recent_head_ = (recent_head_ + 1) % recent_meta_.size();
    recent_count_ = std::min(recent_count_ + 1, recent_meta_.size());
}

void AcmLearner::learn(FeatureView z, Label y) {
    check_dim(dim_, z.size());
    const EntryId id = memory_->insert(z, y);
    remember(z, y, id);
    if (config_.recalib_interval == 0) {
        return;
    }
    ++steps_since_recalib_;
    if (steps_since_recalib_ >= config_.recalib_interval && memory_->size() > config_.k_max) {
        recalibrate_k();
    }
}

RecalibrationResult AcmLearner::recalibrate_k() {
    if (memory_->size() <= config_.k_max) {
        throw Error(ErrorCode::InsufficientMemory, "recalibration needs more than k_max stored samples");
    }
    if (recent_count_ == 0) {
        throw Error(ErrorCode::InsufficientMemory, "recalibration window is empty");
    }
    RecalibrationResult result;
    result.ks = candidate_ks(config_.k_max);
    std::vector<std::uint64_t> correct(result.ks.size(), 0);
    const std::size_t fetch = config_.k_max + (config_.leave_one_out ? 1 : 0);

    VoteCounter counter;
    for (std::size_t i = 0; i < recent_count_; ++i) {
        const std::size_t slot = (recent_head_ + recent_meta_.size() - recent_count_ + i) % recent_meta_.size();
        const FeatureView feature{recent_features_.data() + slot * dim_, dim_};
        const RecentEntry& entry = recent_meta_[slot];
        auto hits = memory_->search(feature, fetch);
        if (config_.leave_one_out) {
            auto self = std::find_if(hits.begin(), hits.end(),
                                     [&](const NeighborHit& h) { return h.entry_id == entry.entry_id; });
            if (self != hits.end()) {
                hits.erase(self);
            }
        }
        hits.resize(std::min<std::size_t>(hits.size(), config_.k_max));

        counter.clear();
        std::size_t next = 0;
        for (std::size_t h = 0; h < hits.size() && next < result.ks.size(); ++h) {
            counter.add(hits[h]);
            if (h + 1 == result.ks[next]) {
                if (counter.leader() == entry.label) {
                    ++correct[next];
                }
                ++next;
            }
        }
    }

    result.accuracy.resize(result.ks.size());
    std::size_t best = 0;
    for (std::size_t j = 0; j < result.ks.size(); ++j) {
        result.accuracy[j] = static_cast<double>(correct[j]) / static_cast<double>(recent_count_);
        if (correct[j] > correct[best]) {
            best = j;
        }
    }
    result.chosen = result.ks[best];
    k_ = result.chosen;
    steps_since_recalib_ = 0;
    last_recalib_ = result;
    return result;
}

void AcmLearner::save(std::ostream& out) const {
    io::Writer w(out);
    w.put_bytes(kMagic);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(dim_));
    w.put<std::uint32_t>(config_.k_initial);
    w.put<std::uint32_t>(config_.k_max);
    w.put<std::uint32_t>(config_.recalib_interval);
    w.put<std::uint32_t>(config_.recalib_window);
    w.put<std::uint8_t>(config_.exact_match_shortcircuit ? 1 : 0);
    w.put<std::uint8_t>(config_.leave_one_out ? 1 : 0);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(config_.backend));
    w.put<std::uint32_t>(config_.hnsw.m);
    w.put<std::uint32_t>(config_.hnsw.m0);
    w.put<std::uint32_t>(config_.hnsw.ef_construction);
    w.put<std::uint32_t>(config_.hnsw.ef_search);
    w.put<double>(config_.hnsw.level_multiplier);
    w.put<std::uint64_t>(config_.hnsw.rng_seed);
    w.put<std::uint32_t>(k_);
    w.put<std::uint32_t>(steps_since_recalib_);
    w.put<std::uint64_t>(recent_count_);
    for (std::size_t i = 0; i < recent_count_; ++i) {
        const std::size_t slot = (recent_head_ + recent_meta_.size() - recent_count_ + i) % recent_meta_.size();
        w.put<std::uint32_t>(recent_meta_[slot].entry_id);
        w.put<std::uint32_t>(recent_meta_[slot].label);
        w.put_array<float>(FeatureView{recent_features_.data() + slot * dim_, dim_});
    }
    memory_->save(out);
}

AcmLearner AcmLearner::load(std::istream& in) {
    io::Reader r(in);
    r.expect_magic(kMagic);
    const auto dim = r.get<std::uint32_t>();
    AcmConfig config;
    config.k_initial = r.get<std::uint32_t>();
    config.k_max = r.get<std::uint32_t>();
    config.recalib_interval = r.get<std::uint32_t>();
    config.recalib_window = r.get<std::uint32_t>();
    config.exact_match_shortcircuit = r.get<std::uint8_t>() != 0;
    config.leave_one_out = r.get<std::uint8_t>() != 0;
    const auto backend = r.get<std::uint32_t>();
    if (backend > static_cast<std::uint32_t>(Backend::BruteForce)) {
        throw Error(ErrorCode::InvalidConfig, "unknown learner backend tag");
    }
    config.backend = static_cast<Backend>(backend);
    config.hnsw.m = r.get<std::uint32_t>();
    config.hnsw.m0 = r.get<std::uint32_t>();
    config.hnsw.ef_construction = r.get<std::uint32_t>();
    config.hnsw.ef_search = r.get<std::uint32_t>();
    config.hnsw.level_multiplier = r.get<double>();
    config.hnsw.rng_seed = r.get<std::uint64_t>();
    const auto k = r.get<std::uint32_t>();
    const auto steps = r.get<std::uint32_t>();
    const auto recent = r.get<std::uint64_t>();

    struct Pending {
        EntryId id;
        Label label;
        std::vector<float> feature;
    };
    std::vector<Pending> window;
    for (std::uint64_t i = 0; i < recent; ++i) {
        Pending p{r.get<std::uint32_t>(), r.get<std::uint32_t>(), std::vector<float>(dim)};
        r.get_array<float>(p.feature);
        window.push_back(std::move(p));
    }

    std::unique_ptr<ann::NeighborIndex> memory;
    if (config.backend == Backend::Hnsw) {
        auto index = ann::HnswIndex::load(in);
        if (!(index.params() == config.hnsw)) {
            throw Error(ErrorCode::InvalidConfig, "learner and index snapshot disagree on graph parameters");
        }
        memory = std::make_unique<ann::HnswIndex>(std::move(index));
    } else {
        memory = std::make_unique<ann::BruteForceIndex>(ann::BruteForceIndex::load(in));
    }
    check_dim(dim, memory->dim());

    AcmLearner learner(dim, config);
    learner.memory_ = std::move(memory);
    learner.set_k(k);
    learner.steps_since_recalib_ = steps;
    if (window.size() > learner.recent_meta_.size()) {
        throw Error(ErrorCode::TruncatedFile, "recent window larger than configured");
    }
    for (const Pending& p : window) {
        learner.remember(p.feature, p.label, p.id);
    }
    return learner;
}

PredictionOutcome step(OnlineClassifier& model, const StreamRecord& record, std::uint64_t timestep,
                       bool measure_latency) {
    using Clock = std::chrono::steady_clock;
    PredictionOutcome outcome;
    outcome.timestep = timestep;
    outcome.truth = record.label;

    const auto t0 = Clock::now();
    outcome.predicted = model.predict(record.feature.view());
    const auto t1 = Clock::now();
    model.learn(record.feature.view(), record.label);
    const auto t2 = Clock::now();

    outcome.correct = outcome.predicted.has_value() && *outcome.predicted == record.label;
    if (measure_latency) {
        outcome.predict_latency_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count();
        outcome.learn_latency_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(t2 - t1).count();
    }
    return outcome;
}

}  // namespace acm::learner
