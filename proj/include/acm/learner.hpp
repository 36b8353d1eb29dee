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
#include <optional>
#include <ostream>
#include <vector>

#include "acm/ann/hnsw.hpp"
#include "acm/ann/neighbor_index.hpp"
#include "acm/classifier.hpp"
#include "acm/core.hpp"

namespace acm::learner {

enum class Backend : std::uint32_t { Hnsw = 0, BruteForce = 1 };

struct AcmConfig {
    std::uint32_t k_initial = 16;
    std::uint32_t k_max = 512;
    std::uint32_t recalib_interval = 1000;  ///< 0 disables recalibration
    std::uint32_t recalib_window = 1000;
    bool exact_match_shortcircuit = false;
    bool leave_one_out = true;
    Backend backend = Backend::Hnsw;
    ann::HnswParams hnsw;

    void validate() const;

    friend bool operator==(const AcmConfig&, const AcmConfig&) = default;
};

/// Powers of two 1, 2, 4, ... up to k_max.
std::vector<std::uint32_t> candidate_ks(std::uint32_t k_max);

/// Plurality label over the first `k` hits. Ties go to the tied label with the nearest
/// representative, then to the earlier position. Empty when there are no hits.
std::optional<Label> majority_vote(std::span<const NeighborHit> hits, std::size_t k);

/// Running plurality vote, fed one hit at a time (nearest first).
class VoteCounter {
public:
    void add(const NeighborHit& hit);
    std::optional<Label> leader() const noexcept { return leader_; }
    void clear();

private:
    struct Tally {
        Label label;
        std::uint32_t votes;
        float nearest;
        std::uint32_t first;
    };
    static bool beats(const Tally& a, const Tally& b) noexcept;

    std::vector<Tally> tallies_;
    std::optional<Label> leader_;
    std::size_t leader_slot_ = 0;
    std::uint32_t seen_ = 0;
};

struct Prediction {
    std::optional<Label> label;
    std::vector<NeighborHit> hits;
};

/// Simulated accuracy of each candidate k from the last recalibration.
struct RecalibrationResult {
    std::vector<std::uint32_t> ks;
    std::vector<double> accuracy;
    std::uint32_t chosen = 1;
};

/// kNN memory over fixed features: retrieve, vote, then insert the labeled sample.
/// k is periodically re-chosen by replaying the most recent samples against memory.
class AcmLearner final : public OnlineClassifier {
public:
    AcmLearner(std::size_t dim, AcmConfig config = {});

    Prediction predict_with_hits(FeatureView z) const;
    std::optional<Label> predict(FeatureView z) const override { return predict_with_hits(z).label; }
    void learn(FeatureView z, Label y) override;

    /// Throws InsufficientMemory unless memory holds more than k_max samples.
    RecalibrationResult recalibrate_k();

    std::string_view name() const noexcept override {
        return config_.backend == Backend::Hnsw ? "ACM" : "BRUTE_KNN";
    }
    std::size_t current_k() const noexcept override { return effective_k(); }
    std::size_t memory_count() const noexcept override { return memory_->size(); }

    /// Configured k clipped to the memory size.
    std::size_t effective_k() const noexcept;
    std::uint32_t k() const noexcept { return k_; }
    void set_k(std::uint32_t k);

    const AcmConfig& config() const noexcept { return config_; }
    const ann::NeighborIndex& memory() const noexcept { return *memory_; }
    std::size_t dim() const noexcept { return dim_; }
    std::size_t recent_size() const noexcept { return recent_count_; }
    std::uint32_t steps_since_recalibration() const noexcept { return steps_since_recalib_; }
    const std::optional<RecalibrationResult>& last_recalibration() const noexcept { return last_recalib_; }

    /// "ACMLRN1\0", config, k, counters, recent window, then the index snapshot.
    void save(std::ostream& out) const;
    static AcmLearner load(std::istream& in);

private:
    struct RecentEntry {
        EntryId entry_id;
        Label label;
    };

    void remember(FeatureView z, Label y, EntryId id);

    std::size_t dim_;
    AcmConfig config_;
    std::unique_ptr<ann::NeighborIndex> memory_;
    std::uint32_t k_;
    std::uint32_t steps_since_recalib_ = 0;

    // ring buffer of the last recalib_window samples
    std::vector<float> recent_features_;
    std::vector<RecentEntry> recent_meta_;
    std::size_t recent_head_ = 0;
    std::size_t recent_count_ = 0;

    std::optional<RecalibrationResult> last_recalib_;
};

/// One protocol step: predict from the feature alone, then reveal the label and learn.
/// Latencies are measured with a monotonic clock unless `measure_latency` is false,
/// in which case both are reported as zero.
PredictionOutcome step(OnlineClassifier& model, const StreamRecord& record, std::uint64_t timestep,
                       bool measure_latency = true);

}  // namespace acm::learner
