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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "acm/core.hpp"

namespace acm::ann {

/// 64-bit SplitMix generator. The whole state is one word, so snapshots can carry it.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed = 0) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }

    result_type operator()() noexcept {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform on (0, 1].
    double uniform_open_closed() noexcept {
        return 1.0 - static_cast<double>((*this)() >> 11) * 0x1.0p-53;
    }

    std::uint64_t state() const noexcept { return state_; }
    void set_state(std::uint64_t s) noexcept { state_ = s; }

private:
    std::uint64_t state_;
};

inline constexpr std::uint32_t kMaxLevel = 48;

/// -ln(U) * mL for U uniform on (0, 1]; its mean is mL.
inline double exponential_draw(double u, double level_multiplier) noexcept {
    return -std::log(u) * level_multiplier;
}

inline std::uint32_t level_from_uniform(double u, double level_multiplier) noexcept {
    const double x = std::floor(exponential_draw(u, level_multiplier));
    return x >= kMaxLevel ? kMaxLevel : static_cast<std::uint32_t>(x);
}

inline std::uint32_t assign_level(SplitMix64& rng, double level_multiplier) noexcept {
    return level_from_uniform(rng.uniform_open_closed(), level_multiplier);
}

struct Candidate {
    float distance;
    EntryId id;

    friend bool operator<(const Candidate& a, const Candidate& b) noexcept {
        return a.distance < b.distance || (a.distance == b.distance && a.id < b.id);
    }
    friend bool operator>(const Candidate& a, const Candidate& b) noexcept { return b < a; }
    friend bool operator==(const Candidate&, const Candidate&) = default;
};

enum class SelectStrategy { Simple, Heuristic };

/// Prunes a distance-sorted candidate list down to at most `m` ids.
///
/// Heuristic: walk candidates nearest first and drop one when some already-kept
/// neighbor is strictly closer to it than the base point is. Pruned candidates are
/// not used to back-fill.
template <typename Distance>
std::vector<Candidate> select_neighbors(std::span<const Candidate> sorted_candidates, std::size_t m,
                                        SelectStrategy strategy, Distance&& distance) {
    std::vector<Candidate> kept;
    if (strategy == SelectStrategy::Simple || sorted_candidates.size() <= 1) {
        const std::size_t n = std::min(m, sorted_candidates.size());
        kept.assign(sorted_candidates.begin(), sorted_candidates.begin() + static_cast<std::ptrdiff_t>(n));
        return kept;
    }
    kept.reserve(std::min(m, sorted_candidates.size()));
    for (const Candidate& c : sorted_candidates) {
        if (kept.size() >= m) {
            break;
        }
        bool occluded = false;
        for (const Candidate& r : kept) {
            if (distance(c.id, r.id) < c.distance) {
                occluded = true;
                break;
            }
        }
        if (!occluded) {
            kept.push_back(c);
        }
    }
    return kept;
}

}  // namespace acm::ann
