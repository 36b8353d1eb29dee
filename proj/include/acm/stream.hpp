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
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "acm/core.hpp"

namespace acm::stream {

/// In-memory form of a feature file.
struct Dataset {
    std::uint32_t dim = 0;
    std::uint32_t num_classes = 0;
    std::vector<StreamRecord> records;
};

/// Feature file layout, all little-endian:
///   "ACMF1\0" | dim u32 | count u64 | classes u32          (22-byte header)
///   count x ( id u64 | timestamp i64 | label u32 | dim x f32 )
inline constexpr std::size_t kFeatureHeaderBytes = 22;
inline constexpr std::size_t kFeatureRecordFixedBytes = 20;

std::size_t feature_file_size(std::uint32_t dim, std::uint64_t count) noexcept;

void write_feature_file(const std::filesystem::path& path, const Dataset& data);

/// Validates signature, exact byte length, label range, finiteness and id uniqueness.
/// Errors: BadMagic, TruncatedFile, LabelOutOfRange, NonFiniteFeature, InvalidConfig.
Dataset load_feature_file(const std::filesystem::path& path);

struct ManifestEntry {
    std::filesystem::path path;
    std::uint32_t dim = 0;
    std::uint64_t count = 0;
    std::uint32_t num_classes = 0;

    friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

/// One dataset per line: `path dim count classes`. Blank lines and '#' comments are
/// skipped; relative paths resolve against the manifest's directory.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, std::span<const ManifestEntry> entries);

struct SplitSpec {
    double pretrain_fraction = 0.2;
    double test_fraction = 0.1;
    std::uint64_t seed = 0;

    void validate() const;
};

struct Split {
    std::vector<StreamRecord> pretrain;
    std::vector<StreamRecord> online;
    std::vector<StreamRecord> test;
};

/// Sorts by (timestamp, id); draws floor(test_fraction * N) test records uniformly;
/// the first floor(pretrain_fraction * remaining) of the rest form the pretrain split.
/// All three outputs are in (timestamp, id) order. Throws EmptyInput.
Split chronological_split(std::span<const StreamRecord> records, const SplitSpec& spec);

enum class DriftMode { ClassIncremental, MeanRotation };

struct DriftConfig {
    std::uint32_t num_classes = 10;
    std::uint32_t dim = 32;
    std::uint64_t samples = 10000;
    DriftMode mode = DriftMode::ClassIncremental;
    /// Step at which each class becomes active; empty spreads arrivals evenly over
    /// the first `arrival_fraction` of the stream. Class arrivals must include step 0.
    std::vector<std::uint64_t> arrival_steps;
    double arrival_fraction = 1.0;
    double sigma = 0.1;                  ///< per-coordinate noise around a cluster center
    std::uint32_t clusters_per_class = 1;
    double rotation_rate = 1e-3;         ///< radians per step, MeanRotation only
    std::int64_t start_timestamp = 0;
    std::uint64_t seed = 0;

    void validate() const;
    std::vector<std::uint64_t> resolved_arrivals() const;
};

/// Unit-norm Gaussian clusters; one record per step, timestamps increasing by one.
Dataset generate_drift_stream(const DriftConfig& config);

}  // namespace acm::stream
