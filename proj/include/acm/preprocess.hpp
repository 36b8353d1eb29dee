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
#include <istream>
#include <optional>
#include <ostream>
#include <vector>

#include "acm/core.hpp"

namespace acm::preprocess {

/// Welford running mean and squared-deviation sums, 64-bit accumulation.
class RunningMoments {
public:
    explicit RunningMoments(std::size_t dim, double eps = 1e-8);

    void update(FeatureView x);

    /// (x - mean) / sqrt(population variance + eps). Throws NotFitted when count is 0.
    FeatureVector transform(FeatureView x) const;
    void transform_inplace(std::span<float> x) const;

    std::size_t dim() const noexcept { return mean_.size(); }
    std::uint64_t count() const noexcept { return count_; }
    double eps() const noexcept { return eps_; }
    const std::vector<double>& mean() const noexcept { return mean_; }
    const std::vector<double>& m2() const noexcept { return m2_; }
    std::vector<double> variance() const;

private:
    std::uint64_t count_ = 0;
    std::vector<double> mean_;
    std::vector<double> m2_;
    double eps_;
};

inline void scaler_update(RunningMoments& s, FeatureView x) { s.update(x); }
inline FeatureVector scaler_transform(const RunningMoments& s, FeatureView x) { return s.transform(x); }

enum class ProjectionKind : std::uint32_t { Affine = 0, Mlp2 = 1, Random = 2 };

struct DenseLayer {
    std::size_t in_dim = 0;
    std::size_t out_dim = 0;
    std::vector<float> weights;  ///< row-major out_dim x in_dim
    std::vector<float> bias;     ///< out_dim

    void apply(FeatureView x, std::span<float> y) const;
};

/// Inference-only feature projection: a single affine map, a two-layer MLP with a
/// rectifier in between, or a seeded Gaussian random projection.
class ProjectionWeights {
public:
    static ProjectionWeights affine(DenseLayer layer);
    static ProjectionWeights mlp2(DenseLayer first, DenseLayer second);
    /// Entries N(0, 1) / sqrt(out_dim), zero bias.
    static ProjectionWeights random(std::size_t in_dim, std::size_t out_dim, std::uint64_t seed);

    ProjectionKind kind() const noexcept { return kind_; }
    std::size_t in_dim() const noexcept { return layers_.front().in_dim; }
    std::size_t out_dim() const noexcept { return layers_.back().out_dim; }
    const std::vector<DenseLayer>& layers() const noexcept { return layers_; }

    FeatureVector project(FeatureView x) const;

    /// "ACMW1\0", kind (u32), layer count (u32), then per layer in_dim, out_dim (u32),
    /// row-major weights and bias as little-endian f32.
    void save(std::ostream& out) const;
    static ProjectionWeights load(std::istream& in);
    static ProjectionWeights load_file(const std::filesystem::path& path);
    void save_file(const std::filesystem::path& path) const;

private:
    ProjectionWeights(ProjectionKind kind, std::vector<DenseLayer> layers);

    ProjectionKind kind_;
    std::vector<DenseLayer> layers_;
};

inline FeatureVector project(const ProjectionWeights& w, FeatureView x) { return w.project(x); }

/// project -> scaler -> l2 normalize; each stage optional except normalization.
class Pipeline {
public:
    Pipeline(std::size_t input_dim, std::optional<ProjectionWeights> projection, bool use_scaler);

    std::size_t input_dim() const noexcept { return input_dim_; }
    std::size_t output_dim() const noexcept;
    bool uses_scaler() const noexcept { return scaler_.has_value(); }
    const std::optional<RunningMoments>& scaler() const noexcept { return scaler_; }

    /// Folds one raw feature into the scaler statistics (after projection).
    void fit(FeatureView raw);

    FeatureVector apply(FeatureView raw) const;

private:
    std::size_t input_dim_;
    std::optional<ProjectionWeights> projection_;
    std::optional<RunningMoments> scaler_;
};

}  // namespace acm::preprocess
