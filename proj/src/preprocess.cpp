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

#include "acm/preprocess.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <string_view>
#include <utility>

#include "acm/binary_io.hpp"

namespace acm::preprocess {

namespace {
constexpr std::string_view kWeightsMagic{"ACMW1\0", 6};
}

RunningMoments::RunningMoments(std::size_t dim, double eps) : mean_(dim, 0.0), m2_(dim, 0.0), eps_(eps) {
    if (dim == 0) {
        throw Error(ErrorCode::InvalidConfig, "scaler dim must be positive");
    }
}

void RunningMoments::update(FeatureView x) {
    check_dim(dim(), x.size());
    ++count_;
    const double n = static_cast<double>(count_);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double delta = x[i] - mean_[i];
        mean_[i] += delta / n;
        m2_[i] += delta * (x[i] - mean_[i]);
    }
}

std::vector<double> RunningMoments::variance() const {
    std::vector<double> var(dim(), 0.0);
    if (count_ == 0) {
        return var;
    }
    for (std::size_t i = 0; i < var.size(); ++i) {
        var[i] = std::max(0.0, m2_[i] / static_cast<double>(count_));
    }
    return var;
}

void RunningMoments::transform_inplace(std::span<float> x) const {
    check_dim(dim(), x.size());
    if (count_ == 0) {
        throw Error(ErrorCode::NotFitted, "scaler has seen no samples");
    }
    const double n = static_cast<double>(count_);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double var = std::max(0.0, m2_[i] / n);
        x[i] = static_cast<float>((x[i] - mean_[i]) / std::sqrt(var + eps_));
    }
}

FeatureVector RunningMoments::transform(FeatureView x) const {
    std::vector<float> out(x.begin(), x.end());
    transform_inplace(out);
    return FeatureVector(std::move(out));
}

void DenseLayer::apply(FeatureView x, std::span<float> y) const {
    check_dim(in_dim, x.size());
    for (std::size_t r = 0; r < out_dim; ++r) {
        const float* row = weights.data() + r * in_dim;
        double acc = bias[r];
        for (std::size_t c = 0; c < in_dim; ++c) {
            acc += static_cast<double>(row[c]) * x[c];
        }
        y[r] = static_cast<float>(acc);
    }
}

ProjectionWeights::ProjectionWeights(ProjectionKind kind, std::vector<DenseLayer> layers)
    : kind_(kind), layers_(std::move(layers)) {
    if (layers_.empty()) {
        throw Error(ErrorCode::InvalidConfig, "projection needs at least one layer");
    }
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        const DenseLayer& l = layers_[i];
        if (l.in_dim == 0 || l.out_dim == 0 || l.weights.size() != l.in_dim * l.out_dim ||
            l.bias.size() != l.out_dim) {
            throw Error(ErrorCode::InvalidConfig, "projection layer shape is inconsistent");
        }
        if (i > 0 && layers_[i - 1].out_dim != l.in_dim) {
            throw Error(ErrorCode::DimMismatch, "projection layers do not chain");
        }
        if (!all_finite(l.weights) || !all_finite(l.bias)) {
            throw Error(ErrorCode::NonFiniteFeature, "projection weights contain NaN or Inf");
        }
    }
    const std::size_t expected = kind_ == ProjectionKind::Mlp2 ? 2 : 1;
    if (layers_.size() != expected) {
        throw Error(ErrorCode::InvalidConfig, "layer count does not match projection kind");
    }
}

ProjectionWeights ProjectionWeights::affine(DenseLayer layer) {
    std::vector<DenseLayer> layers;
    layers.push_back(std::move(layer));
    return {ProjectionKind::Affine, std::move(layers)};
}

ProjectionWeights ProjectionWeights::mlp2(DenseLayer first, DenseLayer second) {
    std::vector<DenseLayer> layers;
    layers.push_back(std::move(first));
    layers.push_back(std::move(second));
    return {ProjectionKind::Mlp2, std::move(layers)};
}

ProjectionWeights ProjectionWeights::random(std::size_t in_dim, std::size_t out_dim, std::uint64_t seed) {
    if (in_dim == 0 || out_dim == 0) {
        throw Error(ErrorCode::InvalidConfig, "random projection dims must be positive");
    }
    DenseLayer layer;
    layer.in_dim = in_dim;
    layer.out_dim = out_dim;
    layer.weights.resize(in_dim * out_dim);
    layer.bias.assign(out_dim, 0.0F);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double scale = 1.0 / std::sqrt(static_cast<double>(out_dim));
    for (float& w : layer.weights) {
        w = static_cast<float>(gauss(rng) * scale);
    }
    std::vector<DenseLayer> layers;
    layers.push_back(std::move(layer));
    return {ProjectionKind::Random, std::move(layers)};
}

FeatureVector ProjectionWeights::project(FeatureView x) const {
    check_dim(in_dim(), x.size());
    std::vector<float> cur(x.begin(), x.end());
    std::vector<float> next;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        next.assign(layers_[i].out_dim, 0.0F);
        layers_[i].apply(cur, next);
        if (kind_ == ProjectionKind::Mlp2 && i == 0) {
            for (float& v : next) {
                v = std::max(v, 0.0F);
            }
        }
        cur.swap(next);
    }
    return FeatureVector(std::move(cur));
}

void ProjectionWeights::save(std::ostream& out) const {
    io::Writer w(out);
    w.put_bytes(kWeightsMagic);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(kind_));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(layers_.size()));
    for (const DenseLayer& l : layers_) {
        w.put<std::uint32_t>(static_cast<std::uint32_t>(l.in_dim));
        w.put<std::uint32_t>(static_cast<std::uint32_t>(l.out_dim));
        w.put_array<float>(l.weights);
        w.put_array<float>(l.bias);
    }
}

ProjectionWeights ProjectionWeights::load(std::istream& in) {
    io::Reader r(in);
    r.expect_magic(kWeightsMagic);
    const auto kind = r.get<std::uint32_t>();
    if (kind > static_cast<std::uint32_t>(ProjectionKind::Random)) {
        throw Error(ErrorCode::InvalidConfig, "unknown projection kind tag");
    }
    const auto count = r.get<std::uint32_t>();
    if (count == 0 || count > 2) {
        throw Error(ErrorCode::InvalidConfig, "projection layer count must be 1 or 2");
    }
    std::vector<DenseLayer> layers(count);
    for (DenseLayer& l : layers) {
        l.in_dim = r.get<std::uint32_t>();
        l.out_dim = r.get<std::uint32_t>();
        l.weights.resize(l.in_dim * l.out_dim);
        l.bias.resize(l.out_dim);
        r.get_array<float>(l.weights);
        r.get_array<float>(l.bias);
    }
    return {static_cast<ProjectionKind>(kind), std::move(layers)};
}

ProjectionWeights ProjectionWeights::load_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open weights file " + path.string());
    }
    return load(in);
}

void ProjectionWeights::save_file(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::Io, "cannot create weights file " + path.string());
    }
    save(out);
}

Pipeline::Pipeline(std::size_t input_dim, std::optional<ProjectionWeights> projection, bool use_scaler)
    : input_dim_(input_dim), projection_(std::move(projection)) {
    if (projection_) {
        check_dim(input_dim_, projection_->in_dim());
    }
    if (use_scaler) {
        scaler_.emplace(output_dim());
    }
}

std::size_t Pipeline::output_dim() const noexcept {
    return projection_ ? projection_->out_dim() : input_dim_;
}

void Pipeline::fit(FeatureView raw) {
    if (!scaler_) {
        return;
    }
    if (projection_) {
        scaler_->update(projection_->project(raw));
    } else {
        scaler_->update(raw);
    }
}

FeatureVector Pipeline::apply(FeatureView raw) const {
    check_dim(input_dim_, raw.size());
    std::vector<float> v = projection_ ? projection_->project(raw).values()
                                       : std::vector<float>(raw.begin(), raw.end());
    if (scaler_) {
        scaler_->transform_inplace(v);
    }
    l2_normalize_inplace(v);
    return FeatureVector(std::move(v));
}

}  // namespace acm::preprocess
