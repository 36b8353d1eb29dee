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
#include <map>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "acm/classifier.hpp"
#include "acm/core.hpp"

namespace acm::baselines {

/// Nearest class mean under cosine similarity. Ties go to the lowest class id.
class NcmClassifier final : public OnlineClassifier {
public:
    explicit NcmClassifier(std::size_t dim);

    std::optional<Label> predict(FeatureView z) const override;
    void learn(FeatureView z, Label y) override;
    std::string_view name() const noexcept override { return "NCM"; }

    std::size_t num_classes() const noexcept { return classes_.size(); }
    /// Running mean of class `y`, or nullptr if the class is unseen.
    const std::vector<double>* class_mean(Label y) const;
    std::uint64_t class_count(Label y) const;

private:
    struct ClassStats {
        std::uint64_t count = 0;
        std::vector<double> mean;
        double norm = 0.0;
    };

    std::size_t dim_;
    std::map<Label, ClassStats> classes_;
};

struct SldaConfig {
    double shrinkage = 1e-4;
    std::uint32_t refresh_interval = 100;
};

/// Streaming LDA: running class means plus one pooled within-class covariance.
///
/// The precision matrix inv((1 - lambda) * Sigma + lambda * I) is recomputed every
/// `refresh_interval` updates (and on the first update); scores in between use the
/// cached precision with current means.
class SldaClassifier final : public OnlineClassifier {
public:
    explicit SldaClassifier(std::size_t dim, SldaConfig config = {});

    std::optional<Label> predict(FeatureView z) const override;
    void learn(FeatureView z, Label y) override;
    std::string_view name() const noexcept override { return "SLDA"; }

    void refresh();

    /// Pooled within-class scatter divided by the number of updates.
    Eigen::MatrixXd covariance() const;
    const Eigen::MatrixXd& precision() const noexcept { return precision_; }
    std::uint64_t num_updates() const noexcept { return total_; }
    std::uint32_t updates_since_refresh() const noexcept { return stale_; }
    std::size_t num_classes() const noexcept { return slots_.size(); }
    Eigen::VectorXd class_mean(Label y) const;
    const SldaConfig& config() const noexcept { return config_; }

    /// Linear scores w_c . z + b_c in ascending class-id order.
    std::vector<std::pair<Label, double>> scores(FeatureView z) const;

private:
    void update_bias(std::size_t slot);

    std::size_t dim_;
    SldaConfig config_;
    std::map<Label, std::size_t> slots_;
    std::vector<Eigen::VectorXd> means_;
    std::vector<std::uint64_t> counts_;
    std::vector<double> bias_;
    Eigen::MatrixXd scatter_;
    Eigen::MatrixXd precision_;
    std::uint64_t total_ = 0;
    std::uint32_t stale_ = 0;
    bool fitted_ = false;
};

enum class SgdLoss { Logistic, Hinge };

struct SgdConfig {
    SgdLoss loss = SgdLoss::Logistic;
    double learning_rate = 1e-2;
};

/// One-sample SGD linear classifier. Rows are created zeroed on a class's first label.
class LinearSgdClassifier final : public OnlineClassifier {
public:
    LinearSgdClassifier(std::size_t dim, SgdConfig config = {});

    std::optional<Label> predict(FeatureView z) const override;
    void learn(FeatureView z, Label y) override;
    std::string_view name() const noexcept override {
        return config_.loss == SgdLoss::Logistic ? "SGD_LOGISTIC" : "SGD_HINGE";
    }

    std::size_t num_classes() const noexcept { return slots_.size(); }
    double score(Label y, FeatureView z) const;

private:
    double score_slot(std::size_t slot, FeatureView z) const;

    std::size_t dim_;
    SgdConfig config_;
    std::map<Label, std::size_t> slots_;
    std::vector<std::vector<double>> weights_;
    std::vector<double> bias_;
};

}  // namespace acm::baselines
