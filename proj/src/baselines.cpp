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

#include "acm/baselines.hpp"

#include <algorithm>
#include <cmath>

namespace acm::baselines {

NcmClassifier::NcmClassifier(std::size_t dim) : dim_(dim) {}

void NcmClassifier::learn(FeatureView z, Label y) {
    check_dim(dim_, z.size());
    ClassStats& c = classes_[y];
    if (c.mean.empty()) {
        c.mean.assign(dim_, 0.0);
    }
    ++c.count;
    const double n = static_cast<double>(c.count);
    double sq = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
        c.mean[i] += (z[i] - c.mean[i]) / n;
        sq += c.mean[i] * c.mean[i];
    }
    c.norm = std::sqrt(sq);
}

std::optional<Label> NcmClassifier::predict(FeatureView z) const {
    check_dim(dim_, z.size());
    if (classes_.empty()) {
        return std::nullopt;
    }
    double znorm = 0.0;
    for (float v : z) {
        znorm += static_cast<double>(v) * v;
    }
    znorm = std::sqrt(znorm);
    std::optional<Label> best;
    double best_sim = 0.0;
    for (const auto& [label, c] : classes_) {
        double sim = 0.0;
        if (c.norm > 0.0 && znorm > 0.0) {
            for (std::size_t i = 0; i < dim_; ++i) {
                sim += z[i] * c.mean[i];
            }
            sim /= c.norm * znorm;
        }
        if (!best || sim > best_sim) {
            best = label;
            best_sim = sim;
        }
    }
    return best;
}

const std::vector<double>* NcmClassifier::class_mean(Label y) const {
    auto it = classes_.find(y);
    return it == classes_.end() ? nullptr : &it->second.mean;
}

std::uint64_t NcmClassifier::class_count(Label y) const {
    auto it = classes_.find(y);
    return it == classes_.end() ? 0 : it->second.count;
}

SldaClassifier::SldaClassifier(std::size_t dim, SldaConfig config)
    : dim_(dim),
      config_(config),
      scatter_(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim))),
      precision_(Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim))) {
    if (!(config_.shrinkage > 0.0 && config_.shrinkage <= 1.0)) {
        throw Error(ErrorCode::InvalidConfig, "SLDA shrinkage must lie in (0, 1]");
    }
    if (config_.refresh_interval == 0) {
        throw Error(ErrorCode::InvalidConfig, "SLDA refresh interval must be positive");
    }
}

Eigen::MatrixXd SldaClassifier::covariance() const {
    if (total_ == 0) {
        return scatter_;
    }
    return scatter_ / static_cast<double>(total_);
}

Eigen::VectorXd SldaClassifier::class_mean(Label y) const {
    auto it = slots_.find(y);
    if (it == slots_.end()) {
        return {};
    }
    return means_[it->second];
}

void SldaClassifier::update_bias(std::size_t slot) {
    bias_[slot] = -0.5 * means_[slot].dot(precision_ * means_[slot]);
}

void SldaClassifier::refresh() {
    const auto d = static_cast<Eigen::Index>(dim_);
    const double lambda = config_.shrinkage;
    Eigen::MatrixXd shrunk = (1.0 - lambda) * covariance() + lambda * Eigen::MatrixXd::Identity(d, d);
    shrunk = 0.5 * (shrunk + shrunk.transpose());
    precision_ = shrunk.llt().solve(Eigen::MatrixXd::Identity(d, d));
    for (std::size_t s = 0; s < means_.size(); ++s) {
        update_bias(s);
    }
    stale_ = 0;
    fitted_ = true;
}

void SldaClassifier::learn(FeatureView z, Label y) {
    check_dim(dim_, z.size());
    const Eigen::Map<const Eigen::VectorXf> x(z.data(), static_cast<Eigen::Index>(dim_));
    auto [it, inserted] = slots_.try_emplace(y, means_.size());
    const std::size_t slot = it->second;
    if (inserted) {
        means_.push_back(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim_)));
        counts_.push_back(0);
        bias_.push_back(0.0);
    }
    // Exact within-class Welford step: S += n/(n+1) (x - mu)(x - mu)^T.
    const Eigen::VectorXd delta = x.cast<double>() - means_[slot];
    const double n = static_cast<double>(counts_[slot]);
    scatter_.noalias() += (n / (n + 1.0)) * delta * delta.transpose();
    means_[slot] += delta / (n + 1.0);
    ++counts_[slot];
    ++total_;
    ++stale_;
    if (!fitted_ || stale_ >= config_.refresh_interval) {
        refresh();
    } else {
        update_bias(slot);
    }
}

std::vector<std::pair<Label, double>> SldaClassifier::scores(FeatureView z) const {
    check_dim(dim_, z.size());
    const Eigen::Map<const Eigen::VectorXf> x(z.data(), static_cast<Eigen::Index>(dim_));
    const Eigen::VectorXd pz = precision_ * x.cast<double>();
    std::vector<std::pair<Label, double>> out;
    out.reserve(slots_.size());
    for (const auto& [label, slot] : slots_) {
        out.emplace_back(label, means_[slot].dot(pz) + bias_[slot]);
    }
    return out;
}

std::optional<Label> SldaClassifier::predict(FeatureView z) const {
    std::optional<Label> best;
    double best_score = 0.0;
    for (const auto& [label, s] : scores(z)) {
        if (!best || s > best_score) {
            best = label;
            best_score = s;
        }
    }
    return best;
}

LinearSgdClassifier::LinearSgdClassifier(std::size_t dim, SgdConfig config) : dim_(dim), config_(config) {
    if (!(config_.learning_rate > 0.0) || !std::isfinite(config_.learning_rate)) {
        throw Error(ErrorCode::InvalidConfig, "SGD learning rate must be positive");
    }
}

double LinearSgdClassifier::score_slot(std::size_t slot, FeatureView z) const {
    const std::vector<double>& w = weights_[slot];
    double s = bias_[slot];
    for (std::size_t i = 0; i < dim_; ++i) {
        s += w[i] * z[i];
    }
    return s;
}

double LinearSgdClassifier::score(Label y, FeatureView z) const {
    check_dim(dim_, z.size());
    auto it = slots_.find(y);
    return it == slots_.end() ? 0.0 : score_slot(it->second, z);
}

std::optional<Label> LinearSgdClassifier::predict(FeatureView z) const {
    check_dim(dim_, z.size());
    std::optional<Label> best;
    double best_score = 0.0;
    for (const auto& [label, slot] : slots_) {
        const double s = score_slot(slot, z);
        if (!best || s > best_score) {
            best = label;
            best_score = s;
        }
    }
    return best;
}

void LinearSgdClassifier::learn(FeatureView z, Label y) {
    check_dim(dim_, z.size());
    auto [it, inserted] = slots_.try_emplace(y, weights_.size());
    if (inserted) {
        weights_.emplace_back(dim_, 0.0);
        bias_.push_back(0.0);
    }
    const std::size_t target = it->second;
    const std::size_t classes = weights_.size();
    std::vector<double> s(classes);
    for (std::size_t c = 0; c < classes; ++c) {
        s[c] = score_slot(c, z);
    }
    const double eta = config_.learning_rate;

    if (config_.loss == SgdLoss::Logistic) {
        const double top = *std::max_element(s.begin(), s.end());
        double total = 0.0;
        for (double& v : s) {
            v = std::exp(v - top);
            total += v;
        }
        for (std::size_t c = 0; c < classes; ++c) {
            const double g = s[c] / total - (c == target ? 1.0 : 0.0);
            std::vector<double>& w = weights_[c];
            for (std::size_t i = 0; i < dim_; ++i) {
                w[i] -= eta * g * z[i];
            }
            bias_[c] -= eta * g;
        }
        return;
    }

    for (std::size_t c = 0; c < classes; ++c) {
        const double sign = c == target ? 1.0 : -1.0;
        if (sign * s[c] < 1.0) {
            std::vector<double>& w = weights_[c];
            for (std::size_t i = 0; i < dim_; ++i) {
                w[i] += eta * sign * z[i];
            }
            bias_[c] += eta * sign;
        }
    }
}

}  // namespace acm::baselines
