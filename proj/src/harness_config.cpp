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

#include <cmath>
#include <fstream>

#include "acm/harness.hpp"

namespace acm::stream {

using nlohmann::json;

namespace {

std::string_view mode_name(DriftMode m) {
    return m == DriftMode::ClassIncremental ? "CLASS_INCREMENTAL" : "MEAN_ROTATION";
}

DriftMode parse_mode(const std::string& s) {
    if (s == "CLASS_INCREMENTAL") {
        return DriftMode::ClassIncremental;
    }
    if (s == "MEAN_ROTATION") {
        return DriftMode::MeanRotation;
    }
    throw Error(ErrorCode::InvalidConfig, "unknown drift mode '" + s + "'");
}

}  // namespace

void to_json(json& j, const DriftConfig& c) {
    j = {{"num_classes", c.num_classes},
         {"dim", c.dim},
         {"samples", c.samples},
         {"mode", mode_name(c.mode)},
         {"arrival_steps", c.arrival_steps},
         {"arrival_fraction", c.arrival_fraction},
         {"sigma", c.sigma},
         {"clusters_per_class", c.clusters_per_class},
         {"rotation_rate", c.rotation_rate},
         {"start_timestamp", c.start_timestamp},
         {"seed", c.seed}};
}

void from_json(const json& j, DriftConfig& c) {
    c = DriftConfig{};
    c.num_classes = j.value("num_classes", c.num_classes);
    c.dim = j.value("dim", c.dim);
    c.samples = j.value("samples", c.samples);
    c.mode = parse_mode(j.value("mode", std::string(mode_name(c.mode))));
    c.arrival_steps = j.value("arrival_steps", c.arrival_steps);
    c.arrival_fraction = j.value("arrival_fraction", c.arrival_fraction);
    c.sigma = j.value("sigma", c.sigma);
    c.clusters_per_class = j.value("clusters_per_class", c.clusters_per_class);
    c.rotation_rate = j.value("rotation_rate", c.rotation_rate);
    c.start_timestamp = j.value("start_timestamp", c.start_timestamp);
    c.seed = j.value("seed", c.seed);
}

}  // namespace acm::stream

namespace acm::harness {

using nlohmann::json;

std::string_view to_string(Method m) noexcept {
    switch (m) {
        case Method::Acm: return "ACM";
        case Method::Ncm: return "NCM";
        case Method::Slda: return "SLDA";
        case Method::SgdLogistic: return "SGD_LOGISTIC";
        case Method::SgdHinge: return "SGD_HINGE";
        case Method::BruteKnn: return "BRUTE_KNN";
    }
    return "?";
}

Method parse_method(std::string_view name) {
    for (Method m : {Method::Acm, Method::Ncm, Method::Slda, Method::SgdLogistic, Method::SgdHinge,
                     Method::BruteKnn}) {
        if (name == to_string(m)) {
            return m;
        }
    }
    throw Error(ErrorCode::InvalidConfig, "unknown method '" + std::string(name) + "'");
}

ReportFormat parse_format(std::string_view name) {
    if (name == "csv" || name == "CSV") {
        return ReportFormat::Csv;
    }
    if (name == "jsonl" || name == "JSONL") {
        return ReportFormat::Jsonl;
    }
    throw Error(ErrorCode::InvalidConfig, "unknown report format '" + std::string(name) + "'");
}

namespace {

json hnsw_to_json(const ann::HnswParams& p) {
    return {{"m", p.m},
            {"m0", p.m0},
            {"ef_construction", p.ef_construction},
            {"ef_search", p.ef_search},
            {"level_multiplier", p.level_multiplier}};
}

ann::HnswParams hnsw_from_json(const json& j, ann::HnswParams p) {
    if (j.contains("m")) {
        p.m = j.at("m").get<std::uint32_t>();
        p.m0 = 2 * p.m;
        p.level_multiplier = p.m > 1 ? 1.0 / std::log(static_cast<double>(p.m)) : 0.0;
    }
    p.m0 = j.value("m0", p.m0);
    p.ef_construction = j.value("ef_construction", p.ef_construction);
    p.ef_search = j.value("ef_search", p.ef_search);
    p.level_multiplier = j.value("level_multiplier", p.level_multiplier);
    return p;
}

}  // namespace


void to_json(json& j, const ExperimentConfig& c) {
    json dataset = json::object();
    if (c.dataset.feature_file) {
        dataset["feature_file"] = c.dataset.feature_file->string();
    }
    if (c.dataset.drift) {
        dataset["drift"] = *c.dataset.drift;
    }
    j = {{"dataset", dataset},
         {"split", {{"pretrain_fraction", c.split.pretrain_fraction}, {"test_fraction", c.split.test_fraction}}},
         {"method", to_string(c.method)},
         {"acm",
          {{"k_initial", c.acm.k_initial},
           {"k_max", c.acm.k_max},
           {"recalib_interval", c.acm.recalib_interval},
           {"recalib_window", c.acm.recalib_window},
           {"exact_match_shortcircuit", c.acm.exact_match_shortcircuit},
           {"leave_one_out", c.acm.leave_one_out},
           {"hnsw", hnsw_to_json(c.acm.hnsw)}}},
         {"slda", {{"shrinkage", c.slda.shrinkage}, {"refresh_interval", c.slda.refresh_interval}}},
         {"sgd", {{"learning_rate", c.sgd_learning_rate}}},
         {"preprocess",
          {{"scaler", c.preprocess.scaler},
           {"projection_weights",
            c.preprocess.projection_weights ? json(c.preprocess.projection_weights->string()) : json(nullptr)},
           {"target_dim", c.preprocess.target_dim}}},
         {"metrics", {{"h", c.metrics.h}, {"delay", c.metrics.delay}, {"buckets", c.metrics.buckets}}},
         {"output",
          {{"dir", c.output.dir ? json(c.output.dir->string()) : json(nullptr)},
           {"format", c.output.format == ReportFormat::Csv ? "csv" : "jsonl"},
           {"prefix", c.output.prefix}}},
         {"timing", c.timing},
         {"seed", c.seed}};
}

void from_json(const json& j, ExperimentConfig& c) {
    c = ExperimentConfig{};
    if (j.contains("dataset")) {
        const json& d = j.at("dataset");
        if (d.contains("feature_file") && !d.at("feature_file").is_null()) {
            c.dataset.feature_file = d.at("feature_file").get<std::string>();
        }
        if (d.contains("drift") && !d.at("drift").is_null()) {
            c.dataset.drift = d.at("drift").get<stream::DriftConfig>();
        }
    }
    if (j.contains("split")) {
        const json& s = j.at("split");
        c.split.pretrain_fraction = s.value("pretrain_fraction", c.split.pretrain_fraction);
        c.split.test_fraction = s.value("test_fraction", c.split.test_fraction);
    }
    if (j.contains("method")) {
        c.method = parse_method(j.at("method").get<std::string>());
    }
    if (j.contains("acm")) {
        const json& a = j.at("acm");
        c.acm.k_initial = a.value("k_initial", c.acm.k_initial);
        c.acm.k_max = a.value("k_max", c.acm.k_max);
        c.acm.recalib_interval = a.value("recalib_interval", c.acm.recalib_interval);
        c.acm.recalib_window = a.value("recalib_window", c.acm.recalib_window);
        c.acm.exact_match_shortcircuit = a.value("exact_match_shortcircuit", c.acm.exact_match_shortcircuit);
        c.acm.leave_one_out = a.value("leave_one_out", c.acm.leave_one_out);
        if (a.contains("hnsw")) {
            c.acm.hnsw = hnsw_from_json(a.at("hnsw"), c.acm.hnsw);
        }
    }
    if (j.contains("slda")) {
        c.slda.shrinkage = j.at("slda").value("shrinkage", c.slda.shrinkage);
        c.slda.refresh_interval = j.at("slda").value("refresh_interval", c.slda.refresh_interval);
    }
    if (j.contains("sgd")) {
        c.sgd_learning_rate = j.at("sgd").value("learning_rate", c.sgd_learning_rate);
    }
    if (j.contains("preprocess")) {
        const json& p = j.at("preprocess");
        c.preprocess.scaler = p.value("scaler", c.preprocess.scaler);
        if (p.contains("projection_weights") && !p.at("projection_weights").is_null()) {
            c.preprocess.projection_weights = p.at("projection_weights").get<std::string>();
        }
        c.preprocess.target_dim = p.value("target_dim", c.preprocess.target_dim);
    }
    if (j.contains("metrics")) {
        const json& m = j.at("metrics");
        c.metrics.h = m.value("h", c.metrics.h);
        c.metrics.delay = m.value("delay", c.metrics.delay);
        c.metrics.buckets = m.value("buckets", c.metrics.buckets);
    }
    if (j.contains("output")) {
        const json& o = j.at("output");
        if (o.contains("dir") && !o.at("dir").is_null()) {
            c.output.dir = o.at("dir").get<std::string>();
        }
        c.output.format = parse_format(o.value("format", std::string("csv")));
        c.output.prefix = o.value("prefix", c.output.prefix);
    }
    c.timing = j.value("timing", c.timing);
    c.seed = j.value("seed", c.seed);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open config " + path.string());
    }
    try {
        return json::parse(in).get<ExperimentConfig>();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, std::string("config ") + path.string() + ": " + e.what());
    }
}

void ExperimentConfig::validate() const {
    if (dataset.feature_file.has_value() == dataset.drift.has_value()) {
        throw Error(ErrorCode::InvalidConfig, "dataset needs exactly one of feature_file or drift");
    }
    if (dataset.drift) {
        dataset.drift->validate();
    }
    split.validate();
    if (method == Method::Acm || method == Method::BruteKnn) {
        learner::AcmConfig a = acm;
        a.backend = method == Method::Acm ? learner::Backend::Hnsw : learner::Backend::BruteForce;
        a.validate();
    }
    if (metrics.buckets == 0) {
        throw Error(ErrorCode::InvalidConfig, "metrics.buckets must be positive");
    }
    if (output.prefix.empty()) {
        throw Error(ErrorCode::InvalidConfig, "output prefix must not be empty");
    }
}

}  // namespace acm::harness
