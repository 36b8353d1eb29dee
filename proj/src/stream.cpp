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

#include "acm/stream.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string_view>
#include <unordered_set>

#include "acm/binary_io.hpp"

namespace acm::stream {

namespace {
constexpr std::string_view kMagic{"ACMF1\0", 6};

bool record_less(const StreamRecord& a, const StreamRecord& b) noexcept {
    return a.timestamp != b.timestamp ? a.timestamp < b.timestamp : a.id < b.id;
}

std::size_t floor_fraction(double fraction, std::size_t n) {
    // the epsilon keeps e.g. 0.29 * 100 from flooring to 28
    return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 1e-9));
}
}  // namespace

std::size_t feature_file_size(std::uint32_t dim, std::uint64_t count) noexcept {
    return kFeatureHeaderBytes + count * (kFeatureRecordFixedBytes + 4ULL * dim);
}

void write_feature_file(const std::filesystem::path& path, const Dataset& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::Io, "cannot create feature file " + path.string());
    }
    io::Writer w(out);
    w.put_bytes(kMagic);
    w.put<std::uint32_t>(data.dim);
    w.put<std::uint64_t>(data.records.size());
    w.put<std::uint32_t>(data.num_classes);
    for (const StreamRecord& r : data.records) {
        check_dim(data.dim, r.feature.dim());
        if (r.label >= data.num_classes) {
            throw Error(ErrorCode::LabelOutOfRange, "label " + std::to_string(r.label) + " >= class count");
        }
        w.put<std::uint64_t>(r.id);
        w.put<std::int64_t>(r.timestamp);
        w.put<std::uint32_t>(r.label);
        w.put_array<float>(r.feature.view());
    }
}

Dataset load_feature_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open feature file " + path.string());
    }
    std::error_code ec;
    const auto actual = std::filesystem::file_size(path, ec);
    if (ec) {
        throw Error(ErrorCode::Io, "cannot stat feature file " + path.string());
    }
    io::Reader r(in);
    r.expect_magic(kMagic);
    Dataset data;
    data.dim = r.get<std::uint32_t>();
    const auto count = r.get<std::uint64_t>();
    data.num_classes = r.get<std::uint32_t>();
    if (data.dim == 0) {
        throw Error(ErrorCode::InvalidConfig, "feature file declares dim 0");
    }
    const std::size_t record_bytes = kFeatureRecordFixedBytes + 4ULL * data.dim;
    if (count > (actual - kFeatureHeaderBytes) / record_bytes || actual != feature_file_size(data.dim, count)) {
        throw Error(ErrorCode::TruncatedFile, "byte length " + std::to_string(actual) + " does not match " +
                                                  std::to_string(count) + " records of dim " +
                                                  std::to_string(data.dim));
    }
    data.records.reserve(count);
    std::unordered_set<std::uint64_t> ids;
    ids.reserve(count);
    std::vector<float> buf(data.dim);
    for (std::uint64_t i = 0; i < count; ++i) {
        StreamRecord rec;
        rec.id = r.get<std::uint64_t>();
        rec.timestamp = r.get<std::int64_t>();
        rec.label = r.get<std::uint32_t>();
        r.get_array<float>(buf);
        if (rec.label >= data.num_classes) {
            throw Error(ErrorCode::LabelOutOfRange, "record " + std::to_string(i) + " has label " +
                                                        std::to_string(rec.label) + " >= " +
                                                        std::to_string(data.num_classes));
        }
        if (!all_finite(buf)) {
            throw Error(ErrorCode::NonFiniteFeature, "record " + std::to_string(i) + " has NaN or Inf");
        }
        if (!ids.insert(rec.id).second) {
            throw Error(ErrorCode::InvalidConfig, "duplicate record id " + std::to_string(rec.id));
        }
        rec.feature = FeatureVector(buf);
        data.records.push_back(std::move(rec));
    }
    return data;
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open manifest " + path.string());
    }
    std::vector<ManifestEntry> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.resize(hash);
        }
        std::istringstream fields(line);
        std::string file;
        if (!(fields >> file)) {
            continue;
        }
        ManifestEntry e;
        std::string extra;
        if (!(fields >> e.dim >> e.count >> e.num_classes) || (fields >> extra)) {
            throw Error(ErrorCode::InvalidConfig,
                        "manifest line " + std::to_string(line_no) + ": expected `path dim count classes`");
        }
        e.path = std::filesystem::path(file);
        if (e.path.is_relative()) {
            e.path = path.parent_path() / e.path;
        }
        entries.push_back(std::move(e));
    }
    return entries;
}

void write_manifest(const std::filesystem::path& path, std::span<const ManifestEntry> entries) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::Io, "cannot create manifest " + path.string());
    }
    for (const ManifestEntry& e : entries) {
        out << e.path.string() << ' ' << e.dim << ' ' << e.count << ' ' << e.num_classes << '\n';
    }
    if (!out) {
        throw Error(ErrorCode::Io, "write failed for manifest " + path.string());
    }
}

void SplitSpec::validate() const {
    const bool ok = pretrain_fraction >= 0.0 && pretrain_fraction < 1.0 && test_fraction >= 0.0 &&
                    test_fraction < 1.0 && pretrain_fraction + test_fraction < 1.0;
    if (!ok) {
        throw Error(ErrorCode::InvalidConfig, "split fractions must lie in [0, 1) and sum below 1");
    }
}

Split chronological_split(std::span<const StreamRecord> records, const SplitSpec& spec) {
    spec.validate();
    if (records.empty()) {
        throw Error(ErrorCode::EmptyInput, "cannot split an empty record list");
    }
    std::vector<StreamRecord> sorted(records.begin(), records.end());
    std::stable_sort(sorted.begin(), sorted.end(), record_less);
    const std::size_t n = sorted.size();

    const std::size_t n_test = floor_fraction(spec.test_fraction, n);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) {
        order[i] = i;
    }
    std::mt19937_64 rng(spec.seed);
    for (std::size_t i = 0; i < n_test; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(order[i], order[pick(rng)]);
    }
    std::vector<bool> is_test(n, false);
    for (std::size_t i = 0; i < n_test; ++i) {
        is_test[order[i]] = true;
    }

    Split split;
    const std::size_t n_pretrain = floor_fraction(spec.pretrain_fraction, n - n_test);
    split.test.reserve(n_test);
    split.pretrain.reserve(n_pretrain);
    split.online.reserve(n - n_test - n_pretrain);
    for (std::size_t i = 0; i < n; ++i) {
        if (is_test[i]) {
            split.test.push_back(std::move(sorted[i]));
        } else if (split.pretrain.size() < n_pretrain) {
            split.pretrain.push_back(std::move(sorted[i]));
        } else {
            split.online.push_back(std::move(sorted[i]));
        }
    }
    return split;
}

void DriftConfig::validate() const {
    if (num_classes == 0 || dim < 2 || samples == 0 || clusters_per_class == 0) {
        throw Error(ErrorCode::InvalidConfig, "drift stream needs classes, dim >= 2, samples and clusters");
    }
    if (!(sigma >= 0.0) || !std::isfinite(sigma) || !std::isfinite(rotation_rate)) {
        throw Error(ErrorCode::InvalidConfig, "drift sigma must be finite and non-negative");
    }
    if (!(arrival_fraction >= 0.0 && arrival_fraction <= 1.0)) {
        throw Error(ErrorCode::InvalidConfig, "arrival fraction must lie in [0, 1]");
    }
    if (!arrival_steps.empty()) {
        if (arrival_steps.size() != num_classes) {
            throw Error(ErrorCode::InvalidConfig, "arrival schedule needs one entry per class");
        }
        if (*std::min_element(arrival_steps.begin(), arrival_steps.end()) != 0) {
            throw Error(ErrorCode::InvalidConfig, "some class must be active at step 0");
        }
    }
}

std::vector<std::uint64_t> DriftConfig::resolved_arrivals() const {
    if (!arrival_steps.empty()) {
        return arrival_steps;
    }
    std::vector<std::uint64_t> arrivals(num_classes, 0);
    if (mode == DriftMode::MeanRotation) {
        return arrivals;
    }
    const double span = arrival_fraction * static_cast<double>(samples);
    for (std::uint32_t c = 0; c < num_classes; ++c) {
        arrivals[c] = static_cast<std::uint64_t>(std::floor(span * c / num_classes));
    }
    return arrivals;
}

Dataset generate_drift_stream(const DriftConfig& config) {
    config.validate();
    const std::size_t d = config.dim;
    std::mt19937_64 rng(config.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    auto random_unit = [&] {
        std::vector<double> v(d);
        double sq = 0.0;
        do {
            sq = 0.0;
            for (double& x : v) {
                x = gauss(rng);
                sq += x * x;
            }
        } while (sq < 1e-24);
        for (double& x : v) {
            x /= std::sqrt(sq);
        }
        return v;
    };

    // Centers, plus an orthogonal partner direction for rotating modes.
    const std::size_t modes = config.clusters_per_class;
    std::vector<std::vector<double>> center(config.num_classes * modes);
    std::vector<std::vector<double>> partner(center.size());
    for (std::size_t i = 0; i < center.size(); ++i) {
        center[i] = random_unit();
        if (config.mode == DriftMode::MeanRotation) {
            std::vector<double> b = random_unit();
            double proj = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                proj += b[j] * center[i][j];
            }
            double sq = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                b[j] -= proj * center[i][j];
                sq += b[j] * b[j];
            }
            for (double& x : b) {
                x /= std::sqrt(sq);
            }
            partner[i] = std::move(b);
        }
    }

    const auto arrivals = config.resolved_arrivals();
    std::vector<std::uint32_t> order(config.num_classes);
    for (std::uint32_t c = 0; c < config.num_classes; ++c) {
        order[c] = c;
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return arrivals[a] < arrivals[b]; });

    Dataset data;
    data.dim = config.dim;
    data.num_classes = config.num_classes;
    data.records.reserve(config.samples);
    std::size_t active = 0;
    std::vector<float> feature(d);
    for (std::uint64_t t = 0; t < config.samples; ++t) {
        while (active < order.size() && arrivals[order[active]] <= t) {
            ++active;
        }
        const Label label = order[std::uniform_int_distribution<std::size_t>(0, active - 1)(rng)];
        const std::size_t mode = std::uniform_int_distribution<std::size_t>(0, modes - 1)(rng);
        const std::size_t ci = static_cast<std::size_t>(label) * modes + mode;
        const double angle = config.rotation_rate * static_cast<double>(t);
        double sq = 0.0;
        std::vector<double> x(d);
        for (std::size_t j = 0; j < d; ++j) {
            double mu = center[ci][j];
            if (config.mode == DriftMode::MeanRotation) {
                mu = std::cos(angle) * center[ci][j] + std::sin(angle) * partner[ci][j];
            }
            x[j] = config.sigma > 0.0 ? mu + config.sigma * gauss(rng) : mu;
            sq += x[j] * x[j];
        }
        const double norm = std::sqrt(sq);
        for (std::size_t j = 0; j < d; ++j) {
            feature[j] = static_cast<float>(x[j] / norm);
        }
        StreamRecord rec;
        rec.id = t;
        rec.timestamp = config.start_timestamp + static_cast<std::int64_t>(t);
        rec.label = label;
        rec.feature = FeatureVector(feature);
        data.records.push_back(std::move(rec));
    }
    return data;
}

}  // namespace acm::stream
