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

#include <atomic>
#include <csignal>
#include <cstring>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "acm/ann/brute_force.hpp"
#include "acm/ann/hnsw.hpp"
#include "acm/bench.hpp"
#include "acm/harness.hpp"
#include "acm/learner.hpp"
#include "acm/preprocess.hpp"
#include "acm/stream.hpp"

namespace {

std::atomic<bool> g_stop{false};

extern "C" void on_sigint(int) { g_stop.store(true); }

using acm::harness::ExperimentConfig;

// Flags that override a loaded config. Unset options leave the config untouched.
struct RunFlags {
    std::optional<std::string> config;
    std::optional<std::string> features;
    std::optional<std::string> drift;
    std::optional<std::string> method;
    std::optional<std::uint32_t> k;
    std::optional<std::uint32_t> k_max;
    std::optional<std::uint32_t> recalib_interval;
    std::optional<std::uint32_t> recalib_window;
    std::optional<std::uint32_t> m;
    std::optional<std::uint32_t> ef_construction;
    std::optional<std::uint32_t> ef_search;
    std::optional<bool> shortcircuit;
    std::optional<double> shrinkage;
    std::optional<std::uint32_t> refresh_interval;
    std::optional<double> learning_rate;
    std::optional<bool> scaler;
    std::optional<std::string> weights;
    std::optional<std::uint32_t> target_dim;
    std::optional<double> pretrain_fraction;
    std::optional<double> test_fraction;
    std::optional<std::size_t> h;
    std::optional<std::size_t> delay;
    std::optional<std::size_t> buckets;
    std::optional<std::string> out;
    std::optional<std::string> format;
    std::optional<std::string> prefix;
    std::optional<std::uint64_t> seed;
    bool no_timing = false;
    bool dump_config = false;
};

void add_run_flags(CLI::App& cmd, RunFlags& f) {
    cmd.add_option("-c,--config", f.config, "JSON experiment config")->check(CLI::ExistingFile);
    cmd.add_option("--features", f.features, "feature file (replaces the dataset source)");
    cmd.add_option("--drift", f.drift, "JSON drift config (replaces the dataset source)")
        ->check(CLI::ExistingFile);
    cmd.add_option("--method", f.method, "ACM, NCM, SLDA, SGD_LOGISTIC, SGD_HINGE or BRUTE_KNN");
    cmd.add_option("--k", f.k, "initial k");
    cmd.add_option("--k-max", f.k_max, "largest k tried by recalibration");
    cmd.add_option("--recalib-interval", f.recalib_interval, "steps between recalibrations, 0 disables");
    cmd.add_option("--recalib-window", f.recalib_window, "recent samples scored by recalibration");
    cmd.add_option("--m", f.m, "HNSW degree (m0 = 2m, mL = 1/ln m)");
    cmd.add_option("--ef-construction", f.ef_construction, "HNSW construction beam");
    cmd.add_option("--ef-search", f.ef_search, "HNSW search beam");
    cmd.add_option("--shortcircuit", f.shortcircuit, "return the label of an exact match directly");
    cmd.add_option("--shrinkage", f.shrinkage, "SLDA covariance shrinkage");
    cmd.add_option("--refresh-interval", f.refresh_interval, "SLDA precision refresh interval");
    cmd.add_option("--learning-rate", f.learning_rate, "SGD learning rate");
    cmd.add_option("--scaler", f.scaler, "standardize features with pretrain statistics");
    cmd.add_option("--weights", f.weights, "projection weights file");
    cmd.add_option("--target-dim", f.target_dim, "random projection width when no weights are given");
    cmd.add_option("--pretrain-fraction", f.pretrain_fraction, "pretrain share of the non-test records");
    cmd.add_option("--test-fraction", f.test_fraction, "held-out share of all records");
    cmd.add_option("--ir-h", f.h, "retention window, 0 = whole test split");
    cmd.add_option("--delay", f.delay, "near-future delay, 0 disables");
    cmd.add_option("--buckets", f.buckets, "retention time buckets");
    cmd.add_option("-o,--out", f.out, "output directory");
    cmd.add_option("--format", f.format, "step rows as csv or jsonl");
    cmd.add_option("--prefix", f.prefix, "output file prefix");
    cmd.add_option("--seed", f.seed, "experiment seed");
    cmd.add_flag("--no-timing", f.no_timing, "write zero latencies so reruns are byte-identical");
    cmd.add_flag("--dump-config", f.dump_config, "print the effective config and exit");
}

ExperimentConfig resolve_config(const RunFlags& f) {
    ExperimentConfig c;
    if (f.config) {
        c = acm::harness::load_config(*f.config);
    }
    if (f.features) {
        c.dataset = {};
        c.dataset.feature_file = *f.features;
    }
    if (f.drift) {
        std::ifstream in(*f.drift);
        c.dataset = {};
        c.dataset.drift = nlohmann::json::parse(in).get<acm::stream::DriftConfig>();
    }
    if (f.method) c.method = acm::harness::parse_method(*f.method);
    if (f.k) c.acm.k_initial = *f.k;
    if (f.k_max) c.acm.k_max = *f.k_max;
    if (f.recalib_interval) c.acm.recalib_interval = *f.recalib_interval;
    if (f.recalib_window) c.acm.recalib_window = *f.recalib_window;
    if (f.m) {
        c.acm.hnsw = acm::ann::HnswParams::with_degree(*f.m, c.acm.hnsw.ef_construction, c.acm.hnsw.ef_search,
                                                       c.acm.hnsw.rng_seed);
    }
    if (f.ef_construction) c.acm.hnsw.ef_construction = *f.ef_construction;
    if (f.ef_search) c.acm.hnsw.ef_search = *f.ef_search;
    if (f.shortcircuit) c.acm.exact_match_shortcircuit = *f.shortcircuit;
    if (f.shrinkage) c.slda.shrinkage = *f.shrinkage;
    if (f.refresh_interval) c.slda.refresh_interval = *f.refresh_interval;
    if (f.learning_rate) c.sgd_learning_rate = *f.learning_rate;
    if (f.scaler) c.preprocess.scaler = *f.scaler;
    if (f.weights) c.preprocess.projection_weights = *f.weights;
    if (f.target_dim) c.preprocess.target_dim = *f.target_dim;
    if (f.pretrain_fraction) c.split.pretrain_fraction = *f.pretrain_fraction;
    if (f.test_fraction) c.split.test_fraction = *f.test_fraction;
    if (f.h) c.metrics.h = *f.h;
    if (f.delay) c.metrics.delay = *f.delay;
    if (f.buckets) c.metrics.buckets = *f.buckets;
    if (f.out) c.output.dir = *f.out;
    if (f.format) c.output.format = acm::harness::parse_format(*f.format);
    if (f.prefix) c.output.prefix = *f.prefix;
    if (f.seed) {
        c.seed = *f.seed;
        c.split.seed = *f.seed;
    }
    if (f.no_timing) c.timing = false;
    c.validate();
    return c;
}

int cmd_run(const RunFlags& f) {
    const ExperimentConfig config = resolve_config(f);
    if (f.dump_config) {
        std::cout << nlohmann::json(config).dump(2) << '\n';
        return 0;
    }
    std::signal(SIGINT, on_sigint);
    const acm::harness::RunReport report = acm::harness::run_experiment(config, &g_stop);
    if (config.output.dir) {
        const auto files =
            acm::harness::emit_report(report, config.output.format, *config.output.dir, config.output.prefix);
        std::cerr << "wrote " << files.steps.string() << ", " << files.summary.string() << ", "
                  << files.accuracy.string() << '\n';
    }
    std::cout << acm::harness::summary_to_json(report.summary).dump(2) << '\n';
    return report.summary.interrupted ? 130 : 0;
}

int cmd_split(const std::string& input, const std::string& out_dir, const acm::stream::SplitSpec& spec) {
    const acm::stream::Dataset data = acm::stream::load_feature_file(input);
    const acm::stream::Split split = acm::stream::chronological_split(data.records, spec);
    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);
    std::vector<acm::stream::ManifestEntry> manifest;
    auto emit = [&](const char* name, const std::vector<acm::StreamRecord>& records) {
        acm::stream::Dataset part{data.dim, data.num_classes, records};
        const auto path = dir / (std::string(name) + ".acmf");
        acm::stream::write_feature_file(path, part);
        manifest.push_back({path.filename(), data.dim, records.size(), data.num_classes});
        std::cout << name << ' ' << records.size() << '\n';
    };
    emit("pretrain", split.pretrain);
    emit("online", split.online);
    emit("test", split.test);
    acm::stream::write_manifest(dir / "manifest.txt", manifest);
    return 0;
}

int cmd_inspect(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw acm::Error(acm::ErrorCode::Io, "cannot open " + path);
    }
    char magic[8] = {};
    in.read(magic, sizeof magic);
    in.clear();
    in.seekg(0);
    nlohmann::json info;
    if (std::memcmp(magic, "ACMF1", 6) == 0) {
        in.close();
        const auto data = acm::stream::load_feature_file(path);
        std::vector<std::size_t> per_class(data.num_classes, 0);
        for (const auto& r : data.records) {
            ++per_class[r.label];
        }
        info = {{"type", "features"},
                {"dim", data.dim},
                {"count", data.records.size()},
                {"num_classes", data.num_classes},
                {"class_counts", per_class}};
        if (!data.records.empty()) {
            info["first_timestamp"] = data.records.front().timestamp;
            info["last_timestamp"] = data.records.back().timestamp;
        }
    } else if (std::memcmp(magic, "ACMIDX1", 8) == 0) {
        const auto index = acm::ann::HnswIndex::load(in);
        const auto check = index.check_invariants();
        info = {{"type", "hnsw"},
                {"dim", index.dim()},
                {"count", index.size()},
                {"m", index.params().m},
                {"m0", index.params().m0},
                {"ef_construction", index.params().ef_construction},
                {"ef_search", index.params().ef_search},
                {"max_level", index.max_level()},
                {"invariants_ok", check.ok},
                {"violations", check.violations}};
    } else if (std::memcmp(magic, "ACMBF1", 8) == 0) {
        const auto index = acm::ann::BruteForceIndex::load(in);
        info = {{"type", "brute_force"}, {"dim", index.dim()}, {"count", index.size()}};
    } else if (std::memcmp(magic, "ACMLRN1", 8) == 0) {
        const auto learner = acm::learner::AcmLearner::load(in);
        info = {{"type", "learner"},
                {"name", learner.name()},
                {"dim", learner.memory().dim()},
                {"memory_count", learner.memory_count()},
                {"k", learner.k()},
                {"k_max", learner.config().k_max}};
    } else if (std::memcmp(magic, "ACMW1", 6) == 0) {
        const auto w = acm::preprocess::ProjectionWeights::load(in);
        info = {{"type", "projection"},
                {"kind", static_cast<std::uint32_t>(w.kind())},
                {"in_dim", w.in_dim()},
                {"out_dim", w.out_dim()},
                {"layers", w.layers().size()}};
    } else {
        throw acm::Error(acm::ErrorCode::BadMagic, "unrecognized file " + path);
    }
    std::cout << info.dump(2) << '\n';
    return 0;
}

void ensure_parent(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Online continual learning with an approximate nearest-neighbor memory"};
    app.require_subcommand(1);

    RunFlags run_flags;
    auto* run = app.add_subcommand("run", "run one online experiment");
    add_run_flags(*run, run_flags);

    acm::bench::BenchConfig bench;
    bench.sizes = {1000, 10000, 100000};
    std::uint32_t bench_m = 100, bench_efc = 500, bench_efs = 500;
    std::optional<std::string> bench_out;
    bool no_brute = false;
    auto* bench_cmd = app.add_subcommand("bench", "HNSW and brute-force search latency by index size");
    bench_cmd->add_option("--sizes", bench.sizes, "ascending index sizes")->delimiter(',');
    bench_cmd->add_option("--dim", bench.dim, "vector width");
    bench_cmd->add_option("--trials", bench.trials, "queries per size");
    bench_cmd->add_option("--recall-k", bench.recall_k, "k for recall and search");
    bench_cmd->add_option("--m", bench_m, "HNSW degree");
    bench_cmd->add_option("--ef-construction", bench_efc, "HNSW construction beam");
    bench_cmd->add_option("--ef-search", bench_efs, "HNSW search beam");
    bench_cmd->add_option("--seed", bench.seed, "data and query seed");
    bench_cmd->add_option("--threads", bench.threads, "concurrent query threads, 0 skips the pass");
    bench_cmd->add_flag("--no-brute", no_brute, "skip the brute-force control");
    bench_cmd->add_option("-o,--out", bench_out, "CSV output path (default stdout)");

    std::string split_in, split_out;
    acm::stream::SplitSpec split_spec;
    auto* split = app.add_subcommand("split", "split a feature file into pretrain, online and test files");
    split->add_option("input", split_in, "feature file")->required()->check(CLI::ExistingFile);
    split->add_option("-o,--out", split_out, "output directory")->required();
    split->add_option("--pretrain-fraction", split_spec.pretrain_fraction, "pretrain share of the non-test records");
    split->add_option("--test-fraction", split_spec.test_fraction, "held-out share of all records");
    split->add_option("--seed", split_spec.seed, "test draw seed");

    acm::stream::DriftConfig drift;
    std::string drift_out, drift_mode = "CLASS_INCREMENTAL";
    std::optional<std::string> drift_config;
    auto* gen = app.add_subcommand("gen-drift", "write a synthetic drift stream as a feature file");
    gen->add_option("-o,--out", drift_out, "feature file to write")->required();
    gen->add_option("-c,--config", drift_config, "JSON drift config")->check(CLI::ExistingFile);
    auto* o_classes = gen->add_option("--classes", drift.num_classes, "number of classes");
    auto* o_dim = gen->add_option("--dim", drift.dim, "feature width");
    auto* o_samples = gen->add_option("--samples", drift.samples, "stream length");
    auto* o_mode = gen->add_option("--mode", drift_mode, "CLASS_INCREMENTAL or MEAN_ROTATION");
    auto* o_frac = gen->add_option("--arrival-fraction", drift.arrival_fraction, "share of the stream over which classes arrive");
    auto* o_sigma = gen->add_option("--sigma", drift.sigma, "per-coordinate noise");
    auto* o_clusters = gen->add_option("--clusters", drift.clusters_per_class, "clusters per class");
    auto* o_rate = gen->add_option("--rotation-rate", drift.rotation_rate, "radians per step");
    auto* o_seed = gen->add_option("--seed", drift.seed, "generator seed");

    std::string inspect_path;
    auto* inspect = app.add_subcommand("inspect", "describe a feature, weights, index or learner file");
    inspect->add_option("file", inspect_path, "file to describe")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*run) {
            return cmd_run(run_flags);
        }
        if (*bench_cmd) {
            bench.hnsw = acm::ann::HnswParams::with_degree(bench_m, bench_efc, bench_efs, bench.seed);
            bench.brute = !no_brute;
            if (bench_out) {
                ensure_parent(*bench_out);
                std::ofstream out(*bench_out);
                if (!out) {
                    throw acm::Error(acm::ErrorCode::Io, "cannot create " + *bench_out);
                }
                acm::bench::write_bench_csv(out, acm::bench::bench_index(bench, &std::cerr));
            } else {
                acm::bench::bench_index(bench, &std::cout);
            }
            return 0;
        }
        if (*split) {
            return cmd_split(split_in, split_out, split_spec);
        }
        if (*gen) {
            acm::stream::DriftConfig config = drift;
            if (drift_config) {
                std::ifstream in(*drift_config);
                config = nlohmann::json::parse(in).get<acm::stream::DriftConfig>();
                // explicit flags still win over the file
                if (o_classes->count()) config.num_classes = drift.num_classes;
                if (o_dim->count()) config.dim = drift.dim;
                if (o_samples->count()) config.samples = drift.samples;
                if (o_frac->count()) config.arrival_fraction = drift.arrival_fraction;
                if (o_sigma->count()) config.sigma = drift.sigma;
                if (o_clusters->count()) config.clusters_per_class = drift.clusters_per_class;
                if (o_rate->count()) config.rotation_rate = drift.rotation_rate;
                if (o_seed->count()) config.seed = drift.seed;
            }
            if (!drift_config || o_mode->count()) {
                nlohmann::json j = config;
                j["mode"] = drift_mode;
                config = j.get<acm::stream::DriftConfig>();
            }
            const auto data = acm::stream::generate_drift_stream(config);
            ensure_parent(drift_out);
            acm::stream::write_feature_file(drift_out, data);
            std::cout << "wrote " << data.records.size() << " records of dim " << data.dim << " to " << drift_out
                      << '\n';
            return 0;
        }
        if (*inspect) {
            return cmd_inspect(inspect_path);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
