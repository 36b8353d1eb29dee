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

#include "acm/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <chrono>
#include <random>
#include <thread>
#include <unordered_set>

#include "acm/ann/brute_force.hpp"
#include "acm/error.hpp"

namespace acm::bench {

namespace {

using Clock = std::chrono::steady_clock;

void random_unit(std::mt19937_64& rng, std::vector<float>& v) {
    std::normal_distribution<float> g;
    do {
        for (float& x : v) {
            x = g(rng);
        }
    } while (std::sqrt(dot(v, v)) < 1e-6);
    l2_normalize_inplace(v);
}

double lower_median(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    return xs[(xs.size() - 1) / 2];
}

double nearest_rank_p99(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const auto rank = static_cast<std::size_t>(std::ceil(0.99 * static_cast<double>(xs.size())));
    return xs[std::max<std::size_t>(rank, 1) - 1];
}

double elapsed_ns(Clock::time_point a, Clock::time_point b) {
    return static_cast<double>(std::chrono::duration_cast<std::chrono::nanoseconds>(b - a).count());
}

}  // namespace

void BenchConfig::validate() const {
    if (sizes.empty()) {
        throw Error(ErrorCode::InvalidConfig, "bench needs at least one size");
    }
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (sizes[i] == 0 || (i > 0 && sizes[i] <= sizes[i - 1])) {
            throw Error(ErrorCode::InvalidConfig, "bench sizes must be positive and strictly ascending");
        }
    }
    if (dim == 0 || trials == 0 || recall_k == 0) {
        throw Error(ErrorCode::InvalidConfig, "bench dim, trials and recall_k must be positive");
    }
    hnsw.validate();
}

std::vector<BenchRow> bench_index(const BenchConfig& config, std::ostream* progress) {
    config.validate();
    std::mt19937_64 data_rng(config.seed);
    std::mt19937_64 query_rng(config.seed ^ 0x9e3779b97f4a7c15ULL);

    ann::HnswIndex hnsw(config.dim, config.hnsw);
    hnsw.reserve(config.sizes.back());
    std::optional<ann::BruteForceIndex> brute;
    if (config.brute) {
        brute.emplace(config.dim);
        brute->reserve(config.sizes.back());
    }

    std::vector<float> v(config.dim);
    std::vector<BenchRow> rows;
    double build_seconds = 0.0;
    for (const std::size_t target : config.sizes) {
        const auto t0 = Clock::now();
        while (hnsw.size() < target) {
            random_unit(data_rng, v);
            const auto label = static_cast<Label>(hnsw.size());
            hnsw.insert(v, label);
            if (brute) {
                brute->insert(v, label);
            }
        }
        build_seconds += std::chrono::duration<double>(Clock::now() - t0).count();

        std::vector<std::vector<float>> queries(config.trials, std::vector<float>(config.dim));
        for (auto& q : queries) {
            random_unit(query_rng, q);
        }
        const std::size_t k = std::min(config.recall_k, target);
        std::vector<double> hnsw_ns;
        std::vector<double> brute_ns;
        std::size_t found = 0;
        for (const auto& q : queries) {
            const auto a = Clock::now();
            const auto approx = hnsw.search(q, k);
            const auto b = Clock::now();
            hnsw_ns.push_back(elapsed_ns(a, b));
            if (brute) {
                const auto c = Clock::now();
                const auto exact = brute->search(q, k);
                brute_ns.push_back(elapsed_ns(c, Clock::now()));
                std::unordered_set<EntryId> truth;
                for (const NeighborHit& h : exact) {
                    truth.insert(h.entry_id);
                }
                for (const NeighborHit& h : approx) {
                    found += truth.count(h.entry_id);
                }
            }
        }

        BenchRow row;
        row.n = target;
        row.build_seconds = build_seconds;
        row.hnsw_median_ns = lower_median(hnsw_ns);
        row.hnsw_p99_ns = nearest_rank_p99(hnsw_ns);
        if (brute) {
            row.brute_median_ns = lower_median(brute_ns);
            row.brute_p99_ns = nearest_rank_p99(brute_ns);
            row.recall = static_cast<double>(found) / static_cast<double>(k * queries.size());
        }
        if (config.threads > 0) {
            std::atomic<std::size_t> next{0};
            const auto a = Clock::now();
            std::vector<std::thread> pool;
            for (unsigned t = 0; t < config.threads; ++t) {
                pool.emplace_back([&] {
                    for (std::size_t i = next++; i < queries.size(); i = next++) {
                        (void)hnsw.search(queries[i], k);
                    }
                });
            }
            for (auto& th : pool) {
                th.join();
            }
            const double secs = std::chrono::duration<double>(Clock::now() - a).count();
            row.qps = secs > 0.0 ? static_cast<double>(queries.size()) / secs : 0.0;
        }
        rows.push_back(row);
        if (progress) {
            if (rows.size() == 1) {
                write_bench_header(*progress);
            }
            write_bench_row(*progress, row);
            progress->flush();
        }
    }
    return rows;
}

void write_bench_header(std::ostream& out) {
    out << "n,build_s,hnsw_median_ns,hnsw_p99_ns,brute_median_ns,brute_p99_ns,recall,qps\n";
}

void write_bench_row(std::ostream& out, const BenchRow& r) {
    auto opt = [&out](const std::optional<double>& v) {
        if (v) {
            out << *v;
        }
    };
    out << r.n << ',' << r.build_seconds << ',' << r.hnsw_median_ns << ',' << r.hnsw_p99_ns << ',';
    opt(r.brute_median_ns);
    out << ',';
    opt(r.brute_p99_ns);
    out << ',';
    opt(r.recall);
    out << ',';
    opt(r.qps);
    out << '\n';
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
    write_bench_header(out);
    for (const BenchRow& r : rows) {
        write_bench_row(out, r);
    }
}

}  // namespace acm::bench
