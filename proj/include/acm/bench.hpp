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
#include <optional>
#include <ostream>
#include <vector>

#include "acm/ann/hnsw.hpp"

namespace acm::bench {

struct BenchConfig {
    std::vector<std::size_t> sizes;  ///< ascending
    std::size_t dim = 64;
    std::size_t trials = 200;        ///< queries per size
    std::size_t recall_k = 10;
    ann::HnswParams hnsw{};
    std::uint64_t seed = 0;
    bool brute = true;
    unsigned threads = 0;            ///< 0 disables the concurrent throughput pass

    void validate() const;
};

struct BenchRow {
    std::size_t n = 0;
    double build_seconds = 0.0;      ///< cumulative insert time up to n
    double hnsw_median_ns = 0.0;
    double hnsw_p99_ns = 0.0;
    std::optional<double> brute_median_ns;
    std::optional<double> brute_p99_ns;
    std::optional<double> recall;    ///< recall@recall_k against brute force
    std::optional<double> qps;       ///< concurrent HNSW queries per second
};

/// Builds one index incrementally over the requested sizes and times `trials` fresh
/// random queries at each checkpoint.
std::vector<BenchRow> bench_index(const BenchConfig& config, std::ostream* progress = nullptr);

void write_bench_header(std::ostream& out);
void write_bench_row(std::ostream& out, const BenchRow& row);
void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);

}  // namespace acm::bench
