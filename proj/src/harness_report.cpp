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

#include <fstream>
#include <sstream>

#include "acm/harness.hpp"

namespace acm::harness {

using nlohmann::json;

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::Io, "cannot create " + path.string());
    }
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) {
        throw Error(ErrorCode::Io, "write failed for " + path.string());
    }
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json latency_json(const std::optional<LatencyStats>& s) {
    if (!s) {
        return {{"median_ns", nullptr}, {"p99_ns", nullptr}};
    }
    return {{"median_ns", s->median_ns}, {"p99_ns", s->p99_ns}};
}

}  // namespace

json summary_to_json(const RunSummary& s) {
    json buckets = json::array();
    for (const metrics::TimeBucket& b : s.ir_buckets) {
        buckets.push_back({{"begin", b.begin},
                           {"end", b.end},
                           {"count", b.count},
                           {"correct", b.correct},
                           {"accuracy", optional_json(b.accuracy)}});
    }
    return {{"method", s.method},
            {"online_steps", s.online_steps},
            {"pretrain_size", s.pretrain_size},
            {"test_size", s.test_size},
            {"online_accuracy", optional_json(s.online_accuracy)},
            {"ir_h", optional_json(s.ir_h)},
            {"h", s.h},
            {"test_accuracy", optional_json(s.test_accuracy)},
            {"ir_buckets", buckets},
            {"near_future_accuracy", optional_json(s.near_future_accuracy)},
            {"delay", s.delay},
            {"predict_latency", latency_json(s.predict_latency)},
            {"learn_latency", latency_json(s.learn_latency)},
            {"peak_memory_count", s.peak_memory_count},
            {"interrupted", s.interrupted}};
}

EmittedFiles emit_report(const RunReport& report, ReportFormat format, const std::filesystem::path& dir,
                         const std::string& prefix) {
    std::filesystem::create_directories(dir);
    EmittedFiles files;
    files.steps = dir / (prefix + (format == ReportFormat::Csv ? "_steps.csv" : "_steps.jsonl"));
    files.summary = dir / (prefix + "_summary.json");
    files.accuracy = dir / (prefix + "_accuracy.csv");

    {
        auto out = open_out(files.steps);
        if (format == ReportFormat::Csv) {
            out << kStepColumns << '\n';
            for (const StepRow& r : report.rows) {
                const PredictionOutcome& o = r.outcome;
                out << o.timestep << ',';
                if (o.predicted) {
                    out << *o.predicted;
                } else {
                    out << -1;
                }
                out << ',' << o.truth << ',' << (o.correct ? 1 : 0) << ',' << o.predict_latency_ns << ','
                    << o.learn_latency_ns << ',' << r.current_k << '\n';
            }
        } else {
            for (const StepRow& r : report.rows) {
                const PredictionOutcome& o = r.outcome;
                // keys in the fixed column order
                json row = json::array({o.timestep, o.predicted ? json(*o.predicted) : json(nullptr), o.truth,
                                        o.correct, o.predict_latency_ns, o.learn_latency_ns, r.current_k});
                out << "{\"timestep\":" << row[0].dump() << ",\"predicted\":" << row[1].dump()
                    << ",\"truth\":" << row[2].dump() << ",\"correct\":" << row[3].dump()
                    << ",\"predict_ns\":" << row[4].dump() << ",\"learn_ns\":" << row[5].dump()
                    << ",\"current_k\":" << row[6].dump() << "}\n";
            }
        }
        finish(out, files.steps);
    }
    {
        auto out = open_out(files.summary);
        out << summary_to_json(report.summary).dump(2) << '\n';
        finish(out, files.summary);
    }
    {
        auto out = open_out(files.accuracy);
        out << "t,a_t\n";
        for (std::size_t i = 0; i < report.accuracy_curve.size(); ++i) {
            out << (i + 1) << ',' << json(report.accuracy_curve[i]).dump() << '\n';
        }
        finish(out, files.accuracy);
    }
    return files;
}

std::vector<StepRow> parse_steps_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open " + path.string());
    }
    std::string line;
    if (!std::getline(in, line) || line != kStepColumns) {
        throw Error(ErrorCode::InvalidConfig, "unexpected step CSV header in " + path.string());
    }
    std::vector<StepRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::istringstream fields(line);
        StepRow r;
        long long predicted = 0;
        int correct = 0;
        char c1 = 0, c2 = 0, c3 = 0, c4 = 0, c5 = 0, c6 = 0;
        fields >> r.outcome.timestep >> c1 >> predicted >> c2 >> r.outcome.truth >> c3 >> correct >> c4 >>
            r.outcome.predict_latency_ns >> c5 >> r.outcome.learn_latency_ns >> c6 >> r.current_k;
        if (!fields || c1 != ',' || c2 != ',' || c3 != ',' || c4 != ',' || c5 != ',' || c6 != ',') {
            throw Error(ErrorCode::InvalidConfig, "malformed step row: " + line);
        }
        if (predicted >= 0) {
            r.outcome.predicted = static_cast<Label>(predicted);
        }
        r.outcome.correct = correct != 0;
        rows.push_back(r);
    }
    return rows;
}

}  // namespace acm::harness
