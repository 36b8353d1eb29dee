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

// Acceptance run: one PASS/FAIL line per criterion. Pass criterion numbers as
// arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "acm/ann/brute_force.hpp"
#include "acm/ann/hnsw.hpp"
#include "acm/baselines.hpp"
#include "acm/bench.hpp"
#include "acm/harness.hpp"
#include "acm/learner.hpp"
#include "acm/metrics.hpp"
#include "acm/preprocess.hpp"
#include "test_util.hpp"

using namespace acm;
using acm::testing::random_unit;
using acm::testing::random_units;
using acm::testing::rel_diff;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

learner::AcmConfig fixed_k(std::uint32_t k, learner::Backend backend) {
    learner::AcmConfig c;
    c.k_initial = k;
    c.recalib_interval = 0;
    c.backend = backend;
    return c;
}

std::uint64_t peak_rss_kb() {
    std::ifstream in("/proc/self/status");
    for (std::string line; std::getline(in, line);) {
        if (line.rfind("VmHWM:", 0) == 0) {
            return std::stoull(line.substr(6));
        }
    }
    return 0;
}

// 1: every stored point, re-queried at k=1, returns its own label.
Verdict consistency() {
    const auto t0 = Clock::now();
    const std::size_t n = 10000;
    const auto points = random_units(101, n, 64);
    std::mt19937_64 rng(102);
    std::uniform_int_distribution<Label> label(0, 99);
    std::vector<Label> labels(n);
    for (Label& y : labels) {
        y = label(rng);
    }
    auto rate = [&](learner::Backend backend) {
        learner::AcmLearner l(64, fixed_k(1, backend));
        for (std::size_t i = 0; i < n; ++i) {
            l.learn(points[i], labels[i]);
        }
        std::size_t ok = 0;
        for (std::size_t i = 0; i < n; ++i) {
            ok += l.predict(points[i]) == labels[i] ? 1 : 0;
        }
        return static_cast<double>(ok) / static_cast<double>(n);
    };
    const double brute = rate(learner::Backend::BruteForce);
    const double hnsw = rate(learner::Backend::Hnsw);
    const double secs = seconds_since(t0);
    return {brute == 1.0 && hnsw >= 0.999 && secs < 60.0,
            fmt("brute %.4f, hnsw %.4f, %.1f s", brute, hnsw, secs)};
}

// 2: a record shown twice in a row is classified correctly the second time.
Verdict repeated_records() {
    const std::size_t n = 2000;
    const auto points = random_units(201, n, 32);
    std::mt19937_64 rng(202);
    std::uniform_int_distribution<Label> label(0, 19);
    learner::AcmLearner l(32, fixed_k(1, learner::Backend::Hnsw));
    std::size_t second_ok = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const Label y = label(rng);
        (void)l.predict(points[i]);
        l.learn(points[i], y);
        second_ok += l.predict(points[i]) == y ? 1 : 0;
        l.learn(points[i], y);
    }
    return {second_ok == n, fmt("%zu / %zu second presentations correct", second_ok, n)};
}

// 3: adding one far-away point leaves predictions on a probe set unchanged.
Verdict far_point_stability() {
    const std::size_t trials = 100;
    const std::size_t dim = 16;
    std::size_t identical = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        std::mt19937_64 rng(300 + t);
        std::normal_distribution<float> g;
        const std::vector<float> center = random_unit(rng, dim);
        std::vector<std::vector<float>> anchors;
        for (int a = 0; a < 8; ++a) {
            anchors.push_back(random_unit(rng, dim));
        }
        auto sample = [&] {
            std::vector<float> v(dim);
            for (std::size_t i = 0; i < dim; ++i) {
                v[i] = center[i] + 0.4F * g(rng);
            }
            l2_normalize_inplace(v);
            return v;
        };
        auto label_of = [&](const std::vector<float>& v) {
            Label best = 0;
            for (Label a = 1; a < anchors.size(); ++a) {
                if (dot(v, anchors[a]) > dot(v, anchors[best])) {
                    best = a;
                }
            }
            return best;
        };
        learner::AcmLearner l(dim, fixed_k(1, learner::Backend::Hnsw));
        for (int i = 0; i < 500; ++i) {
            const auto v = sample();
            l.learn(v, label_of(v));
        }
        std::vector<std::vector<float>> probes;
        std::vector<Label> truth;
        for (int i = 0; i < 200; ++i) {
            probes.push_back(sample());
            truth.push_back(label_of(probes.back()));
        }
        auto evaluate = [&] {
            std::vector<std::optional<Label>> out;
            for (const auto& p : probes) {
                out.push_back(l.predict(p));
            }
            return out;
        };
        auto accuracy = [&](const std::vector<std::optional<Label>>& preds) {
            std::size_t ok = 0;
            for (std::size_t i = 0; i < preds.size(); ++i) {
                ok += preds[i] == truth[i] ? 1 : 0;
            }
            return static_cast<double>(ok) / static_cast<double>(preds.size());
        };
        const auto before = evaluate();
        std::vector<float> far(center);
        for (float& x : far) {
            x = -x;
        }
        l.learn(far, 1000);
        const auto after = evaluate();
        const double a0 = accuracy(before);
        const double a1 = accuracy(after);
        identical += (before == after && std::memcmp(&a0, &a1, sizeof a0) == 0) ? 1 : 0;
    }
    return {identical == trials, fmt("%zu / %zu trials bit-identical", identical, trials)};
}

// 4: recall@10 against exact search at default graph parameters.
Verdict hnsw_recall() {
    const auto t0 = Clock::now();
    const std::size_t n = 20000;
    const std::size_t dim = 64;
    const auto points = random_units(401, n, dim);
    const auto queries = random_units(402, 500, dim);
    ann::HnswParams params;  // m = 100, ef = 500
    ann::HnswIndex hnsw(dim, params);
    ann::BruteForceIndex brute(dim);
    for (std::size_t i = 0; i < n; ++i) {
        hnsw.insert(points[i], 0);
        brute.insert(points[i], 0);
    }
    std::size_t found = 0;
    for (const auto& q : queries) {
        std::set<EntryId> exact;
        for (const NeighborHit& h : brute.search(q, 10)) {
            exact.insert(h.entry_id);
        }
        for (const NeighborHit& h : hnsw.search(q, 10)) {
            found += exact.count(h.entry_id);
        }
    }
    const double recall = static_cast<double>(found) / (10.0 * static_cast<double>(queries.size()));
    const double secs = seconds_since(t0);
    return {recall >= 0.95 && secs < 300.0,
            fmt("recall@10 %.4f (m=%u, ef=%u), %.1f s", recall, params.m, params.ef_search, secs)};
}

// 5: latency growth from 1e4 to 1e6 stored points.
Verdict latency_scaling() {
    const auto t0 = Clock::now();
    bench::BenchConfig c;
    c.sizes = {10000, 1000000};
    c.dim = 64;
    c.trials = 300;
    c.hnsw = ann::HnswParams::with_degree(16, 100, 100);
    c.seed = 501;
    const auto rows = bench::bench_index(c, &std::cerr);
    const double hnsw_ratio = rows[1].hnsw_median_ns / rows[0].hnsw_median_ns;
    const double brute_ratio = *rows[1].brute_median_ns / *rows[0].brute_median_ns;
    const double secs = seconds_since(t0);
    const double peak_gb = static_cast<double>(peak_rss_kb()) / (1024.0 * 1024.0);
    return {hnsw_ratio <= 4.0 && brute_ratio >= 50.0 && secs < 1800.0 && peak_gb <= 8.0,
            fmt("hnsw median %.0f -> %.0f ns (x%.2f), brute %.0f -> %.0f ns (x%.1f), %.0f s, peak %.2f GB",
                rows[0].hnsw_median_ns, rows[1].hnsw_median_ns, hnsw_ratio, *rows[0].brute_median_ns,
                *rows[1].brute_median_ns, brute_ratio, secs, peak_gb)};
}

// Majority vote over the first k of an exactly ordered list; ties go to the label
// seen first.
Label oracle_vote(const std::vector<Label>& ordered, std::size_t k) {
    std::map<Label, std::pair<std::size_t, std::size_t>> tally;  // votes, first position
    for (std::size_t i = 0; i < k; ++i) {
        auto [it, fresh] = tally.try_emplace(ordered[i], 0, i);
        ++it->second.first;
    }
    Label best = tally.begin()->first;
    for (const auto& [y, t] : tally) {
        const auto& b = tally[best];
        if (t.first > b.first || (t.first == b.first && t.second < b.second)) {
            best = y;
        }
    }
    return best;
}

struct RecountCheck {
    bool matches = false;
    std::size_t maximizers = 0;
    std::uint32_t chosen = 0;
    std::uint32_t expected = 0;
};

RecountCheck recount(double flip, std::uint64_t seed) {
    const std::size_t n = 1200;
    const std::size_t window = 1000;
    const std::size_t dim = 8;
    std::mt19937_64 rng(seed);
    std::normal_distribution<float> g;
    std::bernoulli_distribution flipped(flip);
    std::vector<std::vector<float>> xs;
    std::vector<Label> ys;
    for (std::size_t i = 0; i < n; ++i) {
        const Label cluster = static_cast<Label>(i % 2);
        std::vector<float> v(dim);
        for (std::size_t j = 0; j < dim; ++j) {
            v[j] = 0.35F * g(rng);
        }
        v[0] += cluster == 0 ? 1.0F : -1.0F;
        l2_normalize_inplace(v);
        xs.push_back(v);
        ys.push_back(flipped(rng) ? 1 - cluster : cluster);
    }

    learner::AcmConfig config;
    config.k_max = 512;
    config.recalib_interval = std::numeric_limits<std::uint32_t>::max();
    config.recalib_window = static_cast<std::uint32_t>(window);
    config.backend = learner::Backend::BruteForce;
    learner::AcmLearner l(dim, config);
    for (std::size_t i = 0; i < n; ++i) {
        l.learn(xs[i], ys[i]);
    }
    const auto result = l.recalibrate_k();

    std::vector<std::uint32_t> ks;
    for (std::uint32_t k = 1; k <= 512; k *= 2) {
        ks.push_back(k);
    }
    std::vector<std::size_t> correct(ks.size(), 0);
    for (std::size_t q = n - window; q < n; ++q) {
        std::vector<std::pair<double, std::size_t>> order;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == q) {
                continue;
            }
            double s = 0.0;
            for (std::size_t j = 0; j < dim; ++j) {
                const double d = static_cast<double>(xs[q][j]) - xs[i][j];
                s += d * d;
            }
            order.emplace_back(s, i);
        }
        std::sort(order.begin(), order.end());
        std::vector<Label> ordered;
        for (std::size_t i = 0; i < 512; ++i) {
            ordered.push_back(ys[order[i].second]);
        }
        for (std::size_t j = 0; j < ks.size(); ++j) {
            correct[j] += oracle_vote(ordered, ks[j]) == ys[q] ? 1 : 0;
        }
    }
    const std::size_t top = *std::max_element(correct.begin(), correct.end());
    RecountCheck out;
    out.chosen = result.chosen;
    for (std::size_t j = 0; j < ks.size(); ++j) {
        if (correct[j] == top) {
            out.maximizers += 1;
            if (out.expected == 0) {
                out.expected = ks[j];
            }
        }
    }
    out.matches = result.ks == ks && result.accuracy.size() == ks.size();
    for (std::size_t j = 0; out.matches && j < ks.size(); ++j) {
        out.matches = result.accuracy[j] == static_cast<double>(correct[j]) / static_cast<double>(window);
    }
    return out;
}

// 6: the recalibrated k maximizes leave-one-out accuracy; ties pick the smallest k.
Verdict k_selection() {
    const RecountCheck noisy = recount(0.3, 601);
    const RecountCheck clean = recount(0.0, 602);
    const bool pass = noisy.matches && noisy.chosen == noisy.expected && noisy.chosen > 1 && clean.matches &&
                      clean.maximizers > 1 && clean.chosen == clean.expected && clean.chosen == 1;
    return {pass, fmt("noisy: chose %u, recount %u, table %s; clean: chose %u with %zu tied maxima, table %s",
                      noisy.chosen, noisy.expected, noisy.matches ? "equal" : "differs", clean.chosen,
                      clean.maximizers, clean.matches ? "equal" : "differs")};
}

// 7: streaming LDA against a batch shrinkage-LDA fit.
Verdict slda_agreement() {
    const std::size_t n = 500;
    const std::size_t classes = 5;
    const Eigen::Index d = 16;
    std::mt19937_64 rng(701);
    std::normal_distribution<double> g;
    Eigen::MatrixXd mix(d, d);
    for (Eigen::Index i = 0; i < mix.size(); ++i) {
        mix.data()[i] = g(rng) / 4.0;
    }
    std::vector<Eigen::VectorXd> centers;
    for (std::size_t c = 0; c < classes; ++c) {
        centers.push_back(Eigen::VectorXd::NullaryExpr(d, [&] { return 0.6 * g(rng); }));
    }
    std::uniform_int_distribution<std::size_t> pick(0, classes - 1);
    auto draw = [&](std::size_t c) {
        const Eigen::VectorXd z = Eigen::VectorXd::NullaryExpr(d, [&] { return g(rng); });
        return Eigen::VectorXf((centers[c] + mix * z).cast<float>());
    };
    std::vector<Eigen::VectorXf> xs;
    std::vector<Label> ys;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t c = pick(rng);
        xs.push_back(draw(c));
        ys.push_back(static_cast<Label>(c));
    }

    baselines::SldaClassifier slda(static_cast<std::size_t>(d), {1e-4, 100});
    for (std::size_t i = 0; i < n; ++i) {
        slda.learn({xs[i].data(), static_cast<std::size_t>(d)}, ys[i]);
    }

    // two passes: class means, then pooled scatter
    std::vector<Eigen::VectorXd> mean(classes, Eigen::VectorXd::Zero(d));
    std::vector<double> count(classes, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        mean[ys[i]] += xs[i].cast<double>();
        count[ys[i]] += 1.0;
    }
    for (std::size_t c = 0; c < classes; ++c) {
        mean[c] /= count[c];
    }
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
    for (std::size_t i = 0; i < n; ++i) {
        const Eigen::VectorXd r = xs[i].cast<double>() - mean[ys[i]];
        cov += r * r.transpose();
    }
    cov /= static_cast<double>(n);
    const double cov_err = (slda.covariance() - cov).norm() / cov.norm();

    const double lambda = 1e-4;
    const Eigen::MatrixXd precision =
        ((1.0 - lambda) * cov + lambda * Eigen::MatrixXd::Identity(d, d)).fullPivLu().inverse();
    std::size_t agree = 0;
    const std::size_t probes = 2000;
    for (std::size_t i = 0; i < probes; ++i) {
        const Eigen::VectorXf x = draw(pick(rng));
        Label best = 0;
        double best_score = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < classes; ++c) {
            const double s = mean[c].dot(precision * x.cast<double>()) - 0.5 * mean[c].dot(precision * mean[c]);
            if (s > best_score) {
                best_score = s;
                best = static_cast<Label>(c);
            }
        }
        agree += slda.predict({x.data(), static_cast<std::size_t>(d)}) == best ? 1 : 0;
    }
    const double rate = static_cast<double>(agree) / static_cast<double>(probes);
    return {rate >= 0.99 && cov_err <= 1e-6, fmt("agreement %.4f, covariance rel err %.2e", rate, cov_err)};
}

// 8: running class means against batch means.
Verdict ncm_means() {
    const std::size_t n = 10000;
    const std::size_t dim = 32;
    const Label classes = 10;
    std::mt19937_64 rng(801);
    std::normal_distribution<float> g(3.0F, 2.0F);
    std::uniform_int_distribution<Label> pick(0, classes - 1);
    baselines::NcmClassifier ncm(dim);
    std::vector<std::vector<long double>> sum(classes, std::vector<long double>(dim, 0.0L));
    std::vector<std::size_t> count(classes, 0);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<float> x(dim);
        for (float& v : x) {
            v = g(rng);
        }
        const Label y = pick(rng);
        ncm.learn(x, y);
        for (std::size_t j = 0; j < dim; ++j) {
            sum[y][j] += x[j];
        }
        ++count[y];
    }
    double worst = 0.0;
    for (Label y = 0; y < classes; ++y) {
        const auto& m = *ncm.class_mean(y);
        for (std::size_t j = 0; j < dim; ++j) {
            worst = std::max(worst, rel_diff(m[j], static_cast<double>(sum[y][j] / count[y])));
        }
    }
    return {worst <= 1e-6, fmt("max rel err %.2e", worst)};
}

// 9: streaming standardization statistics against two passes.
Verdict welford() {
    const std::size_t n = 10000;
    const std::size_t dim = 16;
    std::mt19937_64 rng(901);
    std::vector<std::vector<float>> xs(n, std::vector<float>(dim));
    for (std::size_t j = 0; j < dim; ++j) {
        std::normal_distribution<float> g(100.0F * static_cast<float>(j), 0.5F + static_cast<float>(j));
        for (auto& x : xs) {
            x[j] = g(rng);
        }
    }
    preprocess::RunningMoments s(dim);
    for (const auto& x : xs) {
        s.update(x);
    }
    const auto var = s.variance();
    double worst = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
        long double mean = 0.0L;
        for (const auto& x : xs) {
            mean += x[j];
        }
        mean /= n;
        long double ss = 0.0L;
        for (const auto& x : xs) {
            ss += (x[j] - mean) * (x[j] - mean);
        }
        worst = std::max({worst, rel_diff(s.mean()[j], static_cast<double>(mean)),
                          rel_diff(var[j], static_cast<double>(ss / n))});
    }
    return {worst <= 1e-6, fmt("max rel err %.2e", worst)};
}

class LookupModel final : public OnlineClassifier {
public:
    std::optional<Label> predict(FeatureView z) const override {
        if (z[0] < 0.0F) {
            return std::nullopt;
        }
        return static_cast<Label>(z[0]);
    }
    void learn(FeatureView, Label) override {}
    std::string_view name() const noexcept override { return "lookup"; }
};

// 10: metrics on short hand-worked logs.
Verdict hand_metrics() {
    std::vector<std::string> failures;
    auto expect = [&](bool ok, const char* what) {
        if (!ok) {
            failures.emplace_back(what);
        }
    };
    auto log_of = [](std::initializer_list<int> predicted, std::initializer_list<Label> truth) {
        metrics::OutcomeLog log;
        auto p = predicted.begin();
        auto t = truth.begin();
        for (std::uint64_t i = 1; p != predicted.end(); ++i, ++p, ++t) {
            PredictionOutcome o;
            o.timestep = i;
            if (*p >= 0) {
                o.predicted = static_cast<Label>(*p);
            }
            o.truth = *t;
            o.correct = o.predicted == o.truth;
            log.push_back(o);
        }
        return log;
    };
    // predictions 1 3 2 2 0 1 against truth 1 1 2 2 1 1
    expect(metrics::online_accuracy(log_of({1, 3, 2, 2, 0, 1}, {1, 1, 2, 2, 1, 1})) ==
               std::vector<double>{1.0, 1.0 / 2, 2.0 / 3, 3.0 / 4, 3.0 / 5, 4.0 / 6},
           "online accuracy, six steps");
    // an abstention counts as wrong
    expect(metrics::online_accuracy(log_of({-1, 0, 5, 5}, {0, 0, 5, 4})) ==
               std::vector<double>{0.0, 1.0 / 2, 2.0 / 3, 2.0 / 4},
           "online accuracy with abstention");

    // ten test records, stored out of order; feature[0] is what the model will say
    const std::vector<std::int64_t> ts{7, 2, 9, 0, 4, 1, 8, 3, 6, 5};
    const std::map<std::int64_t, bool> right{{0, true}, {1, true}, {2, false}, {3, true}, {4, false},
                                             {5, false}, {6, true}, {7, true},  {8, true},  {9, false}};
    std::vector<StreamRecord> test;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        StreamRecord r;
        r.id = i;
        r.timestamp = ts[i];
        r.label = 2;
        r.feature = FeatureVector({right.at(ts[i]) ? 2.0F : (ts[i] == 9 ? -1.0F : 3.0F)});
        test.push_back(r);
    }
    const LookupModel model;
    // by timestamp the correct flags are 1 1 0 1 0 0 1 1 1 0
    expect(metrics::information_retention(model, test, 4).ir_h == 3.0 / 4, "IR over last 4");
    expect(metrics::information_retention(model, test, 1).ir_h == 0.0, "IR over last 1");
    expect(metrics::information_retention(model, test, 0).ir_h == 6.0 / 10, "IR over all");
    const auto rep = metrics::information_retention(model, test, 10, 5);
    // span 0..9 cut into five: [0,1) [1,3) [3,5) [5,7) [7,9]
    const std::vector<std::uint64_t> counts{1, 2, 2, 2, 3};
    const std::vector<std::uint64_t> hits{1, 1, 1, 1, 2};
    for (std::size_t b = 0; b < 5; ++b) {
        expect(rep.buckets[b].count == counts[b] && rep.buckets[b].correct == hits[b] &&
                   rep.buckets[b].accuracy == static_cast<double>(hits[b]) / static_cast<double>(counts[b]),
               "retention bucket");
    }

    // delay 3 over eight steps: the last three positions have no future record
    const std::vector<std::optional<bool>> delayed{true, false, false, true, true, std::nullopt, std::nullopt,
                                                   std::nullopt};
    expect(metrics::near_future_accuracy(delayed, 3) == std::vector<double>{1.0, 1.0 / 2, 1.0 / 3, 2.0 / 4, 3.0 / 5},
           "near-future accuracy");
    const std::vector<std::optional<bool>> delayed1{false, true, true, std::nullopt};
    expect(metrics::near_future_accuracy(delayed1, 1) == std::vector<double>{0.0, 1.0 / 2, 2.0 / 3},
           "near-future accuracy, delay 1");

    std::string detail = failures.empty() ? "all hand values reproduced" : "mismatch:";
    for (const auto& f : failures) {
        detail += " [" + f + "]";
    }
    return {failures.empty(), detail};
}

harness::ExperimentConfig drift_experiment(harness::Method method) {
    harness::ExperimentConfig c;
    stream::DriftConfig d;
    d.num_classes = 50;
    d.dim = 32;
    d.samples = 20000;
    d.mode = stream::DriftMode::ClassIncremental;
    d.sigma = 0.16;
    d.clusters_per_class = 3;
    d.seed = 1101;
    c.dataset.drift = d;
    c.method = method;
    c.seed = 1102;
    c.timing = false;
    return c;
}

// 11: class-incremental drift, ACM against the prototype and linear baselines.
Verdict drift_comparison() {
    auto one_nn = drift_experiment(harness::Method::BruteKnn);
    one_nn.acm.k_initial = 1;
    one_nn.acm.recalib_interval = 0;
    const double nn_acc = *harness::run_experiment(one_nn).summary.online_accuracy;
    const auto acm = harness::run_experiment(drift_experiment(harness::Method::Acm)).summary;
    const auto ncm = harness::run_experiment(drift_experiment(harness::Method::Ncm)).summary;
    const auto sgd = harness::run_experiment(drift_experiment(harness::Method::SgdLogistic)).summary;
    const double acm_b0 = acm.ir_buckets.front().accuracy.value_or(0.0);
    const double sgd_b0 = sgd.ir_buckets.front().accuracy.value_or(0.0);
    const bool pass = std::abs(nn_acc - 0.95) <= 0.02 && *acm.online_accuracy > *ncm.online_accuracy &&
                      *acm.online_accuracy > *sgd.online_accuracy && acm_b0 > sgd_b0;
    return {pass, fmt("1-NN %.4f; online ACM %.4f, NCM %.4f, SGD %.4f; earliest bucket IR ACM %.4f, SGD %.4f",
                      nn_acc, *acm.online_accuracy, *ncm.online_accuracy, *sgd.online_accuracy, acm_b0, sgd_b0)};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

// 12: same config and seed, same bytes.
Verdict determinism() {
    auto c = drift_experiment(harness::Method::Acm);
    c.dataset.drift->samples = 5000;
    const auto dir = std::filesystem::temp_directory_path() / "acm_acceptance_determinism";
    std::filesystem::remove_all(dir);
    const auto a = harness::emit_report(harness::run_experiment(c), harness::ReportFormat::Csv, dir, "a");
    const auto b = harness::emit_report(harness::run_experiment(c), harness::ReportFormat::Csv, dir, "b");
    const std::string sa = slurp(a.steps);
    const bool same = !sa.empty() && sa == slurp(b.steps) && slurp(a.summary) == slurp(b.summary);
    std::filesystem::remove_all(dir);
    return {same, fmt("%zu-byte step files %s", sa.size(), same ? "identical" : "differ")};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<int, std::function<Verdict()>>> criteria{
        {1, consistency},    {2, repeated_records}, {3, far_point_stability}, {4, hnsw_recall},
        {5, latency_scaling}, {6, k_selection},     {7, slda_agreement},      {8, ncm_means},
        {9, welford},        {10, hand_metrics},    {11, drift_comparison},   {12, determinism},
    };
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) {
        wanted.insert(std::atoi(argv[i]));
    }
    int failed = 0;
    for (const auto& [id, run] : criteria) {
        if (!wanted.empty() && wanted.count(id) == 0) {
            continue;
        }
        const auto t0 = Clock::now();
        Verdict v;
        try {
            v = run();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        failed += v.pass ? 0 : 1;
        std::cout << "Criterion " << id << ": " << (v.pass ? "PASS" : "FAIL") << " (" << v.detail << ") ["
                  << fmt("%.1f s", seconds_since(t0)) << "]" << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
