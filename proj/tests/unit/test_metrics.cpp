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

#include <random>

#include "doctest.h"

#include "acm/error.hpp"
#include "acm/learner.hpp"
#include "acm/metrics.hpp"
#include "test_util.hpp"

using namespace acm;
using namespace acm::metrics;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected acm::Error");
    return ErrorCode::Io;
}

OutcomeLog log_from(const std::vector<int>& flags) {
    OutcomeLog log;
    for (std::size_t i = 0; i < flags.size(); ++i) {
        PredictionOutcome o;
        o.timestep = i + 1;
        o.truth = 1;
        o.predicted = flags[i] ? 1U : 0U;
        o.correct = flags[i] != 0;
        log.push_back(o);
    }
    return log;
}

learner::AcmConfig exact_1nn() {
    learner::AcmConfig c;
    c.k_initial = 1;
    c.recalib_interval = 0;
    c.backend = learner::Backend::BruteForce;
    return c;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("online accuracy by hand") {
    CHECK(online_accuracy(log_from({1, 1, 1, 1, 1})) == std::vector<double>{1, 1, 1, 1, 1});
    CHECK(online_accuracy(log_from({1, 0, 1, 1})) == std::vector<double>{1.0, 0.5, 2.0 / 3.0, 0.75});
    CHECK(online_accuracy(log_from({0, 0, 1, 0, 1, 1})) ==
          std::vector<double>{0.0, 0.0, 1.0 / 3.0, 0.25, 0.4, 0.5});
    CHECK(code_of([] { online_accuracy(OutcomeLog{}); }) == ErrorCode::EmptyLog);
    auto bad = log_from({1, 1, 0});
    bad[2].timestep = 2;
    CHECK(code_of([&] { online_accuracy(bad); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("final online accuracy equals an independent recount") {
    std::mt19937_64 rng(1);
    std::vector<int> flags(10000);
    std::size_t total = 0;
    for (int& f : flags) {
        f = static_cast<int>(rng() % 3 != 0);
        total += static_cast<std::size_t>(f);
    }
    const auto a = online_accuracy(log_from(flags));
    CHECK(a.size() == flags.size());
    CHECK(a.back() == static_cast<double>(total) / 10000.0);
    for (double v : a) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("online accuracy ignores consistent relabeling") {
    auto log = log_from({1, 0, 0, 1, 1, 0, 1});
    const auto before = online_accuracy(log);
    for (auto& o : log) {
        o.truth = o.truth * 7 + 3;
        o.predicted = *o.predicted * 7 + 3;
    }
    CHECK(online_accuracy(log) == before);
}

TEST_CASE("retention summary by hand") {
    const std::vector<std::int64_t> ts{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    const std::vector<bool> correct{true, true, false, true, false, false, true, true, true, false};
    const auto r = summarize_retention(ts, correct, 4, 5);
    CHECK(r.h == 4);
    CHECK(r.ir_h == 0.75);
    CHECK(r.overall == 0.6);
    // width 9 over 5 buckets: edges 0, 1, 3, 5, 7, 9
    const std::vector<std::int64_t> begins{0, 1, 3, 5, 7};
    const std::vector<std::int64_t> ends{1, 3, 5, 7, 9};
    const std::vector<std::uint64_t> counts{1, 2, 2, 2, 3};
    const std::vector<std::uint64_t> hits{1, 1, 1, 1, 2};
    REQUIRE(r.buckets.size() == 5);
    for (std::size_t b = 0; b < 5; ++b) {
        CHECK(r.buckets[b].begin == begins[b]);
        CHECK(r.buckets[b].end == ends[b]);
        CHECK(r.buckets[b].count == counts[b]);
        CHECK(r.buckets[b].correct == hits[b]);
        CHECK(r.buckets[b].accuracy == static_cast<double>(hits[b]) / static_cast<double>(counts[b]));
    }
    CHECK(summarize_retention(ts, correct, 0, 5).ir_h == 0.6);
    CHECK(summarize_retention(ts, correct, 1, 5).ir_h == 0.0);
    CHECK(code_of([&] { summarize_retention(ts, correct, 11, 5); }) == ErrorCode::InvalidConfig);
    CHECK(code_of([&] { summarize_retention({}, {}, 0, 5); }) == ErrorCode::EmptyTestSet);
}

TEST_CASE("retention buckets with gaps and a single timestamp") {
    const std::vector<std::int64_t> ts{10, 10, 50};
    const std::vector<bool> correct{true, false, true};
    const auto r = summarize_retention(ts, correct, 2, 4);
    CHECK(r.ir_h == 0.5);
    CHECK(r.buckets[0].count == 2);
    CHECK(r.buckets[1].count == 0);
    CHECK(!r.buckets[1].accuracy.has_value());
    CHECK(r.buckets[3].count == 1);

    const std::vector<std::int64_t> same{5, 5, 5};
    const auto s = summarize_retention(same, correct, 0, 3);
    CHECK(s.buckets[2].count == 3);
}

TEST_CASE("retention of a frozen model") {
    const auto pts = testing::random_units(2, 300, 8);
    std::vector<StreamRecord> test;
    learner::AcmLearner memorized(8, exact_1nn());
    std::mt19937_64 rng(3);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        // shuffled timestamps: evaluation must sort them
        test.push_back({i, static_cast<std::int64_t>((i * 7919) % 1000), static_cast<Label>(rng() % 4),
                        FeatureVector(pts[i])});
        memorized.learn(pts[i], test.back().label);
    }
    const auto full = information_retention(memorized, test, 0);
    CHECK(full.ir_h == 1.0);
    CHECK(full.overall == 1.0);
    CHECK(full.h == test.size());

    // a model that learned half of the records
    learner::AcmLearner partial(8, exact_1nn());
    for (std::size_t i = 0; i < pts.size(); i += 2) {
        partial.learn(pts[i], test[i].label);
    }
    const auto r = information_retention(partial, test, test.size(), 20);
    CHECK(r.ir_h == r.overall);
    std::uint64_t count = 0;
    double weighted = 0.0;
    for (const auto& b : r.buckets) {
        count += b.count;
        if (b.accuracy) {
            weighted += *b.accuracy * static_cast<double>(b.count);
        }
    }
    CHECK(count == test.size());
    CHECK(std::abs(weighted / static_cast<double>(count) - r.overall) < 1e-9);

    // the last h by timestamp, recounted directly
    std::vector<std::pair<std::int64_t, std::size_t>> order;
    for (std::size_t i = 0; i < test.size(); ++i) {
        order.emplace_back(test[i].timestamp, i);
    }
    std::sort(order.begin(), order.end());
    std::size_t tail = 0;
    for (std::size_t j = order.size() - 50; j < order.size(); ++j) {
        const auto& rec = test[order[j].second];
        tail += partial.predict(rec.feature) == rec.label ? 1 : 0;
    }
    CHECK(information_retention(partial, test, 50).ir_h == static_cast<double>(tail) / 50.0);
    CHECK(code_of([&] { information_retention(partial, {}, 0); }) == ErrorCode::EmptyTestSet);
}

TEST_CASE("near-future accuracy by hand") {
    const std::vector<std::optional<bool>> d2{true, false, true, std::nullopt, std::nullopt};
    CHECK(near_future_accuracy(d2, 2) == std::vector<double>{1.0, 0.5, 2.0 / 3.0});
    const std::vector<std::optional<bool>> perfect{true, true, true, true, std::nullopt};
    CHECK(near_future_accuracy(perfect, 1) == std::vector<double>{1, 1, 1, 1});
    CHECK(code_of([&] { near_future_accuracy(perfect, 5); }) == ErrorCode::DelayTooLarge);
    CHECK(code_of([&] { near_future_accuracy(perfect, 9); }) == ErrorCode::DelayTooLarge);
    CHECK(code_of([&] { near_future_accuracy(perfect, 0); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("periodic stream with delay equal to the period is perfectly predicted") {
    const std::size_t period = 7;
    const std::size_t length = 70;
    const auto protos = testing::random_units(4, period, 6);
    std::vector<StreamRecord> stream;
    for (std::size_t t = 0; t < length; ++t) {
        stream.push_back({t, static_cast<std::int64_t>(t), static_cast<Label>(t % period),
                          FeatureVector(protos[t % period])});
    }
    learner::AcmLearner model(6, exact_1nn());
    std::vector<std::optional<bool>> delayed(length);
    for (std::size_t t = 0; t < length; ++t) {
        model.learn(stream[t].feature, stream[t].label);
        if (t + period < length) {
            delayed[t] = model.predict(stream[t + period].feature) == stream[t + period].label;
        }
    }
    const auto acc = near_future_accuracy(delayed, period);
    CHECK(acc.size() == length - period);
    for (double a : acc) {
        CHECK(a == 1.0);
    }
}

}
