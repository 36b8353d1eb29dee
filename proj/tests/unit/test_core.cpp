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
#include <limits>

#include "doctest.h"

#include "acm/core.hpp"
#include "acm/error.hpp"
#include "test_util.hpp"

using namespace acm;

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

}  // namespace

TEST_SUITE("core") {

TEST_CASE("feature vectors reject non-finite entries") {
    CHECK(code_of([] { FeatureVector v({1.0F, std::numeric_limits<float>::quiet_NaN()}); }) ==
          ErrorCode::NonFiniteFeature);
    CHECK(code_of([] { FeatureVector v({std::numeric_limits<float>::infinity()}); }) ==
          ErrorCode::NonFiniteFeature);
    FeatureVector ok({1.0F, -2.0F});
    CHECK(ok.dim() == 2);
}

TEST_CASE("l2_normalize fixtures") {
    const std::vector<float> e1{1, 0, 0};
    CHECK(l2_normalize(e1).values() == e1);

    const auto v = l2_normalize(std::vector<float>{3, 4});
    CHECK(v[0] == doctest::Approx(0.6).epsilon(1e-7));
    CHECK(v[1] == doctest::Approx(0.8).epsilon(1e-7));

    CHECK(code_of([] { l2_normalize(std::vector<float>{0, 0}); }) == ErrorCode::ZeroVector);
    CHECK(code_of([] { l2_normalize(std::vector<float>{1e-13F, 0}); }) == ErrorCode::ZeroVector);
}

TEST_CASE("l2_normalize gives unit norm, keeps direction and is idempotent") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<float> u(-100.0F, 100.0F);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<float> x(1 + trial % 40);
        for (float& e : x) {
            e = u(rng);
        }
        const auto n = l2_normalize(x);
        double norm2 = 0.0;
        double raw = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            norm2 += double(n[i]) * n[i];
            raw += double(x[i]) * x[i];
        }
        CHECK(std::abs(std::sqrt(norm2) - 1.0) < 1e-6);
        for (std::size_t i = 0; i < x.size(); ++i) {
            CHECK(std::abs(n[i] - x[i] / std::sqrt(raw)) < 1e-6);
        }
        const auto nn = l2_normalize(n.view());
        for (std::size_t i = 0; i < x.size(); ++i) {
            CHECK(std::abs(nn[i] - n[i]) < 1e-6);
        }
    }
}

TEST_CASE("cosine_distance fixtures") {
    const std::vector<float> a{1, 0}, b{0, 1}, c{-1, 0};
    CHECK(cosine_distance(a, a) == 0.0F);
    CHECK(cosine_distance(a, b) == doctest::Approx(1.0));
    CHECK(cosine_distance(a, c) == doctest::Approx(2.0));
    CHECK(code_of([&] { cosine_distance(a, std::vector<float>{1, 0, 0}); }) == ErrorCode::DimMismatch);
}

TEST_CASE("cosine_distance equals 1 - <u,v>, is symmetric and vanishes only on equal inputs") {
    const auto pts = testing::random_units(11, 300, 37);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const auto& u = pts[i];
        const auto& v = pts[i + 1];
        double ip = 0.0;
        for (std::size_t j = 0; j < u.size(); ++j) {
            ip += double(u[j]) * v[j];
        }
        const float d = cosine_distance(u, v);
        CHECK(d >= 0.0F);
        CHECK(d <= 2.0F + 1e-6F);
        CHECK(std::abs(d - (1.0 - ip)) < 1e-6);
        CHECK(d == cosine_distance(v, u));
        CHECK(d > 1e-6F);
        CHECK(cosine_distance(u, u) == 0.0F);
    }
}

TEST_CASE("squared_l2 agrees with a scalar loop across lane remainders") {
    std::mt19937_64 rng(3);
    std::normal_distribution<float> g;
    for (std::size_t dim = 1; dim <= 70; ++dim) {
        std::vector<float> a(dim), b(dim);
        double ref = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            a[i] = g(rng);
            b[i] = g(rng);
            ref += double(a[i] - b[i]) * (a[i] - b[i]);
        }
        CHECK(squared_l2(a.data(), b.data(), dim) == doctest::Approx(ref).epsilon(1e-5));
    }
}

TEST_CASE("error codes have names") {
    CHECK(to_string(ErrorCode::DelayTooLarge) == "DelayTooLarge");
    CHECK(to_string(ErrorCode::ZeroVector) == "ZeroVector");
}

}
