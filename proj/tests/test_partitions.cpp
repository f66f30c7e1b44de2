// Copyright 2026 The radioleader Authors
// SPDX-License-Identifier: Apache-2.0
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


#include <radioleader/partitions.hpp>
#include <radioleader/tradeoff.hpp>

#include <catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <sstream>
#include <vector>

using namespace radioleader;

namespace {

// Brute force over all subsets of size <= n_max, written without the library helpers.
bool good_by_brute_force(const PartitionFamily& f)
{
    const u64 N = f.N;
    for (u64 mask = 1; mask < (u64{1} << N); ++mask) {
        if (static_cast<u64>(__builtin_popcountll(mask)) > f.n_max) continue;
        bool found = false;
        for (u64 i = 0; i < f.K && !found; ++i) {
            std::vector<int> load(f.b, 0);
            for (u64 x = 0; x < N; ++x) {
                if ((mask >> x) & 1u) ++load[f.parts[i * N + x]];
            }
            for (int c : load) found |= c == 1;
        }
        if (!found) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("family size and width condition", "[partitions]")
{
    CHECK(family_size(16, 4, 0.5) == 32);       // 8 / 0.5 * 2
    CHECK(family_size(256, 16, 0.5) == 32);     // 8 / 0.5 * 2
    CHECK(family_size(65536, 4096, 0.5) == 22); // ceil(16 * 4/3)
    CHECK(family_size(1, 2, 0.5) == 1);
    CHECK(fits_family(2, 4, 0.5));
    CHECK_FALSE(fits_family(3, 4, 0.5));
    CHECK_THROWS_AS(family_size(16, 1, 0.5), InvalidParams);
    CHECK_THROWS_AS(generate_family(16, 4, 0.5, 3, 0), InvalidParams);
}

TEST_CASE("exhaustive family on 16 IDs", "[partitions]")
{
    GenerateOptions opt;
    opt.verify = VerifyMode::exhaustive();
    auto f = generate_family(16, 4, 0.5, 2, 1, opt);
    CHECK(f.K == 32);
    CHECK(f.verified.kind == Certificate::Kind::Exhaustive);
    CHECK(f.retries <= 3);
    CHECK(good_by_brute_force(f));
}

TEST_CASE("verification agrees with brute force on random families", "[partitions][property]")
{
    SplitMix64 rng(5);
    int good = 0, bad = 0;
    for (int t = 0; t < 300; ++t) {
        const u64 N = 2 + rng.below(9);
        const u64 b = 2 + rng.below(5);
        PartitionFamily f = draw_family(N, b, 0.5, 1 + rng.below(N), rng(), 0.3 + rng.unit());
        auto v = verify_family(f, VerifyMode::exhaustive());
        CHECK(v.passed() == good_by_brute_force(f));
        if (v.counterexample) CHECK_FALSE(isolates(f, *v.counterexample));
        (v.passed() ? good : bad) += 1;
    }
    CHECK(good > 0);
    CHECK(bad > 0);
}

TEST_CASE("a single-part family isolates nothing", "[partitions]")
{
    PartitionFamily f;
    f.N = 8;
    f.b = 4;
    f.K = 3;
    f.n_max = 2;
    f.parts.assign(f.K * f.N, 0);
    auto v = verify_family(f, VerifyMode::exhaustive());
    CHECK_FALSE(v.passed());
    REQUIRE(v.counterexample);
    CHECK(*v.counterexample == std::vector<u64>{1, 2});

    ProtocolConfig cfg;
    cfg.model = CdModel::SenderCD;
    cfg.N = 8;
    cfg.family = std::make_shared<const PartitionFamily>(f);
    const DeviceId V[] = {DeviceId{1}, DeviceId{2}};
    CHECK_THROWS_AS(partition_tradeoff_election(V, cfg), NoLeader);
    auto rep = execute<PartitionTradeoffElection>(V, cfg);
    CHECK_FALSE(rep.strict_success);
}

TEST_CASE("sampled verification reports its trials", "[partitions]")
{
    GenerateOptions opt;
    opt.verify = VerifyMode::sampled(2000, 9);
    auto f = generate_family(128, 16, 0.5, 4, 2, opt);
    CHECK(f.verified.kind == Certificate::Kind::Sampled);
    CHECK(f.verified.trials == 2000);
    CHECK(f.verified.failures == 0);
}

TEST_CASE("family file round trip", "[partitions]")
{
    GenerateOptions opt;
    opt.verify = VerifyMode::exhaustive();
    auto f = generate_family(12, 9, 0.5, 3, 4, opt);
    std::stringstream ss;
    write_family(ss, f);
    CHECK(ss.str().rfind("# radioleader-family rng=splitmix64\n", 0) == 0);
    auto g = read_family(ss);
    CHECK(g.N == f.N);
    CHECK(g.b == f.b);
    CHECK(g.K == f.K);
    CHECK(g.n_max == f.n_max);
    CHECK(g.seed == f.seed);
    CHECK(g.epsilon_tilde == f.epsilon_tilde);
    CHECK(g.C == f.C);
    CHECK(g.parts == f.parts);
    CHECK(g.verified.to_string() == f.verified.to_string());

    std::stringstream bad("12 9 1 0.5 3 4 8 unverified\n1 2 3\n");
    CHECK_THROWS_AS(read_family(bad), InvalidParams);
}

TEST_CASE("certificate text round trip", "[partitions]")
{
    for (const char* s : {"unverified", "exhaustive:4", "sampled:100000:0", "sampled:10:3"}) {
        CHECK(Certificate::parse(s).to_string() == s);
    }
    CHECK_FALSE(Certificate::parse("sampled:10:3").passed());
}

TEST_CASE("subset sampling is uniform enough and distinct", "[partitions]")
{
    SplitMix64 rng(1);
    std::vector<int> hits(10, 0);
    for (int t = 0; t < 20000; ++t) {
        auto s = detail::sample_subset(rng, 10, 3);
        REQUIRE(s.size() == 3);
        CHECK(std::set<u64>(s.begin(), s.end()).size() == 3);
        for (u64 x : s) ++hits[x - 1];
    }
    for (int h : hits) CHECK(std::abs(h - 6000) < 400);
}

TEST_CASE("two balls in four bins", "[bins]")
{
    // 16 equally likely placements; a singleton exists unless both share a bin.
    int good = 0;
    for (int a = 0; a < 4; ++a) {
        for (int c = 0; c < 4; ++c) good += a != c;
    }
    CHECK(good == 12);
    const double exact = good / 16.0;
    CHECK(exact == 0.75);
    auto e = balls_in_bins_singleton_prob(2, 4, 100000, 3);
    CHECK(std::abs(e.p_hat - exact) <= 4 * std::sqrt(exact * (1 - exact) / 1e5));
    CHECK(e.lower_bound == Catch::Approx(1.0 - 2.0));
}

TEST_CASE("bins preconditions", "[bins]")
{
    CHECK_THROWS_AS(balls_in_bins_singleton_prob(3, 4, 100000, 0), InvalidParams);
    CHECK_THROWS_AS(balls_in_bins_singleton_prob(2, 4, 10, 0), InvalidParams);
    CHECK(singleton_bound(4, 64) == Catch::Approx(0.9375));
}
