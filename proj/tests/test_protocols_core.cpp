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


#include <radioleader/protocols_core.hpp>

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <set>
#include <vector>

using namespace radioleader;

namespace {

ProtocolConfig config(CdModel m, u64 N)
{
    ProtocolConfig c;
    c.model = m;
    c.N = N;
    return c;
}

std::vector<DeviceId> subset(u64 N, u64 mask)
{
    std::vector<DeviceId> V;
    for (u64 i = 0; i < N; ++i) {
        if ((mask >> i) & 1u) V.push_back(DeviceId{i + 1});
    }
    return V;
}

// One pairing level computed on the set: in each pair the lower present ID survives.
std::set<u64> survivors_oracle(const std::set<u64>& V)
{
    std::set<u64> out;
    for (u64 v : V) {
        const bool partner_below = v % 2 == 0 && V.count(v - 1);
        if (!partner_below) out.insert(v);
    }
    return out;
}

// Interval left after `probes` halvings, found by recursing on the occupied half.
std::pair<u64, u64> interval_oracle(const std::set<u64>& V, u64 lo, u64 hi, u64 probes)
{
    if (probes == 0 || lo == hi) return {lo, hi};
    const u64 size = hi - lo + 1;
    const u64 mid = lo + (size + 1) / 2 - 1;
    const bool lower_occupied = V.lower_bound(lo) != V.end() && *V.lower_bound(lo) <= mid;
    return lower_occupied ? interval_oracle(V, lo, mid, probes - 1) : interval_oracle(V, mid + 1, hi, probes - 1);
}

}  // namespace

TEST_CASE("pairing on four IDs", "[pairing]")
{
    auto rep = execute<PairingElection>({1, 2, 3, 4}, config(CdModel::NoCD, 4));
    CHECK(rep.ledger.rounds == 4);
    CHECK(rep.ledger.max_energy <= 5);
    REQUIRE(rep.leader());
    CHECK(rep.leader()->value == 1);
}

TEST_CASE("one pairing level on {2, 3}", "[pairing]")
{
    const DeviceId V[] = {DeviceId{2}, DeviceId{3}};
    auto r = pairing_reduce_once(V, config(CdModel::NoCD, 4));
    CHECK(r.survivors == std::vector<DeviceId>{DeviceId{2}, DeviceId{3}});
    CHECK(r.new_ids == std::vector<u64>{1, 2});
}

TEST_CASE("pairing level survivors match the set oracle", "[pairing][property]")
{
    for (u64 N = 1; N <= 10; ++N) {
        for (u64 mask = 1; mask < (u64{1} << N); ++mask) {
            auto V = subset(N, mask);
            std::set<u64> S;
            for (auto d : V) S.insert(d.value);
            auto r = pairing_reduce_once(V, config(CdModel::NoCD, N));
            std::set<u64> got;
            for (auto d : r.survivors) got.insert(d.value);
            CHECK(got == survivors_oracle(S));
            for (std::size_t i = 0; i < r.survivors.size(); ++i) {
                CHECK(r.new_ids[i] == ceil_div(r.survivors[i].value, 2));
            }
        }
    }
}

TEST_CASE("pairing schedule recurrence", "[pairing]")
{
    // T(M) = ceil(M/2) + T(ceil(M/2)), T(1) = 0.
    for (u64 M = 1; M <= 300; ++M) {
        Round expect = 0;
        for (u64 m = M; m > 1; m = (m + 1) / 2) expect += (m + 1) / 2;
        CHECK(PairingPhase::length(M) == expect);
        CHECK(PairingPhase::length(M) <= M + ceil_log2(M));
        Round compact = 0;
        for (u64 m = M; m > 1; m = (m + 1) / 2) compact += m / 2;
        CHECK(PairingPhase::length(M, true) == compact);
        CHECK(PairingPhase::length(M, true) == M - 1);
    }
}

TEST_CASE("binary search examples", "[binary_search]")
{
    auto rep = execute<BinarySearchElection>({5}, config(CdModel::StrongCD, 8));
    REQUIRE(rep.leader());
    CHECK(rep.leader()->value == 5);
    CHECK(rep.ledger.rounds == 4);

    auto two = execute<BinarySearchElection>({1, 2}, config(CdModel::ReceiverCD, 2));
    REQUIRE(two.leader());
    CHECK(two.leader()->value == 1);
    CHECK_THROWS_AS(execute<BinarySearchElection>({1}, config(CdModel::NoCD, 2)), InvalidParams);
    CHECK_THROWS_AS(execute<BinarySearchElection>({1}, config(CdModel::SenderCD, 2)), InvalidParams);
}

TEST_CASE("elections pick the smallest ID on every subset", "[property]")
{
    for (u64 N = 1; N <= 9; ++N) {
        for (u64 mask = 1; mask < (u64{1} << N); ++mask) {
            auto V = subset(N, mask);
            const u64 expect = V.front().value;
            auto p = execute<PairingElection>(V, config(CdModel::NoCD, N));
            auto b = execute<BinarySearchElection>(V, config(CdModel::ReceiverCD, N));
            REQUIRE(p.leader());
            REQUIRE(b.leader());
            CHECK(p.leader()->value == expect);
            CHECK(b.leader()->value == expect);
            if (V.size() >= 2) {
                CHECK(p.easy_success);
                CHECK(b.easy_success);
            }
            CHECK(p.ledger.max_energy <= PairingElection::energy_budget(config(CdModel::NoCD, N)));
            CHECK(b.ledger.max_energy <= BinarySearchElection::energy_budget(config(CdModel::ReceiverCD, N)));
        }
    }
}

TEST_CASE("halving narrows to the occupied interval", "[halving]")
{
    ProtocolConfig c = config(CdModel::StrongCD, 16);
    c.k = 2;
    HalvingTradeoffElection d9(DeviceId{9}, c);
    CHECK(HalvingTradeoffElection::residual_space(c) == 4);
    auto rep = execute<HalvingTradeoffElection>({9, 10}, c);
    REQUIRE(rep.leader());
    CHECK(rep.leader()->value == 9);
    CHECK(interval_oracle({9, 10}, 1, 16, 2) == std::pair<u64, u64>{9, 12});
}

TEST_CASE("halving is correct for every k and inner election", "[halving][property]")
{
    for (u64 N = 2; N <= 9; ++N) {
        for (u64 k = 1; k <= ceil_log2(N) + 1; ++k) {
            for (InnerElection inner :
                 {InnerElection::BinarySearch, InnerElection::Pairing, InnerElection::PairingCompact}) {
                ProtocolConfig c = config(CdModel::StrongCD, N);
                c.k = k;
                c.inner_election = inner;
                const u64 budget = HalvingTradeoffElection::energy_budget(c);
                for (u64 mask = 1; mask < (u64{1} << N); ++mask) {
                    auto V = subset(N, mask);
                    auto rep = execute<HalvingTradeoffElection>(V, c);
                    REQUIRE(rep.leader());
                    CHECK(rep.leader()->value == V.front().value);
                    CHECK(rep.ledger.max_energy <= budget);
                }
            }
        }
    }
}

TEST_CASE("binary search interval matches the recursive oracle", "[binary_search][property]")
{
    SplitMix64 rng(11);
    for (int t = 0; t < 500; ++t) {
        const u64 N = 2 + rng.below(200);
        std::set<u64> S;
        const u64 m = 1 + rng.below(6);
        while (S.size() < std::min(m, N)) S.insert(1 + rng.below(N));
        const u64 probes = 1 + rng.below(ceil_log2(N));
        const u64 v = *S.begin();
        // Replay the phase of the leader with feedback derived from S.
        BinarySearchPhase p(0, N, v, probes);
        for (Round r = 0; r < probes; ++r) {
            if (p.next_wake(r) != r) break;
            const Action a = p.act(r);
            p.observe(r, a.kind == ActionKind::Transmit ? Feedback::none() : Feedback::silence());
        }
        CHECK(std::pair<u64, u64>{p.lo(), p.hi()} == interval_oracle(S, 1, N, probes));
    }
}

TEST_CASE("halving needs k and receiver detection", "[halving]")
{
    ProtocolConfig c = config(CdModel::StrongCD, 8);
    CHECK_THROWS_AS(execute<HalvingTradeoffElection>({1}, c), InvalidParams);
    c.k = 0;
    CHECK_THROWS_AS(execute<HalvingTradeoffElection>({1}, c), InvalidParams);
    c.k = 2;
    c.model = CdModel::SenderCD;
    CHECK_THROWS_AS(execute<HalvingTradeoffElection>({1}, c), InvalidParams);
}
