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


#include <radioleader/dense.hpp>
#include <radioleader/partitions.hpp>

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <map>
#include <optional>
#include <vector>

using namespace radioleader;

namespace {

ProtocolConfig dense_config(u64 N, u64 b, CdModel m = CdModel::NoCD)
{
    ProtocolConfig c;
    c.model = m;
    c.N = N;
    c.b = b;
    return c;
}

// Centralized group building: the first present ID of a block without a head
// founds a group; every later present ID takes r = s + 1 from the head.
std::map<u64, u64> ranks_oracle(u64 N, u64 b, const std::vector<u64>& V)
{
    b = std::min(b, N);
    const u64 I = (N + b - 1) / b;
    std::map<u64, u64> r;
    std::optional<u64> s;  // carried by the device with r == i at the start of iteration i
    for (u64 i = 1; i <= I; ++i) {
        for (u64 j = (i - 1) * b + 1; j <= std::min(N, i * b); ++j) {
            if (!std::binary_search(V.begin(), V.end(), j)) continue;
            if (s) {
                r[j] = *s + 1;
                ++*s;
            } else {
                r[j] = i;
                s = i;
            }
        }
        bool next_head = false;
        for (const auto& [id, rv] : r) next_head |= rv == i + 1;
        if (!next_head) s.reset();
    }
    std::map<u64, u64> ranks;
    for (const auto& [id, rv] : r) {
        if (rv > I) ranks[id] = rv - I;
    }
    return ranks;
}

std::map<u64, u64> ranks_of(const RunReport& rep)
{
    std::map<u64, u64> out;
    for (std::size_t i = 0; i < rep.devices.size(); ++i) {
        if (rep.verdicts[i].rank) out[rep.devices[i].value] = *rep.verdicts[i].rank;
    }
    return out;
}

struct CensusProgram {
    CensusPhase phase;
    CensusProgram(DeviceId id, const ProtocolConfig& cfg)
        : phase(0, cfg.N, id.value, static_cast<std::int64_t>(100 + id.value))
    {
    }
    static Round schedule_length(const ProtocolConfig& cfg) { return CensusPhase::length(cfg.N); }
    Round next_wake(Round from) const { return phase.next_wake(from); }
    Action act(Round r) const { return phase.act(r); }
    void observe(Round r, const Feedback& fb) { phase.observe(r, fb); }
    Verdict verdict() const { return {Role::NonLeader, phase.index() ? std::optional<u64>(phase.index()) : std::nullopt}; }
    friend bool operator==(const CensusProgram&, const CensusProgram&) = default;
};

std::vector<u64> random_subset(SplitMix64& rng, u64 N, u64 m)
{
    return detail::sample_subset(rng, N, std::min(m, N));
}

}  // namespace

TEST_CASE("dense examples", "[dense]")
{
    auto full = execute<DenseSimpleElection>({1, 2, 3, 4}, dense_config(4, 2));
    REQUIRE(full.leader());
    CHECK(full.leader()->value == 3);
    CHECK(ranks_of(full) == std::map<u64, u64>{{3, 1}, {4, 2}});

    auto lone = execute<DenseSimpleElection>({1}, dense_config(4, 2));
    CHECK_FALSE(lone.leader());
    CHECK_FALSE(lone.strict_success);

    auto upper = execute<DenseImprovedElection>({5, 6, 7, 8}, dense_config(8, 4));
    REQUIRE(upper.leader());
    CHECK(upper.leader()->value == 6);
}

TEST_CASE("census on a bucket of four with two participants", "[dense][census]")
{
    ProtocolConfig cfg;
    cfg.N = 4;
    auto rep = execute<CensusProgram>({2, 3}, cfg);
    CHECK(ranks_of(rep) == std::map<u64, u64>{{2, 1}, {3, 2}});
    // Replay device 3 to read its list.
    auto t = execute<CensusProgram>({2, 3}, cfg, {.record_transcript = true});
    CensusPhase p(0, 4, 3, 103);
    for (const auto& e : t.transcript->entries) {
        if (e.id.value == 3) p.observe(e.round, e.feedback);
    }
    CHECK(p.finished());
    CHECK(p.size() == 2);
    CHECK(p.list() == IdList{102, 103});
}

TEST_CASE("census indexes every participant", "[dense][census][property]")
{
    for (u64 m = 1; m <= 12; ++m) {
        ProtocolConfig cfg;
        cfg.N = m;
        for (u64 mask = 1; mask < (u64{1} << m); ++mask) {
            std::vector<DeviceId> V;
            for (u64 i = 0; i < m; ++i) {
                if ((mask >> i) & 1u) V.push_back(DeviceId{i + 1});
            }
            auto rep = execute<CensusProgram>(V, cfg);
            for (std::size_t i = 0; i < V.size(); ++i) CHECK(rep.verdicts[i].rank == std::optional<u64>(i + 1));
            CHECK(rep.ledger.max_energy <= CensusPhase::energy_budget(m));
            CHECK(rep.ledger.rounds == CensusPhase::length(m));
        }
    }
}

TEST_CASE("rank maps match the centralized oracle", "[dense][property]")
{
    SplitMix64 rng(21);
    for (int t = 0; t < 400; ++t) {
        const u64 N = 1 + rng.below(70);
        const u64 b = 1 + rng.below(N + 2);
        auto ids = random_subset(rng, N, 1 + rng.below(N));
        auto V = to_devices(ids);
        const auto expect = ranks_oracle(N, b, ids);
        auto simple = execute<DenseSimpleElection>(V, dense_config(N, b));
        auto improved = execute<DenseImprovedElection>(V, dense_config(N, b));
        CHECK(ranks_of(simple) == expect);
        CHECK(ranks_of(improved) == expect);
        CHECK(simple.ledger.max_energy <= DenseSimpleElection::energy_budget(dense_config(N, b)));
        CHECK(improved.ledger.max_energy <= DenseImprovedElection::energy_budget(dense_config(N, b)));
        if (ids.size() > ceil_div(N, std::min(b, N))) {
            CHECK(simple.strict_success);
            CHECK(improved.strict_success);
            if (ids.size() >= 2) CHECK(improved.easy_success);
        }
    }
}

// Round-by-round stepping of one core; at the start of every iteration i the
// group S = {w : r(w) >= i} has r-values i, ..., i + |S| - 1 and its head
// (r == i) holds s = |S| + i - 1.
template <class Core, class Make>
void check_group_invariant(u64 N, u64 b, const std::vector<u64>& ids, Make make)
{
    std::vector<Core> devs;
    for (u64 v : ids) devs.push_back(make(v));
    const DenseGeometry g(N, b);
    const Round length = Core::length(N, b);
    u64 next_iteration = 2;
    for (Round r = 0; r <= length; ++r) {
        while (next_iteration <= g.I && r == devs.front().iteration_start(next_iteration)) {
            const u64 i = next_iteration++;
            std::vector<u64> rs;
            const Core* head = nullptr;
            for (const auto& d : devs) {
                if (d.r() >= i) rs.push_back(d.r());
                if (d.r() == i) head = &d;
            }
            std::sort(rs.begin(), rs.end());
            for (std::size_t k = 0; k < rs.size(); ++k) CHECK(rs[k] == i + k);
            if (rs.empty()) continue;
            REQUIRE(head != nullptr);
            CHECK(head->s() == rs.size() + i - 1);
        }
        if (r == length) break;
        std::vector<std::size_t> who;
        std::vector<Action> acts;
        for (std::size_t k = 0; k < devs.size(); ++k) {
            if (devs[k].next_wake(r) != r) continue;
            Action a = devs[k].act(r);
            if (a.is_idle()) continue;
            who.push_back(k);
            acts.push_back(a);
        }
        if (who.empty()) continue;
        auto out = resolve_slot(CdModel::NoCD, acts);
        for (std::size_t k = 0; k < who.size(); ++k) devs[who[k]].observe(r, out.feedback[k]);
    }
    // Final group size is at least n - ceil(N/b).
    u64 ranked = 0;
    for (const auto& d : devs) ranked += d.rank().has_value();
    CHECK(ranked + g.I >= ids.size());
}

TEST_CASE("group invariant holds at every iteration boundary", "[dense][property]")
{
    SplitMix64 rng(8);
    for (int t = 0; t < 200; ++t) {
        const u64 N = 2 + rng.below(60);
        const u64 b = 1 + rng.below(N);
        auto ids = random_subset(rng, N, 1 + rng.below(N));
        check_group_invariant<DenseSimpleCore>(N, b, ids, [&](u64 v) { return DenseSimpleCore(0, N, b, v); });
        check_group_invariant<DenseImprovedCore>(
            N, b, ids, [&](u64 v) { return DenseImprovedCore(0, N, b, v, static_cast<std::int64_t>(v)); });
    }
}

TEST_CASE("dense schedules fit 3N + ceil(N/b) + 1", "[dense]")
{
    for (u64 N : {u64{1}, u64{7}, u64{64}, u64{1000}, u64{4096}}) {
        for (u64 b : {u64{1}, u64{2}, u64{3}, u64{16}, u64{N}}) {
            const auto cfg = dense_config(N, b);
            const u64 I = ceil_div(N, std::min(b, N));
            CHECK(DenseSimpleElection::schedule_length(cfg) <= 3 * N + I + 1);
            CHECK(DenseImprovedElection::schedule_length(cfg) <= 3 * N + I + 1);
        }
    }
}

TEST_CASE("block width from the device count", "[dense]")
{
    ProtocolConfig c;
    c.N = 64;
    c.known_n = 32;
    CHECK(dense_block_width(c) == 4);
    c.known_n = 64;
    CHECK(dense_block_width(c) == 2);
    c.known_n.reset();
    CHECK_THROWS_AS(dense_block_width(c), InvalidParams);
}

TEST_CASE("exponential search plan", "[dense][exponential]")
{
    auto nocd = exponential_search_plan(1024, CdModel::NoCD);
    REQUIRE(nocd.size() >= 3);
    CHECK(nocd[0].b == 4);
    CHECK(nocd[1].b == 16);
    CHECK(nocd[1].space == 512);
    CHECK(nocd[2].b == 256);
    CHECK(nocd.back().last);
    CHECK(nocd.back().b >= nocd.back().space);
    auto strong = exponential_search_plan(1024, CdModel::StrongCD);
    CHECK(strong[0].b == 16);
    CHECK(strong[1].b == 512);
    CHECK(strong[1].last);
    for (std::size_t a = 1; a < nocd.size(); ++a) CHECK(nocd[a].start == nocd[a - 1].end());
}

TEST_CASE("exponential search elects in every model", "[dense][exponential][property]")
{
    SplitMix64 rng(4);
    for (CdModel m : kAllModels) {
        for (int t = 0; t < 60; ++t) {
            const u64 N = 1 + rng.below(300);
            auto ids = random_subset(rng, N, 1 + rng.below(N));
            ProtocolConfig cfg;
            cfg.model = m;
            cfg.N = N;
            auto res = exponential_search_election(to_devices(ids), cfg);
            CHECK(res.report.strict_success);
            if (ids.size() >= 2) CHECK(res.report.easy_success);
            REQUIRE_FALSE(res.attempts.empty());
            CHECK((res.attempts.back().success || res.attempts.back().index == res.plan.size()));
            CHECK(res.report.ledger.max_energy <= ExponentialSearchElection::energy_budget(cfg));
        }
    }
}

TEST_CASE("pairing reduction never lowers the density", "[dense][exponential]")
{
    SplitMix64 rng(30);
    for (int t = 0; t < 40; ++t) {
        // Powers of two keep every space even; an odd space can lose density to rounding.
        const u64 N = u64{1} << (8 + rng.below(4));
        auto ids = random_subset(rng, N, 1 + rng.below(N / 16 + 1));
        ProtocolConfig cfg;
        cfg.N = N;
        auto res = exponential_search_election(to_devices(ids), cfg);
        CHECK(res.report.strict_success);
        for (std::size_t a = 1; a < res.attempts.size(); ++a) {
            const auto& prev = res.attempts[a - 1];
            const auto& cur = res.attempts[a];
            CHECK(cur.live * prev.space >= prev.live * cur.space);
        }
    }
}

TEST_CASE("an odd space can lose density", "[dense][exponential]")
{
    const DeviceId V[] = {DeviceId{1}, DeviceId{2}};
    ProtocolConfig cfg;
    cfg.N = 3;
    auto r = pairing_reduce_once(V, cfg);
    CHECK(r.survivors.size() == 1);  // 1/2 < 2/3
}

TEST_CASE("odd IDs finish in the first attempt", "[dense][exponential]")
{
    std::vector<u64> odd;
    for (u64 v = 1; v <= 512; v += 2) odd.push_back(v);
    ProtocolConfig cfg;
    cfg.N = 512;
    auto res = exponential_search_election(to_devices(odd), cfg);
    CHECK(res.report.strict_success);
    CHECK(res.attempts.size() == 1);
}

TEST_CASE("dense instances finish in the first attempt", "[dense][exponential]")
{
    SplitMix64 rng(12);
    for (u64 N : {u64{64}, u64{256}, u64{1024}}) {
        for (int t = 0; t < 10; ++t) {
            auto ids = random_subset(rng, N, N / 2 + rng.below(N / 2 + 1));
            ProtocolConfig cfg;
            cfg.N = N;
            auto res = exponential_search_election(to_devices(ids), cfg);
            REQUIRE(res.attempts.size() == 1);
            CHECK(res.attempts[0].success);
            CHECK(res.attempts[0].live == ids.size());
            CHECK(res.report.ledger.max_energy <= DenseImprovedCore::energy_budget(4) + 1);
        }
    }
}
