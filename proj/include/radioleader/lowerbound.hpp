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

#pragma once

// Necessary conditions that any correct deterministic election must meet,
// evaluated mechanically on a device program:
//
//   canonical_sequence      actions of one ID under a fixed adversarial feedback
//   uniqueness_check        distinct IDs must act differently under that feedback
//   matching_count          some listen/transmit pattern matches >= N/2^k sequences
//   potential_active_slots  an energy-k program has at most 2^k possibly active rounds
//   counting_bound          N <= sum_{i=1..k} C(t, i) 2^i

#include <radioleader/channel.hpp>
#include <radioleader/protocols_core.hpp>
#include <radioleader/runtime.hpp>
#include <radioleader/support.hpp>

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace radioleader {

enum class ActionTag : std::uint8_t { Idle, Listen, Transmit };

using ActionSequence = std::vector<ActionTag>;

inline char tag_char(ActionTag t) noexcept
{
    switch (t) {
    case ActionTag::Idle: return 'I';
    case ActionTag::Listen: return 'L';
    case ActionTag::Transmit: return 'T';
    }
    return '?';
}

inline std::string to_string(const ActionSequence& s)
{
    std::string out;
    out.reserve(s.size());
    for (ActionTag t : s) out.push_back(tag_char(t));
    return out;
}

inline ActionTag tag_of(const Action& a) noexcept
{
    switch (a.kind) {
    case ActionKind::Idle: return ActionTag::Idle;
    case ActionKind::Listen: return ActionTag::Listen;
    case ActionKind::Transmit: return ActionTag::Transmit;
    }
    return ActionTag::Idle;
}

/// Forced feedback conventions.
///   ReceiverStyle: listening hears silence, transmitting yields nothing.
///   StrongStyle:   listening hears silence, transmitting detects a collision.
enum class FeedbackStyle : std::uint8_t { ReceiverStyle, StrongStyle };

inline Feedback forced_feedback(ActionTag t, FeedbackStyle style)
{
    if (t == ActionTag::Listen) return Feedback::silence();
    return style == FeedbackStyle::StrongStyle ? Feedback::collision() : Feedback::none();
}

template <DeviceProgram P>
ActionSequence canonical_sequence(DeviceId id, const ProtocolConfig& cfg, FeedbackStyle style)
{
    const Round length = P::schedule_length(cfg);
    ActionSequence seq(length, ActionTag::Idle);
    P prog(id, cfg);
    Round from = 0;
    for (;;) {
        const Round w = prog.next_wake(from);
        if (w == kNever) break;
        if (w >= length || w < from) throw ScheduleOverrun("canonical run left the schedule");
        const ActionTag t = tag_of(prog.act(w));
        if (t != ActionTag::Idle) {
            seq[w] = t;
            prog.observe(w, forced_feedback(t, style));
        }
        from = w + 1;
    }
    return seq;
}

template <DeviceProgram P>
std::vector<ActionSequence> canonical_sequences(const ProtocolConfig& cfg, FeedbackStyle style)
{
    std::vector<ActionSequence> out;
    out.reserve(cfg.N);
    for (u64 j = 1; j <= cfg.N; ++j) out.push_back(canonical_sequence<P>(DeviceId{j}, cfg, style));
    return out;
}

inline u64 weight(const ActionSequence& s)
{
    return static_cast<u64>(std::count_if(s.begin(), s.end(), [](ActionTag t) { return t != ActionTag::Idle; }));
}

// ---------------------------------------------------------------------------
// Uniqueness

struct UniquenessResult {
    std::optional<std::pair<u64, u64>> violation;  // (j, j') with j < j'

    bool ok() const noexcept { return !violation.has_value(); }
};

/// First pair of IDs (ordered by the larger ID, then the smaller) whose
/// sequences coincide.
inline UniquenessResult first_duplicate(const std::vector<ActionSequence>& seqs)
{
    std::unordered_map<std::string, u64> seen;
    for (u64 j = 0; j < seqs.size(); ++j) {
        auto [it, inserted] = seen.emplace(to_string(seqs[j]), j + 1);
        if (!inserted) return {std::make_pair(it->second, j + 1)};
    }
    return {};
}

template <DeviceProgram P>
UniquenessResult uniqueness_check(const ProtocolConfig& cfg)
{
    return first_duplicate(canonical_sequences<P>(cfg, FeedbackStyle::StrongStyle));
}

// ---------------------------------------------------------------------------
// Matching sequences

struct MatchOptions {
    u64 exhaustive_limit = 20;  // relevant positions
    u64 trials = 1u << 16;      // sampled mode
    u64 seed = 0;
};

struct MatchResult {
    u64 max_matched = 0;
    u64 required = 0;  // ceil(N / 2^k)
    u64 relevant_positions = 0;
    bool exhaustive = false;
    ActionSequence witness;  // a listen/transmit pattern achieving max_matched

    bool holds() const noexcept { return max_matched >= required; }
};

/// Largest number of sequences matched by a single listen/transmit pattern.
/// A pattern matches a sequence when it agrees on every non-idle position.
inline MatchResult matching_count(const std::vector<ActionSequence>& seqs, u64 k, const MatchOptions& opts = {})
{
    MatchResult res;
    const u64 N = seqs.size();
    res.required = ceil_div(N, pow2_capped(k, std::max<u64>(N, 1)));
    if (N == 0) return res;
    const std::size_t t = seqs.front().size();
    for (const auto& s : seqs) {
        if (s.size() != t) throw InvalidParams("matching: sequences differ in length");
        if (weight(s) > k) throw InvalidParams("matching: sequence exceeds the energy budget");
    }
    std::vector<std::size_t> relevant;
    for (std::size_t i = 0; i < t; ++i) {
        if (std::any_of(seqs.begin(), seqs.end(), [&](const auto& s) { return s[i] != ActionTag::Idle; })) {
            relevant.push_back(i);
        }
    }
    res.relevant_positions = relevant.size();
    res.witness.assign(t, ActionTag::Listen);

    auto count_for = [&](auto is_transmit) {
        u64 c = 0;
        for (const auto& s : seqs) {
            bool ok = true;
            for (std::size_t p : relevant) {
                if (s[p] == ActionTag::Idle) continue;
                if ((s[p] == ActionTag::Transmit) != is_transmit(p)) {
                    ok = false;
                    break;
                }
            }
            c += ok;
        }
        return c;
    };

    if (relevant.size() <= opts.exhaustive_limit) {
        res.exhaustive = true;
        // Bitmask form: bit q of `care` / `tx` refers to relevant[q].
        std::vector<std::pair<std::uint32_t, std::uint32_t>> masks;
        masks.reserve(N);
        for (const auto& s : seqs) {
            std::uint32_t care = 0, tx = 0;
            for (std::size_t q = 0; q < relevant.size(); ++q) {
                if (s[relevant[q]] != ActionTag::Idle) care |= 1u << q;
                if (s[relevant[q]] == ActionTag::Transmit) tx |= 1u << q;
            }
            masks.emplace_back(care, tx);
        }
        const std::uint64_t patterns = std::uint64_t{1} << relevant.size();
        std::uint32_t best_pattern = 0;
        for (std::uint64_t pat = 0; pat < patterns; ++pat) {
            u64 c = 0;
            const auto b = static_cast<std::uint32_t>(pat);
            for (const auto& [care, tx] : masks) c += ((b ^ tx) & care) == 0;
            if (c > res.max_matched) {
                res.max_matched = c;
                best_pattern = b;
            }
        }
        for (std::size_t q = 0; q < relevant.size(); ++q) {
            res.witness[relevant[q]] = (best_pattern >> q) & 1u ? ActionTag::Transmit : ActionTag::Listen;
        }
        return res;
    }

    SplitMix64 rng(opts.seed);
    std::vector<bool> pattern(t, false);
    for (u64 trial = 0; trial < opts.trials; ++trial) {
        for (std::size_t p : relevant) pattern[p] = (rng() >> 63) != 0;
        const u64 c = count_for([&](std::size_t p) { return pattern[p]; });
        if (c > res.max_matched) {
            res.max_matched = c;
            for (std::size_t p : relevant) res.witness[p] = pattern[p] ? ActionTag::Transmit : ActionTag::Listen;
        }
    }
    return res;
}

// ---------------------------------------------------------------------------
// Potential active slots
//
// Explores every feedback history over {collision, silence}: at each non-idle
// action the program forks once per feedback value. Identical program states
// reached with identical energy are merged.

struct PotentialActivity {
    std::vector<bool> active;  // per round
    u64 count = 0;
    u64 budget = 0;

    bool within_bound() const noexcept { return budget >= 63 || count <= (u64{1} << budget); }
};

template <DeviceProgram P>
PotentialActivity potential_active_slots(DeviceId id, const ProtocolConfig& cfg, u64 k)
{
    const Round length = P::schedule_length(cfg);
    PotentialActivity res;
    res.active.assign(length, false);
    res.budget = k;

    struct Node {
        P prog;
        u64 energy;
    };
    std::map<Round, std::vector<Node>> frontier;
    auto push = [&](Node&& node, Round from) {
        const Round w = node.prog.next_wake(from);
        if (w == kNever) return;
        if (w >= length || w < from) throw ScheduleOverrun("feedback tree left the schedule");
        auto& bucket = frontier[w];
        for (const Node& other : bucket) {
            if (other.energy == node.energy && other.prog == node.prog) return;
        }
        bucket.push_back(std::move(node));
    };
    push(Node{P(id, cfg), 0}, 0);

    while (!frontier.empty()) {
        auto it = frontier.begin();
        const Round r = it->first;
        std::vector<Node> nodes = std::move(it->second);
        frontier.erase(it);
        for (Node& node : nodes) {
            const ActionTag t = tag_of(node.prog.act(r));
            if (t == ActionTag::Idle) {
                push(std::move(node), r + 1);
                continue;
            }
            res.active[r] = true;
            const u64 e = node.energy + 1;
            if (e > k) {
                throw BudgetExceeded("device " + std::to_string(id.value) + " exceeds energy " + std::to_string(k) +
                                     " at round " + std::to_string(r));
            }
            for (const Feedback& fb : {Feedback::collision(), Feedback::silence()}) {
                Node child{node.prog, e};
                child.prog.observe(r, fb);
                push(std::move(child), r + 1);
            }
        }
    }
    res.count = static_cast<u64>(std::count(res.active.begin(), res.active.end(), true));
    return res;
}

// ---------------------------------------------------------------------------
// Counting inequality

using BigInt = boost::multiprecision::cpp_int;

/// Number of length-t sequences with 1..k non-idle entries, each listen or transmit.
inline BigInt counting_bound(u64 t, u64 k)
{
    BigInt total = 0;
    BigInt binom = 1;  // C(t, i)
    BigInt pow2 = 1;
    for (u64 i = 1; i <= k && i <= t; ++i) {
        binom = binom * (t - i + 1) / i;
        pow2 *= 2;
        total += binom * pow2;
    }
    return total;
}

inline bool counting_inequality_holds(u64 N, u64 t, u64 k) { return BigInt(N) <= counting_bound(t, k); }

// ---------------------------------------------------------------------------
// A deliberately broken election: binary search in which ID 1 behaves as ID 2.

class PlantedDuplicateElection {
public:
    PlantedDuplicateElection(DeviceId id, const ProtocolConfig& cfg)
        : inner_(DeviceId{id.value == 1 && cfg.N >= 2 ? 2 : id.value}, cfg)
    {
    }

    static Round schedule_length(const ProtocolConfig& cfg) { return BinarySearchElection::schedule_length(cfg); }
    static u64 energy_budget(const ProtocolConfig& cfg) { return BinarySearchElection::energy_budget(cfg); }

    Round next_wake(Round from) const { return inner_.next_wake(from); }
    Action act(Round r) const { return inner_.act(r); }
    void observe(Round r, const Feedback& fb) { inner_.observe(r, fb); }
    Verdict verdict() const { return inner_.verdict(); }

    friend bool operator==(const PlantedDuplicateElection&, const PlantedDuplicateElection&) = default;

private:
    BinarySearchElection inner_;
};

}  // namespace radioleader
