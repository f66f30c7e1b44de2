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

// Building-block elections: pairing ID-space reduction, binary search over
// the ID space, and the halving time/energy trade-off.
//
// Phases are embeddable pieces of a device program. A phase is told its
// absolute start round and the device's local ID, and exposes the same
// next_wake / act / observe triple as a full program.

#include <radioleader/channel.hpp>
#include <radioleader/runtime.hpp>
#include <radioleader/support.hpp>

#include <algorithm>
#include <limits>
#include <span>
#include <variant>
#include <vector>

namespace radioleader {

inline constexpr u64 kAllLevels = std::numeric_limits<u64>::max();

// ---------------------------------------------------------------------------
// Pairing reduction
//
// One level on ID space [M]: for each pair {2p-1, 2p} the odd ID transmits a
// token in slot p and the even ID listens; the even ID drops out iff it hears
// the token. Survivors take the new ID ceil(ID/2) on space [ceil(M/2)].
//
// In compact mode the slot of an unpaired top ID (M odd) is omitted; that ID
// survives without acting.

class PairingPhase {
public:
    PairingPhase() = default;

    PairingPhase(Round start, u64 M, u64 id, bool compact = false, u64 max_levels = kAllLevels)
        : level_start_(start), space_(M), id_(id), levels_left_(max_levels), compact_(compact)
    {
        if (id < 1 || id > M) throw InvalidParams("pairing: ID outside [1, M]");
        skip_forced();
    }

    static constexpr u64 slots_for(u64 M, bool compact) noexcept { return compact ? M / 2 : ceil_div(M, 2); }

    static constexpr Round length(u64 M, bool compact = false, u64 max_levels = kAllLevels) noexcept
    {
        Round total = 0;
        for (u64 lvl = 0; M > 1 && lvl < max_levels; ++lvl) {
            total += slots_for(M, compact);
            M = ceil_div(M, 2);
        }
        return total;
    }

    /// Levels until the space reaches size 1.
    static constexpr u64 levels(u64 M, u64 max_levels = kAllLevels) noexcept
    {
        return std::min<u64>(ceil_log2(M), max_levels);
    }

    Round next_wake(Round from) const noexcept
    {
        if (finished()) return kNever;
        Round slot = current_slot();
        return slot >= from ? slot : kNever;
    }

    Action act(Round r) const
    {
        if (finished() || r != current_slot()) return Action::idle();
        return (id_ % 2 == 1) ? Action::transmit(Token{}) : Action::listen();
    }

    void observe(Round r, const Feedback& fb)
    {
        if (finished() || r != current_slot()) return;
        if (id_ % 2 == 0 && fb.received()) {
            alive_ = false;
            return;
        }
        next_level();
        skip_forced();
    }

    bool finished() const noexcept { return !alive_ || space_ <= 1 || levels_left_ == 0; }
    bool alive() const noexcept { return alive_; }
    bool won() const noexcept { return alive_ && space_ <= 1; }
    u64 id() const noexcept { return id_; }
    u64 space() const noexcept { return space_; }

    friend bool operator==(const PairingPhase&, const PairingPhase&) = default;

private:
    Round current_slot() const noexcept { return level_start_ + ceil_div(id_, 2) - 1; }

    void next_level() noexcept
    {
        level_start_ += slots_for(space_, compact_);
        id_ = ceil_div(id_, 2);
        space_ = ceil_div(space_, 2);
        if (levels_left_ != kAllLevels) --levels_left_;
    }

    void skip_forced() noexcept
    {
        while (compact_ && !finished() && space_ % 2 == 1 && id_ == space_) next_level();
    }

    Round level_start_ = 0;
    u64 space_ = 1;
    u64 id_ = 1;
    u64 levels_left_ = kAllLevels;
    bool compact_ = false;
    bool alive_ = true;
};

// ---------------------------------------------------------------------------
// Binary search over the ID space (needs receiver-side collision detection)
//
// Probe on interval [lo, hi]: the lower ceil(size/2) IDs transmit, the rest
// listen. Silence means the lower half is empty and the upper half continues;
// anything else eliminates the listeners.

class BinarySearchPhase {
public:
    BinarySearchPhase() = default;

    BinarySearchPhase(Round start, u64 M, u64 id, u64 max_probes = kAllLevels)
        : start_(start), hi_(M), id_(id), probes_(length(M, max_probes))
    {
        if (id < 1 || id > M) throw InvalidParams("binary search: ID outside [1, M]");
    }

    static constexpr Round length(u64 M, u64 max_probes = kAllLevels) noexcept
    {
        return std::min<u64>(ceil_log2(M), max_probes);
    }

    Round next_wake(Round from) const noexcept
    {
        if (finished()) return kNever;
        Round slot = start_ + done_;
        return slot >= from ? slot : kNever;
    }

    Action act(Round r) const
    {
        if (finished() || r != start_ + done_) return Action::idle();
        return id_ <= mid() ? Action::transmit(Token{}) : Action::listen();
    }

    void observe(Round r, const Feedback& fb)
    {
        if (finished() || r != start_ + done_) return;
        const u64 m = mid();
        if (id_ <= m) {
            hi_ = m;
        } else if (fb.kind == FeedbackKind::Silence) {
            lo_ = m + 1;
        } else {
            alive_ = false;
        }
        ++done_;
    }

    bool finished() const noexcept { return !alive_ || lo_ == hi_ || done_ >= probes_; }
    bool alive() const noexcept { return alive_; }
    bool won() const noexcept { return alive_ && lo_ == hi_; }
    u64 lo() const noexcept { return lo_; }
    u64 hi() const noexcept { return hi_; }

    friend bool operator==(const BinarySearchPhase&, const BinarySearchPhase&) = default;

private:
    u64 mid() const noexcept { return lo_ + ceil_div(hi_ - lo_ + 1, 2) - 1; }

    Round start_ = 0;
    u64 lo_ = 1;
    u64 hi_ = 1;
    u64 id_ = 1;
    u64 probes_ = 0;
    u64 done_ = 0;
    bool alive_ = true;
};

// ---------------------------------------------------------------------------
// Pluggable inner election on a small ID space.

class InnerPhase {
public:
    InnerPhase() = default;

    InnerPhase(InnerElection kind, Round start, u64 M, u64 id)
    {
        switch (kind) {
        case InnerElection::BinarySearch: impl_ = BinarySearchPhase(start, M, id); break;
        case InnerElection::Pairing: impl_ = PairingPhase(start, M, id, false); break;
        case InnerElection::PairingCompact: impl_ = PairingPhase(start, M, id, true); break;
        }
    }

    static constexpr Round length(InnerElection kind, u64 M) noexcept
    {
        switch (kind) {
        case InnerElection::BinarySearch: return BinarySearchPhase::length(M);
        case InnerElection::Pairing: return PairingPhase::length(M, false);
        case InnerElection::PairingCompact: return PairingPhase::length(M, true);
        }
        return 0;
    }

    /// Upper bound on non-idle slots of one participant.
    static constexpr u64 energy_budget(InnerElection, u64 M) noexcept { return ceil_log2(M); }

    static bool supported(InnerElection kind, CdModel model) noexcept
    {
        return kind != InnerElection::BinarySearch || has_receiver_cd(model);
    }

    Round next_wake(Round from) const
    {
        return std::visit([&](const auto& p) { return p.next_wake(from); }, impl_);
    }
    Action act(Round r) const
    {
        return std::visit([&](const auto& p) { return p.act(r); }, impl_);
    }
    void observe(Round r, const Feedback& fb)
    {
        std::visit([&](auto& p) { p.observe(r, fb); }, impl_);
    }
    bool finished() const
    {
        return std::visit([](const auto& p) { return p.finished(); }, impl_);
    }
    bool won() const
    {
        return std::visit([](const auto& p) { return p.won(); }, impl_);
    }

    friend bool operator==(const InnerPhase&, const InnerPhase&) = default;

private:
    std::variant<PairingPhase, BinarySearchPhase> impl_;
};

// ---------------------------------------------------------------------------
// Final announcement slot: the leader transmits its ID, everybody else listens.

struct Announcement {
    Round slot = 0;

    Action act(bool leader, std::int64_t id) const
    {
        return leader ? Action::transmit(std::int64_t{id}) : Action::listen();
    }
};

// ---------------------------------------------------------------------------
// Pairing election: reduce until the space has one ID; the survivor leads.

class PairingElection {
public:
    PairingElection(DeviceId id, const ProtocolConfig& cfg)
        : id_(id), phase_(0, cfg.N, id.value, false), announce_slot_(PairingPhase::length(cfg.N))
    {
    }

    static Round schedule_length(const ProtocolConfig& cfg) { return PairingPhase::length(cfg.N) + 1; }

    static u64 energy_budget(const ProtocolConfig& cfg) { return PairingPhase::levels(cfg.N) + 1; }

    Round next_wake(Round from) const
    {
        if (!phase_.finished()) return phase_.next_wake(from);
        return (!announced_ && from <= announce_slot_) ? announce_slot_ : kNever;
    }

    Action act(Round r) const
    {
        if (!phase_.finished()) return phase_.act(r);
        if (r == announce_slot_) return Announcement{announce_slot_}.act(phase_.won(), static_cast<std::int64_t>(id_.value));
        return Action::idle();
    }

    void observe(Round r, const Feedback& fb)
    {
        if (!phase_.finished()) {
            phase_.observe(r, fb);
        } else if (r == announce_slot_) {
            announced_ = true;
        }
    }

    Verdict verdict() const { return {phase_.won() ? Role::Leader : Role::NonLeader, std::nullopt}; }

    friend bool operator==(const PairingElection&, const PairingElection&) = default;

private:
    DeviceId id_;
    PairingPhase phase_;
    Round announce_slot_ = 0;
    bool announced_ = false;
};

// ---------------------------------------------------------------------------
// One pairing level as a stand-alone program. Survivors report their new ID
// as the verdict rank.

class PairingReduceOnce {
public:
    PairingReduceOnce(DeviceId id, const ProtocolConfig& cfg) : phase_(0, cfg.N, id.value, false, 1) {}

    static Round schedule_length(const ProtocolConfig& cfg) { return PairingPhase::length(cfg.N, false, 1); }

    Round next_wake(Round from) const { return phase_.next_wake(from); }
    Action act(Round r) const { return phase_.act(r); }
    void observe(Round r, const Feedback& fb) { phase_.observe(r, fb); }

    Verdict verdict() const
    {
        return {Role::NonLeader, phase_.alive() ? std::optional<u64>(phase_.id()) : std::nullopt};
    }

    friend bool operator==(const PairingReduceOnce&, const PairingReduceOnce&) = default;

private:
    PairingPhase phase_;
};

struct ReduceResult {
    std::vector<DeviceId> survivors;  // original IDs, ascending
    std::vector<u64> new_ids;         // aligned with survivors
    RunReport report;
};

inline ReduceResult pairing_reduce_once(std::span<const DeviceId> V, const ProtocolConfig& cfg)
{
    ReduceResult out;
    out.report = execute<PairingReduceOnce>(V, cfg);
    for (std::size_t i = 0; i < out.report.devices.size(); ++i) {
        if (auto r = out.report.verdicts[i].rank) {
            out.survivors.push_back(out.report.devices[i]);
            out.new_ids.push_back(*r);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Binary-search election (StrongCD or ReceiverCD).

class BinarySearchElection {
public:
    BinarySearchElection(DeviceId id, const ProtocolConfig& cfg)
        : id_(id), phase_(0, cfg.N, id.value), announce_slot_(BinarySearchPhase::length(cfg.N))
    {
        if (!has_receiver_cd(cfg.model)) throw InvalidParams("binary search needs receiver collision detection");
    }

    static Round schedule_length(const ProtocolConfig& cfg) { return BinarySearchPhase::length(cfg.N) + 1; }

    static u64 energy_budget(const ProtocolConfig& cfg) { return ceil_log2(cfg.N) + 1; }

    Round next_wake(Round from) const
    {
        Round w = phase_.next_wake(from);
        if (w != kNever) return w;
        return (!announced_ && from <= announce_slot_) ? announce_slot_ : kNever;
    }

    Action act(Round r) const
    {
        if (r == announce_slot_) return Announcement{announce_slot_}.act(phase_.won(), static_cast<std::int64_t>(id_.value));
        return phase_.act(r);
    }

    void observe(Round r, const Feedback& fb)
    {
        if (r == announce_slot_) {
            announced_ = true;
        } else {
            phase_.observe(r, fb);
        }
    }

    Verdict verdict() const { return {phase_.won() ? Role::Leader : Role::NonLeader, std::nullopt}; }

    friend bool operator==(const BinarySearchElection&, const BinarySearchElection&) = default;

private:
    DeviceId id_;
    BinarySearchPhase phase_;
    Round announce_slot_ = 0;
    bool announced_ = false;
};

// ---------------------------------------------------------------------------
// Halving trade-off: k binary-search probes shrink the live interval to at
// most ceil(N / 2^k) IDs, then the inner election runs on that interval.

class HalvingTradeoffElection {
public:
    HalvingTradeoffElection(DeviceId id, const ProtocolConfig& cfg)
        : id_(id),
          kind_(inner_kind(cfg)),
          residual_(residual_space(cfg)),
          probe_(0, cfg.N, id.value, effective_k(cfg)),
          probe_len_(BinarySearchPhase::length(cfg.N, effective_k(cfg))),
          announce_slot_(schedule_length(cfg) - 1)
    {
        if (!has_receiver_cd(cfg.model)) throw InvalidParams("halving trade-off needs receiver collision detection");
    }

    static InnerElection inner_kind(const ProtocolConfig& cfg)
    {
        return cfg.inner_election.value_or(InnerElection::BinarySearch);
    }

    static u64 effective_k(const ProtocolConfig& cfg)
    {
        if (!cfg.k || *cfg.k < 1) throw InvalidParams("halving trade-off needs k >= 1");
        return std::min<u64>(*cfg.k, ceil_log2(cfg.N));
    }

    static u64 residual_space(const ProtocolConfig& cfg)
    {
        return ceil_div(cfg.N, pow2_capped(effective_k(cfg), cfg.N));
    }

    static Round schedule_length(const ProtocolConfig& cfg)
    {
        return BinarySearchPhase::length(cfg.N, effective_k(cfg)) +
               InnerPhase::length(inner_kind(cfg), residual_space(cfg)) + 1;
    }

    static u64 energy_budget(const ProtocolConfig& cfg)
    {
        return effective_k(cfg) + InnerPhase::energy_budget(inner_kind(cfg), residual_space(cfg)) + 1;
    }

    Round next_wake(Round from)
    {
        if (stage_ == Stage::Probe) {
            Round w = probe_.next_wake(from);
            if (w != kNever) return w;
            if (probe_.alive()) {
                inner_ = InnerPhase(kind_, probe_len_, residual_, id_.value - probe_.lo() + 1);
                stage_ = Stage::Inner;
            } else {
                stage_ = Stage::Announce;
            }
        }
        if (stage_ == Stage::Inner) {
            Round w = inner_.next_wake(from);
            if (w != kNever) return w;
            leader_ = inner_.won();
            stage_ = Stage::Announce;
        }
        if (stage_ == Stage::Announce && from <= announce_slot_) return announce_slot_;
        return kNever;
    }

    Action act(Round r) const
    {
        switch (stage_) {
        case Stage::Probe: return probe_.act(r);
        case Stage::Inner: return inner_.act(r);
        case Stage::Announce:
            if (r == announce_slot_) return Announcement{announce_slot_}.act(leader_, static_cast<std::int64_t>(id_.value));
            return Action::idle();
        case Stage::Done: return Action::idle();
        }
        return Action::idle();
    }

    void observe(Round r, const Feedback& fb)
    {
        switch (stage_) {
        case Stage::Probe: probe_.observe(r, fb); break;
        case Stage::Inner: inner_.observe(r, fb); break;
        case Stage::Announce:
            if (r == announce_slot_) stage_ = Stage::Done;
            break;
        case Stage::Done: break;
        }
    }

    Verdict verdict() const { return {leader_ ? Role::Leader : Role::NonLeader, std::nullopt}; }

    friend bool operator==(const HalvingTradeoffElection&, const HalvingTradeoffElection&) = default;

private:
    enum class Stage : std::uint8_t { Probe, Inner, Announce, Done };

    DeviceId id_;
    InnerElection kind_ = InnerElection::BinarySearch;
    u64 residual_ = 1;
    BinarySearchPhase probe_;
    Round probe_len_ = 0;
    InnerPhase inner_;
    Round announce_slot_ = 0;
    Stage stage_ = Stage::Probe;
    bool leader_ = false;
};

// ---------------------------------------------------------------------------
// Convenience wrappers

inline RunReport pairing_election(std::span<const DeviceId> V, ProtocolConfig cfg, const ExecuteOptions& opts = {})
{
    return execute<PairingElection>(V, cfg, opts);
}

inline RunReport binary_search_election(std::span<const DeviceId> V, ProtocolConfig cfg,
                                        const ExecuteOptions& opts = {})
{
    return execute<BinarySearchElection>(V, cfg, opts);
}

inline RunReport halving_tradeoff_election(std::span<const DeviceId> V, ProtocolConfig cfg,
                                           const ExecuteOptions& opts = {})
{
    return execute<HalvingTradeoffElection>(V, cfg, opts);
}

}  // namespace radioleader
