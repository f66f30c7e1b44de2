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

// Group-building elections for dense device sets.
//
// The ID space is cut into blocks of width b. Iteration i recruits the devices
// of block i into a running group whose head is the device with r = i; each
// device keeps r (its slot in the group, offset by the iteration) and the head
// keeps s = |group| + i - 1. Heads retire after their iteration, so the final
// group loses at most ceil(N/b) members and is nonempty once n > ceil(N/b).
//
// DenseSimpleCore recruits ID by ID. DenseImprovedCore first runs a census of
// the block, then recruits the whole block with one exchange and a rank chain.

#include <radioleader/channel.hpp>
#include <radioleader/protocols_core.hpp>
#include <radioleader/runtime.hpp>
#include <radioleader/support.hpp>

#include <algorithm>
#include <memory>
#include <optional>
#include <type_traits>
#include <span>
#include <vector>

namespace radioleader {

struct DenseGeometry {
    u64 M = 1;  // ID space
    u64 b = 1;  // block width, clamped to M
    u64 I = 1;  // iterations

    DenseGeometry() = default;
    DenseGeometry(u64 space, u64 width)
    {
        if (space < 1) throw InvalidParams("dense: empty ID space");
        if (width < 1) throw InvalidParams("dense: b must be >= 1");
        M = space;
        b = std::min(width, space);
        I = ceil_div(M, b);
    }

    u64 block_of(u64 id) const noexcept { return ceil_div(id, b); }
    u64 block_lo(u64 i) const noexcept { return b * (i - 1) + 1; }
    u64 block_hi(u64 i) const noexcept { return std::min(M, b * i); }
    u64 block_size(u64 i) const noexcept { return block_hi(i) - block_lo(i) + 1; }

    friend bool operator==(const DenseGeometry&, const DenseGeometry&) = default;
};

/// Final rank from r: r - I when r > I, none otherwise.
inline std::optional<u64> rank_from_r(u64 r, u64 I)
{
    if (r >= I + 1) return r - I;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Census over m bucket positions.
//
// Tournament: at level l, adjacent blocks of 2^(l-1) positions merge in two
// slots. The left representative transmits its ID list, the right one listens;
// if the right one heard it, it appends the list and acknowledges, and the
// acknowledged left representative retires. An empty side leaves the other
// representative in place. The champion then broadcasts the full list.

class CensusPhase {
public:
    CensusPhase() = default;

    CensusPhase(Round start, u64 m, u64 position, std::int64_t id)
        : start_(start), m_(m), p_(position), id_(id), list_{id}
    {
        if (position < 1 || position > m) throw InvalidParams("census: position outside bucket");
        enter_level();
    }

    static constexpr Round length(u64 m) noexcept { return m <= 1 ? 0 : 2 * (m - 1) + 1; }

    static constexpr u64 energy_budget(u64 m) noexcept { return 2 * ceil_log2(m) + 1; }

    Round next_wake(Round from) const noexcept
    {
        Round slot = current_slot();
        return (slot != kNever && slot >= from) ? slot : kNever;
    }

    Action act(Round r) const
    {
        if (r != current_slot()) return Action::idle();
        switch (stage_) {
        case Stage::Send: return Action::transmit(list_);
        case Stage::Receive: return Action::listen();
        case Stage::AwaitAck: return Action::listen();
        case Stage::Ack: return Action::transmit(Token{});
        case Stage::Listen: return Action::listen();
        case Stage::Broadcast: return Action::transmit(list_);
        case Stage::Done: break;
        }
        return Action::idle();
    }

    void observe(Round r, const Feedback& fb)
    {
        if (r != current_slot()) return;
        switch (stage_) {
        case Stage::Send: stage_ = Stage::AwaitAck; break;
        case Stage::Receive:
            if (const auto* got = fb.received() ? std::get_if<IdList>(&fb.message) : nullptr) {
                IdList merged(*got);
                merged.insert(merged.end(), list_.begin(), list_.end());
                list_ = std::move(merged);
                stage_ = Stage::Ack;
            } else {
                next_level();
            }
            break;
        case Stage::AwaitAck:
            if (fb.received()) {
                stage_ = Stage::Listen;
            } else {
                next_level();
            }
            break;
        case Stage::Ack: next_level(); break;
        case Stage::Listen:
            if (const auto* got = fb.received() ? std::get_if<IdList>(&fb.message) : nullptr) {
                list_ = *got;
                settle();
            } else {
                stage_ = Stage::Done;  // index stays 0: not part of the census
            }
            break;
        case Stage::Broadcast: settle(); break;
        case Stage::Done: break;
        }
    }

    bool finished() const noexcept { return stage_ == Stage::Done; }
    /// 1-based position in the sorted list, 0 when unknown.
    u64 index() const noexcept { return index_; }
    u64 size() const noexcept { return size_; }
    const IdList& list() const noexcept { return list_; }

    friend bool operator==(const CensusPhase&, const CensusPhase&) = default;

private:
    enum class Stage : std::uint8_t { Send, Receive, AwaitAck, Ack, Listen, Broadcast, Done };

    Round broadcast_slot() const noexcept { return start_ + 2 * (m_ - 1); }

    Round current_slot() const noexcept
    {
        switch (stage_) {
        case Stage::Send:
        case Stage::Receive: return start_ + merge_slot_;
        case Stage::AwaitAck:
        case Stage::Ack: return start_ + merge_slot_ + 1;
        case Stage::Listen:
        case Stage::Broadcast: return broadcast_slot();
        case Stage::Done: break;
        }
        return kNever;
    }

    // Find this representative's merge at the current level or later.
    void enter_level()
    {
        for (;;) {
            const u64 nb = ceil_div(m_, block_);
            if (nb <= 1) {
                if (list_.size() >= 2) {
                    stage_ = Stage::Broadcast;
                } else {
                    settle();
                }
                return;
            }
            const u64 q = ceil_div(p_, block_);
            const u64 merges = nb / 2;
            if (q == nb && nb % 2 == 1) {
                level_offset_ += 2 * merges;
                block_ *= 2;
                continue;
            }
            merge_slot_ = level_offset_ + 2 * (ceil_div(q, 2) - 1);
            merges_ = merges;
            stage_ = (q % 2 == 1) ? Stage::Send : Stage::Receive;
            return;
        }
    }

    void next_level()
    {
        level_offset_ += 2 * merges_;
        block_ *= 2;
        enter_level();
    }

    void settle()
    {
        auto it = std::find(list_.begin(), list_.end(), id_);
        index_ = it == list_.end() ? 0 : static_cast<u64>(it - list_.begin()) + 1;
        size_ = list_.size();
        stage_ = Stage::Done;
    }

    Round start_ = 0;
    u64 m_ = 1;
    u64 p_ = 1;
    std::int64_t id_ = 0;
    u64 block_ = 1;
    u64 level_offset_ = 0;
    u64 merge_slot_ = 0;
    u64 merges_ = 0;
    Stage stage_ = Stage::Done;
    IdList list_;
    u64 index_ = 0;
    u64 size_ = 0;
};

// ---------------------------------------------------------------------------
// Simple group building.
//
// Iteration i spends two slots per ID j of block i (A: head sends s, j listens;
// B: j sends a token, head listens) and one handoff slot in which the retiring
// head passes s to the device with r = i + 1.

class DenseSimpleCore {
public:
    DenseSimpleCore() = default;

    DenseSimpleCore(Round start, u64 M, u64 b, u64 id) : start_(start), g_(M, b), c_(id)
    {
        if (id < 1 || id > M) throw InvalidParams("dense: ID outside [1, M]");
    }

    static Round length(u64 M, u64 b)
    {
        DenseGeometry g(M, b);
        return 2 * g.M + g.I;
    }

    static u64 energy_budget(u64 b) { return 2 * b + 4; }

    Round next_wake(Round from) const noexcept
    {
        Round slot = current_slot();
        return (slot != kNever && slot >= from) ? slot : kNever;
    }

    Action act(Round r) const
    {
        if (r != current_slot()) return Action::idle();
        switch (stage_) {
        case Stage::OwnA: return Action::listen();
        case Stage::OwnB: return Action::transmit(Token{});
        case Stage::HandoffRecv: return Action::listen();
        case Stage::HeadA: return Action::transmit(static_cast<std::int64_t>(s_));
        case Stage::HeadB: return Action::listen();
        case Stage::HandoffSend: return Action::transmit(static_cast<std::int64_t>(s_));
        case Stage::Done: break;
        }
        return Action::idle();
    }

    void observe(Round r, const Feedback& fb)
    {
        if (r != current_slot()) return;
        const u64 i0 = g_.block_of(c_);
        switch (stage_) {
        case Stage::OwnA:
            if (auto x = fb.received() ? as_integer(fb.message) : std::nullopt) {
                r_ = static_cast<u64>(*x) + 1;
            } else {
                r_ = i0;
                s_ = i0;
            }
            stage_ = Stage::OwnB;
            break;
        case Stage::OwnB:
            if (r_ == i0) {
                begin_head(i0, c_ + 1);
            } else if (r_ - 1 <= g_.I) {
                stage_ = Stage::HandoffRecv;
            } else {
                stage_ = Stage::Done;
            }
            break;
        case Stage::HandoffRecv:
            if (auto x = fb.received() ? as_integer(fb.message) : std::nullopt) s_ = static_cast<u64>(*x);
            if (r_ <= g_.I) {
                begin_head(r_, g_.block_lo(r_));
            } else {
                stage_ = Stage::Done;
            }
            break;
        case Stage::HeadA: stage_ = Stage::HeadB; break;
        case Stage::HeadB:
            if (fb.received()) ++s_;
            ++j_;
            stage_ = j_ <= g_.block_hi(iter_) ? Stage::HeadA : Stage::HandoffSend;
            break;
        case Stage::HandoffSend: stage_ = Stage::Done; break;
        case Stage::Done: break;
        }
    }

    bool finished() const noexcept { return stage_ == Stage::Done; }
    u64 r() const noexcept { return r_; }
    u64 s() const noexcept { return s_; }
    std::optional<u64> rank() const { return r_ == 0 ? std::nullopt : rank_from_r(r_, g_.I); }
    const DenseGeometry& geometry() const noexcept { return g_; }

    /// First round of iteration i (1-based); iteration I+1 is the end.
    Round iteration_start(u64 i) const noexcept { return start_ + (i - 1) * (2 * g_.b + 1); }

    friend bool operator==(const DenseSimpleCore&, const DenseSimpleCore&) = default;

private:
    enum class Stage : std::uint8_t { OwnA, OwnB, HandoffRecv, HeadA, HeadB, HandoffSend, Done };

    Round slot_a(u64 j) const noexcept
    {
        const u64 i = g_.block_of(j);
        return iteration_start(i) + 2 * (j - g_.block_lo(i));
    }
    Round handoff(u64 i) const noexcept { return iteration_start(i) + 2 * g_.block_size(i); }

    Round current_slot() const noexcept
    {
        switch (stage_) {
        case Stage::OwnA: return slot_a(c_);
        case Stage::OwnB: return slot_a(c_) + 1;
        case Stage::HandoffRecv: return handoff(r_ - 1);
        case Stage::HeadA: return slot_a(j_);
        case Stage::HeadB: return slot_a(j_) + 1;
        case Stage::HandoffSend: return handoff(iter_);
        case Stage::Done: break;
        }
        return kNever;
    }

    void begin_head(u64 iter, u64 j)
    {
        iter_ = iter;
        j_ = j;
        stage_ = j_ <= g_.block_hi(iter_) ? Stage::HeadA : Stage::HandoffSend;
    }

    Round start_ = 0;
    DenseGeometry g_;
    u64 c_ = 1;
    u64 r_ = 0;  // 0 stands for "unset"
    u64 s_ = 0;
    u64 iter_ = 0;
    u64 j_ = 0;
    Stage stage_ = Stage::OwnA;
};

// ---------------------------------------------------------------------------
// Improved group building.
//
// Iteration layout: census of the block, X (head sends s, first block member
// listens), Y (first member sends the block size, head listens), a chain of
// m_i - 1 slots passing r along the block, and the handoff slot.

class DenseImprovedCore {
public:
    DenseImprovedCore() = default;

    DenseImprovedCore(Round start, u64 M, u64 b, u64 id, std::int64_t original_id)
        : start_(start), g_(M, b), c_(id)
    {
        if (id < 1 || id > M) throw InvalidParams("dense: ID outside [1, M]");
        const u64 i0 = g_.block_of(id);
        census_ = CensusPhase(iteration_start(i0), g_.block_size(i0), id - g_.block_lo(i0) + 1, original_id);
        after_census();
    }

    static Round iteration_length(u64 m) { return CensusPhase::length(m) + m + 2; }

    static Round length(u64 M, u64 b)
    {
        DenseGeometry g(M, b);
        Round total = 0;
        for (u64 i = 1; i <= g.I; ++i) total += iteration_length(g.block_size(i));
        return total;
    }

    static u64 energy_budget(u64 b) { return CensusPhase::energy_budget(std::max<u64>(b, 1)) + 7; }

    Round next_wake(Round from) const noexcept
    {
        if (stage_ == Stage::Census) return census_.next_wake(from);
        Round slot = current_slot();
        return (slot != kNever && slot >= from) ? slot : kNever;
    }

    Action act(Round r) const
    {
        if (stage_ == Stage::Census) return census_.act(r);
        if (r != current_slot()) return Action::idle();
        switch (stage_) {
        case Stage::X: return Action::listen();
        case Stage::Y: return Action::transmit(static_cast<std::int64_t>(size_));
        case Stage::ChainRecv: return Action::listen();
        case Stage::ChainSend: return Action::transmit(static_cast<std::int64_t>(r_));
        case Stage::HandoffRecv: return Action::listen();
        case Stage::HeadX: return Action::transmit(static_cast<std::int64_t>(s_));
        case Stage::HeadY: return Action::listen();
        case Stage::HandoffSend: return Action::transmit(static_cast<std::int64_t>(s_));
        case Stage::Census:
        case Stage::Done: break;
        }
        return Action::idle();
    }

    void observe(Round r, const Feedback& fb)
    {
        if (stage_ == Stage::Census) {
            census_.observe(r, fb);
            after_census();
            return;
        }
        if (r != current_slot()) return;
        const u64 i0 = g_.block_of(c_);
        const auto x = fb.received() ? as_integer(fb.message) : std::nullopt;
        switch (stage_) {
        case Stage::X:
            if (x) {
                r_ = static_cast<u64>(*x) + 1;
            } else {
                r_ = i0;
                s_ = i0 + size_ - 1;
            }
            stage_ = Stage::Y;
            break;
        case Stage::Y:
            if (index_ < size_) {
                stage_ = Stage::ChainSend;
            } else {
                after_chain();
            }
            break;
        case Stage::ChainRecv:
            if (x) r_ = static_cast<u64>(*x) + 1;
            if (r_ != 0 && index_ < size_) {
                stage_ = Stage::ChainSend;
            } else {
                after_chain();
            }
            break;
        case Stage::ChainSend: after_chain(); break;
        case Stage::HandoffRecv:
            if (x) s_ = static_cast<u64>(*x);
            if (r_ <= g_.I) {
                iter_ = r_;
                stage_ = Stage::HeadX;
            } else {
                stage_ = Stage::Done;
            }
            break;
        case Stage::HeadX: stage_ = Stage::HeadY; break;
        case Stage::HeadY:
            if (x) s_ += static_cast<u64>(*x);
            stage_ = Stage::HandoffSend;
            break;
        case Stage::HandoffSend: stage_ = Stage::Done; break;
        case Stage::Census:
        case Stage::Done: break;
        }
    }

    bool finished() const noexcept { return stage_ == Stage::Done; }
    u64 r() const noexcept { return r_; }
    u64 s() const noexcept { return s_; }
    u64 census_index() const noexcept { return index_; }
    u64 census_size() const noexcept { return size_; }
    std::optional<u64> rank() const { return r_ == 0 ? std::nullopt : rank_from_r(r_, g_.I); }
    const DenseGeometry& geometry() const noexcept { return g_; }

    /// First round of iteration i (1-based); iteration I+1 is the end.
    Round iteration_start(u64 i) const noexcept { return start_ + (i - 1) * iteration_length(g_.b); }

    friend bool operator==(const DenseImprovedCore&, const DenseImprovedCore&) = default;

private:
    enum class Stage : std::uint8_t {
        Census, X, Y, ChainRecv, ChainSend, HandoffRecv, HeadX, HeadY, HandoffSend, Done
    };

    Round slot_x(u64 i) const noexcept { return iteration_start(i) + CensusPhase::length(g_.block_size(i)); }
    Round slot_chain(u64 i, u64 j) const noexcept { return slot_x(i) + 1 + j; }
    Round handoff(u64 i) const noexcept { return slot_x(i) + 1 + g_.block_size(i); }

    Round current_slot() const noexcept
    {
        const u64 i0 = g_.block_of(c_);
        switch (stage_) {
        case Stage::X: return slot_x(i0);
        case Stage::Y: return slot_x(i0) + 1;
        case Stage::ChainRecv: return slot_chain(i0, index_ - 1);
        case Stage::ChainSend: return slot_chain(i0, index_);
        case Stage::HandoffRecv: return handoff(r_ - 1);
        case Stage::HeadX: return slot_x(iter_);
        case Stage::HeadY: return slot_x(iter_) + 1;
        case Stage::HandoffSend: return handoff(iter_);
        case Stage::Census:
        case Stage::Done: break;
        }
        return kNever;
    }

    void after_census()
    {
        if (!census_.finished()) return;
        index_ = census_.index();
        size_ = census_.size();
        if (index_ == 0) {
            stage_ = Stage::Done;
        } else {
            stage_ = index_ == 1 ? Stage::X : Stage::ChainRecv;
        }
    }

    void after_chain()
    {
        const u64 i0 = g_.block_of(c_);
        if (r_ == 0) {
            stage_ = Stage::Done;
        } else if (r_ == i0) {
            iter_ = i0;
            stage_ = Stage::HandoffSend;
        } else if (r_ - 1 <= g_.I) {
            stage_ = Stage::HandoffRecv;
        } else {
            stage_ = Stage::Done;
        }
    }

    Round start_ = 0;
    DenseGeometry g_;
    u64 c_ = 1;
    CensusPhase census_;
    u64 index_ = 0;
    u64 size_ = 0;
    u64 r_ = 0;
    u64 s_ = 0;
    u64 iter_ = 0;
    Stage stage_ = Stage::Census;
};

// ---------------------------------------------------------------------------
// Block width for the single-shot dense elections: config b, else the
// smallest power of two with n > ceil(N / b) when n is known.

inline u64 dense_block_width(const ProtocolConfig& cfg)
{
    if (cfg.b) return *cfg.b;
    if (cfg.known_n) {
        const u64 n = *cfg.known_n;
        for (u64 b = 1; b < cfg.N; b *= 2) {
            if (n > ceil_div(cfg.N, b)) return b;
        }
        return next_pow2(cfg.N);
    }
    throw InvalidParams("dense election needs b or the device count n");
}

template <class Core>
class DenseElection {
public:
    DenseElection(DeviceId id, const ProtocolConfig& cfg)
        : id_(id), core_(make_core(id, cfg)), announce_slot_(Core::length(cfg.N, dense_block_width(cfg)))
    {
    }

    static Round schedule_length(const ProtocolConfig& cfg) { return Core::length(cfg.N, dense_block_width(cfg)) + 1; }

    static u64 energy_budget(const ProtocolConfig& cfg) { return Core::energy_budget(dense_block_width(cfg)) + 1; }

    Round next_wake(Round from) const
    {
        Round w = core_.next_wake(from);
        if (w != kNever) return w;
        return (!announced_ && from <= announce_slot_) ? announce_slot_ : kNever;
    }

    Action act(Round r) const
    {
        if (r == announce_slot_) return Announcement{r}.act(is_leader(), static_cast<std::int64_t>(id_.value));
        return core_.act(r);
    }

    void observe(Round r, const Feedback& fb)
    {
        if (r == announce_slot_) {
            announced_ = true;
        } else {
            core_.observe(r, fb);
        }
    }

    Verdict verdict() const { return {is_leader() ? Role::Leader : Role::NonLeader, core_.rank()}; }

    const Core& core() const noexcept { return core_; }

    friend bool operator==(const DenseElection&, const DenseElection&) = default;

private:
    static Core make_core(DeviceId id, const ProtocolConfig& cfg)
    {
        if constexpr (std::is_same_v<Core, DenseImprovedCore>) {
            return Core(0, cfg.N, dense_block_width(cfg), id.value, static_cast<std::int64_t>(id.value));
        } else {
            return Core(0, cfg.N, dense_block_width(cfg), id.value);
        }
    }

    bool is_leader() const { return core_.rank() == std::optional<u64>(1); }

    DeviceId id_;
    Core core_;
    Round announce_slot_ = 0;
    bool announced_ = false;
};

using DenseSimpleElection = DenseElection<DenseSimpleCore>;
using DenseImprovedElection = DenseElection<DenseImprovedCore>;

inline RunReport dense_simple_election(std::span<const DeviceId> V, const ProtocolConfig& cfg,
                                       const ExecuteOptions& opts = {})
{
    return execute<DenseSimpleElection>(V, cfg, opts);
}

inline RunReport dense_improved_election(std::span<const DeviceId> V, const ProtocolConfig& cfg,
                                         const ExecuteOptions& opts = {})
{
    return execute<DenseImprovedElection>(V, cfg, opts);
}

// ---------------------------------------------------------------------------
// Exponential search without knowledge of n.
//
// Attempt a runs the improved core on the current space N_a with width
// b_a = min(N_a, 2^(2^a)) (receiver-side or no detection) or
// min(N_a, 2^(2^(2^a))) (sender feedback), then a test slot in which the
// rank-1 device transmits and every other live device listens. A failed
// attempt is followed by one pairing level that halves the space. When the
// attempt with b_a = N_a fails, the single remaining device elects itself.

struct AttemptPlan {
    u64 index = 1;     // 1-based
    u64 b = 1;
    u64 space = 1;     // N_a
    Round start = 0;   // first round of the attempt
    Round core_length = 0;
    Round test_slot = 0;
    Round reduce_start = 0;
    Round reduce_length = 0;  // 0 on the last attempt
    bool last = false;

    Round end() const noexcept { return reduce_start + reduce_length; }

    friend bool operator==(const AttemptPlan&, const AttemptPlan&) = default;
};

/// Width schedule: tower of `height` twos capped at cap, i.e. height 2 gives 2^(2^a).
inline u64 attempt_width(CdModel model, u64 a, u64 cap)
{
    u64 e = a;
    const int height = has_sender_feedback(model) ? 3 : 2;
    for (int h = 0; h < height - 1; ++h) e = pow2_capped(e, 64);
    return pow2_capped(e, cap);
}

inline std::vector<AttemptPlan> exponential_search_plan(u64 N, CdModel model)
{
    std::vector<AttemptPlan> plan;
    u64 space = N;
    Round t = 0;
    for (u64 a = 1;; ++a) {
        AttemptPlan p;
        p.index = a;
        p.space = space;
        p.b = attempt_width(model, a, space);
        p.start = t;
        p.core_length = DenseImprovedCore::length(space, p.b);
        p.test_slot = t + p.core_length;
        p.reduce_start = p.test_slot + 1;
        p.last = p.b >= space;
        p.reduce_length = p.last ? 0 : PairingPhase::length(space, false, 1);
        plan.push_back(p);
        t = p.end();
        if (p.last) break;
        space = ceil_div(space, 2);
    }
    return plan;
}

namespace detail {

// Plans are shared between the devices of one execution.
struct SharedPlan {
    std::shared_ptr<const std::vector<AttemptPlan>> p;

    const AttemptPlan& operator[](u64 i) const { return (*p)[static_cast<std::size_t>(i)]; }

    friend bool operator==(const SharedPlan& a, const SharedPlan& b) { return a.p == b.p || *a.p == *b.p; }
};

inline SharedPlan cached_plan(u64 N, CdModel model)
{
    thread_local u64 last_n = 0;
    thread_local CdModel last_model = CdModel::NoCD;
    thread_local std::shared_ptr<const std::vector<AttemptPlan>> last;
    if (!last || last_n != N || last_model != model) {
        last = std::make_shared<const std::vector<AttemptPlan>>(exponential_search_plan(N, model));
        last_n = N;
        last_model = model;
    }
    return {last};
}

}  // namespace detail

class ExponentialSearchElection {
public:
    ExponentialSearchElection(DeviceId id, const ProtocolConfig& cfg)
        : id_(id), plan_(detail::cached_plan(cfg.N, cfg.model)), c_(id.value)
    {
        start_attempt();
    }

    static Round schedule_length(const ProtocolConfig& cfg) { return exponential_search_plan(cfg.N, cfg.model).back().end(); }

    static u64 energy_budget(const ProtocolConfig& cfg)
    {
        u64 total = 0;
        for (const auto& p : exponential_search_plan(cfg.N, cfg.model)) {
            total += DenseImprovedCore::energy_budget(p.b) + 1 + (p.last ? 0 : 1);
        }
        return total;
    }

    Round next_wake(Round from)
    {
        for (;;) {
            switch (stage_) {
            case Stage::Core: {
                Round w = core_.next_wake(from);
                if (w != kNever) return w;
                stage_ = Stage::Test;
                continue;
            }
            case Stage::Test: {
                Round slot = plan_[a_].test_slot;
                return slot >= from ? slot : kNever;
            }
            case Stage::Reduce: {
                Round w = reduce_.next_wake(from);
                if (w != kNever) return w;
                if (!reduce_.alive()) {
                    stage_ = Stage::Done;
                    return kNever;
                }
                c_ = reduce_.id();
                ++a_;
                start_attempt();
                continue;
            }
            case Stage::Done: return kNever;
            }
        }
    }

    Action act(Round r) const
    {
        switch (stage_) {
        case Stage::Core: return core_.act(r);
        case Stage::Test:
            if (r != plan_[a_].test_slot) return Action::idle();
            return Announcement{r}.act(core_.rank() == std::optional<u64>(1), static_cast<std::int64_t>(id_.value));
        case Stage::Reduce: return reduce_.act(r);
        case Stage::Done: break;
        }
        return Action::idle();
    }

    void observe(Round r, const Feedback& fb)
    {
        switch (stage_) {
        case Stage::Core: core_.observe(r, fb); break;
        case Stage::Test: {
            if (r != plan_[a_].test_slot) break;
            const bool sender = core_.rank() == std::optional<u64>(1);
            if (sender) {
                leader_ = true;
                stage_ = Stage::Done;
            } else if (fb.received()) {
                stage_ = Stage::Done;
            } else if (plan_[a_].last) {
                leader_ = true;  // alone
                stage_ = Stage::Done;
            } else {
                reduce_ = PairingPhase(plan_[a_].reduce_start, plan_[a_].space, c_, false, 1);
                stage_ = Stage::Reduce;
            }
            break;
        }
        case Stage::Reduce: reduce_.observe(r, fb); break;
        case Stage::Done: break;
        }
    }

    Verdict verdict() const { return {leader_ ? Role::Leader : Role::NonLeader, std::nullopt}; }

    /// 0-based attempt the device is in (or ended in).
    u64 attempt() const noexcept { return a_; }

    friend bool operator==(const ExponentialSearchElection&, const ExponentialSearchElection&) = default;

private:
    enum class Stage : std::uint8_t { Core, Test, Reduce, Done };

    void start_attempt()
    {
        const AttemptPlan& p = plan_[a_];
        core_ = DenseImprovedCore(p.start, p.space, p.b, c_, static_cast<std::int64_t>(id_.value));
        stage_ = Stage::Core;
    }

    DeviceId id_;
    detail::SharedPlan plan_;
    u64 a_ = 0;
    u64 c_ = 1;
    DenseImprovedCore core_;
    PairingPhase reduce_;
    Stage stage_ = Stage::Core;
    bool leader_ = false;
};

struct AttemptSummary {
    u64 index = 1;
    u64 b = 1;
    u64 space = 1;
    u64 live = 0;  // devices active in the attempt
    bool success = false;
    u64 energy_max = 0;
    Round rounds = 0;
};

struct ExponentialSearchResult {
    RunReport report;
    std::vector<AttemptPlan> plan;
    std::vector<AttemptSummary> attempts;  // executed attempts, in order
};

/// Per-attempt statistics recovered from a recorded transcript.
inline std::vector<AttemptSummary> summarize_attempts(const Transcript& t, const std::vector<AttemptPlan>& plan)
{
    std::vector<AttemptSummary> out;
    std::size_t e = 0;
    for (const AttemptPlan& p : plan) {
        AttemptSummary s;
        s.index = p.index;
        s.b = p.b;
        s.space = p.space;
        s.rounds = p.end() - p.start;
        std::vector<u64> energy(t.devices.size(), 0);
        std::size_t tx_at_test = 0;
        std::size_t any = 0;
        for (; e < t.entries.size() && t.entries[e].round < p.end(); ++e) {
            const auto& entry = t.entries[e];
            auto it = std::lower_bound(t.devices.begin(), t.devices.end(), entry.id);
            ++energy[static_cast<std::size_t>(it - t.devices.begin())];
            ++any;
            if (entry.round == p.test_slot && entry.action.kind == ActionKind::Transmit) ++tx_at_test;
        }
        if (any == 0) break;
        s.success = tx_at_test == 1;
        s.live = static_cast<u64>(std::count_if(energy.begin(), energy.end(), [](u64 x) { return x > 0; }));
        s.energy_max = *std::max_element(energy.begin(), energy.end());
        out.push_back(s);
        if (s.success) break;
    }
    return out;
}

inline ExponentialSearchResult exponential_search_election(std::span<const DeviceId> V, const ProtocolConfig& cfg,
                                                           ExecuteOptions opts = {})
{
    const bool keep = opts.record_transcript;
    opts.record_transcript = true;
    ExponentialSearchResult res;
    res.report = execute<ExponentialSearchElection>(V, cfg, opts);
    res.plan = exponential_search_plan(cfg.N, cfg.model);
    res.attempts = summarize_attempts(*res.report.transcript, res.plan);
    if (!keep) res.report.transcript.reset();
    return res;
}

}  // namespace radioleader
