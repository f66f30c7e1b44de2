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

// Sender-CD partition election with a tunable time/energy trade-off.
//
// Each iteration walks one partition of a good family: every part transmits in
// its own slot, and a device that hears its own message is alone in its part.
// Marked devices run an inner election on the part indices, and the winner
// announces itself; everybody stops after the first successful announcement.

#include <radioleader/channel.hpp>
#include <radioleader/partitions.hpp>
#include <radioleader/protocols_core.hpp>
#include <radioleader/runtime.hpp>
#include <radioleader/support.hpp>

#include <algorithm>
#include <cmath>
#include <memory>
#include <span>
#include <string_view>

namespace radioleader {

struct TradeoffParams {
    u64 N = 1;
    u64 n = 1;
    u64 k = 0;  // after clamping
    double epsilon = 0.5;
    double epsilon_tilde = 0.5;
    int regime = 1;  // 1: b = ceil(N^(1/k)); 2: b sized by n
    u64 b = 2;
    u64 K = 1;
    double C = kDefaultFamilyConstant;
    double C_T = 0;
    double C_E = 0;
    double T_pred = 0;
    double E_pred = 0;
    InnerElection inner = InnerElection::PairingCompact;
    std::shared_ptr<const PartitionFamily> family;
};

/// ceil(log2 log2 N), with 0 for N <= 2.
inline u64 min_energy_parameter(u64 N) { return N <= 2 ? 0 : ceil_log2(ceil_log2(N)); }

/// Largest accepted k; larger values are clamped.
inline u64 max_energy_parameter(u64 N) { return 2 * ceil_log2(N); }

namespace detail {

/// Smallest integer b >= 1 with b^k >= N.
inline u64 integer_root_ceil(u64 N, u64 k)
{
    if (k == 0 || N <= 1) return 1;
    auto reaches = [&](u64 b) {
        long double p = 1;
        for (u64 i = 0; i < k; ++i) {
            p *= static_cast<long double>(b);
            if (p >= static_cast<long double>(N)) return true;
        }
        return false;
    };
    u64 guess = static_cast<u64>(std::ceil(std::pow(static_cast<double>(N), 1.0 / static_cast<double>(k))));
    guess = std::max<u64>(guess, 1);
    while (guess > 1 && reaches(guess - 1)) --guess;
    while (!reaches(guess)) ++guess;
    return guess;
}

/// Smallest integer b >= 1 with n <= b^(1 - eps).
inline u64 smallest_fitting_width(u64 n, double eps)
{
    u64 guess = static_cast<u64>(std::ceil(std::pow(static_cast<double>(n), 1.0 / (1.0 - eps))));
    guess = std::max<u64>(guess, 1);
    while (guess > 1 && fits_family(n, guess - 1, eps)) --guess;
    while (!fits_family(n, guess, eps)) ++guess;
    return guess;
}

}  // namespace detail

/// Partition width and family size for ID space N, device bound n, energy
/// parameter k and slack epsilon.
inline TradeoffParams choose_params(u64 N, u64 n, u64 k, double epsilon, double C = kDefaultFamilyConstant)
{
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidParams("epsilon must lie in (0, 1)");
    if (N < 1 || n < 1) throw InvalidParams("N and n must be >= 1");
    if (k < min_energy_parameter(N)) {
        throw InvalidParams("k must be >= ceil(log2 log2 N) = " + std::to_string(min_energy_parameter(N)));
    }
    TradeoffParams p;
    p.N = N;
    p.n = n;
    p.k = std::max<u64>(1, std::min(k, max_energy_parameter(N)));
    p.epsilon = epsilon;
    p.epsilon_tilde = epsilon;
    p.C = C;
    const double root = std::pow(static_cast<double>(N), 1.0 / static_cast<double>(p.k));
    if (static_cast<double>(n) <= std::pow(root, 1.0 - epsilon) * (1.0 + 1e-12) + 1e-9) {
        p.regime = 1;
        p.b = detail::integer_root_ceil(N, p.k);
    } else {
        p.regime = 2;
        p.b = detail::smallest_fitting_width(n, epsilon);
    }
    p.b = std::max<u64>(p.b, 2);
    p.K = family_size(N, p.b, p.epsilon_tilde, C);
    const double logbN = std::max(1.0, std::log(static_cast<double>(N)) / std::log(static_cast<double>(p.b)));
    p.C_T = 2.0 * (C / p.epsilon_tilde + 1.0);
    p.C_E = p.C_T + 3.0;
    p.T_pred = p.C_T * static_cast<double>(p.b) * logbN;
    p.E_pred = p.C_E * (logbN + std::log2(static_cast<double>(p.b)));
    return p;
}

/// choose_params plus a verified family for |V| <= n.
inline TradeoffParams prepare_tradeoff(u64 N, u64 n, u64 k, double epsilon, u64 seed, const GenerateOptions& gen = {})
{
    TradeoffParams p = choose_params(N, n, k, epsilon, gen.C);
    p.family = std::make_shared<const PartitionFamily>(generate_family(N, p.b, p.epsilon_tilde, n, seed, gen));
    return p;
}

// ---------------------------------------------------------------------------

class PartitionTradeoffElection {
public:
    PartitionTradeoffElection(DeviceId id, const ProtocolConfig& cfg)
        : id_(id), family_(require_family(cfg)), kind_(inner_kind(cfg)), iter_len_(iteration_length(cfg))
    {
        if (!has_sender_feedback(cfg.model)) throw InvalidParams("partition election needs sender feedback");
        if (!InnerPhase::supported(kind_, cfg.model)) throw InvalidParams("inner election unsupported in this model");
        if (family_->N != cfg.N) throw InvalidParams("family N does not match config N");
    }

    static const std::shared_ptr<const PartitionFamily>& require_family(const ProtocolConfig& cfg)
    {
        if (!cfg.family) throw InvalidParams("partition election needs a partition family");
        return cfg.family;
    }

    static InnerElection inner_kind(const ProtocolConfig& cfg)
    {
        return cfg.inner_election.value_or(InnerElection::PairingCompact);
    }

    static Round iteration_length(const ProtocolConfig& cfg)
    {
        const u64 b = require_family(cfg)->b;
        return b + InnerPhase::length(inner_kind(cfg), b) + 1;
    }

    static Round schedule_length(const ProtocolConfig& cfg) { return require_family(cfg)->K * iteration_length(cfg); }

    static u64 energy_budget(const ProtocolConfig& cfg)
    {
        const auto& f = *require_family(cfg);
        return 2 * f.K + InnerPhase::energy_budget(inner_kind(cfg), f.b);
    }

    Round next_wake(Round from)
    {
        for (;;) {
            if (stage_ == Stage::Done || iter_ >= family_->K) return kNever;
            const Round base = iter_ * iter_len_;
            switch (stage_) {
            case Stage::Mark: {
                Round slot = base + family_->part(iter_, id_.value);
                return slot >= from ? slot : kNever;
            }
            case Stage::Inner: {
                Round w = inner_.next_wake(from);
                if (w != kNever) return w;
                winner_ = inner_.won();
                stage_ = Stage::Announce;
                continue;
            }
            case Stage::Announce: {
                Round slot = base + iter_len_ - 1;
                return slot >= from ? slot : kNever;
            }
            case Stage::Done: return kNever;
            }
        }
    }

    Action act(Round r) const
    {
        switch (stage_) {
        case Stage::Mark: return Action::transmit(static_cast<std::int64_t>(id_.value));
        case Stage::Inner: return inner_.act(r);
        case Stage::Announce:
            return Announcement{r}.act(winner_, static_cast<std::int64_t>(id_.value));
        case Stage::Done: break;
        }
        return Action::idle();
    }

    void observe(Round r, const Feedback& fb)
    {
        switch (stage_) {
        case Stage::Mark: {
            const bool own = fb.received() && as_integer(fb.message) == static_cast<std::int64_t>(id_.value);
            if (own) {
                marked_ = true;
                const u64 part = family_->part(iter_, id_.value);
                inner_ = InnerPhase(kind_, iter_ * iter_len_ + family_->b, family_->b, part + 1);
                stage_ = Stage::Inner;
            } else {
                stage_ = Stage::Announce;
            }
            break;
        }
        case Stage::Inner: inner_.observe(r, fb); break;
        case Stage::Announce:
            if (fb.received()) {
                leader_ = winner_;
                stage_ = Stage::Done;
            } else {
                ++iter_;
                winner_ = false;
                stage_ = Stage::Mark;
            }
            break;
        case Stage::Done: break;
        }
    }

    Verdict verdict() const { return {leader_ ? Role::Leader : Role::NonLeader, std::nullopt}; }

    /// True once this device was alone in its part in some iteration.
    bool ever_marked() const noexcept { return marked_; }

    friend bool operator==(const PartitionTradeoffElection&, const PartitionTradeoffElection&) = default;

private:
    enum class Stage : std::uint8_t { Mark, Inner, Announce, Done };

    DeviceId id_;
    std::shared_ptr<const PartitionFamily> family_;
    InnerElection kind_ = InnerElection::PairingCompact;
    Round iter_len_ = 0;
    u64 iter_ = 0;
    Stage stage_ = Stage::Mark;
    InnerPhase inner_;
    bool winner_ = false;
    bool leader_ = false;
    bool marked_ = false;
};

/// Runs the partition election; throws NoLeader when no iteration isolates a device.
inline RunReport partition_tradeoff_election(std::span<const DeviceId> V, const ProtocolConfig& cfg,
                                             const ExecuteOptions& opts = {})
{
    RunReport rep = execute<PartitionTradeoffElection>(V, cfg, opts);
    if (!rep.strict_success) throw NoLeader("no partition isolated a device");
    return rep;
}

inline ProtocolConfig tradeoff_config(const TradeoffParams& p, CdModel model = CdModel::SenderCD)
{
    ProtocolConfig cfg;
    cfg.model = model;
    cfg.N = p.N;
    cfg.known_upper_n = p.n;
    cfg.k = p.k;
    cfg.epsilon = p.epsilon;
    cfg.b = p.b;
    cfg.inner_election = p.inner;
    cfg.family = p.family;
    if (p.family) cfg.seed = p.family->seed;
    return cfg;
}

// ---------------------------------------------------------------------------
// StrongCD dispatch between the halving and the partition trade-offs.

enum class StrongChoice : std::uint8_t { Halving, Partition };

inline std::string_view to_string(StrongChoice c) noexcept
{
    return c == StrongChoice::Halving ? "halving" : "partition";
}

/// Picks the protocol with the smaller schedule for the given parameters.
inline StrongChoice choose_strong_cd(u64 N, u64 n, u64 k, double epsilon)
{
    ProtocolConfig h;
    h.model = CdModel::StrongCD;
    h.N = N;
    h.k = std::max<u64>(1, k);
    const Round halving = HalvingTradeoffElection::schedule_length(h);
    const TradeoffParams p = choose_params(N, n, k, epsilon);
    const Round partition = p.K * (p.b + InnerPhase::length(p.inner, p.b) + 1);
    return halving <= partition ? StrongChoice::Halving : StrongChoice::Partition;
}

}  // namespace radioleader
