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

// Round-synchronous executor for device programs.
//
// A device program is a deterministic automaton. The executor asks every
// device for the next round in which it may be non-idle (`next_wake`), so
// rounds in which every device sleeps cost nothing to simulate. Programs
// are copyable and equality-comparable; the lower-bound checkers rely on
// both to fork a device at a feedback branch and to merge identical states.

#include <radioleader/channel.hpp>
#include <radioleader/support.hpp>

#include <algorithm>
#include <charconv>
#include <compare>
#include <concepts>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace radioleader {

struct PartitionFamily;

struct DeviceId {
    u64 value = 0;

    friend constexpr auto operator<=>(DeviceId, DeviceId) = default;
};

/// Pluggable election used inside the composite protocols.
enum class InnerElection : std::uint8_t {
    BinarySearch,    // StrongCD / ReceiverCD only
    Pairing,         // ceil(M/2) slots per level
    PairingCompact,  // skips the slot of an unpaired top ID
};

inline std::string_view to_string(InnerElection e) noexcept
{
    switch (e) {
    case InnerElection::BinarySearch: return "binary_search";
    case InnerElection::Pairing: return "pairing";
    case InnerElection::PairingCompact: return "pairing_compact";
    }
    return "?";
}

/// Global knowledge shared by every device of one execution.
struct ProtocolConfig {
    CdModel model = CdModel::NoCD;
    u64 N = 1;
    std::optional<u64> known_n;
    std::optional<u64> known_upper_n;
    std::optional<u64> k;
    std::optional<double> epsilon;
    std::optional<u64> b;
    u64 seed = 0;
    std::optional<InnerElection> inner_election;
    std::shared_ptr<const PartitionFamily> family;

    void validate() const
    {
        if (N < 1) throw InvalidParams("N must be >= 1");
        if (epsilon && !(*epsilon > 0.0 && *epsilon < 1.0)) {
            throw InvalidParams("epsilon must lie in (0, 1)");
        }
        if (known_n && (*known_n < 1 || *known_n > N)) throw InvalidParams("known_n outside [1, N]");
        if (known_upper_n && *known_upper_n < 1) throw InvalidParams("known_upper_n must be >= 1");
        if (b && *b < 1) throw InvalidParams("b must be >= 1");
    }
};

enum class Role : std::uint8_t { NonLeader, Leader };

struct Verdict {
    Role role = Role::NonLeader;
    std::optional<u64> rank;

    bool is_leader() const noexcept { return role == Role::Leader; }

    friend bool operator==(const Verdict&, const Verdict&) = default;
};

template <class P>
concept DeviceProgram =
    std::copy_constructible<P> && std::equality_comparable<P> &&
    std::constructible_from<P, DeviceId, const ProtocolConfig&> &&
    requires(P p, const P cp, Round r, const Feedback& fb, const ProtocolConfig& cfg) {
        { P::schedule_length(cfg) } -> std::convertible_to<Round>;
        { p.next_wake(r) } -> std::convertible_to<Round>;
        { p.act(r) } -> std::convertible_to<Action>;
        p.observe(r, fb);
        { cp.verdict() } -> std::convertible_to<Verdict>;
    };

// ---------------------------------------------------------------------------
// Transcript

struct TranscriptEntry {
    Round round = 0;
    DeviceId id;
    Action action;
    Feedback feedback;

    friend bool operator==(const TranscriptEntry&, const TranscriptEntry&) = default;
};

/// Record of an execution. Only non-idle (round, device) pairs are stored;
/// every absent pair is an idle device with feedback None.
struct Transcript {
    CdModel model = CdModel::NoCD;
    Round round_count = 0;
    std::vector<DeviceId> devices;
    std::vector<TranscriptEntry> entries;  // sorted by (round, id)
};

struct EnergyLedger {
    std::vector<u64> energy;  // aligned with RunReport::devices
    u64 max_energy = 0;
    Round rounds = 0;         // declared schedule length
    Round active_rounds = 0;  // last non-idle round + 1
};

struct RunReport {
    CdModel model = CdModel::NoCD;
    u64 N = 0;
    std::vector<DeviceId> devices;  // ascending
    std::vector<Verdict> verdicts;  // aligned with devices
    EnergyLedger ledger;
    bool strict_success = false;
    bool easy_success = false;
    std::uint64_t transcript_hash = kFnvOffset;
    std::optional<Transcript> transcript;

    std::optional<DeviceId> leader() const
    {
        std::optional<DeviceId> out;
        for (std::size_t i = 0; i < devices.size(); ++i) {
            if (verdicts[i].is_leader()) {
                if (out) return std::nullopt;
                out = devices[i];
            }
        }
        return out;
    }

    const Verdict& verdict_of(DeviceId id) const
    {
        auto it = std::lower_bound(devices.begin(), devices.end(), id);
        if (it == devices.end() || *it != id) throw InvalidParams("device not in report");
        return verdicts[static_cast<std::size_t>(it - devices.begin())];
    }

    u64 energy_of(DeviceId id) const
    {
        auto it = std::lower_bound(devices.begin(), devices.end(), id);
        if (it == devices.end() || *it != id) throw InvalidParams("device not in report");
        return ledger.energy[static_cast<std::size_t>(it - devices.begin())];
    }
};

// ---------------------------------------------------------------------------
// Line format:  round<TAB>id<TAB>action<TAB>payload<TAB>feedback
//   action   I | L | T
//   payload  decimal integer | comma-separated integers | -   (token, or not transmitting)
//   feedback - | S | C | R:<payload>

namespace detail {

inline void append_u64(std::string& out, u64 v)
{
    char buf[24];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, res.ptr);
}

inline void append_i64(std::string& out, std::int64_t v)
{
    char buf[24];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, res.ptr);
}

inline void append_message(std::string& out, const Message& m)
{
    if (std::holds_alternative<Token>(m)) {
        out.push_back('-');
    } else if (const auto* v = std::get_if<std::int64_t>(&m)) {
        append_i64(out, *v);
    } else {
        const auto& list = std::get<IdList>(m);
        for (std::size_t i = 0; i < list.size(); ++i) {
            if (i) out.push_back(',');
            append_i64(out, list[i]);
        }
    }
}

}  // namespace detail

inline void format_entry(std::string& out, const TranscriptEntry& e)
{
    detail::append_u64(out, e.round);
    out.push_back('\t');
    detail::append_u64(out, e.id.value);
    out.push_back('\t');
    switch (e.action.kind) {
    case ActionKind::Idle: out.append("I\t-"); break;
    case ActionKind::Listen: out.append("L\t-"); break;
    case ActionKind::Transmit:
        out.append("T\t");
        detail::append_message(out, e.action.message);
        break;
    }
    out.push_back('\t');
    switch (e.feedback.kind) {
    case FeedbackKind::None: out.push_back('-'); break;
    case FeedbackKind::Silence: out.push_back('S'); break;
    case FeedbackKind::Collision: out.push_back('C'); break;
    case FeedbackKind::Received:
        out.append("R:");
        detail::append_message(out, e.feedback.message);
        break;
    }
    out.push_back('\n');
}

/// FNV-1a over the serialized transcript; equals `transcript_hash` of the run.
inline std::uint64_t hash_transcript(const Transcript& t)
{
    std::uint64_t h = kFnvOffset;
    std::string line;
    for (const auto& e : t.entries) {
        line.clear();
        format_entry(line, e);
        h = fnv1a(h, line);
    }
    return h;
}

inline void write_transcript(std::ostream& os, const Transcript& t)
{
    std::string line;
    for (const auto& e : t.entries) {
        line.clear();
        format_entry(line, e);
        os << line;
    }
}

// ---------------------------------------------------------------------------
// Success criteria

/// Exactly one Leader, everybody else NonLeader.
inline bool check_strict_success(std::span<const Verdict> verdicts)
{
    return std::count_if(verdicts.begin(), verdicts.end(),
                         [](const Verdict& v) { return v.is_leader(); }) == 1;
}

inline bool check_strict_success(const RunReport& report) { return check_strict_success(report.verdicts); }

/// Some round has exactly one transmitter and at least one listener.
inline bool check_easy_success(const Transcript& t)
{
    std::size_t i = 0;
    while (i < t.entries.size()) {
        Round r = t.entries[i].round;
        std::size_t tx = 0, rx = 0;
        for (; i < t.entries.size() && t.entries[i].round == r; ++i) {
            if (t.entries[i].action.kind == ActionKind::Transmit) ++tx;
            if (t.entries[i].action.kind == ActionKind::Listen) ++rx;
        }
        if (tx == 1 && rx >= 1) return true;
    }
    return false;
}

/// Energy per device counted directly from the transcript.
inline std::vector<u64> recount_energy(const Transcript& t)
{
    std::vector<u64> out(t.devices.size(), 0);
    for (const auto& e : t.entries) {
        if (e.action.is_idle()) continue;
        auto it = std::lower_bound(t.devices.begin(), t.devices.end(), e.id);
        ++out[static_cast<std::size_t>(it - t.devices.begin())];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Execution

struct ExecuteOptions {
    bool record_transcript = false;
};

namespace detail {

inline std::vector<DeviceId> normalize_devices(std::span<const DeviceId> V, u64 N)
{
    std::vector<DeviceId> ids(V.begin(), V.end());
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
        throw InvalidParams("device IDs must be distinct");
    }
    for (DeviceId id : ids) {
        if (id.value < 1 || id.value > N) throw InvalidParams("device ID outside [1, N]");
    }
    return ids;
}

}  // namespace detail

template <DeviceProgram P>
RunReport execute(std::span<const DeviceId> V, const ProtocolConfig& cfg, const ExecuteOptions& opts = {})
{
    cfg.validate();
    RunReport report;
    report.model = cfg.model;
    report.N = cfg.N;
    report.devices = detail::normalize_devices(V, cfg.N);
    const auto& ids = report.devices;
    const Round length = P::schedule_length(cfg);

    std::vector<P> devices;
    devices.reserve(ids.size());
    for (DeviceId id : ids) devices.emplace_back(id, cfg);

    using Wake = std::pair<Round, std::uint32_t>;
    std::priority_queue<Wake, std::vector<Wake>, std::greater<>> calendar;
    auto schedule = [&](std::uint32_t idx, Round from) {
        Round w = devices[idx].next_wake(from);
        if (w == kNever) return;
        if (w < from) throw ScheduleOverrun("program woke in the past");
        if (w >= length) {
            throw ScheduleOverrun("program requested round " + std::to_string(w) +
                                  " outside its schedule of " + std::to_string(length));
        }
        calendar.emplace(w, idx);
    };
    for (std::uint32_t i = 0; i < devices.size(); ++i) schedule(i, 0);

    std::vector<u64> energy(ids.size(), 0);
    std::vector<std::uint32_t> batch;
    std::vector<std::uint32_t> active;
    std::vector<Action> actions;
    std::string line;
    std::uint64_t hash = kFnvOffset;
    bool easy = false;
    Round last_active = 0;
    std::optional<Transcript> transcript;
    if (opts.record_transcript) {
        transcript.emplace();
        transcript->model = cfg.model;
        transcript->round_count = length;
        transcript->devices = ids;
    }

    while (!calendar.empty()) {
        const Round r = calendar.top().first;
        batch.clear();
        while (!calendar.empty() && calendar.top().first == r) {
            batch.push_back(calendar.top().second);
            calendar.pop();
        }
        active.clear();
        actions.clear();
        for (std::uint32_t idx : batch) {
            Action a = devices[idx].act(r);
            if (a.is_idle()) continue;
            active.push_back(idx);
            actions.push_back(std::move(a));
        }
        if (!active.empty()) {
            SlotOutcome outcome = resolve_slot(cfg.model, actions);
            if (outcome.transmitter_count == 1 && outcome.listener_count >= 1) easy = true;
            last_active = r + 1;
            for (std::size_t j = 0; j < active.size(); ++j) {
                const std::uint32_t idx = active[j];
                ++energy[idx];
                TranscriptEntry entry{r, ids[idx], std::move(actions[j]), std::move(outcome.feedback[j])};
                line.clear();
                format_entry(line, entry);
                hash = fnv1a(hash, line);
                devices[idx].observe(r, entry.feedback);
                if (transcript) transcript->entries.push_back(std::move(entry));
            }
        }
        for (std::uint32_t idx : batch) schedule(idx, r + 1);
    }

    report.verdicts.reserve(devices.size());
    for (const P& d : devices) report.verdicts.push_back(d.verdict());
    report.ledger.energy = std::move(energy);
    report.ledger.max_energy = report.ledger.energy.empty()
                                   ? 0
                                   : *std::max_element(report.ledger.energy.begin(), report.ledger.energy.end());
    report.ledger.rounds = length;
    report.ledger.active_rounds = last_active;
    report.strict_success = check_strict_success(report);
    report.easy_success = easy;
    report.transcript_hash = hash;
    report.transcript = std::move(transcript);
    return report;
}

template <DeviceProgram P>
RunReport execute(std::initializer_list<u64> V, const ProtocolConfig& cfg, const ExecuteOptions& opts = {})
{
    std::vector<DeviceId> ids;
    for (u64 v : V) ids.push_back(DeviceId{v});
    return execute<P>(ids, cfg, opts);
}

/// Runs twice and throws NonDeterminism if the transcripts differ.
template <DeviceProgram P>
RunReport execute_checked(std::span<const DeviceId> V, const ProtocolConfig& cfg, const ExecuteOptions& opts = {})
{
    RunReport first = execute<P>(V, cfg, opts);
    RunReport second = execute<P>(V, cfg, {});
    if (first.transcript_hash != second.transcript_hash || first.verdicts != second.verdicts) {
        throw NonDeterminism("replay diverged");
    }
    return first;
}

inline std::vector<DeviceId> to_devices(std::span<const u64> ids)
{
    std::vector<DeviceId> out;
    out.reserve(ids.size());
    for (u64 v : ids) out.push_back(DeviceId{v});
    return out;
}

}  // namespace radioleader
