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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace radioleader {

// Collision-detection model of the shared channel.
//
//   StrongCD    transmitters and listeners hear {silence, collision, message}
//   SenderCD    transmitters and listeners hear {silence, message}
//   ReceiverCD  listeners hear {silence, collision, message}; transmitters nothing
//   NoCD        listeners hear {silence, message}; transmitters nothing
enum class CdModel : std::uint8_t { StrongCD, SenderCD, ReceiverCD, NoCD };

inline constexpr CdModel kAllModels[] = {CdModel::StrongCD, CdModel::SenderCD,
                                         CdModel::ReceiverCD, CdModel::NoCD};

/// True when a transmitter can hear the channel in the same slot.
constexpr bool has_sender_feedback(CdModel m) noexcept
{
    return m == CdModel::StrongCD || m == CdModel::SenderCD;
}

/// True when listeners can tell a collision apart from silence.
constexpr bool has_receiver_cd(CdModel m) noexcept
{
    return m == CdModel::StrongCD || m == CdModel::ReceiverCD;
}

/// Partial order on models by capability. SenderCD and ReceiverCD are
/// incomparable; StrongCD dominates everything, NoCD is dominated by everything.
constexpr bool strictly_stronger(CdModel a, CdModel b) noexcept
{
    if (a == b) return false;
    bool sender_ok = has_sender_feedback(a) || !has_sender_feedback(b);
    bool receiver_ok = has_receiver_cd(a) || !has_receiver_cd(b);
    return sender_ok && receiver_ok;
}

inline std::string_view to_string(CdModel m) noexcept
{
    switch (m) {
    case CdModel::StrongCD: return "StrongCD";
    case CdModel::SenderCD: return "SenderCD";
    case CdModel::ReceiverCD: return "ReceiverCD";
    case CdModel::NoCD: return "NoCD";
    }
    return "?";
}

inline CdModel parse_model(std::string_view s)
{
    for (CdModel m : kAllModels) {
        if (to_string(m) == s) return m;
    }
    if (s == "strong") return CdModel::StrongCD;
    if (s == "sender") return CdModel::SenderCD;
    if (s == "receiver") return CdModel::ReceiverCD;
    if (s == "nocd" || s == "no") return CdModel::NoCD;
    throw std::invalid_argument("unknown collision-detection model: " + std::string(s));
}

// ---------------------------------------------------------------------------
// Messages

/// Content-free payload ("dummy message").
struct Token {
    friend constexpr bool operator==(Token, Token) noexcept = default;
};

using IdList = std::vector<std::int64_t>;

/// Unbounded structured payload: a dummy token, one integer, or an integer list.
using Message = std::variant<Token, std::int64_t, IdList>;

inline std::optional<std::int64_t> as_integer(const Message& m)
{
    if (const auto* v = std::get_if<std::int64_t>(&m)) return *v;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Actions and feedback

enum class ActionKind : std::uint8_t { Idle, Listen, Transmit };

struct Action {
    ActionKind kind = ActionKind::Idle;
    Message message{};

    static Action idle() { return {}; }
    static Action listen() { return {ActionKind::Listen, Token{}}; }
    static Action transmit(Message m) { return {ActionKind::Transmit, std::move(m)}; }

    bool is_idle() const noexcept { return kind == ActionKind::Idle; }

    friend bool operator==(const Action&, const Action&) = default;
};

enum class FeedbackKind : std::uint8_t { None, Silence, Collision, Received };

struct Feedback {
    FeedbackKind kind = FeedbackKind::None;
    Message message{};

    static Feedback none() { return {}; }
    static Feedback silence() { return {FeedbackKind::Silence, Token{}}; }
    static Feedback collision() { return {FeedbackKind::Collision, Token{}}; }
    static Feedback received(Message m) { return {FeedbackKind::Received, std::move(m)}; }

    bool received() const noexcept { return kind == FeedbackKind::Received; }

    friend bool operator==(const Feedback&, const Feedback&) = default;
};

/// Result of one channel slot. `feedback[i]` belongs to the device that
/// issued `actions[i]`.
struct SlotOutcome {
    std::vector<Feedback> feedback;
    std::size_t transmitter_count = 0;
    std::size_t listener_count = 0;
    std::optional<Message> delivered;
};

/// Resolve one synchronous slot under `model`.
inline SlotOutcome resolve_slot(CdModel model, std::span<const Action> actions)
{
    SlotOutcome out;
    const Message* sole = nullptr;
    for (const Action& a : actions) {
        if (a.kind == ActionKind::Transmit) {
            ++out.transmitter_count;
            sole = &a.message;
        } else if (a.kind == ActionKind::Listen) {
            ++out.listener_count;
        }
    }
    if (out.transmitter_count == 1) out.delivered = *sole;

    Feedback on_listen;
    Feedback on_transmit;
    switch (out.transmitter_count) {
    case 0:
        on_listen = Feedback::silence();
        break;
    case 1:
        on_listen = Feedback::received(*out.delivered);
        if (has_sender_feedback(model)) on_transmit = on_listen;
        break;
    default:
        on_listen = has_receiver_cd(model) ? Feedback::collision() : Feedback::silence();
        if (model == CdModel::StrongCD) {
            on_transmit = Feedback::collision();
        } else if (model == CdModel::SenderCD) {
            on_transmit = Feedback::silence();
        }
        break;
    }

    out.feedback.reserve(actions.size());
    for (const Action& a : actions) {
        switch (a.kind) {
        case ActionKind::Idle: out.feedback.push_back(Feedback::none()); break;
        case ActionKind::Listen: out.feedback.push_back(on_listen); break;
        case ActionKind::Transmit: out.feedback.push_back(on_transmit); break;
        }
    }
    return out;
}

}  // namespace radioleader
