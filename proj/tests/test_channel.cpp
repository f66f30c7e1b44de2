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


#include <radioleader/channel.hpp>

#include <catch_amalgamated.hpp>

#include <vector>

using namespace radioleader;

namespace {

// Feedback written out from the model definitions, independent of resolve_slot.
Feedback table_feedback(CdModel m, ActionKind role, int transmitters, std::int64_t payload)
{
    if (role == ActionKind::Idle) return Feedback::none();
    const bool strong = m == CdModel::StrongCD;
    const bool sender = m == CdModel::SenderCD;
    const bool receiver = m == CdModel::ReceiverCD;
    if (role == ActionKind::Listen) {
        if (transmitters == 0) return Feedback::silence();
        if (transmitters == 1) return Feedback::received(payload);
        return (strong || receiver) ? Feedback::collision() : Feedback::silence();
    }
    if (!(strong || sender)) return Feedback::none();
    if (transmitters == 1) return Feedback::received(payload);
    return strong ? Feedback::collision() : Feedback::silence();
}

Feedback coarsen(CdModel m, ActionKind role, const Feedback& strong_fb)
{
    if (role == ActionKind::Transmit && !has_sender_feedback(m)) return Feedback::none();
    if (strong_fb.kind == FeedbackKind::Collision && (m == CdModel::SenderCD || m == CdModel::NoCD)) {
        return Feedback::silence();
    }
    return strong_fb;
}

}  // namespace

TEST_CASE("single listener hears silence", "[channel]")
{
    const Action a[] = {Action::listen()};
    auto out = resolve_slot(CdModel::StrongCD, a);
    CHECK(out.feedback[0] == Feedback::silence());
    CHECK_FALSE(out.delivered);
}

TEST_CASE("SenderCD collision is silence for everybody", "[channel]")
{
    const Action a[] = {Action::transmit(std::int64_t{1}), Action::transmit(std::int64_t{2}), Action::listen()};
    auto out = resolve_slot(CdModel::SenderCD, a);
    for (const auto& fb : out.feedback) CHECK(fb == Feedback::silence());
    CHECK(out.transmitter_count == 2);
}

TEST_CASE("NoCD unique transmitter reaches the listener only", "[channel]")
{
    const Action a[] = {Action::transmit(std::int64_t{7}), Action::listen()};
    auto out = resolve_slot(CdModel::NoCD, a);
    CHECK(out.feedback[0] == Feedback::none());
    CHECK(out.feedback[1] == Feedback::received(std::int64_t{7}));
    REQUIRE(out.delivered);
    CHECK(as_integer(*out.delivered) == 7);
}

TEST_CASE("StrongCD transmitters detect a collision", "[channel]")
{
    const Action a[] = {Action::transmit(std::int64_t{1}), Action::transmit(std::int64_t{2})};
    auto out = resolve_slot(CdModel::StrongCD, a);
    CHECK(out.feedback[0] == Feedback::collision());
    CHECK(out.feedback[1] == Feedback::collision());
}

TEST_CASE("resolve_slot matches the feedback table for up to three transmitters", "[channel][property]")
{
    for (CdModel m : kAllModels) {
        for (int tx = 0; tx <= 3; ++tx) {
            for (int rx = 0; rx <= 2; ++rx) {
                std::vector<Action> actions;
                for (int i = 0; i < tx; ++i) actions.push_back(Action::transmit(std::int64_t{40 + i}));
                for (int i = 0; i < rx; ++i) actions.push_back(Action::listen());
                actions.push_back(Action::idle());
                auto out = resolve_slot(m, actions);
                auto strong = resolve_slot(CdModel::StrongCD, actions);
                CHECK(out.transmitter_count == static_cast<std::size_t>(tx));
                CHECK(out.listener_count == static_cast<std::size_t>(rx));
                CHECK(out.delivered.has_value() == (tx == 1));
                for (std::size_t i = 0; i < actions.size(); ++i) {
                    const auto role = actions[i].kind;
                    CHECK(out.feedback[i] == table_feedback(m, role, tx, 40));
                    CHECK(out.feedback[i] == coarsen(m, role, strong.feedback[i]));
                    if (m == CdModel::SenderCD || m == CdModel::NoCD) {
                        CHECK(out.feedback[i].kind != FeedbackKind::Collision);
                    }
                }
            }
        }
    }
}

TEST_CASE("model order", "[channel]")
{
    CHECK(strictly_stronger(CdModel::StrongCD, CdModel::SenderCD));
    CHECK(strictly_stronger(CdModel::StrongCD, CdModel::ReceiverCD));
    CHECK(strictly_stronger(CdModel::ReceiverCD, CdModel::NoCD));
    CHECK(strictly_stronger(CdModel::SenderCD, CdModel::NoCD));
    CHECK_FALSE(strictly_stronger(CdModel::SenderCD, CdModel::ReceiverCD));
    CHECK_FALSE(strictly_stronger(CdModel::ReceiverCD, CdModel::SenderCD));
    for (CdModel m : kAllModels) {
        CHECK_FALSE(strictly_stronger(m, m));
        CHECK(parse_model(to_string(m)) == m);
    }
    CHECK_THROWS(parse_model("FullCD"));
}

TEST_CASE("messages compare by value", "[channel]")
{
    CHECK(Message{IdList{1, 2}} == Message{IdList{1, 2}});
    CHECK(Message{std::int64_t{3}} != Message{IdList{3}});
    CHECK_FALSE(as_integer(Message{Token{}}));
}
