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

#include <bit>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace radioleader {

using u64 = std::uint64_t;

/// Global slot index, counted from 0.
using Round = std::uint64_t;

inline constexpr Round kNever = std::numeric_limits<Round>::max();

// ---------------------------------------------------------------------------
// Errors

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidParams : Error {
    using Error::Error;
};

/// A program asked to act at or beyond its declared schedule length.
struct ScheduleOverrun : Error {
    using Error::Error;
};

/// Two replays of the same execution produced different transcripts.
struct NonDeterminism : Error {
    using Error::Error;
};

struct RetriesExhausted : Error {
    using Error::Error;
};

struct NoLeader : Error {
    using Error::Error;
};

/// A branch of the feedback tree spent more than the declared energy budget.
struct BudgetExceeded : Error {
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Integer helpers

constexpr u64 ceil_div(u64 a, u64 b) noexcept { return a == 0 ? 0 : 1 + (a - 1) / b; }

/// ceil(log2(x)) for x >= 1; 0 for x <= 1.
constexpr u64 ceil_log2(u64 x) noexcept
{
    return x <= 1 ? 0 : static_cast<u64>(std::bit_width(x - 1));
}

/// floor(log2(x)) for x >= 1.
constexpr u64 floor_log2(u64 x) noexcept
{
    return x == 0 ? 0 : static_cast<u64>(std::bit_width(x) - 1);
}

/// Smallest power of two >= x.
constexpr u64 next_pow2(u64 x) noexcept { return x <= 1 ? 1 : std::bit_ceil(x); }

/// 2^e saturated at `cap`.
constexpr u64 pow2_capped(u64 e, u64 cap) noexcept
{
    if (e >= 63) return cap;
    u64 v = u64{1} << e;
    return v < cap ? v : cap;
}

// ---------------------------------------------------------------------------
// SplitMix64: 64-bit state, 64-bit output (Steele, Lea, Flood 2014).
// Every seeded artifact in this library uses this generator; the identifier
// below is written into family files.

__extension__ using u128 = unsigned __int128;

class SplitMix64 {
public:
    static constexpr const char* kAlgorithm = "splitmix64";

    using result_type = std::uint64_t;

    explicit constexpr SplitMix64(std::uint64_t seed = 0) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept
    {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform value in [0, bound) by 128-bit multiply-shift.
    constexpr std::uint64_t below(std::uint64_t bound) noexcept
    {
        return static_cast<std::uint64_t>((static_cast<u128>((*this)()) * bound) >> 64);
    }

    /// Uniform double in [0, 1).
    constexpr double unit() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

// ---------------------------------------------------------------------------
// 64-bit FNV-1a

inline constexpr std::uint64_t kFnvOffset = 14695981039346656037ULL;
inline constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

constexpr std::uint64_t fnv1a(std::uint64_t h, std::string_view bytes) noexcept
{
    for (char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= kFnvPrime;
    }
    return h;
}

}  // namespace radioleader
