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

// Families of partitions of [N] into b parts in which every small device set
// has a part containing exactly one of its members, plus the balls-into-bins
// estimate used to size them.

#include <radioleader/support.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

namespace radioleader {

inline constexpr double kDefaultFamilyConstant = 8.0;
inline constexpr u64 kDefaultExhaustiveBudget = 10'000'000;
inline constexpr u64 kDefaultSampledTrials = 100'000;
inline constexpr u64 kDefaultRetryCap = 16;

struct Certificate {
    enum class Kind : std::uint8_t { Unverified, Exhaustive, Sampled };

    Kind kind = Kind::Unverified;
    u64 n_max = 0;     // Exhaustive
    u64 trials = 0;    // Sampled, per subset size
    u64 failures = 0;  // Sampled

    bool passed() const noexcept { return kind != Kind::Unverified && failures == 0; }

    std::string to_string() const
    {
        switch (kind) {
        case Kind::Exhaustive: return "exhaustive:" + std::to_string(n_max);
        case Kind::Sampled: return "sampled:" + std::to_string(trials) + ":" + std::to_string(failures);
        case Kind::Unverified: break;
        }
        return "unverified";
    }

    static Certificate parse(const std::string& s)
    {
        Certificate c;
        if (s == "unverified") return c;
        auto num = [&](std::size_t from, std::size_t to) {
            u64 v = 0;
            auto res = std::from_chars(s.data() + from, s.data() + to, v);
            if (res.ec != std::errc{} || res.ptr != s.data() + to) throw InvalidParams("bad certificate: " + s);
            return v;
        };
        if (s.rfind("exhaustive:", 0) == 0) {
            c.kind = Kind::Exhaustive;
            c.n_max = num(11, s.size());
            return c;
        }
        if (s.rfind("sampled:", 0) == 0) {
            auto colon = s.find(':', 8);
            if (colon == std::string::npos) throw InvalidParams("bad certificate: " + s);
            c.kind = Kind::Sampled;
            c.trials = num(8, colon);
            c.failures = num(colon + 1, s.size());
            return c;
        }
        throw InvalidParams("bad certificate: " + s);
    }

    friend bool operator==(const Certificate&, const Certificate&) = default;
};

/// K partitions of [N] into b parts. Part indices are 0-based in memory and
/// 1-based in files.
struct PartitionFamily {
    u64 N = 1;
    u64 b = 2;
    u64 K = 0;
    double epsilon_tilde = 0.5;
    u64 n_max = 1;
    u64 seed = 0;  // seed that produced `parts` (base seed + retries)
    double C = kDefaultFamilyConstant;
    u64 retries = 0;
    Certificate verified;
    std::vector<std::uint32_t> parts;  // K * N entries, row i holds partition i

    /// 0-based part of ID x (1-based) in partition i (0-based).
    u64 part(u64 i, u64 x) const noexcept { return parts[i * N + (x - 1)]; }

    friend bool operator==(const PartitionFamily&, const PartitionFamily&) = default;
};

/// K = ceil(C / eps * log_b N), at least 1.
inline u64 family_size(u64 N, u64 b, double epsilon_tilde, double C = kDefaultFamilyConstant)
{
    if (b < 2) throw InvalidParams("family: b must be >= 2");
    if (!(epsilon_tilde > 0.0 && epsilon_tilde < 1.0)) throw InvalidParams("family: epsilon_tilde must lie in (0, 1)");
    const double raw = C / epsilon_tilde * std::log(static_cast<double>(N)) / std::log(static_cast<double>(b));
    const double k = std::ceil(raw - 1e-9);
    return std::max<u64>(1, static_cast<u64>(k));
}

/// True when n <= b^(1 - eps), with a small tolerance for exact powers.
inline bool fits_family(u64 n, u64 b, double epsilon_tilde)
{
    return static_cast<double>(n) <= std::pow(static_cast<double>(b), 1.0 - epsilon_tilde) * (1.0 + 1e-12) + 1e-9;
}

inline PartitionFamily draw_family(u64 N, u64 b, double epsilon_tilde, u64 n_max, u64 seed,
                                   double C = kDefaultFamilyConstant)
{
    PartitionFamily f;
    f.N = N;
    f.b = b;
    f.K = family_size(N, b, epsilon_tilde, C);
    f.epsilon_tilde = epsilon_tilde;
    f.n_max = n_max;
    f.seed = seed;
    f.C = C;
    f.parts.resize(f.K * N);
    SplitMix64 rng(seed);
    for (auto& p : f.parts) p = static_cast<std::uint32_t>(rng.below(b));
    return f;
}

// ---------------------------------------------------------------------------
// Verification

struct VerifyMode {
    enum class Kind : std::uint8_t { Auto, Exhaustive, Sampled };

    Kind kind = Kind::Auto;
    u64 trials = kDefaultSampledTrials;
    u64 rng_seed = 0;
    u64 exhaustive_budget = kDefaultExhaustiveBudget;

    static VerifyMode exhaustive() { return {Kind::Exhaustive}; }
    static VerifyMode sampled(u64 trials, u64 rng_seed) { return {Kind::Sampled, trials, rng_seed}; }
};

struct VerifyResult {
    Certificate certificate;
    std::optional<std::vector<u64>> counterexample;

    bool passed() const noexcept { return !counterexample && certificate.passed(); }
};

/// Number of subsets of [N] of size 1..n_max, saturating at `cap`.
inline u64 subsets_up_to(u64 N, u64 n_max, u64 cap)
{
    u64 total = 0;
    long double c = 1;
    for (u64 m = 1; m <= n_max && m <= N; ++m) {
        c = c * static_cast<long double>(N - m + 1) / static_cast<long double>(m);
        if (c + static_cast<long double>(total) > static_cast<long double>(cap)) return cap + 1;
        total += static_cast<u64>(std::llround(c));
    }
    return total;
}

/// True when some partition has a part holding exactly one member of V.
inline bool isolates(const PartitionFamily& f, const std::vector<u64>& V)
{
    for (u64 i = 0; i < f.K; ++i) {
        for (std::size_t a = 0; a < V.size(); ++a) {
            const u64 pa = f.part(i, V[a]);
            bool alone = true;
            for (std::size_t c = 0; c < V.size() && alone; ++c) {
                if (c != a && f.part(i, V[c]) == pa) alone = false;
            }
            if (alone) return true;
        }
    }
    return false;
}

namespace detail {

// Visits all m-subsets of [N] in lexicographic order until `fn` returns false.
template <class Fn>
bool for_each_subset(u64 N, u64 m, Fn&& fn)
{
    if (m == 0 || m > N) return true;
    std::vector<u64> v(m);
    for (u64 i = 0; i < m; ++i) v[i] = i + 1;
    for (;;) {
        if (!fn(v)) return false;
        u64 i = m;
        while (i > 0 && v[i - 1] == N - m + i) --i;
        if (i == 0) return true;
        ++v[i - 1];
        for (u64 j = i; j < m; ++j) v[j] = v[j - 1] + 1;
    }
}

// Floyd's algorithm: uniform m-subset of [N], returned sorted.
inline std::vector<u64> sample_subset(SplitMix64& rng, u64 N, u64 m)
{
    std::unordered_set<u64> chosen;
    std::vector<u64> out;
    out.reserve(m);
    for (u64 j = N - m + 1; j <= N; ++j) {
        u64 t = 1 + rng.below(j);
        u64 pick = chosen.count(t) ? j : t;
        chosen.insert(pick);
        out.push_back(pick);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace detail

inline VerifyResult verify_family(const PartitionFamily& f, VerifyMode mode = {})
{
    VerifyResult res;
    const u64 n_max = std::min(f.n_max, f.N);
    if (mode.kind == VerifyMode::Kind::Auto) {
        mode.kind = subsets_up_to(f.N, n_max, mode.exhaustive_budget) <= mode.exhaustive_budget
                        ? VerifyMode::Kind::Exhaustive
                        : VerifyMode::Kind::Sampled;
    }
    if (mode.kind == VerifyMode::Kind::Exhaustive) {
        if (subsets_up_to(f.N, n_max, mode.exhaustive_budget) > mode.exhaustive_budget) {
            throw InvalidParams("exhaustive verification exceeds the subset budget");
        }
        for (u64 m = 1; m <= n_max && !res.counterexample; ++m) {
            detail::for_each_subset(f.N, m, [&](const std::vector<u64>& V) {
                if (isolates(f, V)) return true;
                res.counterexample = V;
                return false;
            });
        }
        res.certificate.kind = Certificate::Kind::Exhaustive;
        res.certificate.n_max = f.n_max;
        if (res.counterexample) res.certificate.kind = Certificate::Kind::Unverified;
        return res;
    }
    SplitMix64 rng(mode.rng_seed);
    u64 failures = 0;
    for (u64 m = 1; m <= n_max; ++m) {
        for (u64 t = 0; t < mode.trials; ++t) {
            auto V = detail::sample_subset(rng, f.N, m);
            if (!isolates(f, V)) {
                ++failures;
                if (!res.counterexample) res.counterexample = std::move(V);
            }
        }
    }
    res.certificate.kind = Certificate::Kind::Sampled;
    res.certificate.trials = mode.trials;
    res.certificate.failures = failures;
    return res;
}

// ---------------------------------------------------------------------------
// Las Vegas generation

struct GenerateOptions {
    double C = kDefaultFamilyConstant;
    u64 retry_cap = kDefaultRetryCap;
    VerifyMode verify{};
};

/// Draws families with seeds seed, seed+1, ... until one verifies.
inline PartitionFamily generate_family(u64 N, u64 b, double epsilon_tilde, u64 n_max, u64 seed,
                                       const GenerateOptions& opts = {})
{
    if (N < 1) throw InvalidParams("family: N must be >= 1");
    if (b < 2) throw InvalidParams("family: b must be >= 2");
    if (n_max < 1) throw InvalidParams("family: n_max must be >= 1");
    if (!(epsilon_tilde > 0.0 && epsilon_tilde < 1.0)) throw InvalidParams("family: epsilon_tilde must lie in (0, 1)");
    if (!fits_family(n_max, b, epsilon_tilde)) throw InvalidParams("family: n_max exceeds b^(1 - epsilon_tilde)");
    if (b > std::numeric_limits<std::uint32_t>::max()) throw InvalidParams("family: b too large");
    for (u64 retry = 0; retry <= opts.retry_cap; ++retry) {
        PartitionFamily f = draw_family(N, b, epsilon_tilde, n_max, seed + retry, opts.C);
        f.retries = retry;
        VerifyMode mode = opts.verify;
        if (mode.kind != VerifyMode::Kind::Exhaustive) mode.rng_seed = opts.verify.rng_seed ^ (seed + retry);
        VerifyResult v = verify_family(f, mode);
        if (v.passed()) {
            f.verified = v.certificate;
            return f;
        }
    }
    throw RetriesExhausted("no verified family after " + std::to_string(opts.retry_cap + 1) + " draws");
}

// ---------------------------------------------------------------------------
// File format
//
//   # radioleader-family rng=splitmix64
//   N b K epsilon_tilde n_max seed C verifier
//   K lines of N space-separated 1-based part indices

namespace detail {

inline std::string format_double(double v)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace detail

inline void write_family(std::ostream& os, const PartitionFamily& f)
{
    os << "# radioleader-family rng=" << SplitMix64::kAlgorithm << '\n';
    os << f.N << ' ' << f.b << ' ' << f.K << ' ' << detail::format_double(f.epsilon_tilde) << ' ' << f.n_max << ' '
       << f.seed << ' ' << detail::format_double(f.C) << ' ' << f.verified.to_string() << '\n';
    std::string line;
    for (u64 i = 0; i < f.K; ++i) {
        line.clear();
        for (u64 x = 1; x <= f.N; ++x) {
            if (x > 1) line.push_back(' ');
            line += std::to_string(f.part(i, x) + 1);
        }
        line.push_back('\n');
        os << line;
    }
}

inline PartitionFamily read_family(std::istream& is)
{
    std::string line;
    auto next_line = [&]() -> bool {
        while (std::getline(is, line)) {
            if (!line.empty() && line[0] != '#') return true;
        }
        return false;
    };
    if (!next_line()) throw InvalidParams("family file: missing header");
    PartitionFamily f;
    std::istringstream hs(line);
    std::string verifier;
    if (!(hs >> f.N >> f.b >> f.K >> f.epsilon_tilde >> f.n_max >> f.seed >> f.C >> verifier)) {
        throw InvalidParams("family file: malformed header");
    }
    if (f.N < 1 || f.b < 1) throw InvalidParams("family file: bad N or b");
    f.verified = Certificate::parse(verifier);
    f.parts.reserve(f.K * f.N);
    for (u64 i = 0; i < f.K; ++i) {
        if (!next_line()) throw InvalidParams("family file: missing partition line");
        std::istringstream ls(line);
        u64 p = 0;
        u64 count = 0;
        while (ls >> p) {
            if (p < 1 || p > f.b) throw InvalidParams("family file: part index out of range");
            f.parts.push_back(static_cast<std::uint32_t>(p - 1));
            ++count;
        }
        if (count != f.N) throw InvalidParams("family file: partition line has wrong length");
    }
    return f;
}

// ---------------------------------------------------------------------------
// Balls into bins

struct BinsEstimate {
    double p_hat = 0;
    double sigma = 0;        // binomial standard error of p_hat
    double lower_bound = 0;  // 1 - (4n/b)^(n/2)
    u64 trials = 0;
};

/// Analytic lower bound on Pr[some bin holds exactly one ball].
inline double singleton_bound(u64 n, u64 b)
{
    return 1.0 - std::pow(4.0 * static_cast<double>(n) / static_cast<double>(b), static_cast<double>(n) / 2.0);
}

/// Monte Carlo estimate of Pr[some bin holds exactly one ball] for n balls in b bins.
inline BinsEstimate balls_in_bins_singleton_prob(u64 n, u64 b, u64 trials, u64 seed)
{
    if (n < 1) throw InvalidParams("bins: n must be >= 1");
    if (2 * n > b) throw InvalidParams("bins: need n <= b/2");
    if (trials < 10'000) throw InvalidParams("bins: need at least 10^4 trials");
    SplitMix64 rng(seed);
    std::vector<u64> bins(n);
    u64 hits = 0;
    for (u64 t = 0; t < trials; ++t) {
        for (auto& x : bins) x = rng.below(b);
        std::sort(bins.begin(), bins.end());
        bool single = false;
        for (std::size_t i = 0; i < n && !single; ++i) {
            bool left = i > 0 && bins[i - 1] == bins[i];
            bool right = i + 1 < n && bins[i + 1] == bins[i];
            single = !left && !right;
        }
        hits += single;
    }
    BinsEstimate e;
    e.trials = trials;
    e.p_hat = static_cast<double>(hits) / static_cast<double>(trials);
    e.sigma = std::sqrt(e.p_hat * (1.0 - e.p_hat) / static_cast<double>(trials));
    e.lower_bound = singleton_bound(n, b);
    return e;
}

}  // namespace radioleader
