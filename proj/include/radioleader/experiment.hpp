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

// Batch experiments: device-set generators, protocol dispatch, CSV rows,
// per-(protocol, model, N) aggregates and lower-bound check reports.

#include <radioleader/channel.hpp>
#include <radioleader/dense.hpp>
#include <radioleader/lowerbound.hpp>
#include <radioleader/partitions.hpp>
#include <radioleader/protocols_core.hpp>
#include <radioleader/runtime.hpp>
#include <radioleader/support.hpp>
#include <radioleader/tradeoff.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace radioleader {

enum class ProtocolId : std::uint8_t {
    Pairing,
    BinarySearch,
    Halving,
    Partition,
    DenseSimple,
    DenseImproved,
    ExponentialSearch,
};

inline constexpr ProtocolId kAllProtocols[] = {
    ProtocolId::Pairing,     ProtocolId::BinarySearch,  ProtocolId::Halving,           ProtocolId::Partition,
    ProtocolId::DenseSimple, ProtocolId::DenseImproved, ProtocolId::ExponentialSearch,
};

inline std::string_view to_string(ProtocolId p) noexcept
{
    switch (p) {
    case ProtocolId::Pairing: return "pairing";
    case ProtocolId::BinarySearch: return "binary_search";
    case ProtocolId::Halving: return "halving";
    case ProtocolId::Partition: return "partition";
    case ProtocolId::DenseSimple: return "dense_simple";
    case ProtocolId::DenseImproved: return "dense_improved";
    case ProtocolId::ExponentialSearch: return "exponential_search";
    }
    return "?";
}

inline ProtocolId parse_protocol(std::string_view s)
{
    for (ProtocolId p : kAllProtocols) {
        if (s == to_string(p)) return p;
    }
    throw InvalidParams("unknown protocol '" + std::string(s) + "'");
}

/// Weakest model the protocol is designed for.
inline CdModel default_model(ProtocolId p) noexcept
{
    switch (p) {
    case ProtocolId::BinarySearch:
    case ProtocolId::Halving: return CdModel::StrongCD;
    case ProtocolId::Partition: return CdModel::SenderCD;
    default: return CdModel::NoCD;
    }
}

inline InnerElection parse_inner(std::string_view s)
{
    for (InnerElection e : {InnerElection::BinarySearch, InnerElection::Pairing, InnerElection::PairingCompact}) {
        if (s == to_string(e)) return e;
    }
    throw InvalidParams("unknown inner election '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------
// Experiment description

enum class SubsetMode : std::uint8_t { All, Random, File, Density };

inline constexpr u64 kAllSubsetsLimit = 20;

inline std::string_view to_string(SubsetMode m) noexcept
{
    switch (m) {
    case SubsetMode::All: return "all";
    case SubsetMode::Random: return "random";
    case SubsetMode::File: return "file";
    case SubsetMode::Density: return "density";
    }
    return "?";
}

inline SubsetMode parse_subset_mode(std::string_view s)
{
    for (SubsetMode m : {SubsetMode::All, SubsetMode::Random, SubsetMode::File, SubsetMode::Density}) {
        if (s == to_string(m)) return m;
    }
    throw InvalidParams("unknown subset mode '" + std::string(s) + "'");
}

struct ExperimentSpec {
    ProtocolId protocol = ProtocolId::Pairing;
    std::optional<CdModel> model;  // default_model(protocol) when absent
    std::vector<u64> Ns{8};
    std::optional<u64> n;  // device count (random) or bound (partition)
    std::optional<u64> k;
    std::optional<double> epsilon;
    std::optional<u64> b;
    double C = kDefaultFamilyConstant;
    u64 seed = 0;
    SubsetMode subsets = SubsetMode::Random;
    u64 trials = 100;
    std::vector<double> densities{1.0};
    std::vector<std::vector<u64>> explicit_sets;  // SubsetMode::File
    std::optional<InnerElection> inner;
    std::shared_ptr<const PartitionFamily> family;  // reused for every N it matches
    bool record_transcripts = false;

    CdModel effective_model() const noexcept { return model.value_or(default_model(protocol)); }

    void validate() const
    {
        if (Ns.empty()) throw InvalidParams("no N given");
        for (u64 N : Ns) {
            if (N < 1) throw InvalidParams("N must be >= 1");
            if (N > (u64{1} << 31)) throw InvalidParams("N too large");
            if (subsets == SubsetMode::All && N > kAllSubsetsLimit) {
                throw InvalidParams("--subsets all refuses N > " + std::to_string(kAllSubsetsLimit));
            }
        }
        if (epsilon && !(*epsilon > 0.0 && *epsilon < 1.0)) throw InvalidParams("epsilon must lie in (0, 1)");
        if (n && *n < 1) throw InvalidParams("n must be >= 1");
        if (b && *b < 1) throw InvalidParams("b must be >= 1");
        if (!(C > 0.0)) throw InvalidParams("C must be positive");
        if ((subsets == SubsetMode::Random || subsets == SubsetMode::Density) && trials < 1) {
            throw InvalidParams("trials must be >= 1");
        }
        if (subsets == SubsetMode::Density) {
            if (densities.empty()) throw InvalidParams("no density given");
            for (double c : densities) {
                if (!(c > 0.0 && c <= 1.0)) throw InvalidParams("density must lie in (0, 1]");
            }
        }
        if (subsets == SubsetMode::File && explicit_sets.empty()) throw InvalidParams("subset file is empty");
        const CdModel m = effective_model();
        switch (protocol) {
        case ProtocolId::BinarySearch:
            if (!has_receiver_cd(m)) throw InvalidParams("binary_search needs StrongCD or ReceiverCD");
            break;
        case ProtocolId::Halving:
            if (!has_receiver_cd(m)) throw InvalidParams("halving needs StrongCD or ReceiverCD");
            if (!k || *k < 1) throw InvalidParams("halving needs --k >= 1");
            break;
        case ProtocolId::Partition:
            if (!has_sender_feedback(m)) throw InvalidParams("partition needs StrongCD or SenderCD");
            if (!k) throw InvalidParams("partition needs --k");
            if (!n && !family) throw InvalidParams("partition needs --n or --family");
            break;
        default: break;
        }
        if (inner && !InnerPhase::supported(*inner, m)) throw InvalidParams("inner election unsupported in this model");
    }
};

/// Reads one device set per line; IDs separated by spaces or commas, '#' starts a comment.
inline std::vector<std::vector<u64>> read_subsets(std::istream& is)
{
    std::vector<std::vector<u64>> out;
    std::string line;
    while (std::getline(is, line)) {
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        std::vector<u64> V;
        std::string tok;
        while (ss >> tok) {
            u64 v = 0;
            auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
                throw InvalidParams("bad device ID '" + tok + "' in subset file");
            }
            V.push_back(v);
        }
        if (!V.empty()) out.push_back(std::move(V));
    }
    return out;
}

/// Random size in [1, hi], uniform in log scale.
inline u64 log_uniform_size(SplitMix64& rng, u64 hi)
{
    if (hi <= 1) return 1;
    const double x = rng.unit() * std::log(static_cast<double>(hi) + 1.0);
    const u64 m = static_cast<u64>(std::floor(std::exp(x)));
    return std::clamp<u64>(m, 1, hi);
}

inline std::vector<DeviceId> random_devices(SplitMix64& rng, u64 N, u64 m)
{
    std::vector<DeviceId> out;
    for (u64 v : detail::sample_subset(rng, N, std::min(m, N))) out.push_back(DeviceId{v});
    return out;
}

/// Device sets for one N, in generation order.
inline std::vector<std::vector<DeviceId>> generate_subsets(const ExperimentSpec& spec, u64 N)
{
    std::vector<std::vector<DeviceId>> out;
    SplitMix64 rng(spec.seed ^ (N * 0x9E3779B97F4A7C15ull));
    const bool bounded = spec.protocol == ProtocolId::Partition;
    const u64 cap = bounded ? std::min(N, spec.n.value_or(N)) : N;
    switch (spec.subsets) {
    case SubsetMode::All:
        for (u64 mask = 1; mask < (u64{1} << N); ++mask) {
            if (static_cast<u64>(__builtin_popcountll(mask)) > cap) continue;
            std::vector<DeviceId> V;
            for (u64 i = 0; i < N; ++i) {
                if ((mask >> i) & 1u) V.push_back(DeviceId{i + 1});
            }
            out.push_back(std::move(V));
        }
        break;
    case SubsetMode::Random:
        for (u64 t = 0; t < spec.trials; ++t) {
            u64 m = (!bounded && spec.n) ? std::min(*spec.n, N) : log_uniform_size(rng, cap);
            out.push_back(random_devices(rng, N, m));
        }
        break;
    case SubsetMode::Density:
        for (double c : spec.densities) {
            const u64 m = std::clamp<u64>(static_cast<u64>(std::llround(c * static_cast<double>(N))), 1, cap);
            for (u64 t = 0; t < spec.trials; ++t) out.push_back(random_devices(rng, N, m));
        }
        break;
    case SubsetMode::File:
        for (const auto& set : spec.explicit_sets) {
            std::vector<DeviceId> V;
            for (u64 v : set) {
                if (v < 1 || v > N) throw InvalidParams("subset file ID " + std::to_string(v) + " outside [1, N]");
                V.push_back(DeviceId{v});
            }
            out.push_back(std::move(V));
        }
        break;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Dispatch

struct ProtocolRun {
    RunReport report;
    std::optional<u64> b;  // width used, when the protocol has one
    std::optional<u64> k;  // energy parameter used
    std::vector<AttemptSummary> attempts;
};

/// Per-N setup shared by every run of one grid point.
struct GridPoint {
    u64 N = 1;
    ProtocolConfig base;
    std::optional<TradeoffParams> tradeoff;
};

inline GridPoint prepare_grid_point(const ExperimentSpec& spec, u64 N)
{
    GridPoint g;
    g.N = N;
    ProtocolConfig& cfg = g.base;
    cfg.model = spec.effective_model();
    cfg.N = N;
    cfg.seed = spec.seed;
    cfg.k = spec.k;
    cfg.epsilon = spec.epsilon;
    cfg.b = spec.b;
    cfg.inner_election = spec.inner;
    if (spec.protocol == ProtocolId::Partition) {
        const double eps = spec.epsilon.value_or(0.5);
        TradeoffParams p;
        if (spec.family && spec.family->N == N) {
            p = choose_params(N, spec.n.value_or(spec.family->n_max), *spec.k, eps, spec.C);
            p.b = spec.family->b;
            p.K = spec.family->K;
            p.family = spec.family;
        } else {
            GenerateOptions gen;
            gen.C = spec.C;
            p = prepare_tradeoff(N, spec.n.value_or(1), *spec.k, eps, spec.seed, gen);
        }
        if (spec.inner) p.inner = *spec.inner;
        cfg = tradeoff_config(p, cfg.model);
        cfg.seed = spec.seed;
        g.tradeoff = p;
    }
    cfg.validate();
    return g;
}

inline ProtocolRun run_protocol(ProtocolId protocol, std::span<const DeviceId> V, const GridPoint& g,
                                const ExecuteOptions& opts = {})
{
    ProtocolRun out;
    ProtocolConfig cfg = g.base;
    switch (protocol) {
    case ProtocolId::Pairing: out.report = execute<PairingElection>(V, cfg, opts); break;
    case ProtocolId::BinarySearch: out.report = execute<BinarySearchElection>(V, cfg, opts); break;
    case ProtocolId::Halving:
        out.report = execute<HalvingTradeoffElection>(V, cfg, opts);
        out.k = HalvingTradeoffElection::effective_k(cfg);
        break;
    case ProtocolId::Partition:
        out.report = execute<PartitionTradeoffElection>(V, cfg, opts);
        out.b = cfg.family->b;
        out.k = cfg.k;
        break;
    case ProtocolId::DenseSimple:
    case ProtocolId::DenseImproved:
        if (!cfg.b) cfg.known_n = static_cast<u64>(V.size());
        out.b = std::min(dense_block_width(cfg), cfg.N);
        out.report = protocol == ProtocolId::DenseSimple ? execute<DenseSimpleElection>(V, cfg, opts)
                                                         : execute<DenseImprovedElection>(V, cfg, opts);
        break;
    case ProtocolId::ExponentialSearch: {
        ExponentialSearchResult r = exponential_search_election(V, cfg, opts);
        out.report = std::move(r.report);
        out.attempts = std::move(r.attempts);
        if (!out.attempts.empty()) out.b = out.attempts.back().b;
        break;
    }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Rows and aggregates

struct ResultRow {
    std::string protocol;
    std::string model;
    u64 N = 0;
    u64 n = 0;
    std::optional<u64> b;
    std::optional<u64> k;
    Round rounds = 0;
    u64 max_energy = 0;
    bool strict = false;
    bool easy = false;
    std::uint64_t transcript_hash = 0;

    auto key() const { return std::tie(protocol, model, N, n, b, k, rounds, max_energy, strict, easy, transcript_hash); }

    friend bool operator==(const ResultRow& a, const ResultRow& b) { return a.key() == b.key(); }
    friend bool operator<(const ResultRow& a, const ResultRow& b) { return a.key() < b.key(); }
};

inline constexpr std::string_view kCsvHeader =
    "protocol,model,N,n,b,k,rounds,max_energy,strict,easy,transcript_hash";

inline std::string hex64(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

inline std::string format_row(const ResultRow& r)
{
    auto opt = [](const std::optional<u64>& v) { return v ? std::to_string(*v) : std::string("-"); };
    std::string s;
    s += r.protocol + ',' + r.model + ',' + std::to_string(r.N) + ',' + std::to_string(r.n) + ',' + opt(r.b) + ',' +
         opt(r.k) + ',' + std::to_string(r.rounds) + ',' + std::to_string(r.max_energy) + ',' +
         (r.strict ? "true" : "false") + ',' + (r.easy ? "true" : "false") + ',' + hex64(r.transcript_hash);
    return s;
}

struct Aggregate {
    std::string protocol;
    std::string model;
    u64 N = 0;
    u64 runs = 0;
    u64 strict = 0;
    u64 easy = 0;
    u64 max_energy = 0;
    double mean_energy = 0;
    Round max_rounds = 0;
    double mean_rounds = 0;
};

inline constexpr std::string_view kAggregateHeader =
    "protocol,model,N,runs,strict,easy,max_energy,mean_energy,max_rounds,mean_rounds";

inline std::string format_fixed(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

inline std::string format_aggregate(const Aggregate& a)
{
    return a.protocol + ',' + a.model + ',' + std::to_string(a.N) + ',' + std::to_string(a.runs) + ',' +
           std::to_string(a.strict) + ',' + std::to_string(a.easy) + ',' + std::to_string(a.max_energy) + ',' +
           format_fixed(a.mean_energy) + ',' + std::to_string(a.max_rounds) + ',' + format_fixed(a.mean_rounds);
}

/// One aggregate per (protocol, model, N) of sorted rows.
inline std::vector<Aggregate> aggregate_rows(const std::vector<ResultRow>& rows)
{
    std::map<std::tuple<std::string, std::string, u64>, Aggregate> groups;
    for (const ResultRow& r : rows) {
        Aggregate& a = groups[{r.protocol, r.model, r.N}];
        a.protocol = r.protocol;
        a.model = r.model;
        a.N = r.N;
        ++a.runs;
        a.strict += r.strict;
        a.easy += r.easy;
        a.max_energy = std::max(a.max_energy, r.max_energy);
        a.mean_energy += static_cast<double>(r.max_energy);
        a.max_rounds = std::max(a.max_rounds, r.rounds);
        a.mean_rounds += static_cast<double>(r.rounds);
    }
    std::vector<Aggregate> out;
    for (auto& [key, a] : groups) {
        a.mean_energy /= static_cast<double>(a.runs);
        a.mean_rounds /= static_cast<double>(a.runs);
        out.push_back(a);
    }
    return out;
}

struct AttemptRow {
    u64 N = 0;
    u64 n = 0;
    std::uint64_t transcript_hash = 0;
    AttemptSummary attempt;

    auto key() const { return std::make_tuple(N, n, transcript_hash, attempt.index); }
    friend bool operator<(const AttemptRow& a, const AttemptRow& b) { return a.key() < b.key(); }
};

inline std::string format_attempt(const AttemptRow& r)
{
    const AttemptSummary& a = r.attempt;
    return "attempt " + std::to_string(a.index) + ' ' + std::to_string(a.b) + ' ' + std::to_string(a.space) + ' ' +
           (a.success ? "success" : "fail") + ' ' + std::to_string(a.energy_max) + ' ' + std::to_string(a.rounds) +
           "  # N=" + std::to_string(r.N) + " n=" + std::to_string(r.n) + " run=" + hex64(r.transcript_hash);
}

struct TranscriptFile {
    std::string name;
    Transcript transcript;
};

struct ExperimentResult {
    std::vector<ResultRow> rows;  // sorted
    std::vector<Aggregate> aggregates;
    std::vector<AttemptRow> attempts;  // exponential search only, sorted
    std::vector<TranscriptFile> transcripts;  // when requested
};

inline std::string transcript_file_name(const ResultRow& r)
{
    return r.protocol + "_" + r.model + "_N" + std::to_string(r.N) + "_n" + std::to_string(r.n) + "_" +
           hex64(r.transcript_hash) + ".tsv";
}

/// Runs every (N, V) of the experiment. Rows come back sorted by their full tuple.
inline ExperimentResult run_experiment(const ExperimentSpec& spec)
{
    spec.validate();
    ExperimentResult res;
    ExecuteOptions opts;
    opts.record_transcript = spec.record_transcripts;
    const std::string protocol(to_string(spec.protocol));
    const std::string model(to_string(spec.effective_model()));
    for (u64 N : spec.Ns) {
        const GridPoint g = prepare_grid_point(spec, N);
        for (const auto& V : generate_subsets(spec, N)) {
            ProtocolRun run = run_protocol(spec.protocol, V, g, opts);
            ResultRow row;
            row.protocol = protocol;
            row.model = model;
            row.N = N;
            row.n = V.size();
            row.b = run.b;
            row.k = run.k;
            row.rounds = run.report.ledger.rounds;
            row.max_energy = run.report.ledger.max_energy;
            row.strict = run.report.strict_success;
            row.easy = run.report.easy_success;
            row.transcript_hash = run.report.transcript_hash;
            for (const AttemptSummary& a : run.attempts) res.attempts.push_back({N, row.n, row.transcript_hash, a});
            if (run.report.transcript) res.transcripts.push_back({transcript_file_name(row), *run.report.transcript});
            res.rows.push_back(std::move(row));
        }
    }
    std::sort(res.rows.begin(), res.rows.end());
    std::sort(res.attempts.begin(), res.attempts.end());
    std::sort(res.transcripts.begin(), res.transcripts.end(),
              [](const TranscriptFile& a, const TranscriptFile& b) { return a.name < b.name; });
    res.transcripts.erase(std::unique(res.transcripts.begin(), res.transcripts.end(),
                                      [](const TranscriptFile& a, const TranscriptFile& b) { return a.name == b.name; }),
                          res.transcripts.end());
    res.aggregates = aggregate_rows(res.rows);
    return res;
}

inline void write_csv(std::ostream& os, const std::vector<ResultRow>& rows)
{
    os << kCsvHeader << '\n';
    for (const ResultRow& r : rows) os << format_row(r) << '\n';
}

inline void write_aggregates(std::ostream& os, const std::vector<Aggregate>& aggs)
{
    os << kAggregateHeader << '\n';
    for (const Aggregate& a : aggs) os << format_aggregate(a) << '\n';
}

// ---------------------------------------------------------------------------
// Lower-bound checks on one protocol and ID space

struct CheckRow {
    std::string check;  // uniqueness | counting | potential | matching
    std::string protocol;
    u64 N = 0;
    u64 k = 0;
    Round t = 0;
    bool ok = false;
    std::string witness = "-";
};

inline constexpr std::string_view kCheckHeader = "check,protocol,N,k,t,result,witness";

inline std::string format_check(const CheckRow& r)
{
    return r.check + ',' + r.protocol + ',' + std::to_string(r.N) + ',' + std::to_string(r.k) + ',' +
           std::to_string(r.t) + ',' + (r.ok ? "ok" : "violation") + ',' + r.witness;
}

namespace detail {

template <DeviceProgram P>
void run_checks(std::vector<CheckRow>& out, const std::string& name, const GridPoint& g, ProtocolId id,
                u64 potential_limit)
{
    const ProtocolConfig& cfg = g.base;
    const u64 N = cfg.N;
    const Round t = P::schedule_length(cfg);
    const u64 budget = P::energy_budget(cfg);

    // Uniqueness under StrongCD-style feedback.
    {
        auto seqs = canonical_sequences<P>(cfg, FeedbackStyle::StrongStyle);
        UniquenessResult u = first_duplicate(seqs);
        CheckRow row{"uniqueness", name, N, budget, t, u.ok(), "-"};
        if (!u.ok()) row.witness = std::to_string(u.violation->first) + ";" + std::to_string(u.violation->second);
        out.push_back(row);
    }

    // Counting with the measured energy over V = [N] and every pair.
    {
        u64 measured = 0;
        std::vector<DeviceId> all;
        for (u64 j = 1; j <= N; ++j) all.push_back(DeviceId{j});
        measured = std::max(measured, run_protocol(id, all, g).report.ledger.max_energy);
        for (u64 a = 1; a <= N; ++a) {
            for (u64 c = a + 1; c <= N; ++c) {
                const DeviceId pair[] = {DeviceId{a}, DeviceId{c}};
                measured = std::max(measured, run_protocol(id, pair, g).report.ledger.max_energy);
            }
        }
        out.push_back({"counting", name, N, measured, t, counting_inequality_holds(N, t, measured),
                       counting_bound(t, measured).str()});
    }

    // Potential active slots against the declared budget.
    if (N <= potential_limit) {
        u64 worst = 0, worst_id = 1;
        for (u64 j = 1; j <= N; ++j) {
            PotentialActivity pa = potential_active_slots<P>(DeviceId{j}, cfg, budget);
            if (pa.count > worst) {
                worst = pa.count;
                worst_id = j;
            }
        }
        const bool ok = budget >= 63 || worst <= (u64{1} << budget);
        out.push_back({"potential", name, N, budget, t, ok, std::to_string(worst_id) + ":" + std::to_string(worst)});
    }

    // Matching under ReceiverCD-style feedback with the largest sequence weight.
    {
        auto seqs = canonical_sequences<P>(cfg, FeedbackStyle::ReceiverStyle);
        u64 k = 0;
        for (const auto& s : seqs) k = std::max(k, weight(s));
        MatchOptions mo;
        mo.seed = cfg.seed;
        MatchResult m = matching_count(seqs, k, mo);
        out.push_back({"matching", name, N, k, t, m.holds(),
                       std::to_string(m.max_matched) + ">=" + std::to_string(m.required) +
                           (m.exhaustive ? "" : "~sampled")});
    }
}

}  // namespace detail

inline std::vector<CheckRow> run_lower_bound_checks(const ExperimentSpec& spec, u64 potential_limit = 16)
{
    ExperimentSpec s = spec;
    s.subsets = SubsetMode::Random;
    s.validate();
    std::vector<CheckRow> out;
    const std::string name(to_string(spec.protocol));
    for (u64 N : spec.Ns) {
        GridPoint g = prepare_grid_point(s, N);
        if ((spec.protocol == ProtocolId::DenseSimple || spec.protocol == ProtocolId::DenseImproved) && !g.base.b) {
            g.base.b = std::min(dense_block_width([&] {
                                    ProtocolConfig c = g.base;
                                    c.known_n = N;
                                    return c;
                                }()),
                                N);
        }
        switch (spec.protocol) {
        case ProtocolId::Pairing: detail::run_checks<PairingElection>(out, name, g, spec.protocol, potential_limit); break;
        case ProtocolId::BinarySearch:
            detail::run_checks<BinarySearchElection>(out, name, g, spec.protocol, potential_limit);
            break;
        case ProtocolId::Halving:
            detail::run_checks<HalvingTradeoffElection>(out, name, g, spec.protocol, potential_limit);
            break;
        case ProtocolId::Partition:
            detail::run_checks<PartitionTradeoffElection>(out, name, g, spec.protocol, potential_limit);
            break;
        case ProtocolId::DenseSimple:
            detail::run_checks<DenseSimpleElection>(out, name, g, spec.protocol, potential_limit);
            break;
        case ProtocolId::DenseImproved:
            detail::run_checks<DenseImprovedElection>(out, name, g, spec.protocol, potential_limit);
            break;
        case ProtocolId::ExponentialSearch:
            detail::run_checks<ExponentialSearchElection>(out, name, g, spec.protocol, potential_limit);
            break;
        }
    }
    return out;
}

}  // namespace radioleader
