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


// Command-line front end: batch experiments plus the family, check and bins tools.

#include <radioleader/radioleader.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

using namespace radioleader;

u64 parse_count(const std::string& tok)
{
    if (auto caret = tok.find('^'); caret != std::string::npos) {
        const u64 base = std::stoull(tok.substr(0, caret));
        const u64 exp = std::stoull(tok.substr(caret + 1));
        if (base != 2 || exp > 40) throw InvalidParams("only 2^e with e <= 40 is accepted: " + tok);
        return u64{1} << exp;
    }
    std::size_t used = 0;
    const u64 v = std::stoull(tok, &used);
    if (used != tok.size()) throw InvalidParams("bad integer '" + tok + "'");
    return v;
}

/// "8", "8,16,32", "2^6..2^16" (powers of two), "1..10" (every integer).
std::vector<u64> parse_grid(const std::string& s)
{
    std::vector<u64> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        if (auto dots = tok.find(".."); dots != std::string::npos) {
            const std::string lo_s = tok.substr(0, dots), hi_s = tok.substr(dots + 2);
            const u64 lo = parse_count(lo_s), hi = parse_count(hi_s);
            if (lo > hi) throw InvalidParams("empty range '" + tok + "'");
            const bool powers = lo_s.find('^') != std::string::npos;
            for (u64 v = lo; v <= hi; v = powers ? v * 2 : v + 1) out.push_back(v);
        } else {
            out.push_back(parse_count(tok));
        }
    }
    if (out.empty()) throw InvalidParams("empty grid '" + s + "'");
    return out;
}

/// "1,1/2,0.25".
std::vector<double> parse_densities(const std::string& s)
{
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        if (auto slash = tok.find('/'); slash != std::string::npos) {
            out.push_back(std::stod(tok.substr(0, slash)) / std::stod(tok.substr(slash + 1)));
        } else {
            out.push_back(std::stod(tok));
        }
    }
    return out;
}

std::ofstream open_out(const std::string& path)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InvalidParams("cannot open '" + path + "' for writing");
    return os;
}

u64 seed_from_env(u64 fallback)
{
    if (const char* env = std::getenv("RADIOLEADER_SEED"); env && *env) return parse_count(env);
    return fallback;
}

nlohmann::json to_json(const ExperimentResult& r)
{
    nlohmann::json j;
    j["rows"] = nlohmann::json::array();
    for (const auto& row : r.rows) {
        j["rows"].push_back({{"protocol", row.protocol},
                             {"model", row.model},
                             {"N", row.N},
                             {"n", row.n},
                             {"b", row.b ? nlohmann::json(*row.b) : nlohmann::json(nullptr)},
                             {"k", row.k ? nlohmann::json(*row.k) : nlohmann::json(nullptr)},
                             {"rounds", row.rounds},
                             {"max_energy", row.max_energy},
                             {"strict", row.strict},
                             {"easy", row.easy},
                             {"transcript_hash", hex64(row.transcript_hash)}});
    }
    j["aggregates"] = nlohmann::json::array();
    for (const auto& a : r.aggregates) {
        j["aggregates"].push_back({{"protocol", a.protocol},
                                   {"model", a.model},
                                   {"N", a.N},
                                   {"runs", a.runs},
                                   {"strict", a.strict},
                                   {"easy", a.easy},
                                   {"max_energy", a.max_energy},
                                   {"mean_energy", a.mean_energy},
                                   {"max_rounds", a.max_rounds},
                                   {"mean_rounds", a.mean_rounds}});
    }
    j["attempts"] = nlohmann::json::array();
    for (const auto& a : r.attempts) {
        j["attempts"].push_back({{"N", a.N},
                                 {"n", a.n},
                                 {"run", hex64(a.transcript_hash)},
                                 {"attempt", a.attempt.index},
                                 {"b", a.attempt.b},
                                 {"space", a.attempt.space},
                                 {"live", a.attempt.live},
                                 {"success", a.attempt.success},
                                 {"energy_max", a.attempt.energy_max},
                                 {"rounds", a.attempt.rounds}});
    }
    return j;
}

struct RunOptions {
    std::string protocol = "pairing";
    std::string model;
    std::string N = "8";
    std::optional<u64> n, k, b;
    std::optional<double> epsilon;
    double C = kDefaultFamilyConstant;
    u64 seed = 0;
    std::string subsets = "random";
    u64 trials = 100;
    std::string density = "1";
    std::string subsets_file;
    std::string inner;
    std::string family_file;
    std::string out, summary, json, attempts, transcripts_dir;
    bool assert_success = false;
};

ExperimentSpec build_spec(const RunOptions& o)
{
    ExperimentSpec spec;
    spec.protocol = parse_protocol(o.protocol);
    if (!o.model.empty()) spec.model = parse_model(o.model);
    spec.Ns = parse_grid(o.N);
    spec.n = o.n;
    spec.k = o.k;
    spec.b = o.b;
    spec.epsilon = o.epsilon;
    spec.C = o.C;
    spec.seed = seed_from_env(o.seed);
    spec.subsets = parse_subset_mode(o.subsets);
    spec.trials = o.trials;
    spec.densities = parse_densities(o.density);
    if (!o.inner.empty()) spec.inner = parse_inner(o.inner);
    if (!o.subsets_file.empty()) {
        std::ifstream is(o.subsets_file);
        if (!is) throw InvalidParams("cannot read '" + o.subsets_file + "'");
        spec.explicit_sets = read_subsets(is);
    }
    if (!o.family_file.empty()) {
        std::ifstream is(o.family_file);
        if (!is) throw InvalidParams("cannot read '" + o.family_file + "'");
        spec.family = std::make_shared<const PartitionFamily>(read_family(is));
    }
    spec.record_transcripts = !o.transcripts_dir.empty();
    return spec;
}

int run_main(const RunOptions& o)
{
    const ExperimentSpec spec = build_spec(o);
    const ExperimentResult res = run_experiment(spec);
    if (o.out.empty()) {
        write_csv(std::cout, res.rows);
    } else {
        auto os = open_out(o.out);
        write_csv(os, res.rows);
    }
    if (!o.summary.empty()) {
        auto os = open_out(o.summary);
        write_aggregates(os, res.aggregates);
    } else if (!o.out.empty()) {
        write_aggregates(std::cerr, res.aggregates);
    }
    if (!o.attempts.empty()) {
        auto os = open_out(o.attempts);
        for (const auto& a : res.attempts) os << format_attempt(a) << '\n';
    }
    if (!o.json.empty()) {
        auto os = open_out(o.json);
        os << to_json(res).dump(2) << '\n';
    }
    if (!o.transcripts_dir.empty()) {
        std::filesystem::create_directories(o.transcripts_dir);
        for (const auto& t : res.transcripts) {
            auto os = open_out((std::filesystem::path(o.transcripts_dir) / t.name).string());
            write_transcript(os, t.transcript);
        }
    }
    if (o.assert_success) {
        const auto failed = std::count_if(res.rows.begin(), res.rows.end(), [](const ResultRow& r) { return !r.strict; });
        if (failed > 0) {
            std::cerr << "radioleader: " << failed << " of " << res.rows.size() << " runs failed strict success\n";
            return 2;
        }
    }
    return 0;
}

void add_run_options(CLI::App& app, RunOptions& o)
{
    app.add_option("--protocol", o.protocol,
                   "pairing | binary_search | halving | partition | dense_simple | dense_improved | exponential_search");
    app.add_option("--model", o.model, "StrongCD | SenderCD | ReceiverCD | NoCD (default: protocol's own)");
    app.add_option("--N", o.N, "ID space size or grid: 8 | 8,16 | 2^6..2^16 | 1..10");
    app.add_option("--n", o.n, "device count (random subsets) or device bound (partition)");
    app.add_option("--k", o.k, "energy parameter");
    app.add_option("--epsilon", o.epsilon, "slack in (0, 1)");
    app.add_option("--b", o.b, "block or partition width");
    app.add_option("--C", o.C, "partition family constant");
    app.add_option("--seed", o.seed, "PRNG seed (RADIOLEADER_SEED overrides)");
    app.add_option("--subsets", o.subsets, "all | random | file | density");
    app.add_option("--trials", o.trials, "device sets per N (random) or per density");
    app.add_option("--density", o.density, "densities for --subsets density, e.g. 1,1/2,1/4");
    app.add_option("--subsets-file", o.subsets_file, "device sets, one per line, for --subsets file");
    app.add_option("--inner", o.inner, "inner election: binary_search | pairing | pairing_compact");
    app.add_option("--family", o.family_file, "partition family file");
    app.add_option("--out", o.out, "CSV rows (default: stdout)");
    app.add_option("--summary", o.summary, "aggregate CSV per (protocol, model, N)");
    app.add_option("--json", o.json, "JSON with rows, aggregates and attempts");
    app.add_option("--attempts", o.attempts, "per-attempt lines for exponential_search");
    app.add_option("--emit-transcripts", o.transcripts_dir, "directory for transcript files");
    app.add_flag("--assert-success", o.assert_success, "exit 2 if any run fails strict success");
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Deterministic leader election in single-hop radio networks"};
    app.require_subcommand(0, 1);

    RunOptions run;
    add_run_options(app, run);

    auto* family = app.add_subcommand("family", "generate and verify a partition family");
    u64 fam_N = 16, fam_b = 4, fam_n = 2, fam_seed = 0, fam_trials = kDefaultSampledTrials, fam_retries = kDefaultRetryCap;
    double fam_eps = 0.5, fam_C = kDefaultFamilyConstant;
    std::string fam_verify = "auto", fam_out;
    family->add_option("--N", fam_N, "ID space size");
    family->add_option("--b", fam_b, "parts per partition");
    family->add_option("--epsilon", fam_eps, "epsilon tilde in (0, 1)");
    family->add_option("--n-max", fam_n, "largest device set to isolate");
    family->add_option("--C", fam_C, "family size constant");
    family->add_option("--seed", fam_seed, "base seed (RADIOLEADER_SEED overrides)");
    family->add_option("--verify", fam_verify, "auto | exhaustive | sampled");
    family->add_option("--trials", fam_trials, "sampled trials per subset size");
    family->add_option("--retries", fam_retries, "Las Vegas retry cap");
    family->add_option("--out", fam_out, "family file (default: stdout)");

    auto* check = app.add_subcommand("check", "lower-bound necessary conditions");
    std::string chk_protocol = "binary_search", chk_model, chk_N = "2^2..2^6", chk_out;
    std::optional<u64> chk_k, chk_n, chk_b;
    std::optional<double> chk_eps;
    u64 chk_seed = 0, chk_potential = 16;
    bool chk_assert = false;
    check->add_option("--protocol", chk_protocol, "protocol to check");
    check->add_option("--model", chk_model, "model (default: protocol's own)");
    check->add_option("--N", chk_N, "ID space grid");
    check->add_option("--k", chk_k, "energy parameter");
    check->add_option("--n", chk_n, "device bound (partition)");
    check->add_option("--b", chk_b, "width");
    check->add_option("--epsilon", chk_eps, "slack in (0, 1)");
    check->add_option("--seed", chk_seed, "seed");
    check->add_option("--potential-limit", chk_potential, "largest N for the feedback-tree walk");
    check->add_option("--out", chk_out, "check CSV (default: stdout)");
    check->add_flag("--assert-ok", chk_assert, "exit 2 on any violation");

    auto* bins = app.add_subcommand("bins", "Monte Carlo estimate of Pr[some bin has one ball]");
    u64 bins_n = 4, bins_b = 64, bins_trials = 100'000, bins_seed = 0;
    bins->add_option("--n", bins_n, "balls");
    bins->add_option("--b", bins_b, "bins");
    bins->add_option("--trials", bins_trials, "trials");
    bins->add_option("--seed", bins_seed, "seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*family) {
            GenerateOptions gen;
            gen.C = fam_C;
            gen.retry_cap = fam_retries;
            gen.verify.trials = fam_trials;
            if (fam_verify == "exhaustive") {
                gen.verify.kind = VerifyMode::Kind::Exhaustive;
            } else if (fam_verify == "sampled") {
                gen.verify.kind = VerifyMode::Kind::Sampled;
            } else if (fam_verify != "auto") {
                throw InvalidParams("unknown verify mode '" + fam_verify + "'");
            }
            const PartitionFamily f = generate_family(fam_N, fam_b, fam_eps, fam_n, seed_from_env(fam_seed), gen);
            if (fam_out.empty()) {
                write_family(std::cout, f);
            } else {
                auto os = open_out(fam_out);
                write_family(os, f);
            }
            std::cerr << "family N=" << f.N << " b=" << f.b << " K=" << f.K << " retries=" << f.retries
                      << " certificate=" << f.verified.to_string() << '\n';
            return 0;
        }
        if (*check) {
            ExperimentSpec spec;
            spec.protocol = parse_protocol(chk_protocol);
            if (!chk_model.empty()) spec.model = parse_model(chk_model);
            spec.Ns = parse_grid(chk_N);
            spec.k = chk_k;
            spec.n = chk_n;
            spec.b = chk_b;
            spec.epsilon = chk_eps;
            spec.seed = seed_from_env(chk_seed);
            const auto rows = run_lower_bound_checks(spec, chk_potential);
            std::ofstream file;
            std::ostream* os = &std::cout;
            if (!chk_out.empty()) {
                file = open_out(chk_out);
                os = &file;
            }
            *os << kCheckHeader << '\n';
            bool all_ok = true;
            for (const auto& r : rows) {
                *os << format_check(r) << '\n';
                all_ok &= r.ok;
            }
            return chk_assert && !all_ok ? 2 : 0;
        }
        if (*bins) {
            const BinsEstimate e = balls_in_bins_singleton_prob(bins_n, bins_b, bins_trials, seed_from_env(bins_seed));
            std::cout << "n,b,trials,p_hat,sigma,lower_bound\n"
                      << bins_n << ',' << bins_b << ',' << e.trials << ',' << format_fixed(e.p_hat) << ','
                      << format_fixed(e.sigma) << ',' << format_fixed(e.lower_bound) << '\n';
            return 0;
        }
        return run_main(run);
    } catch (const std::exception& e) {
        std::cerr << "radioleader: " << e.what() << '\n';
        return 1;
    }
}
