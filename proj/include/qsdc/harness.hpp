// Experiment harness: configure and sweep sessions, emit transcripts, CSV
// statistics and detection/leakage curves. Backs the command-line tool.
#pragma once

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qsdc/leakage.hpp"
#include "qsdc/protocol.hpp"
#include "qsdc/serialize.hpp"

namespace qsdc {

enum class SweepVar { TestPairs, NoiseP, Adversary };

struct ExperimentSpec {
    SessionConfig base;
    SweepVar var = SweepVar::TestPairs;
    std::vector<std::string> values; // validated against var
    long trials = 1000;

    void validate() const {
        base.validate();
        if (trials < 1) throw std::invalid_argument("sweep: trials must be >= 1");
        if (values.empty()) throw std::invalid_argument("sweep: no values given");
        for (const std::string& v : values) apply_value(base, v); // throws on bad value
    }

    SessionConfig apply_value(SessionConfig cfg, const std::string& value) const {
        switch (var) {
            case SweepVar::TestPairs: {
                const long n = std::stol(value);
                if (n < 0) throw std::invalid_argument("sweep: test_pairs must be >= 0");
                cfg.test_pairs = static_cast<int>(n);
                break;
            }
            case SweepVar::NoiseP: {
                const double p = std::stod(value);
                if (p < 0.0 || p > 1.0) throw std::invalid_argument("sweep: noise_p must be in [0,1]");
                cfg.noise_p = p;
                break;
            }
            case SweepVar::Adversary: cfg.adversary = adversary_from_name(value); break;
        }
        return cfg;
    }
};

struct SweepRow {
    std::string sweep_value;
    long trials = 0;
    double detect_rate = 0.0;
    double detect_ci = 0.0; // 4-sigma binomial half width, reported only
    double eve_acc = 0.0;
    double alice_acc = 0.0;
    double z_mismatch = 0.0;
    double x_mismatch = 0.0;
    std::uint64_t seed0 = 0;
};

// Parses "var=v1,v2,..." with var in {test_pairs, noise_p, adversary}.
inline std::pair<SweepVar, std::vector<std::string>> parse_sweep(const std::string& text) {
    const std::size_t eq = text.find('=');
    if (eq == std::string::npos)
        throw std::invalid_argument("sweep must look like var=v1,v2,... ");
    const std::string name = text.substr(0, eq);
    SweepVar var;
    if (name == "test_pairs") var = SweepVar::TestPairs;
    else if (name == "noise_p") var = SweepVar::NoiseP;
    else if (name == "adversary") var = SweepVar::Adversary;
    else throw std::invalid_argument("unknown sweep variable '" + name + "'");
    std::vector<std::string> values;
    std::stringstream ss(text.substr(eq + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) values.push_back(item);
    }
    if (values.empty()) throw std::invalid_argument("sweep has no values");
    return {var, values};
}

inline std::string canonical_sweep_value(SweepVar var, const std::string& value) {
    if (var == SweepVar::Adversary) return adversary_name(adversary_from_name(value));
    return value;
}

// One sweep point runs two experiment arms per trial seed:
//  - detection arm: test_pairs pairs verified in matched-basis mode, so the
//    swept pair count equals the compared-round count of the detection curve;
//  - leakage arm: a verification-skipped session of n_message_bits bits,
//    measuring what Eve and Alice actually read.
// Trial seeds derive from the base seed by counter splitting.
inline std::vector<SweepRow> run_attack_sweep(const ExperimentSpec& spec) {
    spec.validate();
    std::vector<SweepRow> rows;
    rows.reserve(spec.values.size());
    for (std::size_t point = 0; point < spec.values.size(); ++point) {
        const SessionConfig cfg = spec.apply_value(spec.base, spec.values[point]);
        SweepRow row;
        row.sweep_value = canonical_sweep_value(spec.var, spec.values[point]);
        row.trials = spec.trials;
        row.seed0 = Rng::derive(spec.base.seed, point, 0);

        long rejected = 0;
        long z_cmp = 0, z_mis = 0, x_cmp = 0, x_mis = 0;
        std::vector<SessionTranscript> transcripts;
        transcripts.reserve(static_cast<std::size_t>(spec.trials));
        for (long t = 0; t < spec.trials; ++t) {
            Rng det_rng(Rng::derive(spec.base.seed, point, static_cast<std::uint64_t>(2 * t)));
            std::vector<PairInstance> pairs = distribute_pairs(
                cfg.test_pairs, cfg.adversary, cfg.noise_p, det_rng, cfg.attack_probability);
            ChannelVerdict v = matched_basis_verify(pairs, cfg.mismatch_threshold, det_rng);
            if (!v.accept) ++rejected;
            z_cmp += v.z_compared;
            z_mis += v.z_mismatch;
            x_cmp += v.x_compared;
            x_mis += v.x_mismatch;

            if (cfg.n_message_bits > 0) {
                SessionConfig leak_cfg = cfg;
                leak_cfg.test_pairs = 0;
                leak_cfg.seed = Rng::derive(spec.base.seed, point, static_cast<std::uint64_t>(2 * t + 1));
                transcripts.push_back(run_session(leak_cfg));
            }
        }
        row.detect_rate = double(rejected) / double(spec.trials);
        row.detect_ci =
            4.0 * std::sqrt(row.detect_rate * (1.0 - row.detect_rate) / double(spec.trials));
        row.z_mismatch = z_cmp ? double(z_mis) / double(z_cmp) : 0.0;
        row.x_mismatch = x_cmp ? double(x_mis) / double(x_cmp) : 0.0;
        if (!transcripts.empty()) {
            LeakageReport rep = leakage_report(transcripts);
            row.eve_acc = rep.eve_bit_accuracy;
            row.alice_acc = rep.alice_bit_accuracy;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

// --- CSV output ---

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

inline void emit_csv(std::ostream& os, std::span<const SweepRow> rows) {
    os << "sweep_value,trials,detect_rate,detect_ci,eve_acc,alice_acc,z_mismatch,x_mismatch,seed0\n";
    for (const SweepRow& r : rows) {
        os << r.sweep_value << ',' << r.trials << ',' << format_double(r.detect_rate) << ','
           << format_double(r.detect_ci) << ',' << format_double(r.eve_acc) << ','
           << format_double(r.alice_acc) << ',' << format_double(r.z_mismatch) << ','
           << format_double(r.x_mismatch) << ',' << r.seed0 << '\n';
    }
}

inline Json to_json(const SweepRow& r) {
    return Json{{"sweep_value", r.sweep_value},
                {"trials", r.trials},
                {"detect_rate", r.detect_rate},
                {"detect_ci", r.detect_ci},
                {"eve_acc", r.eve_acc},
                {"alice_acc", r.alice_acc},
                {"z_mismatch", r.z_mismatch},
                {"x_mismatch", r.x_mismatch},
                {"seed0", r.seed0}};
}

// --- CLI ---

namespace detail {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open output file '" + path + "'");
    os << text;
    os.flush();
    if (!os) throw IoError("failed writing output file '" + path + "'");
}

} // namespace detail

// Front-end for the qsdc binary. Subcommands: session, verify, attack-sweep,
// chsh. Exit codes: 0 success, 1 I/O failure, 2 invalid flags.
inline int cli_run(int argc, const char* const* argv) {
    CLI::App app{"QSDC simulator: secure direct communication over EPR pairs and teleportation"};
    app.require_subcommand(1);

    SessionConfig cfg;
    cfg.n_message_bits = 32;
    cfg.test_pairs = 128;
    std::string eve = "none";
    std::string out;
    std::string format;
    std::string sweep_text;
    long trials = 0;

    const std::map<std::string, std::string> eve_names{
        {"none", "none"}, {"swap", "swap"}, {"ghz", "ghz"}, {"ir", "ir"}};

    auto add_common = [&](CLI::App* sub, bool with_bits, bool with_pairs) {
        sub->add_option("--seed", cfg.seed, "base random seed")->envname("QSDC_SEED");
        if (with_bits) sub->add_option("--bits", cfg.n_message_bits, "message length in bits");
        if (with_pairs) sub->add_option("--test-pairs", cfg.test_pairs, "verification pairs");
        sub->add_option("--eve", eve, "adversary: none|swap|ghz|ir")
            ->transform(CLI::CheckedTransformer(eve_names, CLI::ignore_case));
        sub->add_option("--noise", cfg.noise_p, "per-half Pauli flip probability")
            ->check(CLI::Range(0.0, 1.0));
        sub->add_option("--threshold", cfg.mismatch_threshold, "mismatch acceptance threshold")
            ->check(CLI::Range(0.0, 0.4999));
        sub->add_option("--out", out, "output path (default stdout)");
        sub->add_option("--format", format, "output format: json|csv")
            ->check(CLI::IsMember({"json", "csv"}));
    };

    CLI::App* session = app.add_subcommand("session", "run one full protocol session");
    add_common(session, true, true);

    CLI::App* verify = app.add_subcommand("verify", "run channel verification only");
    add_common(verify, false, true);
    verify->add_option("--trials", trials, "independent verification trials")->check(CLI::PositiveNumber);

    CLI::App* sweep = app.add_subcommand("attack-sweep", "detection/leakage curves over a swept variable");
    add_common(sweep, true, true);
    sweep->add_option("--sweep", sweep_text, "sweep spec: test_pairs=...|noise_p=...|adversary=...")
        ->required();
    sweep->add_option("--trials", trials, "trials per sweep point")->check(CLI::PositiveNumber);

    CLI::App* chsh = app.add_subcommand("chsh", "CHSH statistic of the distributed pairs");
    add_common(chsh, false, false);
    chsh->add_option("--trials", trials, "measurement rounds per correlator")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        cfg.adversary = adversary_from_name(eve);
        if (!format.empty() && format == "csv" && !sweep->parsed()) {
            std::cerr << "error: csv format is only available for attack-sweep\n";
            return 2;
        }

        if (session->parsed()) {
            SessionTranscript t = run_session(cfg);
            if (!t.verdict.accept)
                std::cerr << "channel verification rejected; new EPR pairs must be constructed\n";
            detail::write_output(out, transcript_json_text(t));
            return 0;
        }

        if (verify->parsed()) {
            if (trials == 0) trials = 1;
            long accepts = 0, z_cmp = 0, z_mis = 0, x_cmp = 0, x_mis = 0;
            ChannelVerdict last;
            for (long t = 0; t < trials; ++t) {
                Rng rng(Rng::derive(cfg.seed, 0, static_cast<std::uint64_t>(t)));
                std::vector<PairInstance> pairs = distribute_pairs(
                    cfg.test_pairs, cfg.adversary, cfg.noise_p, rng, cfg.attack_probability);
                last = verify_channel(pairs, cfg.mismatch_threshold, rng);
                if (last.accept) ++accepts;
                z_cmp += last.z_compared;
                z_mis += last.z_mismatch;
                x_cmp += last.x_compared;
                x_mis += last.x_mismatch;
            }
            Json j{{"config", to_json(cfg)},
                   {"rng_algorithm", std::string(Rng::algorithm_name)},
                   {"trials", trials},
                   {"accept_rate", double(accepts) / double(trials)},
                   {"mean_z_mismatch", z_cmp ? double(z_mis) / double(z_cmp) : 0.0},
                   {"mean_x_mismatch", x_cmp ? double(x_mis) / double(x_cmp) : 0.0}};
            if (trials == 1) j["verdict"] = to_json(last);
            detail::write_output(out, j.dump(2) + "\n");
            return 0;
        }

        if (sweep->parsed()) {
            if (trials == 0) trials = 1000;
            ExperimentSpec spec;
            spec.base = cfg;
            auto [var, values] = parse_sweep(sweep_text);
            spec.var = var;
            spec.values = std::move(values);
            spec.trials = trials;
            std::vector<SweepRow> rows = run_attack_sweep(spec);
            if (format == "json") {
                Json j{{"config", to_json(cfg)},
                       {"rng_algorithm", std::string(Rng::algorithm_name)},
                       {"trials", trials}};
                Json rj = Json::array();
                for (const SweepRow& r : rows) rj.push_back(to_json(r));
                j["rows"] = std::move(rj);
                detail::write_output(out, j.dump(2) + "\n");
            } else {
                std::ostringstream os;
                emit_csv(os, rows);
                // The CSV schema is fixed, so the resolved-config echo goes
                // to stderr instead of the data file.
                std::cerr << Json{{"config", to_json(cfg)},
                                  {"rng_algorithm", std::string(Rng::algorithm_name)},
                                  {"trials", trials}}
                                 .dump()
                          << "\n";
                detail::write_output(out, os.str());
            }
            return 0;
        }

        if (chsh->parsed()) {
            if (trials == 0) trials = 10000;
            Rng rng(cfg.seed);
            std::vector<PairInstance> pairs = distribute_pairs(
                static_cast<int>(4 * trials), cfg.adversary, cfg.noise_p, rng, cfg.attack_probability);
            double s_exact = 0.0;
            for (const PairInstance& p : pairs) s_exact += chsh_exact(p.state);
            s_exact /= double(pairs.size());
            ChshEstimate est = chsh_test(pairs, rng);
            Json j{{"config", to_json(cfg)},
                   {"rng_algorithm", std::string(Rng::algorithm_name)},
                   {"rounds_per_correlator", est.rounds_per_correlator},
                   {"s", est.s},
                   {"half_width", est.half_width},
                   {"low_confidence", est.low_confidence},
                   {"s_exact", s_exact}};
            detail::write_output(out, j.dump(2) + "\n");
            return 0;
        }
        return 2;
    } catch (const detail::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

inline int cli_run(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const std::string& a : args) argv.push_back(a.c_str());
    return cli_run(static_cast<int>(argv.size()), argv.data());
}

} // namespace qsdc
