#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "randchain/analysis.hpp"
#include "randchain/chain.hpp"
#include "randchain/core.hpp"
#include "randchain/errors.hpp"
#include "randchain/io.hpp"
#include "randchain/svg.hpp"
#include "randchain/synthlab.hpp"

namespace randchain {

namespace detail {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open input file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open output file '" + path + "'");
    out << content;
    if (!out) throw Error("failed writing output file '" + path + "'");
}

// --out writes a file, otherwise the stream gets the artifact.
inline void deliver(const std::string& out_path, const std::string& content,
                    std::ostream& out) {
    if (out_path.empty()) {
        out << content;
    } else {
        write_file(out_path, content);
    }
}

inline nlohmann::ordered_json curve_json(const CurvePoints& curve) {
    nlohmann::ordered_json j;
    j["method"] = std::string(curve_method_name(curve.method));
    if (curve.trials) j["trials"] = *curve.trials;
    if (curve.seed) j["seed"] = *curve.seed;
    nlohmann::ordered_json points = nlohmann::ordered_json::array();
    for (const CurvePoint& p : curve.points) {
        points.push_back({{"k", p.k},
                          {"mean", round_to_rendered(p.mean)},
                          {"std", round_to_rendered(p.std_dev)}});
    }
    j["points"] = std::move(points);
    return j;
}

inline nlohmann::ordered_json machines_json(const std::vector<BanditMachine>& machines) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const BanditMachine& m : machines) {
        arr.push_back({{"action", std::string(action_name(m.action))},
                       {"payload", m.payload_id},
                       {"alpha", m.alpha},
                       {"beta", m.beta},
                       {"posterior_mean", round_to_rendered(m.posterior_mean())}});
    }
    return arr;
}

inline nlohmann::ordered_json records_json(const std::vector<SampleAttackRecord>& records,
                                           AttackerKind attacker) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const SampleAttackRecord& r : records) {
        nlohmann::ordered_json j;
        j["sample"] = r.id;
        j["status"] = r.status == AttackStatus::Evasive ? "evasive" : "failed";
        if (attacker == AttackerKind::mab) {
            j["attempts"] = r.attempts_used;
            nlohmann::ordered_json trace = nlohmann::ordered_json::array();
            for (Action a : r.minimized_trace) trace.push_back(std::string(action_name(a)));
            j["minimized_trace"] = std::move(trace);
        } else {
            j["generations"] = r.attempts_used;
            j["best_objective"] = round_to_rendered(r.best_objective);
            nlohmann::ordered_json inj = nlohmann::ordered_json::array();
            for (double v : r.injection) inj.push_back(round_to_rendered(v));
            j["injection"] = std::move(inj);
        }
        arr.push_back(std::move(j));
    }
    return arr;
}

struct PoolFlags {
    uint64_t pool_seed = 1;
    int detectors = 16;
    int dim = 32;
    double overlap = 0.5;
    int train_index = 0;
    int samples = 100;
    uint64_t seed = 1;
};

inline void add_pool_flags(CLI::App* cmd, PoolFlags& flags) {
    cmd->add_option("--pool-seed", flags.pool_seed, "seed for the synthetic detector pool");
    cmd->add_option("--detectors", flags.detectors, "pool size")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--dim", flags.dim, "feature dimension")->check(CLI::Range(2, 1 << 20));
    cmd->add_option("--overlap", flags.overlap,
                    "decisive-feature overlap between pool members, 0..1")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--train-index", flags.train_index,
                    "pool member the attacker trains against")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--samples", flags.samples, "corpus size")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--seed", flags.seed, "seed for corpus generation and attacks");
}

inline std::pair<std::vector<SyntheticDetector>, std::vector<FeatureSample>>
make_pool_and_corpus(const PoolFlags& flags) {
    Rng pool_rng(flags.pool_seed);
    int core_size = std::min(8, flags.dim);
    std::vector<SyntheticDetector> pool =
        gen_pool(flags.dim, flags.detectors, flags.overlap, pool_rng, core_size);
    Rng corpus_rng = Rng::derive(flags.seed, {0xC0125});
    std::vector<FeatureSample> corpus = gen_corpus(pool, flags.samples, corpus_rng);
    return {std::move(pool), std::move(corpus)};
}

}  // namespace detail

// Entry point behind the randchain binary: parses argv (program name already
// stripped), runs one subcommand, writes artifacts. Exit status 0 on
// success, 1 on runtime/data errors, 2 on usage errors.
inline int run_command(std::vector<std::string> args, std::ostream& out,
                       std::ostream& err) {
    CLI::App app{"randomized detector-chaining simulator"};
    app.require_subcommand(1);

    // validate
    std::string v_input;
    CLI::App* validate = app.add_subcommand(
        "validate", "parse a detection matrix and report its shape");
    validate->add_option("--input", v_input, "matrix csv")->required();

    // curve
    std::string c_input, c_method{"exact"}, c_out, c_svg;
    int c_k_max = 10;
    long long c_trials = 100000;
    uint64_t c_seed = 0;
    bool c_shared = false;
    CLI::App* curve = app.add_subcommand(
        "curve", "detection-rate curve over random subset sizes");
    curve->add_option("--input", c_input, "matrix csv")->required();
    curve->add_option("--k-max", c_k_max, "largest subset size")
        ->required()
        ->check(CLI::PositiveNumber);
    curve->add_option("--method", c_method, "exact or mc")
        ->check(CLI::IsMember({"exact", "mc"}));
    curve->add_option("--trials", c_trials, "Monte Carlo trials per k")
        ->check(CLI::PositiveNumber);
    curve->add_option("--seed", c_seed, "Monte Carlo seed");
    curve->add_flag("--shared-subset", c_shared,
                    "Monte Carlo: one subset per trial instead of one per sample");
    curve->add_option("--out", c_out, "curve csv path (stdout when omitted)");
    curve->add_option("--svg", c_svg, "also render the curve as svg");

    // transfer
    std::string t_input, t_source, t_out;
    CLI::App* transfer = app.add_subcommand(
        "transfer", "transferability of one detector's evasive set to the others");
    transfer->add_option("--input", t_input, "matrix csv")->required();
    transfer->add_option("--source", t_source, "source detector name")->required();
    transfer->add_option("--out", t_out, "transfer csv path (stdout when omitted)");

    // attack
    detail::PoolFlags a_flags;
    std::string a_attacker, a_out;
    CLI::App* attack = app.add_subcommand(
        "attack", "black-box attack against one synthetic detector");
    attack->add_option("--attacker", a_attacker, "mab or gamma")
        ->required()
        ->check(CLI::IsMember({"mab", "gamma"}));
    detail::add_pool_flags(attack, a_flags);
    attack->add_option("--out", a_out, "json report path (stdout when omitted)");

    // defend
    detail::PoolFlags d_flags;
    std::string d_attacker, d_out, d_svg;
    int d_chain_k = 5;
    int d_k_max = 0;
    long long d_trials = 2000;
    CLI::App* defend = app.add_subcommand(
        "defend", "full defense experiment: attack one member, score the chain");
    defend->add_option("--attacker", d_attacker, "mab or gamma")
        ->required()
        ->check(CLI::IsMember({"mab", "gamma"}));
    defend->add_option("--chain-k", d_chain_k, "random detectors per scan queue")
        ->check(CLI::PositiveNumber);
    defend->add_option("--k-max", d_k_max, "largest k on the reported curves")
        ->check(CLI::PositiveNumber);
    defend->add_option("--trials", d_trials, "Monte Carlo trials")
        ->check(CLI::PositiveNumber);
    detail::add_pool_flags(defend, d_flags);
    defend->add_option("--out", d_out, "json report path (stdout when omitted)");
    defend->add_option("--svg", d_svg, "render the exact curve as svg");

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (app.got_subcommand(validate)) {
            DetectionMatrix matrix = parse_matrix(detail::read_file(v_input));
            out << "detectors: " << matrix.detector_count() << "\n";
            out << "samples: " << matrix.sample_count() << "\n";
            std::map<std::size_t, std::size_t> histogram;
            for (std::size_t i = 0; i < matrix.sample_count(); ++i) {
                ++histogram[detection_count(matrix, i)];
            }
            out << "detection_count histogram:\n";
            for (const auto& [m, count] : histogram) {
                out << "  " << m << ": " << count << "\n";
            }
            return 0;
        }

        if (app.got_subcommand(curve)) {
            DetectionMatrix matrix = parse_matrix(detail::read_file(c_input));
            if (c_k_max > static_cast<int>(matrix.detector_count())) {
                throw RangeError("--k-max " + std::to_string(c_k_max) +
                                 " exceeds the matrix's " +
                                 std::to_string(matrix.detector_count()) + " detectors");
            }
            CurvePoints points =
                c_method == "exact"
                    ? exact_curve(matrix, c_k_max)
                    : monte_carlo_curve(matrix, c_k_max, c_trials, c_seed, c_shared);
            detail::deliver(c_out, emit_curve(points, ReportFormat::csv), out);
            if (!c_svg.empty()) detail::write_file(c_svg, render_curve_svg(points));
            return 0;
        }

        if (app.got_subcommand(transfer)) {
            DetectionMatrix matrix = parse_matrix(detail::read_file(t_input));
            const std::vector<std::string>& names = matrix.detector_names();
            auto it = std::find(names.begin(), names.end(), t_source);
            if (it == names.end()) {
                throw KeyError("detector '" + t_source + "' not in matrix");
            }
            std::size_t source = static_cast<std::size_t>(it - names.begin());
            std::vector<SampleId> evasive;
            for (std::size_t i = 0; i < matrix.sample_count(); ++i) {
                if (matrix.at(i, source) == Verdict::Benign) {
                    evasive.push_back(matrix.sample_ids()[i]);
                }
            }
            if (evasive.empty()) {
                throw Error("no samples evade detector '" + t_source +
                            "'; transfer rate undefined");
            }
            std::vector<TransferRow> rows;
            for (std::size_t j = 0; j < names.size(); ++j) {
                if (j == source) continue;
                std::unordered_map<SampleId, Verdict> target;
                std::size_t both = 0;
                for (std::size_t i = 0; i < matrix.sample_count(); ++i) {
                    target[matrix.sample_ids()[i]] = matrix.at(i, j);
                }
                for (const SampleId& id : evasive) {
                    if (target[id] == Verdict::Benign) ++both;
                }
                rows.push_back(TransferRow{t_source, names[j], evasive.size(), both,
                                           transferability(evasive, target)});
            }
            detail::deliver(t_out, emit_transfer(rows, ReportFormat::csv), out);
            return 0;
        }

        if (app.got_subcommand(attack)) {
            if (a_flags.train_index >= a_flags.detectors) {
                err << "usage error: --train-index must be below --detectors\n";
                return 2;
            }
            auto [pool, corpus] = detail::make_pool_and_corpus(a_flags);
            AttackerKind kind =
                a_attacker == "mab" ? AttackerKind::mab : AttackerKind::gamma;
            AttackBatch batch = run_attack_batch(
                kind, pool[static_cast<std::size_t>(a_flags.train_index)], corpus,
                a_flags.seed);
            std::size_t evasive = batch.evasive.size();
            nlohmann::ordered_json j;
            j["attacker"] = a_attacker;
            j["pool"] = {{"detectors", a_flags.detectors},
                         {"dim", a_flags.dim},
                         {"overlap", round_to_rendered(a_flags.overlap)},
                         {"pool_seed", a_flags.pool_seed}};
            j["train_index"] = a_flags.train_index;
            j["trained_detector"] = pool[static_cast<std::size_t>(a_flags.train_index)].name;
            j["samples"] = a_flags.samples;
            j["seed"] = a_flags.seed;
            j["evasive_count"] = evasive;
            j["evasion_rate"] = round_to_rendered(
                static_cast<double>(evasive) / static_cast<double>(corpus.size()));
            if (kind == AttackerKind::mab) {
                j["machines"] = detail::machines_json(batch.machines);
            }
            j["per_sample"] = detail::records_json(batch.records, kind);
            detail::deliver(a_out, j.dump(2) + "\n", out);
            return 0;
        }

        if (app.got_subcommand(defend)) {
            if (d_flags.train_index >= d_flags.detectors) {
                err << "usage error: --train-index must be below --detectors\n";
                return 2;
            }
            if (d_chain_k > d_flags.detectors) {
                err << "usage error: --chain-k must not exceed --detectors\n";
                return 2;
            }
            auto [pool, corpus] = detail::make_pool_and_corpus(d_flags);
            AttackerKind kind =
                d_attacker == "mab" ? AttackerKind::mab : AttackerKind::gamma;
            ExperimentReport report =
                run_defense_experiment(kind, pool, d_flags.train_index, d_chain_k,
                                       corpus, d_trials, d_flags.seed, d_k_max);
            nlohmann::ordered_json j;
            j["attacker"] = d_attacker;
            j["pool"] = {{"detectors", d_flags.detectors},
                         {"dim", d_flags.dim},
                         {"overlap", round_to_rendered(d_flags.overlap)},
                         {"pool_seed", d_flags.pool_seed}};
            j["train_index"] = report.train_index;
            j["trained_detector"] = report.trained_detector;
            j["chain_k"] = report.chain_k;
            j["samples"] = d_flags.samples;
            j["trials"] = d_trials;
            j["seed"] = d_flags.seed;
            j["evasive_count"] = report.evasive_count;
            j["evasion_rate"] = round_to_rendered(report.evasion_rate);
            j["mean_scans_performed"] = round_to_rendered(report.mean_scans_performed);
            nlohmann::ordered_json transfer_rows = nlohmann::ordered_json::array();
            for (const TransferRow& r : report.transfer) {
                transfer_rows.push_back({{"target", r.target},
                                         {"evasive_source", r.evasive_source},
                                         {"evasive_both", r.evasive_both},
                                         {"rate", round_to_rendered(r.rate)}});
            }
            j["transferability"] = std::move(transfer_rows);
            j["exact_curve"] = detail::curve_json(report.exact);
            j["mc_curve"] = detail::curve_json(report.monte_carlo);
            if (kind == AttackerKind::mab) {
                j["machines"] = detail::machines_json(report.machines);
            }
            j["per_sample"] = detail::records_json(report.per_sample, kind);
            detail::deliver(d_out, j.dump(2) + "\n", out);
            if (!d_svg.empty()) detail::write_file(d_svg, render_curve_svg(report.exact));
            return 0;
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    err << "usage error: no subcommand\n";
    return 2;
}

}  // namespace randchain
