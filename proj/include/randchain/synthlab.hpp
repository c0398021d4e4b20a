#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "randchain/analysis.hpp"
#include "randchain/chain.hpp"
#include "randchain/core.hpp"
#include "randchain/errors.hpp"
#include "randchain/gamma.hpp"
#include "randchain/io.hpp"
#include "randchain/mab.hpp"
#include "randchain/rng.hpp"

namespace randchain {

// Pool generator. Every detector draws core_size decisive features:
// round(overlap * core_size) of them come from a common core (the same core
// members for every detector), the rest from a shuffled non-overlapping
// allocation of the remaining indices (wrapping around only when the feature
// space is too small). overlap=1 gives identical decisive sets; overlap=0
// with n_detectors * core_size <= d gives pairwise-disjoint sets.
//
// Weights on decisive indices are standard normal; the bias is set so the
// reference malicious point (all features = 1) sits `margin` above the
// decision boundary for every detector.
inline std::vector<SyntheticDetector> gen_pool(int dim, int n_detectors, double overlap,
                                               Rng& rng, int core_size = 8,
                                               double margin = 1.0) {
    if (dim < 2) throw RangeError("dim must be >= 2, got " + std::to_string(dim));
    if (n_detectors < 1) throw RangeError("n_detectors must be >= 1");
    if (overlap < 0.0 || overlap > 1.0) throw RangeError("overlap must be in [0, 1]");
    if (core_size < 1 || core_size > dim) {
        throw RangeError("core_size must be in [1, dim]");
    }

    std::vector<std::size_t> perm(static_cast<std::size_t>(dim));
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = 0; i + 1 < perm.size(); ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.next_below(perm.size() - i));
        std::swap(perm[i], perm[j]);
    }

    const std::size_t c = static_cast<std::size_t>(core_size);
    const std::size_t shared =
        static_cast<std::size_t>(std::llround(overlap * static_cast<double>(core_size)));
    // Private allocation pool: the permutation minus the shared core members.
    std::vector<std::size_t> pool;
    for (std::size_t idx = shared; idx < perm.size(); ++idx) pool.push_back(perm[idx]);
    std::size_t cursor = 0;

    const int name_width = n_detectors >= 100 ? 3 : 2;
    std::vector<SyntheticDetector> detectors;
    detectors.reserve(static_cast<std::size_t>(n_detectors));
    for (int i = 0; i < n_detectors; ++i) {
        std::vector<std::size_t> decisive(perm.begin(),
                                          perm.begin() + static_cast<std::ptrdiff_t>(shared));
        for (std::size_t j = shared; j < c; ++j) {
            decisive.push_back(pool[cursor % pool.size()]);
            ++cursor;
        }
        std::vector<double> weights(static_cast<std::size_t>(dim), 0.0);
        double ref_sum = 0.0;
        for (std::size_t idx : decisive) {
            double w = rng.normal();
            while (w == 0.0) w = rng.normal();
            weights[idx] = w;
            ref_sum += w;
        }
        std::string number = std::to_string(i + 1);
        while (static_cast<int>(number.size()) < name_width) number = "0" + number;
        detectors.push_back(make_detector("det" + number, std::move(weights),
                                          margin - ref_sum));
    }
    return detectors;
}

// Malicious corpus around the reference point (all ones), rejected until
// every pool member flags it, so attacks always start from a detected sample.
inline std::vector<FeatureSample> gen_corpus(const std::vector<SyntheticDetector>& pool,
                                             int count, Rng& rng, double noise = 0.05) {
    if (pool.empty()) throw ConfigError("gen_corpus needs a non-empty pool");
    if (count < 1) throw RangeError("count must be >= 1");
    const std::size_t dim = pool.front().weights.size();
    std::vector<FeatureSample> corpus;
    corpus.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        FeatureSample sample;
        std::string number = std::to_string(i);
        while (number.size() < 3) number = "0" + number;
        sample.id = "s" + number;
        sample.is_malicious_ground_truth = true;
        for (int attempt = 0; attempt < 100; ++attempt) {
            sample.features.assign(dim, 1.0);
            for (std::size_t j = 0; j < dim; ++j) {
                sample.features[j] += (rng.next_double() * 2.0 - 1.0) * noise;
            }
            bool all_flag = true;
            for (const SyntheticDetector& det : pool) {
                if (detector_verdict(det, sample) != Verdict::Malicious) {
                    all_flag = false;
                    break;
                }
            }
            if (all_flag) break;
            sample.features.assign(dim, 1.0);  // fallback: the reference point itself
        }
        corpus.push_back(std::move(sample));
    }
    return corpus;
}

// Displacements for the rewrite actions: dense for macro actions, a single
// small nudge scale for the micro action.
inline ActionEffects gen_action_effects(int dim, Rng& rng, double macro_scale = 0.6,
                                        double micro_scale = 0.05) {
    if (dim < 1) throw RangeError("dim must be >= 1");
    ActionEffects effects;
    for (Action a : all_actions()) {
        double scale = action_kind(a) == ActionKind::micro ? micro_scale : macro_scale;
        std::vector<double> displacement(static_cast<std::size_t>(dim));
        for (double& v : displacement) v = rng.normal() * scale;
        effects[a] = std::move(displacement);
    }
    return effects;
}

// Benign payload sections: random feature displacement plus a declared size.
inline std::vector<BenignSection> gen_benign_sections(int dim, int count, Rng& rng,
                                                      double scale = 0.5) {
    if (dim < 1) throw RangeError("dim must be >= 1");
    if (count < 1) throw RangeError("count must be >= 1");
    std::vector<BenignSection> sections;
    sections.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        BenignSection sec;
        sec.displacement.resize(static_cast<std::size_t>(dim));
        for (double& v : sec.displacement) v = rng.normal() * scale;
        sec.size_bytes = 100.0 + std::floor(rng.next_double() * 9900.0);
        sections.push_back(std::move(sec));
    }
    return sections;
}

enum class AttackerKind : uint8_t { mab, gamma };

inline std::string_view attacker_name(AttackerKind a) {
    return a == AttackerKind::mab ? "mab" : "gamma";
}

struct SampleAttackRecord {
    SampleId id;
    AttackStatus status = AttackStatus::Failed;
    int attempts_used = 0;
    std::vector<Action> minimized_trace;  // mab
    double best_objective = 0.0;          // gamma
    std::vector<double> injection;        // gamma
};

// Result of attacking one detector over a whole corpus.
struct AttackBatch {
    std::vector<SampleAttackRecord> records;
    std::vector<BanditMachine> machines;  // final posteriors (mab)
    std::vector<FeatureSample> evasive;   // minimized/injected evasive samples
};

// Attack pool[train] on every corpus sample. MAB machines are shared across
// the batch in corpus order, so the bandit keeps learning; per-episode rng
// streams are derived from (seed, sample index). Action effects and benign
// sections come from streams derived from `seed` as well, so a batch is
// fully reproducible from (detector, corpus, seed).
inline AttackBatch run_attack_batch(AttackerKind attacker,
                                    const SyntheticDetector& trained,
                                    const std::vector<FeatureSample>& corpus,
                                    uint64_t seed) {
    if (corpus.empty()) throw ConfigError("empty corpus");
    const int dim = static_cast<int>(trained.weights.size());

    MabConfig mab_config;
    GammaConfig gamma_config;
    std::vector<BenignSection> sections;
    AttackBatch batch;
    batch.machines = default_machines();
    if (attacker == AttackerKind::mab) {
        Rng fx = Rng::derive(seed, {0xEFFEC7});
        mab_config.effects = gen_action_effects(dim, fx);
    } else {
        Rng sx = Rng::derive(seed, {0x5EC7});
        sections = gen_benign_sections(dim, 8, sx);
    }

    for (std::size_t i = 0; i < corpus.size(); ++i) {
        Rng episode = Rng::derive(seed, {0xA77ACC, static_cast<uint64_t>(i)});
        SampleAttackRecord record;
        record.id = corpus[i].id;
        if (attacker == AttackerKind::mab) {
            AttackOutcome outcome =
                mab_attack(corpus[i], trained, mab_config, batch.machines, episode);
            record.status = outcome.status;
            record.attempts_used = outcome.attempts_used;
            record.minimized_trace = outcome.minimized_trace;
            if (outcome.status == AttackStatus::Evasive) {
                batch.evasive.push_back(outcome.final_sample);
            }
        } else {
            GammaOutcome outcome =
                gamma_attack(corpus[i], sections, trained, gamma_config, episode);
            record.status = outcome.outcome.status;
            record.attempts_used = outcome.outcome.attempts_used;
            record.best_objective = outcome.best_objective;
            record.injection = outcome.injection;
            if (outcome.outcome.status == AttackStatus::Evasive) {
                batch.evasive.push_back(outcome.outcome.final_sample);
            }
        }
        batch.records.push_back(std::move(record));
    }
    return batch;
}

struct ExperimentReport {
    AttackerKind attacker = AttackerKind::mab;
    std::string trained_detector;
    int train_index = 0;
    int chain_k = 1;
    std::size_t pool_size = 0;
    std::size_t corpus_size = 0;
    std::size_t evasive_count = 0;
    double evasion_rate = 0.0;
    std::vector<SampleAttackRecord> per_sample;
    std::vector<BanditMachine> machines;  // mab only
    // Populated only when at least one sample evaded the trained detector:
    std::optional<DetectionMatrix> evasive_matrix;
    CurvePoints exact;
    CurvePoints monte_carlo;
    std::vector<TransferRow> transfer;
    double mean_scans_performed = 0.0;
};

// Closed-loop defense experiment: attack pool[train_index] on every corpus
// sample, then measure the randomized chain on the evasive set (exact and
// Monte Carlo curves, per-member transferability, measured scan cost at
// chain_k). Reproducible from (pool, corpus, seed).
inline ExperimentReport run_defense_experiment(AttackerKind attacker,
                                               const std::vector<SyntheticDetector>& pool,
                                               int train_index, int chain_k,
                                               const std::vector<FeatureSample>& corpus,
                                               long long trials, uint64_t seed,
                                               int k_max = 0) {
    if (pool.empty()) throw ConfigError("empty detector pool");
    const int n = static_cast<int>(pool.size());
    if (train_index < 0 || train_index >= n) {
        throw ConfigError("train_index out of range");
    }
    if (chain_k < 1 || chain_k > n) {
        throw ConfigError("chain_k must be in [1, pool size]");
    }
    if (trials < 1) throw ConfigError("trials must be >= 1");
    if (k_max == 0) k_max = std::min(std::max(10, chain_k), n);
    if (k_max < chain_k || k_max > n) throw ConfigError("k_max must be in [chain_k, n]");

    const SyntheticDetector& trained = pool[static_cast<std::size_t>(train_index)];
    AttackBatch batch = run_attack_batch(attacker, trained, corpus, seed);

    ExperimentReport report;
    report.attacker = attacker;
    report.trained_detector = trained.name;
    report.train_index = train_index;
    report.chain_k = chain_k;
    report.pool_size = static_cast<std::size_t>(n);
    report.corpus_size = corpus.size();
    report.per_sample = std::move(batch.records);
    if (attacker == AttackerKind::mab) report.machines = std::move(batch.machines);
    report.evasive_count = batch.evasive.size();
    report.evasion_rate =
        static_cast<double>(batch.evasive.size()) / static_cast<double>(corpus.size());
    if (batch.evasive.empty()) return report;

    // Verdict grid of the evasive set against the whole pool.
    std::vector<std::string> names;
    for (const SyntheticDetector& det : pool) names.push_back(det.name);
    std::vector<SampleId> ids;
    std::vector<Verdict> verdicts;
    for (const FeatureSample& sample : batch.evasive) {
        ids.push_back(sample.id);
        for (const SyntheticDetector& det : pool) {
            verdicts.push_back(detector_verdict(det, sample));
        }
    }
    DetectionMatrix matrix(std::move(names), std::move(ids), std::move(verdicts));

    for (int j = 0; j < n; ++j) {
        if (j == train_index) continue;
        std::unordered_map<SampleId, Verdict> target;
        std::size_t both = 0;
        for (std::size_t i = 0; i < matrix.sample_count(); ++i) {
            Verdict v = matrix.at(i, static_cast<std::size_t>(j));
            target[matrix.sample_ids()[i]] = v;
            if (v == Verdict::Benign) ++both;
        }
        double rate = transferability(matrix.sample_ids(), target);
        report.transfer.push_back(TransferRow{trained.name,
                                              pool[static_cast<std::size_t>(j)].name,
                                              matrix.sample_count(), both, rate});
    }

    report.exact = exact_curve(matrix, k_max);
    report.monte_carlo = monte_carlo_curve(matrix, k_max, trials,
                                           Rng::derive_seed(seed, {0x3C}));

    // Measured chain cost at the operating point: random subsets of size
    // chain_k, scan order = selection order, short-circuit on first flag.
    Rng scans_rng = Rng::derive(seed, {0x5CA75});
    std::vector<std::vector<Verdict>> rows;
    for (std::size_t i = 0; i < matrix.sample_count(); ++i) rows.push_back(matrix.row(i));
    long long total_scans = 0;
    long long scan_count = 0;
    std::vector<std::size_t> scratch;
    for (long long t = 0; t < trials; ++t) {
        for (const std::vector<Verdict>& row : rows) {
            detail::sample_indices(static_cast<std::size_t>(n),
                                   static_cast<std::size_t>(chain_k), scans_rng, scratch);
            ChainVerdict cv = chain_scan(
                row, std::span<const std::size_t>(scratch.data(),
                                                  static_cast<std::size_t>(chain_k)));
            total_scans += static_cast<long long>(cv.scans_performed);
            ++scan_count;
        }
    }
    report.mean_scans_performed =
        static_cast<double>(total_scans) / static_cast<double>(scan_count);
    report.evasive_matrix = std::move(matrix);
    return report;
}

}  // namespace randchain
