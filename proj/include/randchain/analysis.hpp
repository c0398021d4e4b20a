#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "randchain/chain.hpp"
#include "randchain/core.hpp"
#include "randchain/errors.hpp"
#include "randchain/rng.hpp"

namespace randchain {

enum class CurveMethod : uint8_t { exact_per_sample, monte_carlo_per_trial };

inline std::string_view curve_method_name(CurveMethod m) {
    return m == CurveMethod::exact_per_sample ? "exact_per_sample"
                                              : "monte_carlo_per_trial";
}

struct CurvePoint {
    int k = 0;
    double mean = 0.0;
    double std_dev = 0.0;
};

// Detection-rate curve: one (mean, std) per subset size k. `method` records
// whether the dispersion is across samples (exact) or across trials (MC).
struct CurvePoints {
    std::vector<CurvePoint> points;
    CurveMethod method = CurveMethod::exact_per_sample;
    std::optional<long long> trials;
    std::optional<uint64_t> seed;
};

/// Probability that a uniformly random k-subset of n detectors contains at
/// least one of the m detectors that flag the sample:
///   P = 1 - C(n-m, k) / C(n, k)
/// evaluated as the telescoping product prod_{j=0..k-1} (n-m-j)/(n-j).
inline double exact_detection_probability(int n, int m, int k) {
    if (n < 1) throw RangeError("n must be >= 1, got " + std::to_string(n));
    if (m < 0 || m > n) {
        throw RangeError("m must be in [0, n], got m=" + std::to_string(m) +
                         " n=" + std::to_string(n));
    }
    if (k < 1 || k > n) {
        throw RangeError("k must be in [1, n], got k=" + std::to_string(k) +
                         " n=" + std::to_string(n));
    }
    // k == 1 is exactly m/n; computed directly so the k=1 point matches the
    // single-detector rate bit for bit.
    if (k == 1) return static_cast<double>(m) / static_cast<double>(n);
    if (k > n - m) return 1.0;  // every k-subset hits a flagger
    double miss = 1.0;
    for (int j = 0; j < k; ++j) {
        miss *= static_cast<double>(n - m - j) / static_cast<double>(n - j);
    }
    return 1.0 - miss;
}

namespace detail {

inline void check_curve_args(const DetectionMatrix& matrix, int k_max) {
    const int n = static_cast<int>(matrix.detector_count());
    if (k_max < 1 || k_max > n) {
        throw RangeError("k_max must be in [1, n], got k_max=" + std::to_string(k_max) +
                         " n=" + std::to_string(n));
    }
}

inline CurvePoint mean_std_point(int k, const std::vector<double>& values) {
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(values.size());  // population variance
    return CurvePoint{k, mean, std::sqrt(var)};
}

}  // namespace detail

// Exact curve: per k, mean and population std over samples of the exact
// per-sample detection probability.
inline CurvePoints exact_curve(const DetectionMatrix& matrix, int k_max) {
    detail::check_curve_args(matrix, k_max);
    const int n = static_cast<int>(matrix.detector_count());
    const std::size_t s = matrix.sample_count();
    std::vector<int> flaggers(s);
    for (std::size_t i = 0; i < s; ++i) {
        flaggers[i] = static_cast<int>(detection_count(matrix, i));
    }
    CurvePoints curve;
    curve.method = CurveMethod::exact_per_sample;
    std::vector<double> probs(s);
    for (int k = 1; k <= k_max; ++k) {
        for (std::size_t i = 0; i < s; ++i) {
            probs[i] = exact_detection_probability(n, flaggers[i], k);
        }
        curve.points.push_back(detail::mean_std_point(k, probs));
    }
    return curve;
}

// Monte Carlo curve: per k, each trial draws one fresh subset per sample and
// scores the fraction of samples detected; mean/std are over trial fractions.
// Stream per (k, trial) so parallel and serial runs agree. When
// shared_subset is set, one subset per trial is reused for every sample.
inline CurvePoints monte_carlo_curve(const DetectionMatrix& matrix, int k_max,
                                     long long trials, uint64_t seed,
                                     bool shared_subset = false) {
    detail::check_curve_args(matrix, k_max);
    if (trials < 1) throw ConfigError("trials must be >= 1, got " + std::to_string(trials));
    const std::size_t n = matrix.detector_count();
    const std::size_t s = matrix.sample_count();

    // Row bitmaps, row-major, for the hot loop.
    std::vector<uint8_t> flagged(s * n);
    for (std::size_t i = 0; i < s; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            flagged[i * n + j] = matrix.at(i, j) == Verdict::Malicious ? 1 : 0;
        }
    }

    CurvePoints curve;
    curve.method = CurveMethod::monte_carlo_per_trial;
    curve.trials = trials;
    curve.seed = seed;

    std::vector<std::size_t> scratch(n);
    std::vector<double> fractions(static_cast<std::size_t>(trials));
    for (int k = 1; k <= k_max; ++k) {
        for (long long t = 0; t < trials; ++t) {
            Rng rng = Rng::derive(seed, {static_cast<uint64_t>(k), static_cast<uint64_t>(t)});
            std::size_t detected = 0;
            if (shared_subset) {
                detail::sample_indices(n, static_cast<std::size_t>(k), rng, scratch);
                for (std::size_t i = 0; i < s; ++i) {
                    for (std::size_t j = 0; j < static_cast<std::size_t>(k); ++j) {
                        if (flagged[i * n + scratch[j]]) {
                            ++detected;
                            break;
                        }
                    }
                }
            } else {
                for (std::size_t i = 0; i < s; ++i) {
                    detail::sample_indices(n, static_cast<std::size_t>(k), rng, scratch);
                    for (std::size_t j = 0; j < static_cast<std::size_t>(k); ++j) {
                        if (flagged[i * n + scratch[j]]) {
                            ++detected;
                            break;
                        }
                    }
                }
            }
            fractions[static_cast<std::size_t>(t)] =
                static_cast<double>(detected) / static_cast<double>(s);
        }
        curve.points.push_back(detail::mean_std_point(k, fractions));
    }
    return curve;
}

// Fraction of source-evasive samples that the target also rates Benign.
inline double transferability(const std::vector<SampleId>& evasive_on_source,
                              const std::unordered_map<SampleId, Verdict>& target_verdicts) {
    if (evasive_on_source.empty()) {
        throw ConfigError("transferability is undefined for an empty evasive set");
    }
    std::size_t benign_on_target = 0;
    for (const SampleId& id : evasive_on_source) {
        auto it = target_verdicts.find(id);
        if (it == target_verdicts.end()) {
            throw KeyError("sample '" + id + "' has no target verdict");
        }
        if (it->second == Verdict::Benign) ++benign_on_target;
    }
    return static_cast<double>(benign_on_target) /
           static_cast<double>(evasive_on_source.size());
}

}  // namespace randchain
