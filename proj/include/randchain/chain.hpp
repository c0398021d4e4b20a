#pragma once

#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "randchain/core.hpp"
#include "randchain/errors.hpp"
#include "randchain/rng.hpp"

namespace randchain {

// Randomized-chaining policy: scan a uniformly random k-subset of an n-pool.
struct ChainConfig {
    std::size_t pool_size = 1;
    std::size_t subset_size = 1;
    uint64_t seed = 0;

    void validate() const {
        if (pool_size < 1) throw ConfigError("pool_size must be >= 1");
        if (subset_size < 1 || subset_size > pool_size) {
            throw ConfigError("subset_size must be in [1, pool_size], got k=" +
                              std::to_string(subset_size) + " n=" +
                              std::to_string(pool_size));
        }
    }
};

struct ChainVerdict {
    Verdict verdict = Verdict::Benign;
    std::size_t scans_performed = 0;
    std::optional<std::size_t> flagging_detector;
};

namespace detail {

// Partial Fisher-Yates: leaves a uniform random ordered k-subset of [0, n)
// in scratch[0..k). Exactly uniform over all C(n,k) subsets and all k!
// orders of each.
inline void sample_indices(std::size_t n, std::size_t k, Rng& rng,
                           std::vector<std::size_t>& scratch) {
    scratch.resize(n);
    std::iota(scratch.begin(), scratch.end(), std::size_t{0});
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.next_below(n - i));
        std::swap(scratch[i], scratch[j]);
    }
}

}  // namespace detail

// Ordered sequence of k distinct detector indices; the order is the scan order.
inline std::vector<std::size_t> select_subset(std::size_t n, std::size_t k, Rng& rng) {
    if (k < 1 || k > n) {
        throw ConfigError("subset size must be in [1, n], got k=" + std::to_string(k) +
                          " n=" + std::to_string(n));
    }
    std::vector<std::size_t> scratch;
    detail::sample_indices(n, k, rng, scratch);
    scratch.resize(k);
    return scratch;
}

// Scan precomputed verdicts in subset order, short-circuiting at the first
// Malicious. Benign only if every subset member rates Benign.
inline ChainVerdict chain_scan(std::span<const Verdict> verdict_row,
                               std::span<const std::size_t> subset) {
    if (subset.empty()) throw ConfigError("chain_scan needs a non-empty subset");
    for (std::size_t idx : subset) {
        if (idx >= verdict_row.size()) {
            throw RangeError("subset index " + std::to_string(idx) +
                             " out of range for row of " +
                             std::to_string(verdict_row.size()));
        }
    }
    ChainVerdict result;
    for (std::size_t idx : subset) {
        ++result.scans_performed;
        if (verdict_row[idx] == Verdict::Malicious) {
            result.verdict = Verdict::Malicious;
            result.flagging_detector = idx;
            return result;
        }
    }
    result.verdict = Verdict::Benign;
    return result;
}

// Same contract against live scorers; detectors after the first Malicious
// verdict are never evaluated.
inline ChainVerdict chain_scan_live(const FeatureSample& sample,
                                    std::span<const SyntheticDetector> detectors,
                                    std::span<const std::size_t> subset) {
    if (subset.empty()) throw ConfigError("chain_scan_live needs a non-empty subset");
    for (std::size_t idx : subset) {
        if (idx >= detectors.size()) {
            throw RangeError("subset index " + std::to_string(idx) +
                             " out of range for pool of " +
                             std::to_string(detectors.size()));
        }
    }
    ChainVerdict result;
    for (std::size_t idx : subset) {
        ++result.scans_performed;
        if (detector_verdict(detectors[idx], sample) == Verdict::Malicious) {
            result.verdict = Verdict::Malicious;
            result.flagging_detector = idx;
            return result;
        }
    }
    result.verdict = Verdict::Benign;
    return result;
}

}  // namespace randchain
