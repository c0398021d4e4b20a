#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "randchain/errors.hpp"

namespace randchain {

using SampleId = std::string;

enum class Verdict : uint8_t { Benign = 0, Malicious = 1 };

// Binary-rewriting actions available to the bandit attacker. A micro action
// injects a single byte; every other action is macro.
enum class Action : uint8_t {
    overlay_append = 0,
    section_append,
    section_add,
    code_cave_fill,
    micro_byte_perturb,
};

enum class ActionKind : uint8_t { macro, micro };

constexpr std::size_t kActionCount = 5;

constexpr std::array<Action, kActionCount> all_actions() {
    return {Action::overlay_append, Action::section_append, Action::section_add,
            Action::code_cave_fill, Action::micro_byte_perturb};
}

constexpr ActionKind action_kind(Action a) {
    return a == Action::micro_byte_perturb ? ActionKind::micro : ActionKind::macro;
}

inline std::string_view action_name(Action a) {
    switch (a) {
        case Action::overlay_append: return "overlay_append";
        case Action::section_append: return "section_append";
        case Action::section_add: return "section_add";
        case Action::code_cave_fill: return "code_cave_fill";
        case Action::micro_byte_perturb: return "micro_byte_perturb";
    }
    return "unknown";
}

// Abstract stand-in for a scannable binary: a point in feature space plus
// the rewrite history that produced it.
struct FeatureSample {
    SampleId id;
    std::vector<double> features;
    bool is_malicious_ground_truth = true;
    std::vector<Action> action_trace;
};

// Linear-threshold scorer: score = logistic(w.x + b), flags when score > 0.5.
struct SyntheticDetector {
    std::string name;
    std::vector<double> weights;
    double bias = 0.0;
    std::vector<std::size_t> decisive_features;  // indices with non-zero weight
};

inline SyntheticDetector make_detector(std::string name, std::vector<double> weights,
                                       double bias) {
    SyntheticDetector det{std::move(name), std::move(weights), bias, {}};
    for (std::size_t j = 0; j < det.weights.size(); ++j) {
        if (det.weights[j] != 0.0) det.decisive_features.push_back(j);
    }
    return det;
}

inline double logistic(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

inline double detector_score(const SyntheticDetector& det, const FeatureSample& sample) {
    if (det.weights.size() != sample.features.size()) {
        throw DimensionError("detector '" + det.name + "' expects dimension " +
                             std::to_string(det.weights.size()) + ", sample '" +
                             sample.id + "' has " +
                             std::to_string(sample.features.size()));
    }
    double z = det.bias;
    for (std::size_t j = 0; j < det.weights.size(); ++j) {
        z += det.weights[j] * sample.features[j];
    }
    return logistic(z);
}

inline Verdict detector_verdict(const SyntheticDetector& det, const FeatureSample& sample) {
    return detector_score(det, sample) > 0.5 ? Verdict::Malicious : Verdict::Benign;
}

// Per-sample x per-detector verdict grid. Row-major, s rows by n columns.
class DetectionMatrix {
public:
    DetectionMatrix(std::vector<std::string> detector_names,
                    std::vector<SampleId> sample_ids, std::vector<Verdict> verdicts)
        : detector_names_(std::move(detector_names)),
          sample_ids_(std::move(sample_ids)),
          verdicts_(std::move(verdicts)) {
        if (detector_names_.empty()) throw ShapeError("matrix needs at least one detector");
        if (sample_ids_.empty()) throw ShapeError("matrix needs at least one sample");
        if (verdicts_.size() != detector_names_.size() * sample_ids_.size()) {
            throw ShapeError("verdict grid is " + std::to_string(verdicts_.size()) +
                             " cells, expected " +
                             std::to_string(detector_names_.size() * sample_ids_.size()));
        }
        check_unique(detector_names_, "detector name");
        check_unique(sample_ids_, "sample id");
    }

    std::size_t detector_count() const { return detector_names_.size(); }
    std::size_t sample_count() const { return sample_ids_.size(); }

    const std::vector<std::string>& detector_names() const { return detector_names_; }
    const std::vector<SampleId>& sample_ids() const { return sample_ids_; }

    Verdict at(std::size_t sample_index, std::size_t detector_index) const {
        if (sample_index >= sample_count()) {
            throw RangeError("sample index " + std::to_string(sample_index) +
                             " out of range (s=" + std::to_string(sample_count()) + ")");
        }
        if (detector_index >= detector_count()) {
            throw RangeError("detector index " + std::to_string(detector_index) +
                             " out of range (n=" + std::to_string(detector_count()) + ")");
        }
        return verdicts_[sample_index * detector_count() + detector_index];
    }

    // Whole verdict row for one sample, in detector order.
    std::vector<Verdict> row(std::size_t sample_index) const {
        if (sample_index >= sample_count()) {
            throw RangeError("sample index " + std::to_string(sample_index) +
                             " out of range (s=" + std::to_string(sample_count()) + ")");
        }
        auto begin = verdicts_.begin() +
                     static_cast<std::ptrdiff_t>(sample_index * detector_count());
        return std::vector<Verdict>(begin, begin + static_cast<std::ptrdiff_t>(detector_count()));
    }

    bool operator==(const DetectionMatrix& other) const {
        return detector_names_ == other.detector_names_ &&
               sample_ids_ == other.sample_ids_ && verdicts_ == other.verdicts_;
    }

private:
    static void check_unique(const std::vector<std::string>& names, const char* what) {
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (names[i].empty()) {
                throw ShapeError(std::string(what) + " at position " + std::to_string(i) +
                                 " is empty");
            }
            for (std::size_t j = i + 1; j < names.size(); ++j) {
                if (names[i] == names[j]) {
                    throw UniquenessError("duplicate " + std::string(what) + " '" +
                                          names[i] + "'");
                }
            }
        }
    }

    std::vector<std::string> detector_names_;
    std::vector<SampleId> sample_ids_;
    std::vector<Verdict> verdicts_;
};

// Number of Malicious verdicts in one row; with n this is the per-sample
// detection rate m/n.
inline std::size_t detection_count(const DetectionMatrix& matrix, std::size_t sample_index) {
    std::size_t count = 0;
    for (std::size_t j = 0; j < matrix.detector_count(); ++j) {
        if (matrix.at(sample_index, j) == Verdict::Malicious) ++count;
    }
    return count;
}

}  // namespace randchain
