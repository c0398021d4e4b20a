#pragma once

#include <algorithm>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "randchain/core.hpp"
#include "randchain/errors.hpp"
#include "randchain/mab.hpp"
#include "randchain/rng.hpp"

namespace randchain {

// One benign payload source: the feature displacement of injecting all of it,
// plus its declared size for the objective's size penalty.
struct BenignSection {
    std::vector<double> displacement;
    double size_bytes = 0.0;
};

// Injection vector in [0,1]^p (fraction of each benign section to inject)
// with its cached objective value.
struct GammaCandidate {
    std::vector<double> injection;
    double objective = std::numeric_limits<double>::infinity();
};

struct GammaConfig {
    int population_size = 30;
    int selection_size = 10;
    double mutation_probability = 0.1;
    double size_penalty = 1e-5;  // lambda, per injected byte
    int max_iterations = 100;

    void validate() const {
        if (population_size < 2) throw ConfigError("population_size must be >= 2");
        if (selection_size < 1 || selection_size > population_size) {
            throw ConfigError("selection_size must be in [1, population_size]");
        }
        if (mutation_probability < 0.0 || mutation_probability > 1.0) {
            throw ConfigError("mutation_probability must be in [0, 1]");
        }
        if (size_penalty < 0.0) throw ConfigError("size_penalty must be >= 0");
        if (max_iterations < 0) throw ConfigError("max_iterations must be >= 0");
    }
};

inline FeatureSample inject_sections(const FeatureSample& sample,
                                     const std::vector<double>& injection,
                                     const std::vector<BenignSection>& sections) {
    if (injection.size() != sections.size()) {
        throw DimensionError("injection has " + std::to_string(injection.size()) +
                             " components, " + std::to_string(sections.size()) +
                             " sections available");
    }
    FeatureSample out = sample;
    for (std::size_t j = 0; j < sections.size(); ++j) {
        const BenignSection& sec = sections[j];
        if (sec.displacement.size() != out.features.size()) {
            throw DimensionError("section " + std::to_string(j) + " has dimension " +
                                 std::to_string(sec.displacement.size()) +
                                 ", sample has " + std::to_string(out.features.size()));
        }
        for (std::size_t f = 0; f < out.features.size(); ++f) {
            out.features[f] += injection[j] * sec.displacement[f];
        }
    }
    return out;
}

// Objective to minimize: detection score of the injected sample plus
// lambda times the injected byte count.
inline double gamma_objective(const GammaCandidate& candidate,
                              const FeatureSample& sample,
                              const std::vector<BenignSection>& sections,
                              const SyntheticDetector& detector, double lambda) {
    FeatureSample injected = inject_sections(sample, candidate.injection, sections);
    double size = 0.0;
    for (std::size_t j = 0; j < sections.size(); ++j) {
        size += candidate.injection[j] * sections[j].size_bytes;
    }
    return detector_score(detector, injected) + lambda * size;
}

// One GA generation: keep the selection_size best, breed population_size
// children by uniform cross-over of random selected pairs, mutate each child
// component with probability mutation_probability, then union children with
// the incoming population and truncate to the population_size best. Elitism
// follows from the union: the best objective never increases.
inline std::vector<GammaCandidate> evolve_generation(
    const std::vector<GammaCandidate>& population, const GammaConfig& config,
    const std::function<double(const GammaCandidate&)>& evaluator, Rng& rng) {
    config.validate();
    if (population.empty()) throw ConfigError("evolve_generation needs a population");
    for (const GammaCandidate& c : population) {
        if (!(c.objective < std::numeric_limits<double>::infinity())) {
            throw ConfigError("evolve_generation needs an evaluated population");
        }
    }

    std::vector<std::size_t> order(population.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return population[a].objective < population[b].objective;
    });
    const std::size_t selected =
        std::min<std::size_t>(static_cast<std::size_t>(config.selection_size),
                              population.size());

    const std::size_t p = population.front().injection.size();
    std::vector<GammaCandidate> children;
    children.reserve(static_cast<std::size_t>(config.population_size));
    for (int c = 0; c < config.population_size; ++c) {
        const GammaCandidate& pa = population[order[rng.next_below(selected)]];
        const GammaCandidate& pb = population[order[rng.next_below(selected)]];
        GammaCandidate child;
        child.injection.resize(p);
        for (std::size_t j = 0; j < p; ++j) {
            child.injection[j] =
                rng.next_double() < 0.5 ? pa.injection[j] : pb.injection[j];
        }
        for (std::size_t j = 0; j < p; ++j) {
            if (rng.next_double() < config.mutation_probability) {
                child.injection[j] = rng.next_double();
            }
        }
        child.objective = evaluator(child);
        children.push_back(std::move(child));
    }

    std::vector<GammaCandidate> pool = population;
    pool.insert(pool.end(), children.begin(), children.end());
    std::stable_sort(pool.begin(), pool.end(),
                     [](const GammaCandidate& a, const GammaCandidate& b) {
                         return a.objective < b.objective;
                     });
    if (pool.size() > static_cast<std::size_t>(config.population_size)) {
        pool.resize(static_cast<std::size_t>(config.population_size));
    }
    return pool;
}

struct GammaOutcome {
    AttackOutcome outcome;
    double best_objective = std::numeric_limits<double>::infinity();
    std::vector<double> injection;
    int generations_used = 0;
};

// Full GAMMA run: random initial population (always including the all-zeros
// baseline), max_iterations generations, lowest-objective candidate returned.
inline GammaOutcome gamma_attack(const FeatureSample& sample,
                                 const std::vector<BenignSection>& sections,
                                 const SyntheticDetector& detector,
                                 const GammaConfig& config, Rng& rng) {
    config.validate();
    if (sections.empty()) throw ConfigError("gamma_attack needs at least one section");
    const std::size_t p = sections.size();
    auto evaluator = [&](const GammaCandidate& c) {
        return gamma_objective(c, sample, sections, detector, config.size_penalty);
    };

    std::vector<GammaCandidate> population;
    population.reserve(static_cast<std::size_t>(config.population_size));
    GammaCandidate zero;
    zero.injection.assign(p, 0.0);
    zero.objective = evaluator(zero);
    population.push_back(std::move(zero));
    for (int i = 1; i < config.population_size; ++i) {
        GammaCandidate c;
        c.injection.resize(p);
        for (std::size_t j = 0; j < p; ++j) c.injection[j] = rng.next_double();
        c.objective = evaluator(c);
        population.push_back(std::move(c));
    }

    for (int gen = 0; gen < config.max_iterations; ++gen) {
        population = evolve_generation(population, config, evaluator, rng);
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < population.size(); ++i) {
        if (population[i].objective < population[best].objective) best = i;
    }

    GammaOutcome result;
    result.best_objective = population[best].objective;
    result.injection = population[best].injection;
    result.generations_used = config.max_iterations;
    FeatureSample final_sample = inject_sections(sample, result.injection, sections);
    AttackStatus status = detector_verdict(detector, final_sample) == Verdict::Benign
                              ? AttackStatus::Evasive
                              : AttackStatus::Failed;
    result.outcome = AttackOutcome{status, std::move(final_sample), {},
                                   config.max_iterations};
    return result;
}

}  // namespace randchain
