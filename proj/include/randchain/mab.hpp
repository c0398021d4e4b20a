#pragma once

#include <map>
#include <string>
#include <vector>

#include "randchain/core.hpp"
#include "randchain/errors.hpp"
#include "randchain/rng.hpp"

namespace randchain {

// One Thompson-sampling arm: an action with a Beta(alpha, beta) posterior.
// alpha/beta start at 1 and only grow, so (alpha-1, beta-1) are the exact
// success/failure credit counters.
struct BanditMachine {
    Action action = Action::overlay_append;
    int payload_id = 0;
    double alpha = 1.0;
    double beta = 1.0;

    double posterior_mean() const { return alpha / (alpha + beta); }
};

// Feature displacement applied by each action; the additive stand-in for
// byte rewriting.
using ActionEffects = std::map<Action, std::vector<double>>;

struct MabConfig {
    int max_attempts = 60;
    ActionEffects effects;
};

enum class AttackStatus : uint8_t { Evasive, Failed };

struct AttackOutcome {
    AttackStatus status = AttackStatus::Failed;
    FeatureSample final_sample;
    std::vector<Action> minimized_trace;
    int attempts_used = 0;
};

// One machine per action, payload tag 0, flat Beta(1,1) priors.
inline std::vector<BanditMachine> default_machines() {
    std::vector<BanditMachine> machines;
    for (Action a : all_actions()) {
        machines.push_back(BanditMachine{a, 0, 1.0, 1.0});
    }
    return machines;
}

// Draw one Beta(alpha, beta) belief per machine, return the index of the
// largest draw; ties go to the lowest index.
inline std::size_t thompson_select(const std::vector<BanditMachine>& machines, Rng& rng) {
    if (machines.empty()) throw ConfigError("thompson_select needs at least one machine");
    std::size_t best = 0;
    double best_draw = rng.beta(machines[0].alpha, machines[0].beta);
    for (std::size_t i = 1; i < machines.size(); ++i) {
        double draw = rng.beta(machines[i].alpha, machines[i].beta);
        if (draw > best_draw) {
            best_draw = draw;
            best = i;
        }
    }
    return best;
}

// Apply one rewrite: shift the features by the action's displacement and
// append the action to the trace. Ground truth never changes.
inline FeatureSample apply_action(const FeatureSample& sample, Action action,
                                  const ActionEffects& effects) {
    auto it = effects.find(action);
    if (it == effects.end()) {
        throw ConfigError(std::string("no effect registered for action ") +
                          std::string(action_name(action)));
    }
    const std::vector<double>& displacement = it->second;
    if (displacement.size() != sample.features.size()) {
        throw DimensionError("action displacement has dimension " +
                             std::to_string(displacement.size()) + ", sample has " +
                             std::to_string(sample.features.size()));
    }
    FeatureSample out = sample;
    for (std::size_t j = 0; j < displacement.size(); ++j) {
        out.features[j] += displacement[j];
    }
    out.action_trace.push_back(action);
    return out;
}

inline FeatureSample replay_actions(const FeatureSample& base,
                                    const std::vector<Action>& trace,
                                    const ActionEffects& effects) {
    FeatureSample sample = base;
    for (Action a : trace) sample = apply_action(sample, a, effects);
    return sample;
}

// Action minimiser: one removal pass over macro actions in trace order, then
// one over micro actions. A removal is kept only if the replayed remainder
// still evades. Output is a subsequence of the input and replays to Benign.
inline std::vector<Action> minimise(const std::vector<Action>& trace,
                                    const FeatureSample& base,
                                    const SyntheticDetector& detector,
                                    const ActionEffects& effects) {
    std::vector<bool> keep(trace.size(), true);
    auto kept_verdict = [&]() {
        FeatureSample sample = base;
        for (std::size_t i = 0; i < trace.size(); ++i) {
            if (keep[i]) sample = apply_action(sample, trace[i], effects);
        }
        return detector_verdict(detector, sample);
    };
    if (kept_verdict() != Verdict::Benign) {
        throw ContractError("minimise requires an evasive trace");
    }
    for (ActionKind pass : {ActionKind::macro, ActionKind::micro}) {
        for (std::size_t i = 0; i < trace.size(); ++i) {
            if (!keep[i] || action_kind(trace[i]) != pass) continue;
            keep[i] = false;
            if (kept_verdict() != Verdict::Benign) keep[i] = true;
        }
    }
    std::vector<Action> result;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        if (keep[i]) result.push_back(trace[i]);
    }
    return result;
}

// Credit each essential occurrence (alpha += 1) and penalize each failed
// occurrence (beta += 1). With several machines for one action, the first
// machine carrying that action takes the update.
inline void assign_rewards(std::vector<BanditMachine>& machines,
                           const std::vector<Action>& essential,
                           const std::vector<Action>& failed) {
    auto machine_for = [&](Action a) -> BanditMachine& {
        for (BanditMachine& m : machines) {
            if (m.action == a) return m;
        }
        throw ConfigError(std::string("no machine for action ") +
                          std::string(action_name(a)));
    };
    for (Action a : essential) machine_for(a).alpha += 1.0;
    for (Action a : failed) machine_for(a).beta += 1.0;
}

// One attack episode: Thompson-select an arm, rewrite, test; on evasion run
// the minimiser and credit only the essential actions, on exhaustion
// penalize everything attempted. Machines update only at episode end, so
// arm choices within an episode depend on posteriors and rng alone.
inline AttackOutcome mab_attack(const FeatureSample& sample,
                                const SyntheticDetector& detector,
                                const MabConfig& config,
                                std::vector<BanditMachine>& machines, Rng& rng) {
    if (config.max_attempts < 1) throw ConfigError("max_attempts must be >= 1");
    if (machines.empty()) throw ConfigError("mab_attack needs at least one machine");
    if (detector_verdict(detector, sample) == Verdict::Benign) {
        return AttackOutcome{AttackStatus::Evasive, sample, {}, 0};
    }
    FeatureSample working = sample;
    std::vector<Action> raw;
    for (int attempt = 1; attempt <= config.max_attempts; ++attempt) {
        std::size_t arm = thompson_select(machines, rng);
        Action action = machines[arm].action;
        working = apply_action(working, action, config.effects);
        raw.push_back(action);
        if (detector_verdict(detector, working) == Verdict::Benign) {
            std::vector<Action> minimized = minimise(raw, sample, detector, config.effects);
            assign_rewards(machines, minimized, {});
            FeatureSample final_sample = replay_actions(sample, minimized, config.effects);
            return AttackOutcome{AttackStatus::Evasive, std::move(final_sample),
                                 std::move(minimized), attempt};
        }
    }
    assign_rewards(machines, {}, raw);
    return AttackOutcome{AttackStatus::Failed, std::move(working), {},
                         config.max_attempts};
}

}  // namespace randchain
