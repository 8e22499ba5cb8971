#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "rfrl/env.hpp"
#include "rfrl/render.hpp"

namespace rfrl {

// Canonical byte encoding of an observation, injective on the observations
// reachable within one environment.
using StateKey = std::string;

StateKey encode_state(const Observation& obs);

struct Hyperparams {
    double alpha = 0.1;
    double gamma = 0.0;
    double epsilon_start = 1.0;
    double epsilon_end = 0.0;
    int epsilon_decay_episodes = 10;  // linear decay horizon, then hold at epsilon_end
};

// Exploration rate for a 0-based episode index.
double epsilon_for_episode(const Hyperparams& h, int episode);

// Sparse state -> action-value table. Action index c is Transmit(c) for
// c < num_channels; index num_channels is NoTransmit. Unseen states read as
// all zeros without creating an entry.
class QTable {
public:
    explicit QTable(int num_channels)
        : num_channels_(num_channels), num_actions_(num_channels + 1) {}

    int num_channels() const { return num_channels_; }
    int num_actions() const { return num_actions_; }

    std::vector<double> values(const StateKey& key) const;
    double max_value(const StateKey& key) const;

    // Mutable row for updates; inserts a zero row on first touch.
    std::vector<double>& row(const StateKey& key);

    bool contains(const StateKey& key) const { return table_.contains(key); }
    std::size_t size() const { return table_.size(); }
    const std::unordered_map<StateKey, std::vector<double>>& entries() const { return table_; }

    // JSON object mapping hex-encoded state keys to value arrays, keys sorted.
    nlohmann::ordered_json to_json() const;

private:
    int num_channels_;
    int num_actions_;
    std::unordered_map<StateKey, std::vector<double>> table_;
};

int action_index(const Action& action, int num_channels);
Action action_from_index(int index, int num_channels);

// Epsilon-greedy selection; ties break toward the lowest action index. No
// random draw is consumed when epsilon is zero.
Action select_action(const QTable& q, const StateKey& state, double epsilon,
                     std::mt19937_64& rng);

// One-step Q-learning update on the (state, action) cell.
void update(QTable& q, const StateKey& state, const Action& action, double reward,
            const StateKey& next_state, const Hyperparams& h);

struct TrainingLog {
    std::vector<double> episode_rewards;
    std::vector<int> episode_collisions;
    std::vector<double> episode_epsilons;
    std::vector<StepRecord> steps;
};

struct RunResult {
    QTable qtable;
    TrainingLog log;
    // Greedy evaluation episode run after training (episode index = episodes).
    std::vector<StepRecord> greedy_steps;
    double greedy_reward = 0.0;
    int greedy_collisions = 0;
};

// Trains an epsilon-greedy tabular Q-learner for `episodes` episodes, then
// runs one greedy evaluation episode. Deterministic in (spec, h, episodes,
// seed).
RunResult train(const ScenarioSpec& spec, const Hyperparams& h, int episodes,
                std::uint64_t seed);

// Baseline policies.
Action random_agent(std::mt19937_64& rng, int num_channels);
Action notransmit_agent();

enum class BaselineKind { random, notransmit };

// Runs a baseline policy through the same episode/logging pipeline as
// train(), including the trailing evaluation episode.
RunResult run_baseline(const ScenarioSpec& spec, BaselineKind kind, int episodes,
                       std::uint64_t seed);

std::vector<EpisodeSummary> episode_summaries(const TrainingLog& log);

}  // namespace rfrl
