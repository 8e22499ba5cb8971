#include "rfrl/agents.hpp"

#include <algorithm>
#include <stdexcept>

#include "rfrl/rng.hpp"

namespace rfrl {

namespace {

int argmax_lowest(const std::vector<double>& values) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(values.size()); ++i) {
        if (values[static_cast<std::size_t>(i)] > values[static_cast<std::size_t>(best)]) {
            best = i;
        }
    }
    return best;
}

std::string to_hex(const std::string& bytes) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (unsigned char b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xf]);
    }
    return out;
}

void check_hyperparams(const Hyperparams& h) {
    if (!(h.alpha > 0.0 && h.alpha <= 1.0)) {
        throw std::invalid_argument("alpha must lie in (0, 1]");
    }
    if (!(h.gamma >= 0.0 && h.gamma <= 1.0)) {
        throw std::invalid_argument("gamma must lie in [0, 1]");
    }
    if (!(h.epsilon_start >= 0.0 && h.epsilon_start <= 1.0) ||
        !(h.epsilon_end >= 0.0 && h.epsilon_end <= 1.0)) {
        throw std::invalid_argument("epsilon bounds must lie in [0, 1]");
    }
    if (h.epsilon_start < h.epsilon_end) {
        throw std::invalid_argument("epsilon_start must be >= epsilon_end");
    }
    if (h.epsilon_decay_episodes < 1) {
        throw std::invalid_argument("epsilon_decay_episodes must be >= 1");
    }
}

struct EpisodeStats {
    double cumulative = 0.0;
    int collisions = 0;
};

// Shared episode driver: runs one episode, appending step records, with an
// optional learning hook.
template <typename PolicyFn, typename LearnFn>
EpisodeStats run_episode(Environment& env, int episode_index, PolicyFn&& policy,
                         LearnFn&& learn, std::vector<StepRecord>& sink) {
    Observation obs = env.reset();
    EpisodeStats stats;
    for (int t = 0; t < env.max_steps(); ++t) {
        const Action action = policy(obs);
        const StepOutcome outcome = env.step(action);
        learn(obs, action, outcome);
        stats.cumulative += outcome.reward;
        if (outcome.collision_with_agent) {
            ++stats.collisions;
        }
        sink.push_back({episode_index, t, action, outcome.occupancy, outcome.reward,
                        stats.cumulative, outcome.collision_with_agent});
        obs = outcome.observation;
    }
    return stats;
}

}  // namespace

StateKey encode_state(const Observation& obs) {
    std::string key;
    if (obs.mode == ObservationMode::detect) {
        key.reserve(obs.detect.size() + 1);
        key.push_back('D');
        for (std::uint8_t bit : obs.detect) {
            key.push_back(bit ? '1' : '0');
        }
    } else {
        key.push_back('C');
        for (const std::vector<int>& ids : obs.classify) {
            for (std::size_t i = 0; i < ids.size(); ++i) {
                if (i > 0) {
                    key.push_back(',');
                }
                key += std::to_string(ids[i]);
            }
            key.push_back('|');
        }
    }
    return key;
}

double epsilon_for_episode(const Hyperparams& h, int episode) {
    if (episode >= h.epsilon_decay_episodes) {
        return h.epsilon_end;
    }
    const double fraction = static_cast<double>(episode) / h.epsilon_decay_episodes;
    return h.epsilon_start + (h.epsilon_end - h.epsilon_start) * fraction;
}

std::vector<double> QTable::values(const StateKey& key) const {
    auto it = table_.find(key);
    if (it == table_.end()) {
        return std::vector<double>(static_cast<std::size_t>(num_actions_), 0.0);
    }
    return it->second;
}

double QTable::max_value(const StateKey& key) const {
    auto it = table_.find(key);
    if (it == table_.end()) {
        return 0.0;
    }
    return *std::max_element(it->second.begin(), it->second.end());
}

std::vector<double>& QTable::row(const StateKey& key) {
    auto it = table_.find(key);
    if (it == table_.end()) {
        it = table_.emplace(key, std::vector<double>(static_cast<std::size_t>(num_actions_), 0.0))
                 .first;
    }
    return it->second;
}

nlohmann::ordered_json QTable::to_json() const {
    std::vector<const StateKey*> keys;
    keys.reserve(table_.size());
    for (const auto& [key, values] : table_) {
        keys.push_back(&key);
    }
    std::sort(keys.begin(), keys.end(),
              [](const StateKey* a, const StateKey* b) { return *a < *b; });
    nlohmann::ordered_json out = nlohmann::ordered_json::object();
    for (const StateKey* key : keys) {
        out[to_hex(*key)] = table_.at(*key);
    }
    return out;
}

int action_index(const Action& action, int num_channels) {
    return action.transmits() ? *action.channel : num_channels;
}

Action action_from_index(int index, int num_channels) {
    return index == num_channels ? Action::no_transmit() : Action::transmit(index);
}

Action select_action(const QTable& q, const StateKey& state, double epsilon,
                     std::mt19937_64& rng) {
    if (epsilon > 0.0 && uniform01(rng) < epsilon) {
        const int index =
            static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(q.num_actions())));
        return action_from_index(index, q.num_channels());
    }
    const std::vector<double> values = q.values(state);
    return action_from_index(argmax_lowest(values), q.num_channels());
}

void update(QTable& q, const StateKey& state, const Action& action, double reward,
            const StateKey& next_state, const Hyperparams& h) {
    const double max_next = q.max_value(next_state);
    std::vector<double>& row = q.row(state);
    double& cell = row.at(static_cast<std::size_t>(action_index(action, q.num_channels())));
    cell += h.alpha * (reward + h.gamma * max_next - cell);
}

RunResult train(const ScenarioSpec& spec, const Hyperparams& h, int episodes,
                std::uint64_t seed) {
    check_hyperparams(h);
    if (episodes < 1) {
        throw std::invalid_argument("episodes must be >= 1");
    }
    Environment env(spec, seed);
    std::mt19937_64 agent_rng = make_stream(seed, kAgentId);
    RunResult result{QTable(env.num_channels()), {}, {}, 0.0, 0};
    result.log.steps.reserve(static_cast<std::size_t>(episodes) *
                             static_cast<std::size_t>(env.max_steps()));

    for (int episode = 0; episode < episodes; ++episode) {
        const double epsilon = epsilon_for_episode(h, episode);
        const EpisodeStats stats = run_episode(
            env, episode,
            [&](const Observation& obs) {
                return select_action(result.qtable, encode_state(obs), epsilon, agent_rng);
            },
            [&](const Observation& obs, const Action& action, const StepOutcome& outcome) {
                update(result.qtable, encode_state(obs), action, outcome.reward,
                       encode_state(outcome.observation), h);
            },
            result.log.steps);
        result.log.episode_rewards.push_back(stats.cumulative);
        result.log.episode_collisions.push_back(stats.collisions);
        result.log.episode_epsilons.push_back(epsilon);
    }

    const EpisodeStats greedy = run_episode(
        env, episodes,
        [&](const Observation& obs) {
            return select_action(result.qtable, encode_state(obs), 0.0, agent_rng);
        },
        [](const Observation&, const Action&, const StepOutcome&) {}, result.greedy_steps);
    result.greedy_reward = greedy.cumulative;
    result.greedy_collisions = greedy.collisions;
    return result;
}

Action random_agent(std::mt19937_64& rng, int num_channels) {
    const int index =
        static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(num_channels + 1)));
    return action_from_index(index, num_channels);
}

Action notransmit_agent() {
    return Action::no_transmit();
}

RunResult run_baseline(const ScenarioSpec& spec, BaselineKind kind, int episodes,
                       std::uint64_t seed) {
    if (episodes < 1) {
        throw std::invalid_argument("episodes must be >= 1");
    }
    Environment env(spec, seed);
    std::mt19937_64 agent_rng = make_stream(seed, kAgentId);
    RunResult result{QTable(env.num_channels()), {}, {}, 0.0, 0};
    const auto policy = [&](const Observation&) {
        return kind == BaselineKind::random ? random_agent(agent_rng, env.num_channels())
                                            : notransmit_agent();
    };
    const auto no_learning = [](const Observation&, const Action&, const StepOutcome&) {};

    for (int episode = 0; episode < episodes; ++episode) {
        const EpisodeStats stats =
            run_episode(env, episode, policy, no_learning, result.log.steps);
        result.log.episode_rewards.push_back(stats.cumulative);
        result.log.episode_collisions.push_back(stats.collisions);
        result.log.episode_epsilons.push_back(kind == BaselineKind::random ? 1.0 : 0.0);
    }
    const EpisodeStats greedy =
        run_episode(env, episodes, policy, no_learning, result.greedy_steps);
    result.greedy_reward = greedy.cumulative;
    result.greedy_collisions = greedy.collisions;
    return result;
}

std::vector<EpisodeSummary> episode_summaries(const TrainingLog& log) {
    std::vector<EpisodeSummary> summaries;
    summaries.reserve(log.episode_rewards.size());
    for (std::size_t i = 0; i < log.episode_rewards.size(); ++i) {
        summaries.push_back({static_cast<int>(i), log.episode_rewards[i],
                             log.episode_collisions[i], log.episode_epsilons[i]});
    }
    return summaries;
}

}  // namespace rfrl
