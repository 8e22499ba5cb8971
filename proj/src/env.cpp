#include "rfrl/env.hpp"

#include <algorithm>

#include "rfrl/rng.hpp"

namespace rfrl {

void OccupancyMap::add(int channel, int occupant_id) {
    if (channel < 0 || channel >= num_channels()) {
        throw std::out_of_range("occupancy channel " + std::to_string(channel) +
                                " out of range [0, " + std::to_string(num_channels()) + ")");
    }
    auto& ids = by_channel_[static_cast<std::size_t>(channel)];
    ids.insert(std::lower_bound(ids.begin(), ids.end(), occupant_id), occupant_id);
}

bool OccupancyMap::entity_present(int channel) const {
    const auto& ids = by_channel_[static_cast<std::size_t>(channel)];
    return std::any_of(ids.begin(), ids.end(), [](int id) { return id != kAgentId; });
}

std::vector<int> OccupancyMap::occupied_channels() const {
    std::vector<int> channels;
    for (int c = 0; c < num_channels(); ++c) {
        if (occupied(c)) {
            channels.push_back(c);
        }
    }
    return channels;
}

std::vector<int> OccupancyMap::unoccupied_channels() const {
    std::vector<int> channels;
    for (int c = 0; c < num_channels(); ++c) {
        if (!occupied(c)) {
            channels.push_back(c);
        }
    }
    return channels;
}

Observation observe(ObservationMode mode, const OccupancyMap& occupancy) {
    Observation obs;
    obs.mode = mode;
    const int channels = occupancy.num_channels();
    if (mode == ObservationMode::detect) {
        obs.detect.resize(static_cast<std::size_t>(channels), 0);
        for (int c = 0; c < channels; ++c) {
            obs.detect[static_cast<std::size_t>(c)] = occupancy.entity_present(c) ? 1 : 0;
        }
    } else {
        obs.classify.resize(static_cast<std::size_t>(channels));
        for (int c = 0; c < channels; ++c) {
            for (int id : occupancy.occupants(c)) {
                if (id != kAgentId) {
                    obs.classify[static_cast<std::size_t>(c)].push_back(id);
                }
            }
        }
    }
    return obs;
}

double compute_reward(RewardMode mode, bool dampening, const Action& action,
                      const Action& prev_action, const OccupancyMap& occupancy,
                      std::optional<int> target_id) {
    double reward = 0.0;
    if (action.transmits()) {
        const int c = *action.channel;
        if (mode == RewardMode::dsa) {
            reward = occupancy.entity_present(c) ? -1.0 : 1.0;
        } else {
            const auto& ids = occupancy.occupants(c);
            const bool hit_target =
                target_id.has_value() && std::ranges::find(ids, *target_id) != ids.end();
            reward = hit_target ? 1.0 : -1.0;
        }
    }
    if (dampening) {
        reward += (action == prev_action) ? 0.5 : -0.5;
    }
    return reward;
}

bool detect_agent_collision(const Action& action, const OccupancyMap& occupancy) {
    return action.transmits() && occupancy.entity_present(*action.channel);
}

Environment::Environment(ScenarioSpec spec, std::uint64_t seed)
    : Environment(std::move(spec), seed, {}) {}

Environment::Environment(ScenarioSpec spec, std::uint64_t seed,
                         std::vector<CustomEntity> custom_entities)
    : spec_(std::move(spec)), seed_(seed) {
    const ValidationReport report = validate(spec_);
    if (!report.ok()) {
        const Issue& first = report.errors.front();
        throw ConfigError("invalid scenario: " + first.path + ": " + first.message);
    }
    const int channels = spec_.environment.num_channels;
    int next_id = 1;
    for (const EntitySpec& entity : spec_.entities) {
        entities_.push_back(make_entity_state(entity, next_id++, channels, seed_));
    }
    for (CustomEntity& custom : custom_entities) {
        entities_.push_back(make_entity_state(std::move(custom), next_id++, seed_));
    }
    if (spec_.environment.target_entity.has_value()) {
        for (const EntityState& state : entities_) {
            if (state.name == *spec_.environment.target_entity) {
                target_id_ = state.entity_id;
                break;
            }
        }
    }
    prev_occupancy_ = OccupancyMap(channels);
}

void Environment::seed_entity_streams(std::uint64_t seed) {
    seed_ = seed;
    for (EntityState& state : entities_) {
        state.rng = make_stream(seed_, static_cast<std::uint64_t>(state.entity_id));
    }
}

Observation Environment::reset() {
    t_ = 0;
    cumulative_reward_ = 0.0;
    prev_occupancy_ = OccupancyMap(num_channels());
    prev_action_ = Action::no_transmit();
    for (EntityState& state : entities_) {
        state.current_channel.reset();
        state.pattern_cursor = 0;
    }
    return observe(spec_.environment.observation_mode, prev_occupancy_);
}

Observation Environment::reset(std::uint64_t seed) {
    seed_entity_streams(seed);
    return reset();
}

StepOutcome Environment::step(const Action& action) {
    if (done()) {
        throw std::logic_error("step() called on a finished episode; call reset()");
    }
    if (action.transmits() && (*action.channel < 0 || *action.channel >= num_channels())) {
        throw std::logic_error("action channel out of range");
    }

    OccupancyMap occupancy(num_channels());
    for (EntityState& state : entities_) {
        if (const std::optional<int> channel = next_channel(state, t_, prev_occupancy_)) {
            occupancy.add(*channel, state.entity_id);
        }
    }
    if (action.transmits()) {
        occupancy.add(*action.channel, kAgentId);
    }

    StepOutcome outcome;
    outcome.reward = compute_reward(spec_.environment.reward_mode, spec_.environment.dampening,
                                    action, prev_action_, occupancy, target_id_);
    outcome.observation = observe(spec_.environment.observation_mode, occupancy);
    outcome.collision_with_agent = detect_agent_collision(action, occupancy);
    outcome.step_index = t_;
    outcome.occupancy = occupancy;

    cumulative_reward_ += outcome.reward;
    prev_occupancy_ = std::move(occupancy);
    prev_action_ = action;
    ++t_;
    outcome.done = done();
    return outcome;
}

}  // namespace rfrl
