#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "rfrl/entities.hpp"
#include "rfrl/occupancy.hpp"
#include "rfrl/scenario.hpp"

namespace rfrl {

// Raised when a scenario fails validation at environment construction.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct StepOutcome {
    Observation observation;
    double reward = 0.0;
    int step_index = 0;
    bool done = false;
    OccupancyMap occupancy;
    bool collision_with_agent = false;
};

// Detect bits / classify lists for one completed occupancy. The agent's own
// transmission is excluded in both modes.
Observation observe(ObservationMode mode, const OccupancyMap& occupancy);

// Base reward per the reward mode, plus the optional +-0.5 dampening term
// ("movement" means action != prev_action). `target_id` is required in jam
// mode and names the occupant to collide with.
double compute_reward(RewardMode mode, bool dampening, const Action& action,
                      const Action& prev_action, const OccupancyMap& occupancy,
                      std::optional<int> target_id);

// True iff the agent transmitted and shares its channel with any entity.
bool detect_agent_collision(const Action& action, const OccupancyMap& occupancy);

// One episode-at-a-time simulation of a scenario. Entity random streams are
// seeded at construction (or reset(seed)) and continue across plain reset()
// calls, so successive episodes of one run see fresh entity randomness while
// the run as a whole stays a pure function of (spec, seed).
class Environment {
public:
    Environment(ScenarioSpec spec, std::uint64_t seed);
    Environment(ScenarioSpec spec, std::uint64_t seed, std::vector<CustomEntity> custom_entities);

    // Starts a new episode; returns the all-empty initial observation.
    Observation reset();
    Observation reset(std::uint64_t seed);

    // Advances one time-step. Throws std::logic_error once the episode is done.
    StepOutcome step(const Action& action);

    const ScenarioSpec& spec() const { return spec_; }
    int num_channels() const { return spec_.environment.num_channels; }
    int max_steps() const { return spec_.environment.max_steps; }
    int time() const { return t_; }
    bool done() const { return t_ >= max_steps(); }
    double cumulative_reward() const { return cumulative_reward_; }
    std::optional<int> target_id() const { return target_id_; }
    const std::vector<EntityState>& entity_states() const { return entities_; }

private:
    void seed_entity_streams(std::uint64_t seed);

    ScenarioSpec spec_;
    std::uint64_t seed_ = 0;
    std::vector<EntityState> entities_;
    std::optional<int> target_id_;
    OccupancyMap prev_occupancy_;
    Action prev_action_ = Action::no_transmit();
    int t_ = 0;
    double cumulative_reward_ = 0.0;
};

}  // namespace rfrl
