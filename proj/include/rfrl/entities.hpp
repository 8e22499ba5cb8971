#pragma once

#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "rfrl/occupancy.hpp"
#include "rfrl/scenario.hpp"

namespace rfrl {

// Channel-selection rule of one non-player entity. Implementations may be
// stateful; `rng` is the entity's own stream. Custom entities subclass this.
class Behavior {
public:
    virtual ~Behavior() = default;
    virtual std::optional<int> next_channel(int t, const OccupancyMap& prev_occupancy,
                                            std::mt19937_64& rng) = 0;
};

// Builds the built-in behavior for an entity spec. `num_channels` bounds the
// uniform fallbacks of the agile hopper and simple jammer.
std::unique_ptr<Behavior> make_behavior(const EntitySpec& spec, int num_channels);

// Programmatic entity; not expressible in scenario JSON.
struct CustomEntity {
    std::string name;
    std::unique_ptr<Behavior> behavior;
    std::vector<bool> duty_pattern{true};
    int start_step = 0;
    int stop_step = 0;
};

struct EntityState {
    std::string name;
    int entity_id = 1;
    std::vector<bool> duty_pattern{true};
    int start_step = 0;
    int stop_step = 0;
    std::optional<int> current_channel;
    int pattern_cursor = 0;
    int cycle_length = 1;  // hop pattern length for fixed hoppers, duty length otherwise
    std::unique_ptr<Behavior> behavior;
    std::mt19937_64 rng;
};

EntityState make_entity_state(const EntitySpec& spec, int entity_id, int num_channels,
                              std::uint64_t master_seed);
EntityState make_entity_state(CustomEntity custom, int entity_id, std::uint64_t master_seed);

// On/off gate: true iff start_step <= t <= stop_step and the duty pattern,
// cycled from start_step, is on at t.
bool is_active(const std::vector<bool>& duty_pattern, int start_step, int stop_step, int t);
bool is_active(const EntityState& state, int t);

// The entity's channel for step t, or nullopt when idle. `prev_occupancy`
// is the completed occupancy of step t-1 (empty at t = 0). Updates
// current_channel and pattern_cursor.
std::optional<int> next_channel(EntityState& state, int t, const OccupancyMap& prev_occupancy);

}  // namespace rfrl
