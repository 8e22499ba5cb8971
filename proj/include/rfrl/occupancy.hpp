#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rfrl/scenario.hpp"

namespace rfrl {

// Occupant id 0 is the agent; ids >= 1 are entities in scenario order.
constexpr int kAgentId = 0;

// Which occupants transmit on which channel during one time-step.
// An occupant appears in at most one channel.
class OccupancyMap {
public:
    OccupancyMap() = default;
    explicit OccupancyMap(int num_channels) : by_channel_(num_channels) {}

    int num_channels() const { return static_cast<int>(by_channel_.size()); }

    void add(int channel, int occupant_id);

    const std::vector<int>& occupants(int channel) const { return by_channel_[channel]; }
    bool occupied(int channel) const { return !by_channel_[channel].empty(); }

    // True when a non-agent occupant transmits on `channel`.
    bool entity_present(int channel) const;

    std::vector<int> occupied_channels() const;
    std::vector<int> unoccupied_channels() const;

    bool operator==(const OccupancyMap&) const = default;

private:
    std::vector<std::vector<int>> by_channel_;
};

// The agent either transmits on one channel or stays quiet.
struct Action {
    std::optional<int> channel;

    static Action transmit(int c) { return Action{c}; }
    static Action no_transmit() { return Action{std::nullopt}; }
    bool transmits() const { return channel.has_value(); }

    bool operator==(const Action&) const = default;
};

// What the agent sees after a step. Detect mode carries one occupied bit
// per channel; classify mode carries the sorted non-agent occupant ids per
// channel. The agent's own transmission is excluded from both.
struct Observation {
    ObservationMode mode = ObservationMode::detect;
    std::vector<std::uint8_t> detect;
    std::vector<std::vector<int>> classify;

    bool operator==(const Observation&) const = default;
};

}  // namespace rfrl
