#include "rfrl/entities.hpp"

#include <algorithm>

#include "rfrl/rng.hpp"

namespace rfrl {

namespace {

int uniform_pick(const std::vector<int>& channels, std::mt19937_64& rng) {
    return channels[static_cast<std::size_t>(uniform_below(rng, channels.size()))];
}

class ConstantRuntime final : public Behavior {
public:
    explicit ConstantRuntime(int channel) : channel_(channel) {}
    std::optional<int> next_channel(int, const OccupancyMap&, std::mt19937_64&) override {
        return channel_;
    }

private:
    int channel_;
};

class FixedHopperRuntime final : public Behavior {
public:
    FixedHopperRuntime(std::vector<int> pattern, int start_step)
        : pattern_(std::move(pattern)), start_step_(start_step) {}
    std::optional<int> next_channel(int t, const OccupancyMap&, std::mt19937_64&) override {
        const auto len = static_cast<int>(pattern_.size());
        return pattern_[static_cast<std::size_t>((t - start_step_) % len)];
    }

private:
    std::vector<int> pattern_;
    int start_step_;
};

class StochasticHopperRuntime final : public Behavior {
public:
    explicit StochasticHopperRuntime(std::vector<double> probs) : probs_(std::move(probs)) {}
    std::optional<int> next_channel(int, const OccupancyMap&, std::mt19937_64& rng) override {
        const double u = uniform01(rng);
        double cumulative = 0.0;
        int last_positive = 0;
        for (int c = 0; c < static_cast<int>(probs_.size()); ++c) {
            if (probs_[c] <= 0.0) {
                continue;
            }
            cumulative += probs_[c];
            last_positive = c;
            if (u < cumulative) {
                return c;
            }
        }
        // u fell into the rounding slack past the final cumulative bin.
        return last_positive;
    }

private:
    std::vector<double> probs_;
};

class AgileHopperRuntime final : public Behavior {
public:
    explicit AgileHopperRuntime(int num_channels) : num_channels_(num_channels) {}
    std::optional<int> next_channel(int, const OccupancyMap& prev,
                                    std::mt19937_64& rng) override {
        if (prev.num_channels() == 0) {
            return static_cast<int>(uniform_below(rng, num_channels_));
        }
        const std::vector<int> empty = prev.unoccupied_channels();
        if (empty.empty()) {
            return static_cast<int>(uniform_below(rng, num_channels_));
        }
        return uniform_pick(empty, rng);
    }

private:
    int num_channels_;
};

class SimpleJammerRuntime final : public Behavior {
public:
    explicit SimpleJammerRuntime(int num_channels) : num_channels_(num_channels) {}
    std::optional<int> next_channel(int, const OccupancyMap& prev,
                                    std::mt19937_64& rng) override {
        if (prev.num_channels() == 0) {
            return static_cast<int>(uniform_below(rng, num_channels_));
        }
        const std::vector<int> occupied = prev.occupied_channels();
        if (!occupied.empty()) {
            return uniform_pick(occupied, rng);
        }
        const std::vector<int> empty = prev.unoccupied_channels();
        return uniform_pick(empty, rng);
    }

private:
    int num_channels_;
};

}  // namespace

std::unique_ptr<Behavior> make_behavior(const EntitySpec& spec, int num_channels) {
    struct Visitor {
        int start_step;
        int num_channels;
        std::unique_ptr<Behavior> operator()(const ConstantBehavior& b) const {
            return std::make_unique<ConstantRuntime>(b.channel);
        }
        std::unique_ptr<Behavior> operator()(const FixedHopperBehavior& b) const {
            return std::make_unique<FixedHopperRuntime>(b.pattern, start_step);
        }
        std::unique_ptr<Behavior> operator()(const StochasticHopperBehavior& b) const {
            return std::make_unique<StochasticHopperRuntime>(b.probs);
        }
        std::unique_ptr<Behavior> operator()(const AgileHopperBehavior&) const {
            return std::make_unique<AgileHopperRuntime>(num_channels);
        }
        std::unique_ptr<Behavior> operator()(const SimpleJammerBehavior&) const {
            return std::make_unique<SimpleJammerRuntime>(num_channels);
        }
    };
    return std::visit(Visitor{spec.start_step, num_channels}, spec.behavior);
}

EntityState make_entity_state(const EntitySpec& spec, int entity_id, int num_channels,
                              std::uint64_t master_seed) {
    EntityState state;
    state.name = spec.name;
    state.entity_id = entity_id;
    state.duty_pattern = spec.duty_pattern;
    state.start_step = spec.start_step;
    state.stop_step = spec.stop_step;
    state.cycle_length = static_cast<int>(spec.duty_pattern.size());
    if (const auto* hopper = std::get_if<FixedHopperBehavior>(&spec.behavior)) {
        state.cycle_length = static_cast<int>(hopper->pattern.size());
    }
    state.behavior = make_behavior(spec, num_channels);
    state.rng = make_stream(master_seed, static_cast<std::uint64_t>(entity_id));
    return state;
}

EntityState make_entity_state(CustomEntity custom, int entity_id, std::uint64_t master_seed) {
    EntityState state;
    state.name = std::move(custom.name);
    state.entity_id = entity_id;
    state.duty_pattern = std::move(custom.duty_pattern);
    state.start_step = custom.start_step;
    state.stop_step = custom.stop_step;
    state.cycle_length = static_cast<int>(state.duty_pattern.size());
    state.behavior = std::move(custom.behavior);
    state.rng = make_stream(master_seed, static_cast<std::uint64_t>(entity_id));
    return state;
}

bool is_active(const std::vector<bool>& duty_pattern, int start_step, int stop_step, int t) {
    if (t < start_step || t > stop_step) {
        return false;
    }
    const auto len = static_cast<int>(duty_pattern.size());
    return duty_pattern[static_cast<std::size_t>((t - start_step) % len)];
}

bool is_active(const EntityState& state, int t) {
    return is_active(state.duty_pattern, state.start_step, state.stop_step, t);
}

std::optional<int> next_channel(EntityState& state, int t, const OccupancyMap& prev_occupancy) {
    if (!is_active(state, t)) {
        state.current_channel.reset();
        return std::nullopt;
    }
    state.pattern_cursor = (t - state.start_step) % state.cycle_length;
    state.current_channel = state.behavior->next_channel(t, prev_occupancy, state.rng);
    return state.current_channel;
}

}  // namespace rfrl
