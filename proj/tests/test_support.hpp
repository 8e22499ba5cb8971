#pragma once

// Shared helpers for the test suites: a generator for random valid scenario
// specs and a few small numeric utilities. Test-only code; the generators
// are independent of the library's parsing/serialization path.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "rfrl/scenario.hpp"

namespace rfrl_test {

inline double mean(const std::vector<double>& v) {
    if (v.empty()) {
        return 0.0;
    }
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double stddev(const std::vector<double>& v) {
    if (v.empty()) {
        return 0.0;
    }
    const double m = mean(v);
    double sum = 0.0;
    for (double x : v) {
        sum += (x - m) * (x - m);
    }
    return std::sqrt(sum / static_cast<double>(v.size()));
}

inline std::vector<double> tail(const std::vector<double>& v, std::size_t n) {
    const std::size_t count = std::min(v.size(), n);
    return {v.end() - static_cast<std::ptrdiff_t>(count), v.end()};
}

// Builds a random scenario spec that satisfies every validation rule.
inline rfrl::ScenarioSpec random_valid_spec(std::mt19937_64& rng) {
    rfrl::ScenarioSpec spec;
    std::uniform_int_distribution<int> channel_count(1, 16);
    std::uniform_int_distribution<int> step_count(1, 200);
    spec.environment.num_channels = channel_count(rng);
    spec.environment.max_steps = step_count(rng);
    spec.environment.observation_mode =
        (rng() % 2 == 0) ? rfrl::ObservationMode::detect : rfrl::ObservationMode::classify;
    spec.environment.dampening = rng() % 2 == 0;

    const int num_entities = static_cast<int>(rng() % 6);
    std::uniform_int_distribution<int> channel(0, spec.environment.num_channels - 1);
    for (int i = 0; i < num_entities; ++i) {
        rfrl::EntitySpec entity;
        entity.name = "entity" + std::to_string(i);
        switch (rng() % 5) {
            case 0:
                entity.behavior = rfrl::ConstantBehavior{channel(rng)};
                break;
            case 1: {
                rfrl::FixedHopperBehavior b;
                const int len = 1 + static_cast<int>(rng() % 6);
                for (int k = 0; k < len; ++k) {
                    b.pattern.push_back(channel(rng));
                }
                entity.behavior = std::move(b);
                break;
            }
            case 2: {
                rfrl::StochasticHopperBehavior b;
                b.probs.resize(static_cast<std::size_t>(spec.environment.num_channels));
                double sum = 0.0;
                for (double& p : b.probs) {
                    p = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
                    sum += p;
                }
                for (double& p : b.probs) {
                    p /= sum;
                }
                entity.behavior = std::move(b);
                break;
            }
            case 3:
                entity.behavior = rfrl::AgileHopperBehavior{};
                break;
            default:
                entity.behavior = rfrl::SimpleJammerBehavior{};
                break;
        }
        const int duty_len = 1 + static_cast<int>(rng() % 4);
        entity.duty_pattern.clear();
        for (int k = 0; k < duty_len; ++k) {
            entity.duty_pattern.push_back(rng() % 2 == 0);
        }
        if (std::none_of(entity.duty_pattern.begin(), entity.duty_pattern.end(),
                         [](bool on) { return on; })) {
            entity.duty_pattern[0] = true;
        }
        entity.start_step = static_cast<int>(rng() % spec.environment.max_steps);
        entity.stop_step =
            entity.start_step +
            static_cast<int>(rng() % (spec.environment.max_steps - entity.start_step));
        spec.entities.push_back(std::move(entity));
    }

    if (num_entities > 0 && rng() % 2 == 0) {
        spec.environment.reward_mode = rfrl::RewardMode::jam;
        spec.environment.target_entity =
            spec.entities[rng() % spec.entities.size()].name;
    } else {
        spec.environment.reward_mode = rfrl::RewardMode::dsa;
    }

    spec.render.mode = (rng() % 2 == 0) ? rfrl::RenderMode::terminal : rfrl::RenderMode::none;
    spec.render.fps = 0.5 + static_cast<double>(rng() % 60);
    spec.render.window = 1 + static_cast<int>(rng() % 64);
    return spec;
}

}  // namespace rfrl_test
