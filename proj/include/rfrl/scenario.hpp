#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace rfrl {

enum class ObservationMode { detect, classify };
enum class RewardMode { dsa, jam };
enum class RenderMode { terminal, none };

std::string to_string(ObservationMode mode);
std::string to_string(RewardMode mode);
std::string to_string(RenderMode mode);

// Per-entity channel selection rules.
struct ConstantBehavior {
    int channel = 0;
    bool operator==(const ConstantBehavior&) const = default;
};

struct FixedHopperBehavior {
    std::vector<int> pattern;
    bool operator==(const FixedHopperBehavior&) const = default;
};

struct StochasticHopperBehavior {
    std::vector<double> probs;  // one entry per channel, sums to 1
    bool operator==(const StochasticHopperBehavior&) const = default;
};

struct AgileHopperBehavior {
    bool operator==(const AgileHopperBehavior&) const = default;
};

struct SimpleJammerBehavior {
    bool operator==(const SimpleJammerBehavior&) const = default;
};

using BehaviorSpec = std::variant<ConstantBehavior, FixedHopperBehavior, StochasticHopperBehavior,
                                  AgileHopperBehavior, SimpleJammerBehavior>;

// JSON "type" string of a behavior ("constant", "fixed_hopper", ...).
std::string behavior_type_name(const BehaviorSpec& behavior);

struct EntitySpec {
    std::string name;
    BehaviorSpec behavior;
    std::vector<bool> duty_pattern{true};  // on/off transmission pattern, cycled
    int start_step = 0;
    int stop_step = 0;  // last step at which the entity may transmit, inclusive
    bool operator==(const EntitySpec&) const = default;
};

struct EnvironmentSpec {
    int num_channels = 1;
    int max_steps = 1;
    ObservationMode observation_mode = ObservationMode::detect;
    RewardMode reward_mode = RewardMode::dsa;
    std::optional<std::string> target_entity;  // present iff reward_mode == jam
    bool dampening = false;
    bool operator==(const EnvironmentSpec&) const = default;
};

struct RenderSpec {
    RenderMode mode = RenderMode::none;
    double fps = 4.0;
    int window = 16;  // number of recent steps displayed
    bool operator==(const RenderSpec&) const = default;
};

struct ScenarioSpec {
    EnvironmentSpec environment;
    std::vector<EntitySpec> entities;
    RenderSpec render;
    bool operator==(const ScenarioSpec&) const = default;
};

// One diagnostic tied to a json-path, e.g. "entities[2].probs".
struct Issue {
    std::string path;
    std::string message;
    bool operator==(const Issue&) const = default;
};

struct ValidationReport {
    std::vector<Issue> errors;
    std::vector<Issue> warnings;
    bool ok() const { return errors.empty(); }
};

// Structural failure while reading a scenario document. `path` is empty for
// malformed JSON, in which case `byte_offset` locates the syntax error.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string path, const std::string& message,
               std::optional<std::size_t> byte_offset = std::nullopt);
    const std::string& path() const { return path_; }
    std::optional<std::size_t> byte_offset() const { return byte_offset_; }

private:
    std::string path_;
    std::optional<std::size_t> byte_offset_;
};

// Parses a scenario document and applies defaults. Unknown keys are not
// errors; they are appended to `warnings` when a sink is given.
ScenarioSpec parse_scenario(std::string_view text, std::vector<Issue>* warnings = nullptr);

// Cross-field checks (name uniqueness, target existence, channel ranges,
// value ranges). Pure; a spec with an empty error list is runnable.
ValidationReport validate(const ScenarioSpec& spec);

// Canonical JSON form: fixed key order, defaults written out explicitly.
// parse_scenario(serialize(s)) == s for every valid spec.
std::string serialize(const ScenarioSpec& spec);

}  // namespace rfrl
