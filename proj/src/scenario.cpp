#include "rfrl/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <json.hpp>

namespace rfrl {

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr double kProbSumTolerance = 1e-9;

std::string entity_path(std::size_t index, const std::string& field) {
    std::ostringstream out;
    out << "entities[" << index << "]";
    if (!field.empty()) {
        out << '.' << field;
    }
    return out.str();
}

[[noreturn]] void fail(const std::string& path, const std::string& message) {
    throw ParseError(path, message);
}

const ordered_json& require_field(const ordered_json& obj, const std::string& path,
                                  const std::string& key) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        fail(path.empty() ? key : path + "." + key, "missing required field");
    }
    return *it;
}

int require_int(const ordered_json& value, const std::string& path) {
    if (!value.is_number_integer()) {
        fail(path, "expected an integer");
    }
    return value.get<int>();
}

bool require_bool(const ordered_json& value, const std::string& path) {
    if (!value.is_boolean()) {
        fail(path, "expected a boolean");
    }
    return value.get<bool>();
}

double require_number(const ordered_json& value, const std::string& path) {
    if (!value.is_number()) {
        fail(path, "expected a number");
    }
    return value.get<double>();
}

std::string require_string(const ordered_json& value, const std::string& path) {
    if (!value.is_string()) {
        fail(path, "expected a string");
    }
    return value.get<std::string>();
}

const ordered_json& require_object(const ordered_json& value, const std::string& path) {
    if (!value.is_object()) {
        fail(path, "expected an object");
    }
    return value;
}

void warn_unknown_keys(const ordered_json& obj, const std::string& path,
                       const std::set<std::string>& known, std::vector<Issue>* warnings) {
    if (warnings == nullptr) {
        return;
    }
    for (const auto& item : obj.items()) {
        if (!known.contains(item.key())) {
            warnings->push_back({path.empty() ? item.key() : path + "." + item.key(),
                                 "unknown key ignored"});
        }
    }
}

void warn_unused_field(const ordered_json& obj, const std::string& path, const std::string& key,
                       const std::string& type_name, std::vector<Issue>* warnings) {
    if (warnings != nullptr && obj.contains(key)) {
        warnings->push_back({path + "." + key, "field is not used by type \"" + type_name + "\""});
    }
}

ObservationMode parse_observation_mode(const ordered_json& value, const std::string& path) {
    const std::string s = require_string(value, path);
    if (s == "detect") return ObservationMode::detect;
    if (s == "classify") return ObservationMode::classify;
    fail(path, "expected \"detect\" or \"classify\", got \"" + s + "\"");
}

RewardMode parse_reward_mode(const ordered_json& value, const std::string& path) {
    const std::string s = require_string(value, path);
    if (s == "dsa") return RewardMode::dsa;
    if (s == "jam") return RewardMode::jam;
    fail(path, "expected \"dsa\" or \"jam\", got \"" + s + "\"");
}

RenderMode parse_render_mode(const ordered_json& value, const std::string& path) {
    const std::string s = require_string(value, path);
    if (s == "terminal") return RenderMode::terminal;
    if (s == "none") return RenderMode::none;
    fail(path, "expected \"terminal\" or \"none\", got \"" + s + "\"");
}

std::vector<double> parse_probs(const ordered_json& value, const std::string& path,
                                int num_channels) {
    if (!value.is_array()) {
        fail(path, "expected an array of numbers");
    }
    if (static_cast<int>(value.size()) != num_channels) {
        fail(path, "expected exactly " + std::to_string(num_channels) + " entries, got " +
                       std::to_string(value.size()));
    }
    std::vector<double> probs;
    probs.reserve(value.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < value.size(); ++i) {
        const double p = require_number(value[i], path + "[" + std::to_string(i) + "]");
        if (!(p >= 0.0 && p <= 1.0)) {
            fail(path + "[" + std::to_string(i) + "]", "probability must lie in [0, 1]");
        }
        probs.push_back(p);
        sum += p;
    }
    if (std::abs(sum - 1.0) > kProbSumTolerance) {
        std::ostringstream msg;
        msg << "probabilities must sum to 1, got " << sum;
        fail(path, msg.str());
    }
    return probs;
}

EntitySpec parse_entity(const ordered_json& obj, std::size_t index, int num_channels,
                        int max_steps, std::vector<Issue>* warnings) {
    const std::string path = entity_path(index, "");
    require_object(obj, path);
    warn_unknown_keys(obj, path,
                      {"name", "type", "channel", "pattern", "probs", "duty_pattern",
                       "start_step", "stop_step"},
                      warnings);

    EntitySpec entity;
    entity.name = require_string(require_field(obj, path, "name"), path + ".name");
    const std::string type =
        require_string(require_field(obj, path, "type"), path + ".type");

    if (type == "constant") {
        ConstantBehavior b;
        b.channel = require_int(require_field(obj, path, "channel"), path + ".channel");
        entity.behavior = b;
        warn_unused_field(obj, path, "pattern", type, warnings);
        warn_unused_field(obj, path, "probs", type, warnings);
    } else if (type == "fixed_hopper") {
        const ordered_json& arr = require_field(obj, path, "pattern");
        if (!arr.is_array()) {
            fail(path + ".pattern", "expected an array of channel indices");
        }
        if (arr.empty()) {
            fail(path + ".pattern", "pattern must not be empty");
        }
        FixedHopperBehavior b;
        for (std::size_t i = 0; i < arr.size(); ++i) {
            b.pattern.push_back(
                require_int(arr[i], path + ".pattern[" + std::to_string(i) + "]"));
        }
        entity.behavior = b;
        warn_unused_field(obj, path, "channel", type, warnings);
        warn_unused_field(obj, path, "probs", type, warnings);
    } else if (type == "stochastic_hopper") {
        StochasticHopperBehavior b;
        b.probs = parse_probs(require_field(obj, path, "probs"), path + ".probs", num_channels);
        entity.behavior = b;
        warn_unused_field(obj, path, "channel", type, warnings);
        warn_unused_field(obj, path, "pattern", type, warnings);
    } else if (type == "agile_hopper" || type == "simple_jammer") {
        if (type == "agile_hopper") {
            entity.behavior = AgileHopperBehavior{};
        } else {
            entity.behavior = SimpleJammerBehavior{};
        }
        warn_unused_field(obj, path, "channel", type, warnings);
        warn_unused_field(obj, path, "pattern", type, warnings);
        warn_unused_field(obj, path, "probs", type, warnings);
    } else {
        fail(path + ".type",
             "expected one of \"constant\", \"fixed_hopper\", \"stochastic_hopper\", "
             "\"agile_hopper\", \"simple_jammer\", got \"" +
                 type + "\"");
    }

    if (obj.contains("duty_pattern")) {
        const ordered_json& arr = obj["duty_pattern"];
        if (!arr.is_array()) {
            fail(path + ".duty_pattern", "expected an array of booleans");
        }
        if (arr.empty()) {
            fail(path + ".duty_pattern", "duty_pattern must not be empty");
        }
        entity.duty_pattern.clear();
        for (std::size_t i = 0; i < arr.size(); ++i) {
            entity.duty_pattern.push_back(
                require_bool(arr[i], path + ".duty_pattern[" + std::to_string(i) + "]"));
        }
    }
    entity.start_step =
        obj.contains("start_step") ? require_int(obj["start_step"], path + ".start_step") : 0;
    entity.stop_step = obj.contains("stop_step")
                           ? require_int(obj["stop_step"], path + ".stop_step")
                           : max_steps - 1;
    return entity;
}

void check_channel(int channel, int num_channels, const std::string& path,
                   std::vector<Issue>& errors) {
    if (channel < 0 || channel >= num_channels) {
        std::ostringstream msg;
        msg << "channel " << channel << " out of range [0, " << num_channels << ")";
        errors.push_back({path, msg.str()});
    }
}

ordered_json entity_to_json(const EntitySpec& entity) {
    ordered_json obj;
    obj["name"] = entity.name;
    obj["type"] = behavior_type_name(entity.behavior);
    if (const auto* constant = std::get_if<ConstantBehavior>(&entity.behavior)) {
        obj["channel"] = constant->channel;
    } else if (const auto* hopper = std::get_if<FixedHopperBehavior>(&entity.behavior)) {
        obj["pattern"] = hopper->pattern;
    } else if (const auto* stochastic = std::get_if<StochasticHopperBehavior>(&entity.behavior)) {
        obj["probs"] = stochastic->probs;
    }
    obj["duty_pattern"] = entity.duty_pattern;
    obj["start_step"] = entity.start_step;
    obj["stop_step"] = entity.stop_step;
    return obj;
}

}  // namespace

std::string to_string(ObservationMode mode) {
    return mode == ObservationMode::detect ? "detect" : "classify";
}

std::string to_string(RewardMode mode) {
    return mode == RewardMode::dsa ? "dsa" : "jam";
}

std::string to_string(RenderMode mode) {
    return mode == RenderMode::terminal ? "terminal" : "none";
}

std::string behavior_type_name(const BehaviorSpec& behavior) {
    struct Visitor {
        std::string operator()(const ConstantBehavior&) const { return "constant"; }
        std::string operator()(const FixedHopperBehavior&) const { return "fixed_hopper"; }
        std::string operator()(const StochasticHopperBehavior&) const {
            return "stochastic_hopper";
        }
        std::string operator()(const AgileHopperBehavior&) const { return "agile_hopper"; }
        std::string operator()(const SimpleJammerBehavior&) const { return "simple_jammer"; }
    };
    return std::visit(Visitor{}, behavior);
}

ParseError::ParseError(std::string path, const std::string& message,
                       std::optional<std::size_t> byte_offset)
    : std::runtime_error(path.empty() ? message : path + ": " + message),
      path_(std::move(path)),
      byte_offset_(byte_offset) {}

ScenarioSpec parse_scenario(std::string_view text, std::vector<Issue>* warnings) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("", std::string("malformed JSON: ") + e.what(), e.byte);
    }
    require_object(doc, "$");
    warn_unknown_keys(doc, "", {"environment", "entities", "render"}, warnings);

    ScenarioSpec spec;

    const ordered_json& env =
        require_object(require_field(doc, "", "environment"), "environment");
    warn_unknown_keys(env, "environment",
                      {"num_channels", "max_steps", "observation_mode", "reward_mode",
                       "target_entity", "dampening"},
                      warnings);
    spec.environment.num_channels =
        require_int(require_field(env, "environment", "num_channels"),
                    "environment.num_channels");
    if (spec.environment.num_channels < 1) {
        fail("environment.num_channels", "must be a positive integer");
    }
    spec.environment.max_steps = require_int(
        require_field(env, "environment", "max_steps"), "environment.max_steps");
    if (spec.environment.max_steps < 1) {
        fail("environment.max_steps", "must be a positive integer");
    }
    spec.environment.observation_mode = parse_observation_mode(
        require_field(env, "environment", "observation_mode"), "environment.observation_mode");
    spec.environment.reward_mode = parse_reward_mode(
        require_field(env, "environment", "reward_mode"), "environment.reward_mode");
    if (spec.environment.reward_mode == RewardMode::jam) {
        spec.environment.target_entity = require_string(
            require_field(env, "environment", "target_entity"), "environment.target_entity");
    } else if (env.contains("target_entity")) {
        fail("environment.target_entity", "only allowed when reward_mode is \"jam\"");
    }
    if (env.contains("dampening")) {
        spec.environment.dampening = require_bool(env["dampening"], "environment.dampening");
    }

    const ordered_json& entities = require_field(doc, "", "entities");
    if (!entities.is_array()) {
        fail("entities", "expected an array");
    }
    for (std::size_t i = 0; i < entities.size(); ++i) {
        spec.entities.push_back(parse_entity(entities[i], i, spec.environment.num_channels,
                                             spec.environment.max_steps, warnings));
    }

    if (doc.contains("render")) {
        const ordered_json& render = require_object(doc["render"], "render");
        warn_unknown_keys(render, "render", {"mode", "fps", "window"}, warnings);
        spec.render.mode =
            parse_render_mode(require_field(render, "render", "mode"), "render.mode");
        if (render.contains("fps")) {
            spec.render.fps = require_number(render["fps"], "render.fps");
        }
        if (render.contains("window")) {
            spec.render.window = require_int(render["window"], "render.window");
        }
    }
    return spec;
}

ValidationReport validate(const ScenarioSpec& spec) {
    ValidationReport report;
    auto& errors = report.errors;

    const int num_channels = spec.environment.num_channels;
    const int max_steps = spec.environment.max_steps;
    if (num_channels < 1) {
        errors.push_back({"environment.num_channels", "must be >= 1"});
    }
    if (max_steps < 1) {
        errors.push_back({"environment.max_steps", "must be >= 1"});
    }
    const bool jam = spec.environment.reward_mode == RewardMode::jam;
    if (jam && !spec.environment.target_entity.has_value()) {
        errors.push_back({"environment.target_entity", "required when reward_mode is \"jam\""});
    }
    if (!jam && spec.environment.target_entity.has_value()) {
        errors.push_back(
            {"environment.target_entity", "only allowed when reward_mode is \"jam\""});
    }

    std::set<std::string> names;
    for (std::size_t i = 0; i < spec.entities.size(); ++i) {
        const EntitySpec& entity = spec.entities[i];
        if (entity.name.empty()) {
            errors.push_back({entity_path(i, "name"), "entity name must not be empty"});
        } else if (!names.insert(entity.name).second) {
            errors.push_back(
                {entity_path(i, "name"), "duplicate entity name \"" + entity.name + "\""});
        }

        if (const auto* constant = std::get_if<ConstantBehavior>(&entity.behavior)) {
            check_channel(constant->channel, num_channels, entity_path(i, "channel"), errors);
        } else if (const auto* hopper = std::get_if<FixedHopperBehavior>(&entity.behavior)) {
            if (hopper->pattern.empty()) {
                errors.push_back({entity_path(i, "pattern"), "pattern must not be empty"});
            }
            for (std::size_t k = 0; k < hopper->pattern.size(); ++k) {
                check_channel(hopper->pattern[k], num_channels,
                              entity_path(i, "pattern[" + std::to_string(k) + "]"), errors);
            }
        } else if (const auto* stochastic =
                       std::get_if<StochasticHopperBehavior>(&entity.behavior)) {
            if (static_cast<int>(stochastic->probs.size()) != num_channels) {
                errors.push_back({entity_path(i, "probs"),
                                  "expected exactly " + std::to_string(num_channels) +
                                      " entries, got " +
                                      std::to_string(stochastic->probs.size())});
            } else {
                double sum = 0.0;
                bool in_range = true;
                for (double p : stochastic->probs) {
                    if (!(p >= 0.0 && p <= 1.0)) {
                        in_range = false;
                    }
                    sum += p;
                }
                if (!in_range) {
                    errors.push_back(
                        {entity_path(i, "probs"), "probabilities must lie in [0, 1]"});
                } else if (std::abs(sum - 1.0) > kProbSumTolerance) {
                    std::ostringstream msg;
                    msg << "probabilities must sum to 1, got " << sum;
                    errors.push_back({entity_path(i, "probs"), msg.str()});
                }
            }
        }

        if (entity.duty_pattern.empty()) {
            errors.push_back({entity_path(i, "duty_pattern"), "duty_pattern must not be empty"});
        }
        if (entity.start_step < 0) {
            errors.push_back({entity_path(i, "start_step"), "must be >= 0"});
        }
        if (entity.stop_step < entity.start_step) {
            errors.push_back({entity_path(i, "stop_step"), "must be >= start_step"});
        }
        if (entity.start_step >= max_steps) {
            report.warnings.push_back(
                {entity_path(i, "start_step"), "entity never transmits within the episode"});
        } else if (entity.stop_step > max_steps - 1) {
            report.warnings.push_back(
                {entity_path(i, "stop_step"), "exceeds the final episode step"});
        }
    }

    if (jam && spec.environment.target_entity.has_value() &&
        !names.contains(*spec.environment.target_entity)) {
        errors.push_back({"environment.target_entity",
                          "no entity named \"" + *spec.environment.target_entity + "\""});
    }

    if (!(spec.render.fps > 0.0) || !std::isfinite(spec.render.fps)) {
        errors.push_back({"render.fps", "must be a positive number"});
    }
    if (spec.render.window < 1) {
        errors.push_back({"render.window", "must be >= 1"});
    }
    return report;
}

std::string serialize(const ScenarioSpec& spec) {
    ordered_json doc;
    ordered_json env;
    env["num_channels"] = spec.environment.num_channels;
    env["max_steps"] = spec.environment.max_steps;
    env["observation_mode"] = to_string(spec.environment.observation_mode);
    env["reward_mode"] = to_string(spec.environment.reward_mode);
    if (spec.environment.target_entity.has_value()) {
        env["target_entity"] = *spec.environment.target_entity;
    }
    env["dampening"] = spec.environment.dampening;
    doc["environment"] = std::move(env);

    doc["entities"] = ordered_json::array();
    for (const EntitySpec& entity : spec.entities) {
        doc["entities"].push_back(entity_to_json(entity));
    }

    ordered_json render;
    render["mode"] = to_string(spec.render.mode);
    render["fps"] = spec.render.fps;
    render["window"] = spec.render.window;
    doc["render"] = std::move(render);

    return doc.dump(2) + "\n";
}

}  // namespace rfrl
