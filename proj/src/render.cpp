#include "rfrl/render.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

namespace rfrl {

namespace {

constexpr const char* kRed = "\x1b[31m";
constexpr const char* kGreen = "\x1b[32m";
constexpr const char* kReset = "\x1b[0m";

std::string format_reward(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", value);
    return buf;
}

char occupant_symbol(int id) {
    if (id < 10) {
        return static_cast<char>('0' + id);
    }
    return static_cast<char>('a' + (id - 10) % 26);
}

std::string action_label(const Action& action) {
    if (!action.transmits()) {
        return "--";
    }
    return "T" + std::to_string(*action.channel);
}

std::string classify_cell(const std::vector<int>& ids, bool color) {
    if (ids.empty()) {
        return ".";
    }
    if (ids.size() >= 2) {
        return color ? std::string(kRed) + "X" + kReset : "X";
    }
    if (ids.front() == kAgentId) {
        return color ? std::string(kGreen) + "A" + kReset : "A";
    }
    return std::string(1, occupant_symbol(ids.front()));
}

}  // namespace

std::string render_row(const StepRecord& record, ObservationMode mode, bool color) {
    std::ostringstream out;
    char head[32];
    std::snprintf(head, sizeof(head), "%4d |", record.step);
    out << head;
    const int channels = record.occupancy.num_channels();
    if (mode == ObservationMode::detect) {
        for (int c = 0; c < channels; ++c) {
            out << (record.occupancy.entity_present(c) ? '1' : '0');
        }
    } else {
        for (int c = 0; c < channels; ++c) {
            out << classify_cell(record.occupancy.occupants(c), color);
        }
    }
    out << "| a=" << action_label(record.agent_action) << " r=" << format_reward(record.reward)
        << " R=" << format_reward(record.cumulative_reward);
    if (record.collision_with_agent) {
        out << (color ? std::string(" ") + kRed + "!" + kReset : " !");
    }
    return out.str();
}

std::string render_grid(std::span<const StepRecord> records, ObservationMode mode, int window,
                        bool color) {
    if (records.empty()) {
        return "";
    }
    const std::size_t count = std::min<std::size_t>(records.size(), static_cast<std::size_t>(window));
    std::ostringstream out;
    for (std::size_t i = records.size() - count; i < records.size(); ++i) {
        out << render_row(records[i], mode, color) << '\n';
    }
    return out.str();
}

std::string grid_header(int num_channels) {
    std::ostringstream out;
    out << "step |";
    for (int c = 0; c < num_channels; ++c) {
        out << (c % 10);
    }
    out << "|";
    return out.str();
}

nlohmann::ordered_json step_record_to_json(const StepRecord& record) {
    nlohmann::ordered_json j;
    j["episode"] = record.episode;
    j["step"] = record.step;
    if (record.agent_action.transmits()) {
        j["agent_action"] = *record.agent_action.channel;
    } else {
        j["agent_action"] = nullptr;
    }
    nlohmann::ordered_json occupancy = nlohmann::ordered_json::object();
    for (int c = 0; c < record.occupancy.num_channels(); ++c) {
        if (record.occupancy.occupied(c)) {
            occupancy[std::to_string(c)] = record.occupancy.occupants(c);
        }
    }
    j["occupancy"] = std::move(occupancy);
    j["reward"] = record.reward;
    j["cumulative_reward"] = record.cumulative_reward;
    j["collision_with_agent"] = record.collision_with_agent;
    return j;
}

StepRecord step_record_from_json(const nlohmann::ordered_json& j, int num_channels) {
    StepRecord record;
    record.episode = j.at("episode").get<int>();
    record.step = j.at("step").get<int>();
    const auto& action = j.at("agent_action");
    record.agent_action =
        action.is_null() ? Action::no_transmit() : Action::transmit(action.get<int>());
    record.occupancy = OccupancyMap(num_channels);
    for (const auto& item : j.at("occupancy").items()) {
        const int channel = std::stoi(item.key());
        for (const auto& id : item.value()) {
            record.occupancy.add(channel, id.get<int>());
        }
    }
    record.reward = j.at("reward").get<double>();
    record.cumulative_reward = j.at("cumulative_reward").get<double>();
    record.collision_with_agent = j.at("collision_with_agent").get<bool>();
    return record;
}

void write_step_log(std::span<const StepRecord> records, std::ostream& out) {
    for (const StepRecord& record : records) {
        out << step_record_to_json(record).dump() << '\n';
    }
}

void write_step_log(std::span<const StepRecord> records, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    write_step_log(records, out);
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

void write_episode_csv(std::span<const EpisodeSummary> summaries, std::ostream& out) {
    out << "episode,cumulative_reward,collisions,epsilon\n";
    for (const EpisodeSummary& summary : summaries) {
        char epsilon[32];
        std::snprintf(epsilon, sizeof(epsilon), "%.6g", summary.epsilon_used);
        out << summary.episode << ',' << format_reward(summary.cumulative_reward) << ','
            << summary.collisions << ',' << epsilon << '\n';
    }
}

void write_episode_csv(std::span<const EpisodeSummary> summaries,
                       const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    write_episode_csv(summaries, out);
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

void live_render(std::span<const StepRecord> records, const LiveRenderOptions& options,
                 std::ostream& out) {
    if (records.empty()) {
        return;
    }
    const auto frame_delay =
        std::chrono::duration<double>(options.fps > 0.0 ? 1.0 / options.fps : 0.0);
    const int channels = records.front().occupancy.num_channels();
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (options.clear_frames) {
            out << "\x1b[H\x1b[2J";
        } else if (i > 0) {
            out << '\n';
        }
        out << grid_header(channels) << '\n';
        out << render_grid(records.subspan(0, i + 1), options.mode, options.window,
                           options.color);
        out.flush();
        if (frame_delay.count() > 0.0 && i + 1 < records.size()) {
            std::this_thread::sleep_for(frame_delay);
        }
    }
}

}  // namespace rfrl
