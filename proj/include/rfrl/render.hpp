#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "rfrl/occupancy.hpp"

namespace rfrl {

// Raised when a log destination cannot be written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct StepRecord {
    int episode = 0;
    int step = 0;
    Action agent_action;
    OccupancyMap occupancy;
    double reward = 0.0;
    double cumulative_reward = 0.0;
    bool collision_with_agent = false;

    bool operator==(const StepRecord&) const = default;
};

struct EpisodeSummary {
    int episode = 0;
    double cumulative_reward = 0.0;
    int collisions = 0;
    double epsilon_used = 0.0;
};

// One grid row for a step: a cell per channel plus a reward suffix.
// Detect cells show the agent-visible bits ('1'/'0'); classify cells show
// '.' empty, 'A' agent alone, the entity id digit, or 'X' for two or more
// occupants. A trailing '!' marks an agent collision.
std::string render_row(const StepRecord& record, ObservationMode mode, bool color = false);

// Rows for the most recent `window` records, newest last.
std::string render_grid(std::span<const StepRecord> records, ObservationMode mode, int window,
                        bool color = false);

// Column ruler matching render_row's cell block.
std::string grid_header(int num_channels);

// JSON-lines step log with a fixed field order.
void write_step_log(std::span<const StepRecord> records, std::ostream& out);
void write_step_log(std::span<const StepRecord> records, const std::filesystem::path& path);

// Per-episode CSV: "episode,cumulative_reward,collisions,epsilon".
void write_episode_csv(std::span<const EpisodeSummary> summaries, std::ostream& out);
void write_episode_csv(std::span<const EpisodeSummary> summaries,
                       const std::filesystem::path& path);

nlohmann::ordered_json step_record_to_json(const StepRecord& record);
// `num_channels` sizes the reconstructed occupancy map.
StepRecord step_record_from_json(const nlohmann::ordered_json& j, int num_channels);

struct LiveRenderOptions {
    ObservationMode mode = ObservationMode::detect;
    double fps = 4.0;
    int window = 16;
    bool color = false;
    bool clear_frames = false;  // ANSI home+clear between frames (interactive terminals)
};

// Replays records as a paced sequence of grid frames. Pacing never changes
// the bytes written, only the timing.
void live_render(std::span<const StepRecord> records, const LiveRenderOptions& options,
                 std::ostream& out);

}  // namespace rfrl
