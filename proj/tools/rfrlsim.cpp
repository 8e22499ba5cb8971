// rfrlsim — scenario validation, agent training runs, and step-log replay
// for the contested-spectrum simulator.
//
// Usage:
//   rfrlsim validate <scenario.json>
//   rfrlsim run <scenario.json> [--agent qlearn|random|notransmit] [...]
//   rfrlsim replay <steps.jsonl> [--fps F] [--window W] [--mode detect|classify]

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "rfrl/agents.hpp"
#include "rfrl/env.hpp"
#include "rfrl/render.hpp"
#include "rfrl/scenario.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitUnreadable = 2;

bool color_enabled() {
    if (std::getenv("RFRLSIM_NO_COLOR") != nullptr) {
        return false;
    }
    return isatty(fileno(stdout)) != 0;
}

bool read_file(const fs::path& path, std::string& out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        return false;
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    out = buffer.str();
    return true;
}

void print_issues(const std::vector<rfrl::Issue>& issues, const char* severity) {
    for (const rfrl::Issue& issue : issues) {
        std::cout << severity << ": " << issue.path << ": " << issue.message << "\n";
    }
}

struct RunConfig {
    std::string scenario_path;
    std::string agent = "qlearn";
    int episodes = 100;
    std::uint64_t seed = 0;
    rfrl::Hyperparams hyperparams;
    std::string out_dir = "out";
    std::string render = "inherit";
};

int cmd_validate(const std::string& path) {
    std::string text;
    if (!read_file(path, text)) {
        std::cerr << "error: cannot read " << path << "\n";
        return kExitUnreadable;
    }
    std::vector<rfrl::Issue> parse_warnings;
    rfrl::ScenarioSpec spec;
    try {
        spec = rfrl::parse_scenario(text, &parse_warnings);
    } catch (const rfrl::ParseError& e) {
        std::cout << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
    rfrl::ValidationReport report = rfrl::validate(spec);
    print_issues(report.errors, "error");
    print_issues(parse_warnings, "warning");
    print_issues(report.warnings, "warning");
    if (!report.ok()) {
        std::cout << path << ": " << report.errors.size() << " error(s)\n";
        return kExitInvalid;
    }
    std::cout << path << ": ok\n";
    return kExitOk;
}

double mean(const std::vector<double>& v) {
    if (v.empty()) {
        return 0.0;
    }
    double sum = 0.0;
    for (double x : v) {
        sum += x;
    }
    return sum / static_cast<double>(v.size());
}

double stddev(const std::vector<double>& v) {
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

int cmd_run(const RunConfig& config) {
    std::string text;
    if (!read_file(config.scenario_path, text)) {
        std::cerr << "error: cannot read " << config.scenario_path << "\n";
        return kExitUnreadable;
    }
    rfrl::ScenarioSpec spec;
    try {
        spec = rfrl::parse_scenario(text);
    } catch (const rfrl::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
    const rfrl::ValidationReport report = rfrl::validate(spec);
    if (!report.ok()) {
        for (const rfrl::Issue& issue : report.errors) {
            std::cerr << "error: " << issue.path << ": " << issue.message << "\n";
        }
        return kExitInvalid;
    }

    rfrl::RunResult result = [&] {
        if (config.agent == "random") {
            return rfrl::run_baseline(spec, rfrl::BaselineKind::random, config.episodes,
                                      config.seed);
        }
        if (config.agent == "notransmit") {
            return rfrl::run_baseline(spec, rfrl::BaselineKind::notransmit, config.episodes,
                                      config.seed);
        }
        return rfrl::train(spec, config.hyperparams, config.episodes, config.seed);
    }();

    const fs::path out_dir(config.out_dir);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        std::cerr << "error: cannot create " << out_dir.string() << ": " << ec.message()
                  << "\n";
        return kExitUnreadable;
    }

    try {
        rfrl::write_step_log(result.log.steps, out_dir / "steps.jsonl");
        rfrl::write_step_log(result.greedy_steps, out_dir / "greedy_steps.jsonl");
        const std::vector<rfrl::EpisodeSummary> summaries = rfrl::episode_summaries(result.log);
        rfrl::write_episode_csv(summaries, out_dir / "episodes.csv");

        {
            std::ofstream qfile(out_dir / "qtable.json");
            if (!qfile) {
                throw rfrl::IoError("cannot open " + (out_dir / "qtable.json").string());
            }
            qfile << result.qtable.to_json().dump(2) << "\n";
        }

        const std::size_t tail = std::min<std::size_t>(result.log.episode_rewards.size(), 20);
        const std::vector<double> last20(result.log.episode_rewards.end() -
                                             static_cast<std::ptrdiff_t>(tail),
                                         result.log.episode_rewards.end());
        int total_collisions = 0;
        for (int c : result.log.episode_collisions) {
            total_collisions += c;
        }

        nlohmann::ordered_json summary;
        summary["final_greedy_reward"] = result.greedy_reward;
        summary["final_greedy_collisions"] = result.greedy_collisions;
        summary["last20_mean"] = mean(last20);
        summary["last20_std"] = stddev(last20);
        summary["total_collisions"] = total_collisions;
        nlohmann::ordered_json settings;
        settings["scenario"] = config.scenario_path;
        settings["agent"] = config.agent;
        settings["episodes"] = config.episodes;
        settings["seed"] = config.seed;
        settings["alpha"] = config.hyperparams.alpha;
        settings["gamma"] = config.hyperparams.gamma;
        settings["eps_start"] = config.hyperparams.epsilon_start;
        settings["eps_end"] = config.hyperparams.epsilon_end;
        settings["eps_decay"] = config.hyperparams.epsilon_decay_episodes;
        settings["render"] = config.render;
        settings["out"] = config.out_dir;
        summary["settings"] = std::move(settings);
        std::ofstream sfile(out_dir / "summary.json");
        if (!sfile) {
            throw rfrl::IoError("cannot open " + (out_dir / "summary.json").string());
        }
        sfile << summary.dump(2) << "\n";

        std::cout << "wrote " << (out_dir / "steps.jsonl").string() << ", episodes.csv, "
                  << "qtable.json, greedy_steps.jsonl, summary.json\n";
        std::cout << "final greedy reward: " << result.greedy_reward
                  << " (collisions: " << result.greedy_collisions << ")\n";
        std::cout << "last-" << tail << " mean: " << mean(last20) << " std: " << stddev(last20)
                  << "\n";
    } catch (const rfrl::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUnreadable;
    }

    const bool terminal_render = config.render == "terminal" ||
                                 (config.render == "inherit" &&
                                  spec.render.mode == rfrl::RenderMode::terminal);
    if (terminal_render) {
        rfrl::LiveRenderOptions options;
        options.mode = spec.environment.observation_mode;
        options.fps = spec.render.fps;
        options.window = spec.render.window;
        options.color = color_enabled();
        options.clear_frames = isatty(fileno(stdout)) != 0;
        std::cout << "final greedy episode:\n";
        rfrl::live_render(result.greedy_steps, options, std::cout);
    }
    return kExitOk;
}

int cmd_replay(const std::string& path, double fps, int window, const std::string& mode_name) {
    std::string text;
    if (!read_file(path, text)) {
        std::cerr << "error: cannot read " << path << "\n";
        return kExitUnreadable;
    }

    // First pass sizes the channel axis: the log stores occupancy sparsely.
    std::vector<nlohmann::ordered_json> lines;
    int num_channels = 1;
    std::istringstream stream(text);
    std::string line;
    int line_number = 0;
    while (std::getline(stream, line)) {
        ++line_number;
        if (line.empty()) {
            continue;
        }
        nlohmann::ordered_json j;
        try {
            j = nlohmann::ordered_json::parse(line);
            for (const auto& item : j.at("occupancy").items()) {
                num_channels = std::max(num_channels, std::stoi(item.key()) + 1);
            }
            const auto& action = j.at("agent_action");
            if (!action.is_null()) {
                num_channels = std::max(num_channels, action.get<int>() + 1);
            }
        } catch (const std::exception& e) {
            std::cerr << "error: " << path << ":" << line_number << ": " << e.what() << "\n";
            return kExitInvalid;
        }
        lines.push_back(std::move(j));
    }

    std::vector<rfrl::StepRecord> records;
    records.reserve(lines.size());
    for (std::size_t i = 0; i < lines.size(); ++i) {
        try {
            records.push_back(rfrl::step_record_from_json(lines[i], num_channels));
        } catch (const std::exception& e) {
            std::cerr << "error: " << path << ":" << (i + 1) << ": " << e.what() << "\n";
            return kExitInvalid;
        }
    }

    rfrl::LiveRenderOptions options;
    options.mode =
        mode_name == "classify" ? rfrl::ObservationMode::classify : rfrl::ObservationMode::detect;
    options.fps = fps;
    options.window = window;
    options.color = color_enabled();
    options.clear_frames = isatty(fileno(stdout)) != 0;
    rfrl::live_render(records, options, std::cout);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Contested-spectrum channel occupancy simulator with a tabular Q-learning agent"};
    app.require_subcommand(1);

    std::string validate_path;
    CLI::App* validate_cmd = app.add_subcommand("validate", "Check a scenario file");
    validate_cmd->add_option("file", validate_path, "Scenario JSON file")->required();

    RunConfig config;
    CLI::App* run_cmd = app.add_subcommand("run", "Train an agent on a scenario");
    run_cmd->add_option("file", config.scenario_path, "Scenario JSON file")->required();
    run_cmd->add_option("--agent", config.agent, "Agent kind")
        ->check(CLI::IsMember({"qlearn", "random", "notransmit"}));
    run_cmd->add_option("--episodes", config.episodes, "Training episodes")
        ->check(CLI::PositiveNumber);
    run_cmd->add_option("--seed", config.seed, "Master random seed");
    run_cmd->add_option("--alpha", config.hyperparams.alpha, "Learning rate");
    run_cmd->add_option("--gamma", config.hyperparams.gamma, "Discount factor");
    run_cmd->add_option("--eps-start", config.hyperparams.epsilon_start, "Initial epsilon");
    run_cmd->add_option("--eps-end", config.hyperparams.epsilon_end, "Final epsilon");
    run_cmd->add_option("--eps-decay", config.hyperparams.epsilon_decay_episodes,
                        "Episodes over which epsilon decays linearly");
    run_cmd->add_option("--out", config.out_dir, "Output directory");
    run_cmd->add_option("--render", config.render, "Render override")
        ->check(CLI::IsMember({"terminal", "none", "inherit"}));

    std::string replay_path;
    double replay_fps = 4.0;
    int replay_window = 16;
    std::string replay_mode = "detect";
    CLI::App* replay_cmd = app.add_subcommand("replay", "Re-render a step log");
    replay_cmd->add_option("file", replay_path, "steps.jsonl file")->required();
    replay_cmd->add_option("--fps", replay_fps, "Frames per second");
    replay_cmd->add_option("--window", replay_window, "Steps shown per frame")
        ->check(CLI::PositiveNumber);
    replay_cmd->add_option("--mode", replay_mode, "Cell rendering mode")
        ->check(CLI::IsMember({"detect", "classify"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate_cmd->parsed()) {
            return cmd_validate(validate_path);
        }
        if (run_cmd->parsed()) {
            return cmd_run(config);
        }
        return cmd_replay(replay_path, replay_fps, replay_window, replay_mode);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
}
