// wakebeam - learned instant initial access for mmWave cell-free networks
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "svg_chart.hpp"
#include "wakebeam/config.hpp"
#include "wakebeam/errors.hpp"
#include "wakebeam/scenario.hpp"

namespace fs = std::filesystem;
using namespace wakebeam;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;
constexpr int kExitInternal = 4;

/// Removes everything this command created if it fails part-way.
class OutputTracker {
public:
    void add(const fs::path& p) { created_.push_back(p); }
    void commit() { created_.clear(); }
    ~OutputTracker()
    {
        std::error_code ec;
        for (auto it = created_.rbegin(); it != created_.rend(); ++it)
            fs::remove(*it, ec);
    }

private:
    std::vector<fs::path> created_;
};

struct CommonOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::optional<int> jobs;
    bool plot = false;
    std::optional<int> paps;
    std::optional<long> episodes;
};

void add_common(CLI::App* cmd, CommonOptions& opt)
{
    cmd->add_option("--config", opt.config_path, "run configuration file");
    cmd->add_option("--seed", opt.seed, "override cli.seed");
    cmd->add_option("--out", opt.out_dir, "override cli.out_dir");
    cmd->add_option("--jobs", opt.jobs, "parallel workers for independent seeds");
    cmd->add_flag("--plot", opt.plot, "also render SVG charts");
    cmd->add_option("--paps", opt.paps, "override scenario.num_paps");
    cmd->add_option("--episodes", opt.episodes, "override scenario.episodes");
}

RunConfig resolve_config(const CommonOptions& opt)
{
    RunConfig cfg = opt.config_path.empty() ? default_run_config() : load_run_config(opt.config_path);
    if (opt.seed)
        cfg.seed = *opt.seed;
    if (!opt.out_dir.empty())
        cfg.out_dir = opt.out_dir;
    if (opt.jobs)
        cfg.jobs = *opt.jobs;
    if (opt.plot)
        cfg.plot = true;
    if (opt.paps)
        cfg.training.num_paps = *opt.paps;
    if (opt.episodes)
        cfg.training.episodes = *opt.episodes;
    validate_run_config(cfg);
    return cfg;
}

void ensure_dir(const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text)
{
    std::vector<std::uint64_t> seeds;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto comma = text.find(',', pos);
        if (comma == std::string::npos)
            comma = text.size();
        const std::string item = text.substr(pos, comma - pos);
        const auto dots = item.find("..");
        if (dots != std::string::npos) {
            const auto lo = std::stoull(item.substr(0, dots));
            const auto hi = std::stoull(item.substr(dots + 2));
            if (hi < lo)
                throw ValidationError("--seeds: descending range '" + item + "'");
            for (auto s = lo; s <= hi; ++s)
                seeds.push_back(s);
        } else if (!item.empty()) {
            seeds.push_back(std::stoull(item));
        }
        pos = comma + 1;
    }
    if (seeds.empty())
        throw ValidationError("--seeds: no seeds given");
    return seeds;
}

void write_tracked(OutputTracker& tracker, const fs::path& path, const std::string& content)
{
    tracker.add(path);
    write_text_file(path.string(), content);
}

void render_regret_svg(OutputTracker& tracker, const fs::path& path, const TrainingLog& log)
{
    svg::Series s;
    s.label = "moving avg";
    s.color = "#1f77b4";
    s.points.reserve(log.rows.size());
    for (const auto& row : log.rows)
        s.points.emplace_back(static_cast<double>(row.episode), row.moving_avg);
    write_tracked(tracker, path,
                  svg::line_chart("Normalized regret during training", "episode", "normalized regret", {s}));
}

std::string run_one_training(const RunConfig& cfg, std::uint64_t seed, const fs::path& dir,
                             OutputTracker& tracker)
{
    ensure_dir(dir);
    write_tracked(tracker, dir / "effective.config", emit_run_config(cfg));

    Rng init(mix_seed(seed, 0xa9e47));
    Agent agent(derive_agent_config(cfg), init);
    const TrainingLog log = train_round(cfg, agent, seed);

    write_tracked(tracker, dir / "training_log.csv", training_log_to_csv(log));
    tracker.add(dir / "agent.json");
    agent.save((dir / "agent.json").string());
    if (cfg.plot)
        render_regret_svg(tracker, dir / "regret.svg", log);

    std::ostringstream os;
    os << "seed " << seed << ": episodes=" << log.rows.size()
       << " trailing_mean_normalized_regret=" << trailing_mean_normalized_regret(log, 5000);
    return os.str();
}

int cmd_train(const CommonOptions& opt, const std::string& seeds_text)
{
    RunConfig cfg = resolve_config(opt);
    OutputTracker tracker;
    ensure_dir(cfg.out_dir);

    if (seeds_text.empty()) {
        std::cout << run_one_training(cfg, cfg.seed, cfg.out_dir, tracker) << "\n";
    } else {
        const auto seeds = parse_seed_list(seeds_text);
        std::vector<std::exception_ptr> errors(seeds.size());
        std::vector<std::string> summaries(seeds.size());
        const int workers = std::max(1, std::min<int>(cfg.jobs, static_cast<int>(seeds.size())));
        std::vector<std::thread> pool;
        std::size_t next = 0;
        std::mutex next_mutex;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (;;) {
                    std::size_t i;
                    {
                        std::lock_guard lock(next_mutex);
                        if (next >= seeds.size())
                            return;
                        i = next++;
                    }
                    try {
                        RunConfig local = cfg;
                        local.seed = seeds[i];
                        OutputTracker worker_tracker;
                        summaries[i] = run_one_training(
                            local, seeds[i], fs::path(cfg.out_dir) / ("seed_" + std::to_string(seeds[i])),
                            worker_tracker);
                        worker_tracker.commit();
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        for (auto& t : pool)
            t.join();
        for (const auto& e : errors)
            if (e)
                std::rethrow_exception(e);
        for (const auto& s : summaries)
            std::cout << s << "\n";
    }
    tracker.commit();
    return kExitOk;
}

int cmd_eval(const CommonOptions& opt, const std::string& checkpoint, const std::string& policy_name)
{
    RunConfig cfg = resolve_config(opt);
    const Agent agent = Agent::load(checkpoint, derive_mlp_config(cfg));

    Policy policy = Policy::Greedy;
    if (policy_name == "oracle")
        policy = Policy::Oracle;
    else if (policy_name == "random")
        policy = Policy::Random;
    else if (policy_name != "greedy")
        throw ValidationError("--policy must be greedy, oracle or random");

    const EvalMetrics metrics = evaluate(cfg, agent, cfg.training.eval_episodes, policy, cfg.seed);

    OutputTracker tracker;
    ensure_dir(cfg.out_dir);
    write_tracked(tracker, fs::path(cfg.out_dir) / "eval.json",
                  eval_metrics_to_json(metrics, policy, cfg.seed));
    tracker.commit();
    std::cout << "eval: policy=" << policy_name << " ratio=" << metrics.mean_gain_ratio
              << " normalized_regret=" << metrics.mean_normalized_regret
              << " accuracy=" << metrics.action_accuracy << "\n";
    return kExitOk;
}

int cmd_scenario(const CommonOptions& opt, const std::string& checkpoint)
{
    RunConfig cfg = resolve_config(opt);
    const Agent agent = Agent::load(checkpoint, derive_mlp_config(cfg));
    const ScenarioTrace trace = run_demand_scenario(cfg, agent, cfg.seed);

    OutputTracker tracker;
    ensure_dir(cfg.out_dir);
    write_tracked(tracker, fs::path(cfg.out_dir) / "scenario_trace.csv", trace_to_csv(trace));
    write_tracked(tracker, fs::path(cfg.out_dir) / "scenario_events.json", events_to_json(trace));
    if (cfg.plot) {
        const char* colors[] = {"#1f77b4", "#d62728", "#7f7f7f", "#2ca02c"};
        std::vector<svg::Series> cap, ee;
        for (std::size_t i = 0; i < trace.systems.size(); ++i) {
            svg::Series c{trace.systems[i].name, colors[i % 4], {}};
            svg::Series g{trace.systems[i].name, colors[i % 4], {}};
            for (const auto& pt : trace.systems[i].points) {
                c.points.emplace_back(pt.t_s * 1000.0, pt.capacity_bps / 1e9);
                g.points.emplace_back(pt.t_s * 1000.0, pt.ee_bpj / 1e6);
            }
            cap.push_back(std::move(c));
            ee.push_back(std::move(g));
        }
        write_tracked(tracker, fs::path(cfg.out_dir) / "scenario_capacity.svg",
                      svg::line_chart("Network capacity", "t [ms]", "capacity [Gbit/s]", cap));
        write_tracked(tracker, fs::path(cfg.out_dir) / "scenario_ee.svg",
                      svg::line_chart("Energy efficiency", "t [ms]", "EE [Mbit/J]", ee));
    }
    tracker.commit();
    for (const auto& s : trace.systems)
        std::cout << s.name << ": time-averaged EE = " << s.mean_ee_bpj << " bit/J\n";
    return kExitOk;
}

int cmd_gen_channels(const CommonOptions& opt, int count, std::string out_file)
{
    RunConfig cfg = resolve_config(opt);
    if (count < 1)
        throw ValidationError("--count must be >= 1");

    const auto grid = cfg.layout.user_positions();
    Rng rng(mix_seed(cfg.seed, 0x67656eu));
    std::vector<ChannelRealization> channels;
    channels.reserve(cfg.layout.ap_positions.size() * static_cast<std::size_t>(count));
    for (const auto& ap : cfg.layout.ap_positions)
        for (int i = 0; i < count; ++i) {
            const Vec3 user = grid[rng.uniform_int(grid.size())];
            channels.push_back(generate_channel(ap, user, cfg.channel, cfg.array, rng));
        }

    OutputTracker tracker;
    ensure_dir(cfg.out_dir);
    if (out_file.empty())
        out_file = (fs::path(cfg.out_dir) / "channels.jsonl").string();
    tracker.add(out_file);
    export_channels(out_file, channels);
    tracker.commit();
    std::cout << "wrote " << channels.size() << " channel records to " << out_file << "\n";
    return kExitOk;
}

int cmd_sweep_baseline(const CommonOptions& opt, const std::string& channels_file)
{
    RunConfig cfg = resolve_config(opt);
    const Codebook codebook = build_run_codebook(cfg);
    const int m = codebook.size();

    nlohmann::json report;
    std::vector<long> histogram(static_cast<std::size_t>(m), 0);
    nlohmann::json episodes_log = nlohmann::json::array();

    if (!channels_file.empty()) {
        const auto channels = import_channels(channels_file, cfg.array.elements());
        const auto beams = solve_pap_beams(std::span<const ChannelRealization>(channels), codebook);
        for (std::size_t i = 0; i < channels.size(); ++i) {
            ++histogram[static_cast<std::size_t>(beams[i])];
            episodes_log.push_back({{"record", i + 1}, {"beam", beams[i]}});
        }
        report["source"] = channels_file;
        report["records"] = channels.size();
    } else {
        const long episodes = cfg.training.episodes;
        const auto grid = cfg.layout.user_positions();
        Rng rng(mix_seed(cfg.seed, 0x73776565u));
        for (long e = 0; e < episodes; ++e) {
            const Vec3 user = grid[rng.uniform_int(grid.size())];
            std::vector<CVec> hs;
            hs.reserve(cfg.layout.ap_positions.size());
            for (const auto& ap : cfg.layout.ap_positions)
                hs.push_back(generate_channel(ap, user, cfg.channel, cfg.array, rng).h);
            const auto beams = solve_pap_beams(std::span<const CVec>(hs), codebook);
            for (const int b : beams)
                ++histogram[static_cast<std::size_t>(b)];
            if (episodes <= 1000)
                episodes_log.push_back({{"user", {user.x, user.y, user.z}}, {"beams", beams}});
        }
        report["episodes"] = episodes;
    }

    report["beam_histogram"] = histogram;
    if (!episodes_log.empty())
        report["per_episode"] = std::move(episodes_log);

    OutputTracker tracker;
    ensure_dir(cfg.out_dir);
    write_tracked(tracker, fs::path(cfg.out_dir) / "baseline.json", report.dump(2) + "\n");
    tracker.commit();
    std::cout << "beam-sweep baseline written to " << (fs::path(cfg.out_dir) / "baseline.json").string()
              << "\n";
    return kExitOk;
}

int cmd_default_config(const std::string& out_file)
{
    const std::string text = emit_run_config(default_run_config());
    if (out_file.empty()) {
        std::cout << text;
    } else {
        write_text_file(out_file, text);
        std::cout << "wrote " << out_file << "\n";
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"wakebeam: neighbor-aided instant initial access simulator"};
    app.require_subcommand(1);

    CommonOptions train_opt, eval_opt, scen_opt, gen_opt, sweep_opt;
    std::string seeds_text, checkpoint, policy = "greedy", channels_file, out_file;
    int gen_count = 100;

    auto* train = app.add_subcommand("train", "train the bandit and write training_log.csv");
    add_common(train, train_opt);
    train->add_option("--seeds", seeds_text, "run several comma/range seeds (e.g. 1,2,5..8)");

    auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on fresh episodes");
    add_common(eval, eval_opt);
    eval->add_option("--checkpoint", checkpoint, "agent checkpoint")->required();
    eval->add_option("--policy", policy, "greedy | oracle | random");

    auto* scen = app.add_subcommand("scenario", "dynamic-demand system comparison");
    add_common(scen, scen_opt);
    scen->add_option("--checkpoint", checkpoint, "agent checkpoint")->required();

    auto* gen = app.add_subcommand("gen-channels", "export a channel dump (JSON Lines)");
    add_common(gen, gen_opt);
    gen->add_option("--count", gen_count, "users per AP");
    gen->add_option("--out-file", out_file, "dump path (default <out>/channels.jsonl)");

    auto* sweep = app.add_subcommand("sweep-baseline", "exhaustive beam-sweep report");
    add_common(sweep, sweep_opt);
    sweep->add_option("--channels", channels_file, "run on an imported channel dump");

    auto* defcfg = app.add_subcommand("default-config", "print the default configuration");
    defcfg->add_option("--out-file", out_file, "write to a file instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (train->parsed())
            return cmd_train(train_opt, seeds_text);
        if (eval->parsed())
            return cmd_eval(eval_opt, checkpoint, policy);
        if (scen->parsed())
            return cmd_scenario(scen_opt, checkpoint);
        if (gen->parsed())
            return cmd_gen_channels(gen_opt, gen_count, out_file);
        if (sweep->parsed())
            return cmd_sweep_baseline(sweep_opt, channels_file);
        if (defcfg->parsed())
            return cmd_default_config(out_file);
    } catch (const InternalError& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitOk;
}
