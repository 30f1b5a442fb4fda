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

#include "wakebeam/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "wakebeam/errors.hpp"

namespace wakebeam {

namespace {

constexpr std::uint64_t kSaltTrain = 0x7472u;
constexpr std::uint64_t kSaltEval = 0x6576u;
constexpr std::uint64_t kSaltScenario = 0x7363u;

struct EpisodeWorld {
    const RunConfig& cfg;
    Codebook codebook;
    std::vector<Vec3> user_grid;
    double noise_mw = 0.0;
    double link_gain_db = 0.0;
    Vec3 sap_position;

    explicit EpisodeWorld(const RunConfig& config)
        : cfg(config),
          codebook(build_run_codebook(config)),
          user_grid(config.layout.user_positions()),
          noise_mw(config.layout.noise_power_mw()),
          link_gain_db(config.layout.antenna_gain_db + config.array.element_gain_db),
          sap_position(config.layout.ap_positions[static_cast<std::size_t>(config.layout.sap_index)])
    {
        if (user_grid.empty())
            throw ValidationError("user grid is empty");
    }
};

/// The sleeping AP's neighbors for one round: a sorted subset of the other
/// APs, drawn uniformly when there is a choice.
std::vector<int> draw_pap_subset(const RunConfig& cfg, Rng& rng)
{
    std::vector<int> candidates;
    for (int i = 0; i < cfg.layout.num_aps(); ++i)
        if (i != cfg.layout.sap_index)
            candidates.push_back(i);
    const auto want = static_cast<std::size_t>(cfg.training.num_paps);
    if (want > candidates.size())
        throw ValidationError("scenario.num_paps exceeds the number of non-sleeping APs");
    if (want == candidates.size())
        return candidates;
    for (std::size_t i = 0; i < want; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.uniform_int(candidates.size() - i));
        std::swap(candidates[i], candidates[j]);
    }
    candidates.resize(want);
    std::sort(candidates.begin(), candidates.end());
    return candidates;
}

struct EpisodeState {
    Vec3 user;
    std::vector<CVec> pap_channels;
    std::vector<int> pap_beams;
    Context context;
    CVec sap_estimate;
    OracleResult oracle;
};

EpisodeState draw_episode(const EpisodeWorld& world, std::span<const Vec3> pap_positions, Rng& rng)
{
    EpisodeState ep;
    ep.user = world.user_grid[rng.uniform_int(world.user_grid.size())];

    ep.pap_channels.reserve(pap_positions.size());
    for (const auto& ap : pap_positions)
        ep.pap_channels.push_back(generate_channel(ap, ep.user, world.cfg.channel, world.cfg.array, rng).h);
    ep.pap_beams = solve_pap_beams(std::span<const CVec>(ep.pap_channels), world.codebook);
    ep.context = build_context(pap_positions, ep.pap_beams, world.codebook, world.cfg.layout);

    const auto sap_channel = generate_channel(world.sap_position, ep.user, world.cfg.channel,
                                              world.cfg.array, rng);
    ep.sap_estimate = apply_estimate_error(sap_channel.h, world.cfg.layout.estimate_error_snr_db, rng);
    ep.oracle = best_beam_oracle(ep.sap_estimate, world.codebook, world.noise_mw);
    return ep;
}

std::vector<Vec3> subset_positions(const RunConfig& cfg, std::span<const int> subset)
{
    std::vector<Vec3> positions;
    positions.reserve(subset.size());
    for (const int idx : subset)
        positions.push_back(cfg.layout.ap_positions[static_cast<std::size_t>(idx)]);
    return positions;
}

} // namespace

double trailing_mean_normalized_regret(const TrainingLog& log, std::size_t window)
{
    if (log.rows.empty())
        throw std::invalid_argument("trailing_mean_normalized_regret: empty log");
    const std::size_t n = std::min(window, log.rows.size());
    double sum = 0.0;
    for (std::size_t i = log.rows.size() - n; i < log.rows.size(); ++i)
        sum += log.rows[i].normalized_regret;
    return sum / static_cast<double>(n);
}

TrainingLog train_round(const RunConfig& cfg, Agent& agent, std::uint64_t seed)
{
    const EpisodeWorld world(cfg);
    Rng rng(mix_seed(seed, kSaltTrain));

    TrainingLog log;
    log.rows.reserve(static_cast<std::size_t>(cfg.training.episodes) * static_cast<std::size_t>(cfg.training.rounds));

    const auto window = static_cast<std::size_t>(cfg.training.moving_avg_window);
    std::vector<double> recent(window, 0.0);
    double recent_sum = 0.0;
    std::size_t recent_count = 0;

    long global_episode = 0;
    for (int round = 0; round < cfg.training.rounds; ++round) {
        const auto subset = draw_pap_subset(cfg, rng);
        const auto pap_positions = subset_positions(cfg, subset);

        for (long e = 0; e < cfg.training.episodes; ++e) {
            const auto ep = draw_episode(world, pap_positions, rng);

            const double epsilon_used = agent.epsilon();
            const auto choice = agent.select_action(ep.context, rng);
            const auto& beam = world.codebook.beams[static_cast<std::size_t>(choice.action)];

            EpisodeOutcome outcome;
            outcome.chosen_action = choice.action;
            outcome.exploration = choice.explored;
            outcome.reward = reward(ep.sap_estimate, beam, world.noise_mw);
            outcome.reward_max = ep.oracle.reward_max;
            outcome.regret = regret(outcome.reward, outcome.reward_max);
            outcome.normalized_regret = normalized_regret(outcome.reward, outcome.reward_max);

            agent.observe({ep.context, choice.action, matched_gain_fraction(ep.sap_estimate, beam)}, rng);
            agent.decay_epsilon();

            const std::size_t slot = recent_count % window;
            if (recent_count >= window)
                recent_sum -= recent[slot];
            recent[slot] = outcome.normalized_regret;
            recent_sum += outcome.normalized_regret;
            ++recent_count;

            TrainingRow row;
            row.episode = ++global_episode;
            row.epsilon = epsilon_used;
            row.reward = outcome.reward;
            row.regret = outcome.regret;
            row.normalized_regret = outcome.normalized_regret;
            row.moving_avg = recent_sum / static_cast<double>(std::min(recent_count, window));
            log.rows.push_back(row);
        }
    }
    return log;
}

EvalMetrics evaluate(const RunConfig& cfg, const Agent& agent, long episodes, Policy policy,
                     std::uint64_t seed)
{
    if (episodes < 1)
        throw std::invalid_argument("evaluate: episodes must be >= 1");
    const EpisodeWorld world(cfg);
    Rng rng(mix_seed(seed, kSaltEval));

    const auto subset = draw_pap_subset(cfg, rng);
    const auto pap_positions = subset_positions(cfg, subset);

    EvalMetrics metrics;
    metrics.episodes = episodes;
    double ratio_sum = 0.0, regret_sum = 0.0;
    long hits = 0;
    for (long e = 0; e < episodes; ++e) {
        const auto ep = draw_episode(world, pap_positions, rng);
        int action = 0;
        switch (policy) {
        case Policy::Greedy:
            action = agent.greedy_action(ep.context);
            break;
        case Policy::Oracle:
            action = ep.oracle.best_index;
            break;
        case Policy::Random:
            action = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(world.codebook.size())));
            break;
        }
        const auto& beam = world.codebook.beams[static_cast<std::size_t>(action)];
        const double alpha = reward(ep.sap_estimate, beam, world.noise_mw);
        const double best_gain = matched_gain_fraction(
            ep.sap_estimate, world.codebook.beams[static_cast<std::size_t>(ep.oracle.best_index)]);
        ratio_sum += matched_gain_fraction(ep.sap_estimate, beam) / best_gain;
        regret_sum += normalized_regret(alpha, ep.oracle.reward_max);
        hits += action == ep.oracle.best_index ? 1 : 0;
    }
    metrics.mean_gain_ratio = ratio_sum / static_cast<double>(episodes);
    metrics.mean_normalized_regret = regret_sum / static_cast<double>(episodes);
    metrics.action_accuracy = static_cast<double>(hits) / static_cast<double>(episodes);
    return metrics;
}

double ia_wait_time(double wake_time_s, const TimingModel& timing, IaSystem system)
{
    if (wake_time_s < 0.0)
        throw std::invalid_argument("ia_wait_time: wake time must be >= 0");
    if (system == IaSystem::Dcb)
        return timing.dcb_processing_delay_s;

    // Next beam-sweep slot strictly after the wake instant; an AP waking
    // exactly on a slot has already missed it.
    const double frame = timing.frame_length_s;
    double phase = std::fmod(wake_time_s - timing.pbch_offset_s, frame);
    if (phase < 0.0)
        phase += frame;
    const double wait = frame - phase;
    return wait + timing.ia_sweep_duration_s;
}

double capacity_bps(std::span<const double> snrs, double bandwidth_hz)
{
    double total = 0.0;
    for (const double g : snrs) {
        if (g < 0.0)
            throw std::invalid_argument("capacity_bps: SNR components must be >= 0");
        total += g;
    }
    return bandwidth_hz * std::log2(1.0 + total);
}

double energy_efficiency(double capacity, double total_power_w)
{
    if (total_power_w <= 0.0)
        throw std::invalid_argument("energy_efficiency: power must be positive");
    return capacity / total_power_w;
}

ScenarioTrace run_demand_scenario(const RunConfig& cfg, const Agent& agent, std::uint64_t seed)
{
    if (cfg.training.num_paps != cfg.layout.num_aps() - 1)
        throw ValidationError("demand scenario requires num_paps == number of APs - 1 "
                              "(exactly one sleeping AP)");
    if (agent.config().mlp.loc_dim != 2 * cfg.training.num_paps
        || agent.config().mlp.num_actions != cfg.array.elements())
        throw ValidationError("demand scenario: agent shape does not match the configuration");

    const EpisodeWorld world(cfg);
    Rng rng(mix_seed(seed, kSaltScenario));

    const auto subset = draw_pap_subset(cfg, rng);
    const auto pap_positions = subset_positions(cfg, subset);
    const auto ep = draw_episode(world, pap_positions, rng);

    // Block fading: one channel draw serves the whole window.
    std::vector<double> pap_snrs;
    pap_snrs.reserve(pap_positions.size());
    for (std::size_t i = 0; i < pap_positions.size(); ++i)
        pap_snrs.push_back(snr(cfg.layout.tx_power_dbm, ep.pap_channels[i],
                               world.codebook.beams[static_cast<std::size_t>(ep.pap_beams[i])],
                               world.noise_mw, world.link_gain_db));

    const int agent_beam = agent.greedy_action(ep.context);
    const double sap_snr_agent = snr(cfg.layout.tx_power_dbm, ep.sap_estimate,
                                     world.codebook.beams[static_cast<std::size_t>(agent_beam)],
                                     world.noise_mw, world.link_gain_db);
    const double sap_snr_oracle = snr(cfg.layout.tx_power_dbm, ep.sap_estimate,
                                      world.codebook.beams[static_cast<std::size_t>(ep.oracle.best_index)],
                                      world.noise_mw, world.link_gain_db);

    const double t_demand = cfg.demand.demand_time_s;
    const double t_dcb_serve = t_demand + ia_wait_time(t_demand, cfg.timing, IaSystem::Dcb);
    const double t_fiveg_serve = t_demand + ia_wait_time(t_demand, cfg.timing, IaSystem::FiveG);

    struct SystemPlan {
        std::string name;
        double wake_t;  // SAP awake from here on (infinity = never, 0 = always)
        double serve_t; // SAP contributes capacity from here on
        double sap_snr;
    };
    const std::vector<SystemPlan> plans = {
        {"proposed", t_demand, t_dcb_serve, sap_snr_agent},
        {"5g_ia", t_demand, t_fiveg_serve, sap_snr_oracle},
        {"always_on", 0.0, 0.0, sap_snr_oracle},
        {"genie", t_demand, t_demand, sap_snr_oracle},
    };

    const int num_aps = cfg.layout.num_aps();
    const auto steps = static_cast<long>(std::llround(cfg.demand.duration_s / cfg.demand.trace_step_s));

    ScenarioTrace trace;
    for (const auto& plan : plans) {
        SystemTrace st;
        st.name = plan.name;
        st.points.reserve(static_cast<std::size_t>(steps));
        double ee_sum = 0.0;
        std::vector<double> snrs;
        for (long i = 0; i < steps; ++i) {
            const double t = static_cast<double>(i) * cfg.demand.trace_step_s;
            const bool sap_awake = t >= plan.wake_t;
            const bool sap_serving = t >= plan.serve_t;

            snrs.assign(pap_snrs.begin(), pap_snrs.end());
            if (sap_serving)
                snrs.push_back(plan.sap_snr);

            TracePoint pt;
            pt.t_s = t;
            pt.capacity_bps = capacity_bps(snrs, cfg.layout.bandwidth_hz);
            pt.power_w = static_cast<double>(num_aps - 1) * cfg.layout.awake_power_w
                + (sap_awake ? cfg.layout.awake_power_w : cfg.layout.sleep_power_w);
            pt.ee_bpj = energy_efficiency(pt.capacity_bps, pt.power_w);
            ee_sum += pt.ee_bpj;
            st.points.push_back(pt);
        }
        st.mean_ee_bpj = ee_sum / static_cast<double>(steps);
        trace.systems.push_back(std::move(st));
    }

    trace.events.push_back({t_demand, "all", "demand_increase"});
    trace.events.push_back({t_demand, "proposed", "sap_wake"});
    trace.events.push_back({t_demand, "5g_ia", "sap_wake"});
    trace.events.push_back({t_demand, "genie", "sap_wake"});
    trace.events.push_back({t_dcb_serve, "proposed", "ia_complete"});
    trace.events.push_back({t_fiveg_serve, "5g_ia", "ia_complete"});
    trace.events.push_back({t_demand, "genie", "ia_complete"});
    return trace;
}

namespace {

void append_csv_double(std::string& out, const char* fmt, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), fmt, v);
    out += buf;
}

} // namespace

std::string training_log_to_csv(const TrainingLog& log)
{
    std::string out = "episode,epsilon,reward,regret,normalized_regret,moving_avg\n";
    out.reserve(out.size() + log.rows.size() * 96);
    char buf[32];
    for (const auto& row : log.rows) {
        std::snprintf(buf, sizeof(buf), "%ld", row.episode);
        out += buf;
        out += ',';
        append_csv_double(out, "%.6f", row.epsilon);
        out += ',';
        append_csv_double(out, "%.9e", row.reward);
        out += ',';
        append_csv_double(out, "%.9e", row.regret);
        out += ',';
        append_csv_double(out, "%.9f", row.normalized_regret);
        out += ',';
        append_csv_double(out, "%.9f", row.moving_avg);
        out += '\n';
    }
    return out;
}

std::string trace_to_csv(const ScenarioTrace& trace)
{
    std::string out = "t_s,system,capacity_bps,power_w,ee_bpj\n";
    for (const auto& system : trace.systems) {
        for (const auto& pt : system.points) {
            append_csv_double(out, "%.6f", pt.t_s);
            out += ',';
            out += system.name;
            out += ',';
            append_csv_double(out, "%.9e", pt.capacity_bps);
            out += ',';
            append_csv_double(out, "%.6f", pt.power_w);
            out += ',';
            append_csv_double(out, "%.9e", pt.ee_bpj);
            out += '\n';
        }
    }
    return out;
}

std::string events_to_json(const ScenarioTrace& trace)
{
    nlohmann::json j = nlohmann::json::array();
    for (const auto& e : trace.events)
        j.push_back({{"t_s", e.t_s}, {"system", e.system}, {"event", e.event}});
    nlohmann::json root;
    root["events"] = std::move(j);
    auto& summary = root["time_averaged_ee_bpj"];
    for (const auto& s : trace.systems)
        summary[s.name] = s.mean_ee_bpj;
    return root.dump(2) + "\n";
}

std::string eval_metrics_to_json(const EvalMetrics& metrics, Policy policy, std::uint64_t seed)
{
    const char* name = policy == Policy::Greedy ? "greedy" : policy == Policy::Oracle ? "oracle" : "random";
    nlohmann::json j;
    j["episodes"] = metrics.episodes;
    j["policy"] = name;
    j["seed"] = seed;
    j["mean_gain_ratio"] = metrics.mean_gain_ratio;
    j["mean_normalized_regret"] = metrics.mean_normalized_regret;
    j["action_accuracy"] = metrics.action_accuracy;
    return j.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open '" + path + "' for writing");
    out << content;
    if (!out)
        throw IoError("write to '" + path + "' failed");
}

} // namespace wakebeam
