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

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "wakebeam/agent.hpp"
#include "wakebeam/config.hpp"

namespace wakebeam {

struct TrainingRow {
    long episode = 0; // 1-based, global across rounds
    double epsilon = 0.0;
    double reward = 0.0;
    double regret = 0.0;
    double normalized_regret = 0.0;
    double moving_avg = 0.0; // moving average of normalized regret
};

struct TrainingLog {
    std::vector<TrainingRow> rows;
};

/// Mean normalized regret over the final `window` episodes.
double trailing_mean_normalized_regret(const TrainingLog& log, std::size_t window);

/// Runs cfg.training.rounds x cfg.training.episodes training episodes.
/// Every round redraws the serving-AP subset (when there is a choice),
/// then each episode places the user, lets the neighbors sweep their
/// beams, queries the agent, scores it against the exhaustive oracle, and
/// performs one learning update. Deterministic in (cfg, seed).
TrainingLog train_round(const RunConfig& cfg, Agent& agent, std::uint64_t seed);

enum class Policy { Greedy, Oracle, Random };

struct EvalMetrics {
    long episodes = 0;
    double mean_gain_ratio = 0.0; // achieved/oracle beamforming gain
    double mean_normalized_regret = 0.0;
    double action_accuracy = 0.0; // fraction of episodes matching the oracle
};

/// Pure evaluation (exploration off, no learning) over fresh episodes.
EvalMetrics evaluate(const RunConfig& cfg, const Agent& agent, long episodes, Policy policy,
                     std::uint64_t seed);

enum class IaSystem { Dcb, FiveG };

/// Seconds between an AP waking at `wake_time_s` and its first usable
/// beam: the learned scheme pays only its processing delay, while the
/// sweep-based scheme waits for the next beam-sweep slot (strictly after
/// the wake instant) plus the sweep itself.
double ia_wait_time(double wake_time_s, const TimingModel& timing, IaSystem system);

/// Shannon capacity over the coherent sum of per-AP SNR components.
double capacity_bps(std::span<const double> snrs, double bandwidth_hz);
double energy_efficiency(double capacity_bps, double total_power_w);

struct TracePoint {
    double t_s = 0.0;
    double capacity_bps = 0.0;
    double power_w = 0.0;
    double ee_bpj = 0.0;
};

struct SystemTrace {
    std::string name;
    std::vector<TracePoint> points;
    double mean_ee_bpj = 0.0;
};

struct ScenarioEvent {
    double t_s = 0.0;
    std::string system;
    std::string event;
};

struct ScenarioTrace {
    std::vector<SystemTrace> systems; // proposed, 5g_ia, always_on, genie
    std::vector<ScenarioEvent> events;
};

/// Dynamic-demand comparison: the user asks for more throughput at
/// demand_time_s and the sleeping AP is restored. Four systems share one
/// frozen channel draw: the learned scheme serves with the agent's beam
/// right after its processing delay, sweep-based 5G IA waits for the next
/// beam-sweep slot, always-on keeps every AP awake throughout, and the
/// genie serves with the oracle beam the moment demand changes.
ScenarioTrace run_demand_scenario(const RunConfig& cfg, const Agent& agent, std::uint64_t seed);

std::string training_log_to_csv(const TrainingLog& log);
std::string trace_to_csv(const ScenarioTrace& trace);
std::string events_to_json(const ScenarioTrace& trace);
std::string eval_metrics_to_json(const EvalMetrics& metrics, Policy policy, std::uint64_t seed);

void write_text_file(const std::string& path, const std::string& content);

} // namespace wakebeam
