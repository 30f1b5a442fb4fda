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

#include <cstdint>
#include <string>

#include "wakebeam/agent.hpp"
#include "wakebeam/channel.hpp"
#include "wakebeam/codebook.hpp"
#include "wakebeam/environment.hpp"
#include "wakebeam/neuralnet.hpp"

namespace wakebeam {

struct TrainingConfig {
    long episodes = 50000;
    int rounds = 1; // neighbor subsets are redrawn at every round boundary
    int num_paps = 5;
    int moving_avg_window = 1000;
    long eval_episodes = 5000;
};

/// Radio-frame timing for the initial-access latency comparison. The
/// beam-sweep slot recurs once per frame at `pbch_offset_s`; a restored AP
/// that missed the current slot waits for the next one.
struct TimingModel {
    double frame_length_s = 0.010;
    double pbch_offset_s = 0.0;
    double ia_sweep_duration_s = 0.0;
    double dcb_processing_delay_s = 0.0;
};

struct DemandScenarioConfig {
    double demand_time_s = 0.010;
    double duration_s = 0.020;
    double trace_step_s = 1.0e-4;
};

struct NeuralSettings {
    int branch_width = 50;
    int hidden_layers = 3;
    int hidden_width = 100;
    double dropout_rate = 0.01;
    double learning_rate = 0.01;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    Precision precision = Precision::Double;
};

struct AgentSettings {
    ExplorationSchedule schedule;
    std::size_t replay_capacity = 10000;
    int batch_size = 32;
    bool replay_enabled = true;
    bool checkpoint_replay = false;
};

/// Everything a run needs, merged from the config file and CLI overrides.
struct RunConfig {
    ChannelParams channel;
    ArrayGeometry array;
    int phase_bits = 6;
    NetworkLayout layout;
    NeuralSettings neural;
    AgentSettings agent;
    TrainingConfig training;
    TimingModel timing;
    DemandScenarioConfig demand;
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    int jobs = 1;
    bool plot = false;
};

RunConfig default_run_config();

/// Parses the sectioned key/value config format. Unknown sections or keys,
/// bad types, and syntax problems are rejected with a line-numbered
/// ValidationError. Values use JSON literal syntax (numbers, true/false,
/// null, "strings", [arrays]).
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);

/// Renders a config that parses back to the identical configuration.
std::string emit_run_config(const RunConfig& config);

/// Cross-field invariant checks; throws a ValidationError listing every
/// violation.
void validate_run_config(const RunConfig& config);

MlpConfig derive_mlp_config(const RunConfig& config);
AgentConfig derive_agent_config(const RunConfig& config);
Codebook build_run_codebook(const RunConfig& config);

} // namespace wakebeam
