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
#include <variant>
#include <vector>

#include "wakebeam/environment.hpp"
#include "wakebeam/neuralnet.hpp"
#include "wakebeam/rng.hpp"

namespace wakebeam {

/// Multiplicative epsilon decay with a floor.
struct ExplorationSchedule {
    double epsilon0 = 1.0;
    double epsilon_decay = 0.9995;
    double epsilon_min = 0.01;

    friend bool operator==(const ExplorationSchedule&, const ExplorationSchedule&) = default;
};

double decay_epsilon(const ExplorationSchedule& schedule, double epsilon);

/// One observed interaction. The reward is stored in matched-filter
/// normalized form (see matched_gain_fraction), which is bounded in [0, 1]
/// and argmax-equivalent to the raw reward.
struct Experience {
    Context context;
    int action = 0;
    double reward = 0.0;
};

/// Fixed-capacity ring buffer; pushing past capacity evicts the oldest.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);

    void push(Experience experience);
    std::size_t size() const { return full_ ? data_.size() : next_; }
    std::size_t capacity() const { return data_.size(); }
    const Experience& at(std::size_t i) const { return data_[i]; }

private:
    std::vector<Experience> data_;
    std::size_t next_ = 0;
    bool full_ = false;
};

struct AgentConfig {
    MlpConfig mlp;
    ExplorationSchedule schedule;
    Precision precision = Precision::Double;
    std::size_t replay_capacity = 10000;
    int batch_size = 32;
    bool replay_enabled = true;   // false trains online on each new experience
    bool checkpoint_replay = false;
};

struct ActionChoice {
    int action = 0;
    bool explored = false;
};

/// The deep contextual bandit living in one sleeping AP: epsilon-greedy
/// selection over the beam codebook, experience replay, and one optimizer
/// step per observation.
class Agent {
public:
    Agent(const AgentConfig& config, Rng& init_rng);

    const AgentConfig& config() const { return config_; }
    double epsilon() const { return epsilon_; }
    void set_epsilon(double epsilon) { epsilon_ = epsilon; }
    std::int64_t training_steps() const;
    const ReplayBuffer& replay() const { return buffer_; }

    /// Predicted reward per beam (eval mode, deterministic).
    std::vector<double> predict(const Context& context) const;

    /// Uniform random beam with probability epsilon, otherwise the argmax
    /// of the predictions (ties to the lowest index).
    ActionChoice select_action(const Context& context, Rng& rng);

    /// Argmax action with exploration disabled; does not touch state.
    int greedy_action(const Context& context) const;

    /// Stores the experience and runs one gradient step on a uniformly
    /// sampled replay batch (or on just this experience in online mode).
    void observe(const Experience& experience, Rng& rng);

    void decay_epsilon() { epsilon_ = wakebeam::decay_epsilon(config_.schedule, epsilon_); }

    std::string to_json_string() const;
    static Agent from_json_string(const std::string& text);
    void save(const std::string& path) const;
    static Agent load(const std::string& path);
    /// Load with a shape check against the expected network configuration.
    static Agent load(const std::string& path, const MlpConfig& expected);

private:
    AgentConfig config_;
    std::variant<Mlp<double>, Mlp<float>> net_;
    std::variant<MlpGradients<double>, MlpGradients<float>> grads_;
    ReplayBuffer buffer_;
    double epsilon_ = 1.0;
};

} // namespace wakebeam
