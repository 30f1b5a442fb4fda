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
#include <span>
#include <string>
#include <vector>

#include "wakebeam/rng.hpp"

namespace wakebeam {

enum class Precision { Double, Single };
enum class RunMode { Train, Eval };

/// Shape and optimizer hyperparameters of the reward-approximator network:
/// two ReLU input branches (locations, beam choices) concatenated into a
/// stack of ReLU hidden layers with inverted dropout, and a linear output
/// with one estimate per beam.
struct MlpConfig {
    int loc_dim = 10;
    int beam_dim = 160;
    int num_actions = 16;
    int branch_width = 50;
    int hidden_layers = 3;
    int hidden_width = 100;
    double dropout_rate = 0.01;
    double learning_rate = 0.01;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;

    friend bool operator==(const MlpConfig&, const MlpConfig&) = default;
};

/// Gradient accumulator shaped like the network's dense layers.
template <typename T>
struct MlpGradients {
    std::vector<std::vector<T>> w;
    std::vector<std::vector<T>> b;

    void clear();
    void scale(T factor);
};

template <typename T>
class Mlp {
public:
    using value_type = T;

    /// Fresh network with He-style uniform fan-in initialization.
    Mlp(const MlpConfig& config, Rng& init_rng);

    const MlpConfig& config() const { return config_; }
    std::int64_t step_count() const { return step_; }

    /// Predicted reward per action. Train mode applies inverted dropout to
    /// the hidden activations and needs an RNG; eval mode is deterministic.
    std::vector<double> forward(std::span<const double> loc, std::span<const double> beams,
                                RunMode mode = RunMode::Eval, Rng* rng = nullptr) const;

    /// Squared error of the taken action's prediction against the target,
    /// with its reverse-mode gradient accumulated into `grads` (callers
    /// clear/scale for batching). Output rows of untaken actions get no
    /// gradient.
    double loss_and_gradient(std::span<const double> loc, std::span<const double> beams, int action,
                             double target, MlpGradients<T>& grads, RunMode mode = RunMode::Train,
                             Rng* rng = nullptr);

    /// Bias-corrected Adam update; bumps the step counter.
    void adam_step(const MlpGradients<T>& grads);

    MlpGradients<T> make_gradients() const;

    // Flat parameter access (layers in order, weights before biases) for
    // finite-difference checks and serialization.
    std::size_t num_parameters() const;
    double parameter(std::size_t index) const;
    void set_parameter(std::size_t index, double value);
    static double gradient_entry(const MlpGradients<T>& grads, std::size_t index);

    std::string to_json_string() const;
    static Mlp from_json_string(const std::string& text);
    /// Parses and shape-checks against an expected configuration.
    static Mlp from_json_string(const std::string& text, const MlpConfig& expected);

    bool all_parameters_finite() const;

private:
    struct Layer {
        int in = 0, out = 0;
        std::vector<T> w, b;
        std::vector<T> m_w, v_w, m_b, v_b;
    };

    explicit Mlp(const MlpConfig& config); // uninitialized layers, for loading

    void build_layers();
    void check_input(std::span<const double> loc, std::span<const double> beams) const;

    MlpConfig config_;
    std::vector<Layer> layers_; // [loc_in, beam_in, hidden..., out]
    std::int64_t step_ = 0;

    // Scratch for the gradient path; exclusively owned by the training loop.
    struct Workspace {
        std::vector<T> x_loc, x_beam, z_loc, z_beam;
        std::vector<std::vector<T>> inputs; // post-activation input of hidden/out layers
        std::vector<std::vector<T>> z;      // hidden pre-activations
        std::vector<std::vector<T>> mask;   // dropout factors per hidden layer
        std::vector<T> y, delta, delta_prev;
    };
    Workspace ws_;
};

extern template class Mlp<double>;
extern template class Mlp<float>;
extern template struct MlpGradients<double>;
extern template struct MlpGradients<float>;

} // namespace wakebeam
