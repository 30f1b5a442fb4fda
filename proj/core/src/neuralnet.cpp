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

#include "wakebeam/neuralnet.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "wakebeam/errors.hpp"

namespace wakebeam {

namespace {

void validate_config(const MlpConfig& c)
{
    if (c.loc_dim < 1 || c.beam_dim < 1 || c.num_actions < 1)
        throw std::invalid_argument("MlpConfig: input/output dimensions must be >= 1");
    if (c.branch_width < 1 || c.hidden_layers < 1 || c.hidden_width < 1)
        throw std::invalid_argument("MlpConfig: layer widths must be >= 1");
    if (c.dropout_rate < 0.0 || c.dropout_rate >= 1.0)
        throw std::invalid_argument("MlpConfig: dropout_rate must lie in [0, 1)");
    if (c.learning_rate <= 0.0)
        throw std::invalid_argument("MlpConfig: learning_rate must be positive");
}

template <typename T>
void dense_forward(int in, int out, const std::vector<T>& w, const std::vector<T>& b,
                   const T* x, std::vector<T>& z)
{
    z.resize(static_cast<std::size_t>(out));
    const T* wp = w.data();
    for (int i = 0; i < out; ++i) {
        T acc = b[static_cast<std::size_t>(i)];
        const T* row = wp + static_cast<std::size_t>(i) * static_cast<std::size_t>(in);
        for (int j = 0; j < in; ++j)
            acc += row[j] * x[j];
        z[static_cast<std::size_t>(i)] = acc;
    }
}

template <typename T>
const char* dtype_name()
{
    return sizeof(T) == 8 ? "float64" : "float32";
}

} // namespace

template <typename T>
void MlpGradients<T>::clear()
{
    for (auto& v : w)
        std::fill(v.begin(), v.end(), T(0));
    for (auto& v : b)
        std::fill(v.begin(), v.end(), T(0));
}

template <typename T>
void MlpGradients<T>::scale(T factor)
{
    for (auto& v : w)
        for (auto& x : v)
            x *= factor;
    for (auto& v : b)
        for (auto& x : v)
            x *= factor;
}

template <typename T>
Mlp<T>::Mlp(const MlpConfig& config) : config_(config)
{
    validate_config(config_);
    build_layers();
}

template <typename T>
Mlp<T>::Mlp(const MlpConfig& config, Rng& init_rng) : Mlp(config)
{
    for (auto& layer : layers_) {
        const double limit = std::sqrt(6.0 / static_cast<double>(layer.in));
        for (auto& v : layer.w)
            v = static_cast<T>(init_rng.uniform(-limit, limit));
    }
}

template <typename T>
void Mlp<T>::build_layers()
{
    const auto add = [this](int in, int out) {
        Layer layer;
        layer.in = in;
        layer.out = out;
        const auto wn = static_cast<std::size_t>(in) * static_cast<std::size_t>(out);
        layer.w.assign(wn, T(0));
        layer.b.assign(static_cast<std::size_t>(out), T(0));
        layer.m_w.assign(wn, T(0));
        layer.v_w.assign(wn, T(0));
        layer.m_b.assign(static_cast<std::size_t>(out), T(0));
        layer.v_b.assign(static_cast<std::size_t>(out), T(0));
        layers_.push_back(std::move(layer));
    };
    add(config_.loc_dim, config_.branch_width);
    add(config_.beam_dim, config_.branch_width);
    add(2 * config_.branch_width, config_.hidden_width);
    for (int i = 1; i < config_.hidden_layers; ++i)
        add(config_.hidden_width, config_.hidden_width);
    add(config_.hidden_width, config_.num_actions);
}

template <typename T>
void Mlp<T>::check_input(std::span<const double> loc, std::span<const double> beams) const
{
    if (static_cast<int>(loc.size()) != config_.loc_dim
        || static_cast<int>(beams.size()) != config_.beam_dim)
        throw std::invalid_argument("Mlp: context dimensions do not match the network");
}

template <typename T>
std::vector<double> Mlp<T>::forward(std::span<const double> loc, std::span<const double> beams,
                                    RunMode mode, Rng* rng) const
{
    check_input(loc, beams);
    const bool dropout_active = mode == RunMode::Train && config_.dropout_rate > 0.0;
    if (dropout_active && rng == nullptr)
        throw std::invalid_argument("Mlp::forward: train mode needs an RNG for dropout");

    std::vector<T> x_loc(loc.begin(), loc.end());
    std::vector<T> x_beam(beams.begin(), beams.end());
    std::vector<T> act, z;

    dense_forward(layers_[0].in, layers_[0].out, layers_[0].w, layers_[0].b, x_loc.data(), z);
    act.resize(static_cast<std::size_t>(2 * config_.branch_width));
    for (int i = 0; i < config_.branch_width; ++i)
        act[static_cast<std::size_t>(i)] = std::max(T(0), z[static_cast<std::size_t>(i)]);
    dense_forward(layers_[1].in, layers_[1].out, layers_[1].w, layers_[1].b, x_beam.data(), z);
    for (int i = 0; i < config_.branch_width; ++i)
        act[static_cast<std::size_t>(config_.branch_width + i)] = std::max(T(0), z[static_cast<std::size_t>(i)]);

    const T keep_scale = static_cast<T>(1.0 / (1.0 - config_.dropout_rate));
    std::vector<T> cur = std::move(act);
    for (int l = 0; l < config_.hidden_layers; ++l) {
        const auto& layer = layers_[static_cast<std::size_t>(2 + l)];
        dense_forward(layer.in, layer.out, layer.w, layer.b, cur.data(), z);
        cur.resize(z.size());
        for (std::size_t i = 0; i < z.size(); ++i)
            cur[i] = std::max(T(0), z[i]);
        if (dropout_active)
            for (auto& v : cur)
                v = rng->uniform01() < config_.dropout_rate ? T(0) : v * keep_scale;
    }

    const auto& out = layers_.back();
    dense_forward(out.in, out.out, out.w, out.b, cur.data(), z);
    return {z.begin(), z.end()};
}

template <typename T>
double Mlp<T>::loss_and_gradient(std::span<const double> loc, std::span<const double> beams, int action,
                                 double target, MlpGradients<T>& grads, RunMode mode, Rng* rng)
{
    check_input(loc, beams);
    if (action < 0 || action >= config_.num_actions)
        throw std::invalid_argument("Mlp::loss_and_gradient: action out of range");
    if (!std::isfinite(target))
        throw std::invalid_argument("Mlp::loss_and_gradient: non-finite target");
    const bool dropout_active = mode == RunMode::Train && config_.dropout_rate > 0.0;
    if (dropout_active && rng == nullptr)
        throw std::invalid_argument("Mlp::loss_and_gradient: train mode needs an RNG for dropout");
    if (grads.w.size() != layers_.size() || grads.b.size() != layers_.size())
        throw std::invalid_argument("Mlp::loss_and_gradient: gradient accumulator shape mismatch");

    const int hidden = config_.hidden_layers;
    const int bw = config_.branch_width;
    auto& ws = ws_;
    ws.x_loc.assign(loc.begin(), loc.end());
    ws.x_beam.assign(beams.begin(), beams.end());
    ws.inputs.resize(static_cast<std::size_t>(hidden + 1));
    ws.z.resize(static_cast<std::size_t>(hidden));
    ws.mask.resize(static_cast<std::size_t>(hidden));

    // Forward, caching pre-activations and each layer's actual input.
    dense_forward(layers_[0].in, layers_[0].out, layers_[0].w, layers_[0].b, ws.x_loc.data(), ws.z_loc);
    dense_forward(layers_[1].in, layers_[1].out, layers_[1].w, layers_[1].b, ws.x_beam.data(), ws.z_beam);
    auto& cat = ws.inputs[0];
    cat.resize(static_cast<std::size_t>(2 * bw));
    for (int i = 0; i < bw; ++i) {
        cat[static_cast<std::size_t>(i)] = std::max(T(0), ws.z_loc[static_cast<std::size_t>(i)]);
        cat[static_cast<std::size_t>(bw + i)] = std::max(T(0), ws.z_beam[static_cast<std::size_t>(i)]);
    }

    const T keep_scale = static_cast<T>(1.0 / (1.0 - config_.dropout_rate));
    for (int l = 0; l < hidden; ++l) {
        const auto& layer = layers_[static_cast<std::size_t>(2 + l)];
        dense_forward(layer.in, layer.out, layer.w, layer.b, ws.inputs[static_cast<std::size_t>(l)].data(),
                      ws.z[static_cast<std::size_t>(l)]);
        auto& out_act = ws.inputs[static_cast<std::size_t>(l + 1)];
        auto& zl = ws.z[static_cast<std::size_t>(l)];
        auto& mask = ws.mask[static_cast<std::size_t>(l)];
        out_act.resize(zl.size());
        mask.assign(zl.size(), T(1));
        for (std::size_t i = 0; i < zl.size(); ++i)
            out_act[i] = std::max(T(0), zl[i]);
        if (dropout_active) {
            for (std::size_t i = 0; i < out_act.size(); ++i) {
                const bool drop = rng->uniform01() < config_.dropout_rate;
                mask[i] = drop ? T(0) : keep_scale;
                out_act[i] *= mask[i];
            }
        }
    }

    const auto& out_layer = layers_.back();
    dense_forward(out_layer.in, out_layer.out, out_layer.w, out_layer.b,
                  ws.inputs[static_cast<std::size_t>(hidden)].data(), ws.y);

    const T err = ws.y[static_cast<std::size_t>(action)] - static_cast<T>(target);
    const double loss = static_cast<double>(err) * static_cast<double>(err);
    const T dy = T(2) * err;

    // Backward. Output layer: only the taken action's row carries gradient.
    const std::size_t out_idx = layers_.size() - 1;
    const auto& last_in = ws.inputs[static_cast<std::size_t>(hidden)];
    {
        auto& gw = grads.w[out_idx];
        auto& gb = grads.b[out_idx];
        const auto row = static_cast<std::size_t>(action) * static_cast<std::size_t>(out_layer.in);
        for (int j = 0; j < out_layer.in; ++j)
            gw[row + static_cast<std::size_t>(j)] += dy * last_in[static_cast<std::size_t>(j)];
        gb[static_cast<std::size_t>(action)] += dy;
    }

    auto& delta = ws.delta;
    delta.resize(static_cast<std::size_t>(out_layer.in));
    {
        const T* row = out_layer.w.data() + static_cast<std::size_t>(action) * static_cast<std::size_t>(out_layer.in);
        for (int j = 0; j < out_layer.in; ++j)
            delta[static_cast<std::size_t>(j)] = row[j] * dy;
    }

    for (int l = hidden - 1; l >= 0; --l) {
        const auto li = static_cast<std::size_t>(2 + l);
        const auto& layer = layers_[li];
        const auto& zl = ws.z[static_cast<std::size_t>(l)];
        const auto& mask = ws.mask[static_cast<std::size_t>(l)];
        const auto& in_act = ws.inputs[static_cast<std::size_t>(l)];
        // through dropout, then ReLU
        for (std::size_t i = 0; i < delta.size(); ++i)
            delta[i] = zl[i] > T(0) ? delta[i] * mask[i] : T(0);

        auto& gw = grads.w[li];
        auto& gb = grads.b[li];
        auto& dprev = ws.delta_prev;
        dprev.assign(static_cast<std::size_t>(layer.in), T(0));
        for (int i = 0; i < layer.out; ++i) {
            const T di = delta[static_cast<std::size_t>(i)];
            if (di == T(0))
                continue;
            const T* row = layer.w.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(layer.in);
            T* grow = gw.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(layer.in);
            for (int j = 0; j < layer.in; ++j) {
                grow[j] += di * in_act[static_cast<std::size_t>(j)];
                dprev[static_cast<std::size_t>(j)] += row[j] * di;
            }
            gb[static_cast<std::size_t>(i)] += di;
        }
        std::swap(delta, dprev);
    }

    // Split the concatenation gradient across the two input branches.
    const auto backprop_branch = [&](std::size_t li, const std::vector<T>& z_branch,
                                     const std::vector<T>& x, int offset) {
        const auto& layer = layers_[li];
        auto& gw = grads.w[li];
        auto& gb = grads.b[li];
        for (int i = 0; i < layer.out; ++i) {
            if (z_branch[static_cast<std::size_t>(i)] <= T(0))
                continue;
            const T di = delta[static_cast<std::size_t>(offset + i)];
            if (di == T(0))
                continue;
            T* grow = gw.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(layer.in);
            for (int j = 0; j < layer.in; ++j)
                grow[j] += di * x[static_cast<std::size_t>(j)];
            gb[static_cast<std::size_t>(i)] += di;
        }
    };
    backprop_branch(0, ws.z_loc, ws.x_loc, 0);
    backprop_branch(1, ws.z_beam, ws.x_beam, bw);

    return loss;
}

template <typename T>
void Mlp<T>::adam_step(const MlpGradients<T>& grads)
{
    if (grads.w.size() != layers_.size())
        throw std::invalid_argument("Mlp::adam_step: gradient shape mismatch");
    ++step_;
    const double b1 = config_.adam_beta1;
    const double b2 = config_.adam_beta2;
    const double bias1 = 1.0 - std::pow(b1, static_cast<double>(step_));
    const double bias2 = 1.0 - std::pow(b2, static_cast<double>(step_));
    const double lr = config_.learning_rate;
    const double eps = config_.adam_epsilon;

    const auto update = [&](std::vector<T>& theta, std::vector<T>& m, std::vector<T>& v,
                            const std::vector<T>& g) {
        if (g.size() != theta.size())
            throw std::invalid_argument("Mlp::adam_step: gradient shape mismatch");
        for (std::size_t i = 0; i < theta.size(); ++i) {
            const double gi = static_cast<double>(g[i]);
            const double mi = b1 * static_cast<double>(m[i]) + (1.0 - b1) * gi;
            const double vi = b2 * static_cast<double>(v[i]) + (1.0 - b2) * gi * gi;
            m[i] = static_cast<T>(mi);
            v[i] = static_cast<T>(vi);
            theta[i] -= static_cast<T>(lr * (mi / bias1) / (std::sqrt(vi / bias2) + eps));
        }
    };
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        update(layers_[l].w, layers_[l].m_w, layers_[l].v_w, grads.w[l]);
        update(layers_[l].b, layers_[l].m_b, layers_[l].v_b, grads.b[l]);
    }
}

template <typename T>
MlpGradients<T> Mlp<T>::make_gradients() const
{
    MlpGradients<T> g;
    g.w.reserve(layers_.size());
    g.b.reserve(layers_.size());
    for (const auto& layer : layers_) {
        g.w.emplace_back(layer.w.size(), T(0));
        g.b.emplace_back(layer.b.size(), T(0));
    }
    return g;
}

template <typename T>
std::size_t Mlp<T>::num_parameters() const
{
    std::size_t n = 0;
    for (const auto& layer : layers_)
        n += layer.w.size() + layer.b.size();
    return n;
}

template <typename T>
double Mlp<T>::parameter(std::size_t index) const
{
    for (const auto& layer : layers_) {
        if (index < layer.w.size())
            return static_cast<double>(layer.w[index]);
        index -= layer.w.size();
        if (index < layer.b.size())
            return static_cast<double>(layer.b[index]);
        index -= layer.b.size();
    }
    throw std::out_of_range("Mlp::parameter: index out of range");
}

template <typename T>
void Mlp<T>::set_parameter(std::size_t index, double value)
{
    for (auto& layer : layers_) {
        if (index < layer.w.size()) {
            layer.w[index] = static_cast<T>(value);
            return;
        }
        index -= layer.w.size();
        if (index < layer.b.size()) {
            layer.b[index] = static_cast<T>(value);
            return;
        }
        index -= layer.b.size();
    }
    throw std::out_of_range("Mlp::set_parameter: index out of range");
}

template <typename T>
double Mlp<T>::gradient_entry(const MlpGradients<T>& grads, std::size_t index)
{
    for (std::size_t l = 0; l < grads.w.size(); ++l) {
        if (index < grads.w[l].size())
            return static_cast<double>(grads.w[l][index]);
        index -= grads.w[l].size();
        if (index < grads.b[l].size())
            return static_cast<double>(grads.b[l][index]);
        index -= grads.b[l].size();
    }
    throw std::out_of_range("Mlp::gradient_entry: index out of range");
}

template <typename T>
bool Mlp<T>::all_parameters_finite() const
{
    for (const auto& layer : layers_) {
        for (const auto& v : layer.w)
            if (!std::isfinite(static_cast<double>(v)))
                return false;
        for (const auto& v : layer.b)
            if (!std::isfinite(static_cast<double>(v)))
                return false;
        for (const auto& v : layer.m_w)
            if (!std::isfinite(static_cast<double>(v)))
                return false;
        for (const auto& v : layer.v_w)
            if (!std::isfinite(static_cast<double>(v)))
                return false;
        for (const auto& v : layer.m_b)
            if (!std::isfinite(static_cast<double>(v)))
                return false;
        for (const auto& v : layer.v_b)
            if (!std::isfinite(static_cast<double>(v)))
                return false;
    }
    return true;
}

namespace {

template <typename T>
nlohmann::json vector_to_json(const std::vector<T>& v)
{
    nlohmann::json out = nlohmann::json::array();
    for (const auto& x : v)
        out.push_back(static_cast<double>(x));
    return out;
}

template <typename T>
std::vector<T> vector_from_json(const nlohmann::json& j, std::size_t expected, const char* what)
{
    if (!j.is_array() || j.size() != expected)
        throw ValidationError(std::string("checkpoint: bad shape for ") + what);
    std::vector<T> v(expected);
    for (std::size_t i = 0; i < expected; ++i)
        v[i] = static_cast<T>(j[i].get<double>());
    return v;
}

} // namespace

template <typename T>
std::string Mlp<T>::to_json_string() const
{
    nlohmann::json j;
    j["dtype"] = dtype_name<T>();
    j["step"] = step_;
    j["config"] = {
        {"loc_dim", config_.loc_dim},
        {"beam_dim", config_.beam_dim},
        {"num_actions", config_.num_actions},
        {"branch_width", config_.branch_width},
        {"hidden_layers", config_.hidden_layers},
        {"hidden_width", config_.hidden_width},
        {"dropout_rate", config_.dropout_rate},
        {"learning_rate", config_.learning_rate},
        {"adam_beta1", config_.adam_beta1},
        {"adam_beta2", config_.adam_beta2},
        {"adam_epsilon", config_.adam_epsilon},
    };
    auto& layers = j["layers"] = nlohmann::json::array();
    for (const auto& layer : layers_) {
        nlohmann::json lj;
        lj["in"] = layer.in;
        lj["out"] = layer.out;
        lj["w"] = vector_to_json(layer.w);
        lj["b"] = vector_to_json(layer.b);
        lj["m_w"] = vector_to_json(layer.m_w);
        lj["v_w"] = vector_to_json(layer.v_w);
        lj["m_b"] = vector_to_json(layer.m_b);
        lj["v_b"] = vector_to_json(layer.v_b);
        layers.push_back(std::move(lj));
    }
    return j.dump();
}

template <typename T>
Mlp<T> Mlp<T>::from_json_string(const std::string& text)
{
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded())
        throw ValidationError("checkpoint: malformed network JSON");
    try {
        if (j.at("dtype").get<std::string>() != dtype_name<T>())
            throw ValidationError("checkpoint: precision mismatch");
        const auto& cj = j.at("config");
        MlpConfig cfg;
        cfg.loc_dim = cj.at("loc_dim").get<int>();
        cfg.beam_dim = cj.at("beam_dim").get<int>();
        cfg.num_actions = cj.at("num_actions").get<int>();
        cfg.branch_width = cj.at("branch_width").get<int>();
        cfg.hidden_layers = cj.at("hidden_layers").get<int>();
        cfg.hidden_width = cj.at("hidden_width").get<int>();
        cfg.dropout_rate = cj.at("dropout_rate").get<double>();
        cfg.learning_rate = cj.at("learning_rate").get<double>();
        cfg.adam_beta1 = cj.at("adam_beta1").get<double>();
        cfg.adam_beta2 = cj.at("adam_beta2").get<double>();
        cfg.adam_epsilon = cj.at("adam_epsilon").get<double>();

        Mlp net(cfg);
        net.step_ = j.at("step").get<std::int64_t>();
        const auto& layers = j.at("layers");
        if (!layers.is_array() || layers.size() != net.layers_.size())
            throw ValidationError("checkpoint: layer count mismatch");
        for (std::size_t l = 0; l < net.layers_.size(); ++l) {
            auto& layer = net.layers_[l];
            const auto& lj = layers[l];
            if (lj.at("in").get<int>() != layer.in || lj.at("out").get<int>() != layer.out)
                throw ValidationError("checkpoint: layer " + std::to_string(l) + " shape mismatch");
            layer.w = vector_from_json<T>(lj.at("w"), layer.w.size(), "w");
            layer.b = vector_from_json<T>(lj.at("b"), layer.b.size(), "b");
            layer.m_w = vector_from_json<T>(lj.at("m_w"), layer.m_w.size(), "m_w");
            layer.v_w = vector_from_json<T>(lj.at("v_w"), layer.v_w.size(), "v_w");
            layer.m_b = vector_from_json<T>(lj.at("m_b"), layer.m_b.size(), "m_b");
            layer.v_b = vector_from_json<T>(lj.at("v_b"), layer.v_b.size(), "v_b");
        }
        return net;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("checkpoint: ") + e.what());
    }
}

template <typename T>
Mlp<T> Mlp<T>::from_json_string(const std::string& text, const MlpConfig& expected)
{
    Mlp net = from_json_string(text);
    if (!(net.config_ == expected))
        throw ValidationError("checkpoint: network configuration does not match the run configuration");
    return net;
}

template class Mlp<double>;
template class Mlp<float>;
template struct MlpGradients<double>;
template struct MlpGradients<float>;

} // namespace wakebeam
