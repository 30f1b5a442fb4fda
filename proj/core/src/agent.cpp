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

#include "wakebeam/agent.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "wakebeam/errors.hpp"

namespace wakebeam {

double decay_epsilon(const ExplorationSchedule& schedule, double epsilon)
{
    return std::max(schedule.epsilon_min, epsilon * schedule.epsilon_decay);
}

ReplayBuffer::ReplayBuffer(std::size_t capacity)
{
    if (capacity < 1)
        throw std::invalid_argument("ReplayBuffer: capacity must be >= 1");
    data_.reserve(capacity);
    data_.resize(capacity);
}

void ReplayBuffer::push(Experience experience)
{
    data_[next_] = std::move(experience);
    ++next_;
    if (next_ == data_.size()) {
        next_ = 0;
        full_ = true;
    }
}

namespace {

void validate_schedule(const ExplorationSchedule& s)
{
    if (!(0.0 <= s.epsilon_min && s.epsilon_min <= s.epsilon0 && s.epsilon0 <= 1.0))
        throw std::invalid_argument("ExplorationSchedule: need 0 <= epsilon_min <= epsilon0 <= 1");
    if (!(0.0 < s.epsilon_decay && s.epsilon_decay <= 1.0))
        throw std::invalid_argument("ExplorationSchedule: need 0 < epsilon_decay <= 1");
}

int argmax_lowest(const std::vector<double>& values)
{
    int best = 0;
    for (int i = 1; i < static_cast<int>(values.size()); ++i)
        if (values[static_cast<std::size_t>(i)] > values[static_cast<std::size_t>(best)])
            best = i;
    return best;
}

} // namespace

Agent::Agent(const AgentConfig& config, Rng& init_rng)
    : config_(config),
      net_(config.precision == Precision::Double
               ? std::variant<Mlp<double>, Mlp<float>>(std::in_place_type<Mlp<double>>, config.mlp, init_rng)
               : std::variant<Mlp<double>, Mlp<float>>(std::in_place_type<Mlp<float>>, config.mlp, init_rng)),
      buffer_(config.replay_capacity),
      epsilon_(config.schedule.epsilon0)
{
    validate_schedule(config_.schedule);
    if (config_.batch_size < 1)
        throw std::invalid_argument("AgentConfig: batch_size must be >= 1");
    grads_ = std::visit([](const auto& net) {
        return std::variant<MlpGradients<double>, MlpGradients<float>>(net.make_gradients());
    }, net_);
}

std::int64_t Agent::training_steps() const
{
    return std::visit([](const auto& net) { return net.step_count(); }, net_);
}

std::vector<double> Agent::predict(const Context& context) const
{
    return std::visit([&](const auto& net) { return net.forward(context.locations, context.beams); }, net_);
}

int Agent::greedy_action(const Context& context) const
{
    return argmax_lowest(predict(context));
}

ActionChoice Agent::select_action(const Context& context, Rng& rng)
{
    if (epsilon_ > 0.0 && rng.uniform01() < epsilon_)
        return {static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(config_.mlp.num_actions))), true};
    return {greedy_action(context), false};
}

void Agent::observe(const Experience& experience, Rng& rng)
{
    if (experience.action < 0 || experience.action >= config_.mlp.num_actions)
        throw std::invalid_argument("Agent::observe: action out of range");
    if (!std::isfinite(experience.reward) || experience.reward < 0.0)
        throw std::invalid_argument("Agent::observe: reward must be finite and non-negative");

    buffer_.push(experience);

    std::visit([&](auto& net) {
        using Scalar = typename std::decay_t<decltype(net)>::value_type;
        auto& grads = std::get<MlpGradients<Scalar>>(grads_);
        grads.clear();
        double count = 0.0;
        if (config_.replay_enabled) {
            const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(config_.batch_size),
                                                        buffer_.size());
            for (std::size_t k = 0; k < n; ++k) {
                const auto& e = buffer_.at(rng.uniform_int(buffer_.size()));
                net.loss_and_gradient(e.context.locations, e.context.beams, e.action, e.reward, grads,
                                      RunMode::Train, &rng);
            }
            count = static_cast<double>(n);
        } else {
            net.loss_and_gradient(experience.context.locations, experience.context.beams,
                                  experience.action, experience.reward, grads, RunMode::Train, &rng);
            count = 1.0;
        }
        grads.scale(static_cast<Scalar>(1.0 / count));
        net.adam_step(grads);
    }, net_);
}

namespace {

nlohmann::json context_to_json(const Context& c)
{
    return {{"locations", c.locations}, {"beams", c.beams}};
}

Context context_from_json(const nlohmann::json& j)
{
    Context c;
    c.locations = j.at("locations").get<std::vector<double>>();
    c.beams = j.at("beams").get<std::vector<double>>();
    return c;
}

} // namespace

std::string Agent::to_json_string() const
{
    nlohmann::json j;
    j["format"] = "wakebeam-agent-v1";
    j["epsilon"] = epsilon_;
    j["schedule"] = {
        {"epsilon0", config_.schedule.epsilon0},
        {"epsilon_decay", config_.schedule.epsilon_decay},
        {"epsilon_min", config_.schedule.epsilon_min},
    };
    j["precision"] = config_.precision == Precision::Double ? "double" : "single";
    j["replay"] = {
        {"capacity", config_.replay_capacity},
        {"batch_size", config_.batch_size},
        {"enabled", config_.replay_enabled},
        {"checkpoint_replay", config_.checkpoint_replay},
    };
    if (config_.checkpoint_replay) {
        auto& exps = j["replay"]["experiences"] = nlohmann::json::array();
        for (std::size_t i = 0; i < buffer_.size(); ++i) {
            const auto& e = buffer_.at(i);
            exps.push_back({{"context", context_to_json(e.context)}, {"action", e.action}, {"reward", e.reward}});
        }
    }
    j["network"] = nlohmann::json::parse(
        std::visit([](const auto& net) { return net.to_json_string(); }, net_));
    return j.dump();
}

Agent Agent::from_json_string(const std::string& text)
{
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded())
        throw ValidationError("agent checkpoint: malformed JSON");
    try {
        if (j.at("format").get<std::string>() != "wakebeam-agent-v1")
            throw ValidationError("agent checkpoint: unknown format tag");

        AgentConfig cfg;
        const std::string precision = j.at("precision").get<std::string>();
        if (precision == "double")
            cfg.precision = Precision::Double;
        else if (precision == "single")
            cfg.precision = Precision::Single;
        else
            throw ValidationError("agent checkpoint: unknown precision '" + precision + "'");
        cfg.schedule.epsilon0 = j.at("schedule").at("epsilon0").get<double>();
        cfg.schedule.epsilon_decay = j.at("schedule").at("epsilon_decay").get<double>();
        cfg.schedule.epsilon_min = j.at("schedule").at("epsilon_min").get<double>();
        cfg.replay_capacity = j.at("replay").at("capacity").get<std::size_t>();
        cfg.batch_size = j.at("replay").at("batch_size").get<int>();
        cfg.replay_enabled = j.at("replay").at("enabled").get<bool>();
        cfg.checkpoint_replay = j.at("replay").at("checkpoint_replay").get<bool>();

        const std::string net_text = j.at("network").dump();
        std::variant<Mlp<double>, Mlp<float>> net = cfg.precision == Precision::Double
            ? std::variant<Mlp<double>, Mlp<float>>(Mlp<double>::from_json_string(net_text))
            : std::variant<Mlp<double>, Mlp<float>>(Mlp<float>::from_json_string(net_text));
        cfg.mlp = std::visit([](const auto& n) { return n.config(); }, net);

        Rng dummy(0);
        Agent agent(cfg, dummy);
        agent.net_ = std::move(net);
        agent.grads_ = std::visit([](const auto& n) {
            return std::variant<MlpGradients<double>, MlpGradients<float>>(n.make_gradients());
        }, agent.net_);
        agent.epsilon_ = j.at("epsilon").get<double>();

        if (cfg.checkpoint_replay && j.at("replay").contains("experiences")) {
            for (const auto& ej : j.at("replay").at("experiences")) {
                Experience e;
                e.context = context_from_json(ej.at("context"));
                e.action = ej.at("action").get<int>();
                e.reward = ej.at("reward").get<double>();
                agent.buffer_.push(std::move(e));
            }
        }
        return agent;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("agent checkpoint: ") + e.what());
    }
}

void Agent::save(const std::string& path) const
{
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out)
            throw IoError("Agent::save: cannot open '" + tmp + "' for writing");
        out << to_json_string();
        if (!out)
            throw IoError("Agent::save: write to '" + tmp + "' failed");
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw IoError("Agent::save: cannot move checkpoint into place at '" + path + "'");
}

Agent Agent::load(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("Agent::load: cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return from_json_string(buffer.str());
}

Agent Agent::load(const std::string& path, const MlpConfig& expected)
{
    Agent agent = load(path);
    if (!(agent.config_.mlp == expected))
        throw ValidationError("agent checkpoint: network shape does not match the run configuration "
                              "(check the PAP count and codebook size)");
    return agent;
}

} // namespace wakebeam
