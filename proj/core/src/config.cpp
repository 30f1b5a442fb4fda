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

#include "wakebeam/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <json.hpp>

#include "wakebeam/errors.hpp"

namespace wakebeam {

using nlohmann::json;

RunConfig default_run_config()
{
    RunConfig cfg;
    cfg.layout = default_office_layout();
    return cfg;
}

namespace {

std::string trim(const std::string& s)
{
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos)
        return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

// Strips a trailing comment, honoring '#' inside quoted strings.
std::string strip_comment(const std::string& line)
{
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (c == '"' && (i == 0 || line[i - 1] != '\\'))
            in_string = !in_string;
        else if (c == '#' && !in_string)
            return line.substr(0, i);
    }
    return line;
}

[[noreturn]] void fail(int line, const std::string& msg)
{
    throw ValidationError("line " + std::to_string(line) + ": " + msg);
}

struct Setter {
    std::function<void(RunConfig&, const json&, int line)> apply;
};

double want_number(const json& v, int line, const std::string& key)
{
    if (!v.is_number())
        fail(line, key + ": expected a number");
    return v.get<double>();
}

double want_number_or_null(const json& v, int line, const std::string& key)
{
    if (v.is_null())
        return std::numeric_limits<double>::quiet_NaN();
    return want_number(v, line, key);
}

long want_integer(const json& v, int line, const std::string& key)
{
    if (!v.is_number_integer())
        fail(line, key + ": expected an integer");
    return v.get<long>();
}

bool want_bool(const json& v, int line, const std::string& key)
{
    if (!v.is_boolean())
        fail(line, key + ": expected true or false");
    return v.get<bool>();
}

std::string want_string(const json& v, int line, const std::string& key)
{
    if (!v.is_string())
        fail(line, key + ": expected a quoted string");
    return v.get<std::string>();
}

void want_xy(const json& v, int line, const std::string& key, double& x, double& y)
{
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        fail(line, key + ": expected [x, y]");
    x = v[0].get<double>();
    y = v[1].get<double>();
}

std::vector<Vec3> want_vec3_list(const json& v, int line, const std::string& key)
{
    if (!v.is_array())
        fail(line, key + ": expected a list of [x, y, z] triples");
    std::vector<Vec3> out;
    for (const auto& e : v) {
        if (!e.is_array() || e.size() != 3 || !e[0].is_number() || !e[1].is_number() || !e[2].is_number())
            fail(line, key + ": expected a list of [x, y, z] triples");
        out.push_back({e[0].get<double>(), e[1].get<double>(), e[2].get<double>()});
    }
    return out;
}

const std::map<std::string, Setter>& setters()
{
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> t;
        const auto add_number = [&t](const std::string& key, auto assign) {
            t[key] = {[key, assign](RunConfig& c, const json& v, int line) { assign(c, want_number(v, line, key)); }};
        };
        const auto add_number_or_null = [&t](const std::string& key, auto assign) {
            t[key] = {[key, assign](RunConfig& c, const json& v, int line) { assign(c, want_number_or_null(v, line, key)); }};
        };
        const auto add_int = [&t](const std::string& key, auto assign) {
            t[key] = {[key, assign](RunConfig& c, const json& v, int line) { assign(c, want_integer(v, line, key)); }};
        };
        const auto add_bool = [&t](const std::string& key, auto assign) {
            t[key] = {[key, assign](RunConfig& c, const json& v, int line) { assign(c, want_bool(v, line, key)); }};
        };

        // [channel]
        add_number("channel.carrier_frequency_hz", [](RunConfig& c, double v) { c.channel.carrier_frequency_hz = v; });
        add_int("channel.nlos_clusters_min", [](RunConfig& c, long v) { c.channel.nlos_clusters_min = static_cast<int>(v); });
        add_int("channel.nlos_clusters_max", [](RunConfig& c, long v) { c.channel.nlos_clusters_max = static_cast<int>(v); });
        add_int("channel.num_subpaths", [](RunConfig& c, long v) { c.channel.num_subpaths = static_cast<int>(v); });
        add_number("channel.angular_spread_deg", [](RunConfig& c, double v) { c.channel.angular_spread_deg = v; });
        add_number("channel.pathloss_intercept_db", [](RunConfig& c, double v) { c.channel.pathloss_intercept_db = v; });
        add_number("channel.pathloss_exponent", [](RunConfig& c, double v) { c.channel.pathloss_exponent = v; });
        add_number("channel.nlos_pathloss_exponent", [](RunConfig& c, double v) { c.channel.nlos_pathloss_exponent = v; });
        add_number("channel.nlos_extra_loss_db", [](RunConfig& c, double v) { c.channel.nlos_extra_loss_db = v; });
        add_number("channel.cluster_decay_db", [](RunConfig& c, double v) { c.channel.cluster_decay_db = v; });
        add_number("channel.los_decay_distance_m", [](RunConfig& c, double v) { c.channel.los_decay_distance_m = v; });
        add_bool("channel.rayleigh_fading", [](RunConfig& c, bool v) { c.channel.rayleigh_fading = v; });
        add_bool("channel.static_geometry", [](RunConfig& c, bool v) { c.channel.static_geometry = v; });
        add_number("channel.geometry_lattice_m", [](RunConfig& c, double v) { c.channel.geometry_lattice_m = v; });
        add_number("channel.scatter_offset_m", [](RunConfig& c, double v) { c.channel.scatter_offset_m = v; });
        add_int("channel.rng_seed", [](RunConfig& c, long v) { c.channel.rng_seed = static_cast<std::uint64_t>(v); });

        // [codebook]
        add_int("codebook.rows", [](RunConfig& c, long v) { c.array.rows = static_cast<int>(v); });
        add_int("codebook.cols", [](RunConfig& c, long v) { c.array.cols = static_cast<int>(v); });
        add_number("codebook.element_spacing", [](RunConfig& c, double v) { c.array.element_spacing = v; });
        add_number("codebook.element_gain_db", [](RunConfig& c, double v) { c.array.element_gain_db = v; });
        t["codebook.orientation"] = {[](RunConfig& c, const json& v, int line) {
            const std::string s = want_string(v, line, "codebook.orientation");
            if (s == "ceiling_down")
                c.array.orientation = Orientation::CeilingDown;
            else if (s == "identity")
                c.array.orientation = Orientation::Identity;
            else
                fail(line, "codebook.orientation: expected \"ceiling_down\" or \"identity\"");
        }};
        add_int("codebook.phase_bits", [](RunConfig& c, long v) { c.phase_bits = static_cast<int>(v); });

        // [environment]
        t["environment.ap_positions"] = {[](RunConfig& c, const json& v, int line) {
            c.layout.ap_positions = want_vec3_list(v, line, "environment.ap_positions");
        }};
        add_int("environment.sap_index", [](RunConfig& c, long v) { c.layout.sap_index = static_cast<int>(v); });
        add_number("environment.tx_power_dbm", [](RunConfig& c, double v) { c.layout.tx_power_dbm = v; });
        add_number("environment.user_tx_power_dbm", [](RunConfig& c, double v) { c.layout.user_tx_power_dbm = v; });
        add_number("environment.awake_power_w", [](RunConfig& c, double v) { c.layout.awake_power_w = v; });
        add_number("environment.sleep_power_w", [](RunConfig& c, double v) { c.layout.sleep_power_w = v; });
        add_number("environment.bandwidth_hz", [](RunConfig& c, double v) { c.layout.bandwidth_hz = v; });
        add_number("environment.noise_figure_db", [](RunConfig& c, double v) { c.layout.noise_figure_db = v; });
        add_number("environment.antenna_gain_db", [](RunConfig& c, double v) { c.layout.antenna_gain_db = v; });
        add_number_or_null("environment.noise_power_dbm", [](RunConfig& c, double v) { c.layout.noise_power_dbm_override = v; });
        t["environment.room_min"] = {[](RunConfig& c, const json& v, int line) {
            want_xy(v, line, "environment.room_min", c.layout.room_min_x, c.layout.room_min_y);
        }};
        t["environment.room_max"] = {[](RunConfig& c, const json& v, int line) {
            want_xy(v, line, "environment.room_max", c.layout.room_max_x, c.layout.room_max_y);
        }};
        t["environment.user_grid_min"] = {[](RunConfig& c, const json& v, int line) {
            want_xy(v, line, "environment.user_grid_min", c.layout.user_grid_min_x, c.layout.user_grid_min_y);
        }};
        t["environment.user_grid_max"] = {[](RunConfig& c, const json& v, int line) {
            want_xy(v, line, "environment.user_grid_max", c.layout.user_grid_max_x, c.layout.user_grid_max_y);
        }};
        add_number("environment.user_grid_step_m", [](RunConfig& c, double v) { c.layout.user_grid_step_m = v; });
        add_number("environment.user_height_m", [](RunConfig& c, double v) { c.layout.user_height_m = v; });
        add_number_or_null("environment.estimate_error_snr_db", [](RunConfig& c, double v) { c.layout.estimate_error_snr_db = v; });

        // [neuralnet]
        add_int("neuralnet.branch_width", [](RunConfig& c, long v) { c.neural.branch_width = static_cast<int>(v); });
        add_int("neuralnet.hidden_layers", [](RunConfig& c, long v) { c.neural.hidden_layers = static_cast<int>(v); });
        add_int("neuralnet.hidden_width", [](RunConfig& c, long v) { c.neural.hidden_width = static_cast<int>(v); });
        add_number("neuralnet.dropout_rate", [](RunConfig& c, double v) { c.neural.dropout_rate = v; });
        add_number("neuralnet.learning_rate", [](RunConfig& c, double v) { c.neural.learning_rate = v; });
        add_number("neuralnet.adam_beta1", [](RunConfig& c, double v) { c.neural.adam_beta1 = v; });
        add_number("neuralnet.adam_beta2", [](RunConfig& c, double v) { c.neural.adam_beta2 = v; });
        add_number("neuralnet.adam_epsilon", [](RunConfig& c, double v) { c.neural.adam_epsilon = v; });
        t["neuralnet.precision"] = {[](RunConfig& c, const json& v, int line) {
            const std::string s = want_string(v, line, "neuralnet.precision");
            if (s == "double")
                c.neural.precision = Precision::Double;
            else if (s == "single")
                c.neural.precision = Precision::Single;
            else
                fail(line, "neuralnet.precision: expected \"double\" or \"single\"");
        }};

        // [agent]
        add_number("agent.epsilon0", [](RunConfig& c, double v) { c.agent.schedule.epsilon0 = v; });
        add_number("agent.epsilon_decay", [](RunConfig& c, double v) { c.agent.schedule.epsilon_decay = v; });
        add_number("agent.epsilon_min", [](RunConfig& c, double v) { c.agent.schedule.epsilon_min = v; });
        add_int("agent.replay_capacity", [](RunConfig& c, long v) { c.agent.replay_capacity = static_cast<std::size_t>(v); });
        add_int("agent.batch_size", [](RunConfig& c, long v) { c.agent.batch_size = static_cast<int>(v); });
        add_bool("agent.replay_enabled", [](RunConfig& c, bool v) { c.agent.replay_enabled = v; });
        add_bool("agent.checkpoint_replay", [](RunConfig& c, bool v) { c.agent.checkpoint_replay = v; });

        // [scenario]
        add_int("scenario.episodes", [](RunConfig& c, long v) { c.training.episodes = v; });
        add_int("scenario.rounds", [](RunConfig& c, long v) { c.training.rounds = static_cast<int>(v); });
        add_int("scenario.num_paps", [](RunConfig& c, long v) { c.training.num_paps = static_cast<int>(v); });
        add_int("scenario.moving_avg_window", [](RunConfig& c, long v) { c.training.moving_avg_window = static_cast<int>(v); });
        add_int("scenario.eval_episodes", [](RunConfig& c, long v) { c.training.eval_episodes = v; });
        add_number("scenario.frame_length_s", [](RunConfig& c, double v) { c.timing.frame_length_s = v; });
        add_number("scenario.pbch_offset_s", [](RunConfig& c, double v) { c.timing.pbch_offset_s = v; });
        add_number("scenario.ia_sweep_duration_s", [](RunConfig& c, double v) { c.timing.ia_sweep_duration_s = v; });
        add_number("scenario.dcb_processing_delay_s", [](RunConfig& c, double v) { c.timing.dcb_processing_delay_s = v; });
        add_number("scenario.demand_time_s", [](RunConfig& c, double v) { c.demand.demand_time_s = v; });
        add_number("scenario.duration_s", [](RunConfig& c, double v) { c.demand.duration_s = v; });
        add_number("scenario.trace_step_s", [](RunConfig& c, double v) { c.demand.trace_step_s = v; });

        // [cli]
        add_int("cli.seed", [](RunConfig& c, long v) { c.seed = static_cast<std::uint64_t>(v); });
        t["cli.out_dir"] = {[](RunConfig& c, const json& v, int line) {
            c.out_dir = want_string(v, line, "cli.out_dir");
        }};
        add_int("cli.jobs", [](RunConfig& c, long v) { c.jobs = static_cast<int>(v); });
        add_bool("cli.plot", [](RunConfig& c, bool v) { c.plot = v; });

        return t;
    }();
    return table;
}

} // namespace

RunConfig parse_run_config(const std::string& text)
{
    RunConfig cfg = default_run_config();
    std::istringstream is(text);
    std::string raw;
    std::string section;
    int line_no = 0;
    const auto& table = setters();

    while (std::getline(is, raw)) {
        ++line_no;
        const std::string line = trim(strip_comment(raw));
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                fail(line_no, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                fail(line_no, "empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            fail(line_no, "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value_text = trim(line.substr(eq + 1));
        if (key.empty())
            fail(line_no, "missing key before '='");
        if (value_text.empty())
            fail(line_no, "missing value after '='");
        if (section.empty())
            fail(line_no, "key '" + key + "' appears before any [section]");

        const std::string full_key = section + "." + key;
        const auto it = table.find(full_key);
        if (it == table.end())
            fail(line_no, "unknown key '" + full_key + "'");

        const json value = json::parse(value_text, nullptr, false);
        if (value.is_discarded())
            fail(line_no, "malformed value for '" + full_key + "'");
        it->second.apply(cfg, value, line_no);
    }
    return cfg;
}

RunConfig load_run_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open config file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_run_config(buffer.str());
}

namespace {

std::string jnum(double v)
{
    return json(v).dump();
}

std::string jnum_or_null(double v)
{
    return std::isnan(v) ? "null" : jnum(v);
}

} // namespace

std::string emit_run_config(const RunConfig& c)
{
    std::ostringstream os;
    os << "# wakebeam run configuration\n";
    os << "# Values use JSON literal syntax; unknown keys are rejected.\n";
    os << "\n[channel]\n";
    os << "carrier_frequency_hz = " << jnum(c.channel.carrier_frequency_hz) << "\n";
    os << "# Cluster statistics are a statistical stand-in for ray-traced propagation.\n";
    os << "nlos_clusters_min = " << c.channel.nlos_clusters_min << "\n";
    os << "nlos_clusters_max = " << c.channel.nlos_clusters_max << "\n";
    os << "num_subpaths = " << c.channel.num_subpaths << "\n";
    os << "angular_spread_deg = " << jnum(c.channel.angular_spread_deg) << "\n";
    os << "pathloss_intercept_db = " << jnum(c.channel.pathloss_intercept_db) << "\n";
    os << "pathloss_exponent = " << jnum(c.channel.pathloss_exponent) << "\n";
    os << "nlos_pathloss_exponent = " << jnum(c.channel.nlos_pathloss_exponent) << "\n";
    os << "nlos_extra_loss_db = " << jnum(c.channel.nlos_extra_loss_db) << "\n";
    os << "cluster_decay_db = " << jnum(c.channel.cluster_decay_db) << "\n";
    os << "# P(LOS) = max(0, 1 - d / los_decay_distance_m); <= 0 keeps LOS always on.\n";
    os << "los_decay_distance_m = " << jnum(c.channel.los_decay_distance_m) << "\n";
    os << "rayleigh_fading = " << (c.channel.rayleigh_fading ? "true" : "false") << "\n";
    os << "# static_geometry ties scatterers/blockage to positions (a fixed room);\n";
    os << "# false redraws them independently on every realization.\n";
    os << "static_geometry = " << (c.channel.static_geometry ? "true" : "false") << "\n";
    os << "geometry_lattice_m = " << jnum(c.channel.geometry_lattice_m) << "\n";
    os << "scatter_offset_m = " << jnum(c.channel.scatter_offset_m) << "\n";
    os << "rng_seed = " << c.channel.rng_seed << "\n";

    os << "\n[codebook]\n";
    os << "rows = " << c.array.rows << "\n";
    os << "cols = " << c.array.cols << "\n";
    os << "element_spacing = " << jnum(c.array.element_spacing) << "\n";
    os << "element_gain_db = " << jnum(c.array.element_gain_db) << "\n";
    os << "orientation = " << (c.array.orientation == Orientation::CeilingDown ? "\"ceiling_down\"" : "\"identity\"") << "\n";
    os << "phase_bits = " << c.phase_bits << "  # 0 disables phase quantization\n";

    os << "\n[environment]\n";
    os << "ap_positions = [";
    for (std::size_t i = 0; i < c.layout.ap_positions.size(); ++i) {
        const auto& p = c.layout.ap_positions[i];
        os << (i ? ", " : "") << "[" << jnum(p.x) << ", " << jnum(p.y) << ", " << jnum(p.z) << "]";
    }
    os << "]\n";
    os << "sap_index = " << c.layout.sap_index << "\n";
    os << "tx_power_dbm = " << jnum(c.layout.tx_power_dbm) << "\n";
    os << "user_tx_power_dbm = " << jnum(c.layout.user_tx_power_dbm) << "  # recorded only; uplink unused\n";
    os << "awake_power_w = " << jnum(c.layout.awake_power_w) << "\n";
    os << "sleep_power_w = " << jnum(c.layout.sleep_power_w) << "\n";
    os << "bandwidth_hz = " << jnum(c.layout.bandwidth_hz) << "\n";
    os << "noise_figure_db = " << jnum(c.layout.noise_figure_db) << "\n";
    os << "antenna_gain_db = " << jnum(c.layout.antenna_gain_db) << "\n";
    os << "# null derives thermal noise from bandwidth and noise figure.\n";
    os << "noise_power_dbm = " << jnum_or_null(c.layout.noise_power_dbm_override) << "\n";
    os << "room_min = [" << jnum(c.layout.room_min_x) << ", " << jnum(c.layout.room_min_y) << "]\n";
    os << "room_max = [" << jnum(c.layout.room_max_x) << ", " << jnum(c.layout.room_max_y) << "]\n";
    os << "user_grid_min = [" << jnum(c.layout.user_grid_min_x) << ", " << jnum(c.layout.user_grid_min_y) << "]\n";
    os << "user_grid_max = [" << jnum(c.layout.user_grid_max_x) << ", " << jnum(c.layout.user_grid_max_y) << "]\n";
    os << "user_grid_step_m = " << jnum(c.layout.user_grid_step_m) << "\n";
    os << "user_height_m = " << jnum(c.layout.user_height_m) << "\n";
    os << "# null keeps the sleeping AP's channel estimate perfect.\n";
    os << "estimate_error_snr_db = " << jnum_or_null(c.layout.estimate_error_snr_db) << "\n";

    os << "\n[neuralnet]\n";
    os << "branch_width = " << c.neural.branch_width << "\n";
    os << "hidden_layers = " << c.neural.hidden_layers << "\n";
    os << "hidden_width = " << c.neural.hidden_width << "\n";
    os << "dropout_rate = " << jnum(c.neural.dropout_rate) << "\n";
    os << "learning_rate = " << jnum(c.neural.learning_rate) << "\n";
    os << "adam_beta1 = " << jnum(c.neural.adam_beta1) << "\n";
    os << "adam_beta2 = " << jnum(c.neural.adam_beta2) << "\n";
    os << "adam_epsilon = " << jnum(c.neural.adam_epsilon) << "\n";
    os << "precision = " << (c.neural.precision == Precision::Double ? "\"double\"" : "\"single\"") << "\n";

    os << "\n[agent]\n";
    os << "epsilon0 = " << jnum(c.agent.schedule.epsilon0) << "\n";
    os << "epsilon_decay = " << jnum(c.agent.schedule.epsilon_decay) << "\n";
    os << "epsilon_min = " << jnum(c.agent.schedule.epsilon_min) << "\n";
    os << "replay_capacity = " << c.agent.replay_capacity << "\n";
    os << "batch_size = " << c.agent.batch_size << "\n";
    os << "replay_enabled = " << (c.agent.replay_enabled ? "true" : "false") << "\n";
    os << "checkpoint_replay = " << (c.agent.checkpoint_replay ? "true" : "false") << "\n";

    os << "\n[scenario]\n";
    os << "episodes = " << c.training.episodes << "\n";
    os << "rounds = " << c.training.rounds << "\n";
    os << "num_paps = " << c.training.num_paps << "\n";
    os << "moving_avg_window = " << c.training.moving_avg_window << "\n";
    os << "eval_episodes = " << c.training.eval_episodes << "\n";
    os << "frame_length_s = " << jnum(c.timing.frame_length_s) << "\n";
    os << "pbch_offset_s = " << jnum(c.timing.pbch_offset_s) << "\n";
    os << "ia_sweep_duration_s = " << jnum(c.timing.ia_sweep_duration_s) << "\n";
    os << "dcb_processing_delay_s = " << jnum(c.timing.dcb_processing_delay_s) << "\n";
    os << "demand_time_s = " << jnum(c.demand.demand_time_s) << "\n";
    os << "duration_s = " << jnum(c.demand.duration_s) << "\n";
    os << "trace_step_s = " << jnum(c.demand.trace_step_s) << "\n";

    os << "\n[cli]\n";
    os << "seed = " << c.seed << "\n";
    os << "out_dir = " << json(c.out_dir).dump() << "\n";
    os << "jobs = " << c.jobs << "\n";
    os << "plot = " << (c.plot ? "true" : "false") << "\n";
    return os.str();
}

void validate_run_config(const RunConfig& c)
{
    std::vector<std::string> errors;
    const auto check = [&errors](bool ok, const std::string& msg) {
        if (!ok)
            errors.push_back(msg);
    };

    check(c.channel.carrier_frequency_hz > 0.0, "channel.carrier_frequency_hz must be positive");
    check(c.channel.num_subpaths >= 1, "channel.num_subpaths must be >= 1");
    check(c.channel.nlos_clusters_min >= 0, "channel.nlos_clusters_min must be >= 0");
    check(c.channel.nlos_clusters_max >= c.channel.nlos_clusters_min,
          "channel.nlos_clusters_max must be >= nlos_clusters_min");
    check(c.channel.nlos_clusters_max >= 1 || c.channel.los_decay_distance_m <= 0.0,
          "channel.nlos_clusters_max must be >= 1 while LOS blockage is enabled");
    check(c.channel.angular_spread_deg >= 0.0, "channel.angular_spread_deg must be >= 0");
    check(c.channel.pathloss_exponent > 0.0, "channel.pathloss_exponent must be positive");
    check(c.channel.nlos_pathloss_exponent > 0.0, "channel.nlos_pathloss_exponent must be positive");
    check(c.channel.geometry_lattice_m > 0.0, "channel.geometry_lattice_m must be positive");
    check(c.channel.scatter_offset_m >= 0.0, "channel.scatter_offset_m must be >= 0");

    check(c.array.rows >= 1 && c.array.cols >= 1, "codebook.rows and codebook.cols must be >= 1");
    check(c.array.element_spacing > 0.0, "codebook.element_spacing must be positive");
    check(c.phase_bits >= 0 && c.phase_bits <= 20, "codebook.phase_bits must lie in [0, 20]");

    const int aps = c.layout.num_aps();
    check(aps >= 2, "environment.ap_positions needs at least two APs");
    check(c.layout.sap_index >= 0 && c.layout.sap_index < aps,
          "environment.sap_index must name an existing AP");
    check(c.layout.awake_power_w > 0.0, "environment.awake_power_w must be positive");
    check(c.layout.sleep_power_w > 0.0, "environment.sleep_power_w must be positive");
    check(c.layout.bandwidth_hz > 0.0, "environment.bandwidth_hz must be positive");
    check(c.layout.room_max_x > c.layout.room_min_x && c.layout.room_max_y > c.layout.room_min_y,
          "environment room bounds must span a positive area");
    check(c.layout.user_grid_step_m > 0.0, "environment.user_grid_step_m must be positive");
    check(c.layout.user_grid_max_x >= c.layout.user_grid_min_x
              && c.layout.user_grid_max_y >= c.layout.user_grid_min_y,
          "environment user grid bounds are inverted");
    check(c.layout.user_grid_min_x >= c.layout.room_min_x && c.layout.user_grid_max_x <= c.layout.room_max_x
              && c.layout.user_grid_min_y >= c.layout.room_min_y
              && c.layout.user_grid_max_y <= c.layout.room_max_y,
          "environment user grid must lie inside the room bounds");
    for (const auto& p : c.layout.ap_positions)
        if (p.x < c.layout.room_min_x || p.x > c.layout.room_max_x || p.y < c.layout.room_min_y
            || p.y > c.layout.room_max_y) {
            errors.push_back("environment.ap_positions must lie inside the room bounds");
            break;
        }

    check(c.neural.branch_width >= 1, "neuralnet.branch_width must be >= 1");
    check(c.neural.hidden_layers >= 1, "neuralnet.hidden_layers must be >= 1");
    check(c.neural.hidden_width >= 1, "neuralnet.hidden_width must be >= 1");
    check(c.neural.dropout_rate >= 0.0 && c.neural.dropout_rate < 1.0,
          "neuralnet.dropout_rate must lie in [0, 1)");
    check(c.neural.learning_rate > 0.0, "neuralnet.learning_rate must be positive");
    check(c.neural.adam_beta1 > 0.0 && c.neural.adam_beta1 < 1.0, "neuralnet.adam_beta1 must lie in (0, 1)");
    check(c.neural.adam_beta2 > 0.0 && c.neural.adam_beta2 < 1.0, "neuralnet.adam_beta2 must lie in (0, 1)");
    check(c.neural.adam_epsilon > 0.0, "neuralnet.adam_epsilon must be positive");

    const auto& s = c.agent.schedule;
    check(0.0 <= s.epsilon_min && s.epsilon_min <= s.epsilon0 && s.epsilon0 <= 1.0,
          "agent epsilon schedule needs 0 <= epsilon_min <= epsilon0 <= 1");
    check(s.epsilon_decay > 0.0 && s.epsilon_decay <= 1.0, "agent.epsilon_decay must lie in (0, 1]");
    check(c.agent.replay_capacity >= 1, "agent.replay_capacity must be >= 1");
    check(c.agent.batch_size >= 1, "agent.batch_size must be >= 1");
    check(c.agent.replay_enabled || c.agent.batch_size == 1,
          "agent: online mode (replay_enabled = false) requires batch_size = 1");

    check(c.training.episodes >= 1, "scenario.episodes must be >= 1");
    check(c.training.rounds >= 1, "scenario.rounds must be >= 1");
    check(c.training.num_paps >= 1 && c.training.num_paps < aps,
          "scenario.num_paps must satisfy 1 <= num_paps < number of APs");
    check(c.training.moving_avg_window >= 1, "scenario.moving_avg_window must be >= 1");
    check(c.training.eval_episodes >= 1, "scenario.eval_episodes must be >= 1");

    check(c.timing.frame_length_s > 0.0, "scenario.frame_length_s must be positive");
    check(c.timing.pbch_offset_s >= 0.0 && c.timing.pbch_offset_s < c.timing.frame_length_s,
          "scenario.pbch_offset_s must lie in [0, frame_length_s)");
    check(c.timing.ia_sweep_duration_s >= 0.0, "scenario.ia_sweep_duration_s must be >= 0");
    check(c.timing.dcb_processing_delay_s >= 0.0, "scenario.dcb_processing_delay_s must be >= 0");

    check(c.demand.duration_s > 0.0, "scenario.duration_s must be positive");
    check(c.demand.demand_time_s >= 0.0 && c.demand.demand_time_s <= c.demand.duration_s,
          "scenario.demand_time_s must lie within [0, duration_s]");
    check(c.demand.trace_step_s > 0.0, "scenario.trace_step_s must be positive");

    check(c.jobs >= 1, "cli.jobs must be >= 1");

    if (!errors.empty()) {
        std::string joined = "invalid configuration:";
        for (const auto& e : errors)
            joined += "\n  - " + e;
        throw ValidationError(joined);
    }
}

MlpConfig derive_mlp_config(const RunConfig& c)
{
    MlpConfig m;
    m.loc_dim = 2 * c.training.num_paps;
    m.beam_dim = 2 * c.array.elements() * c.training.num_paps;
    m.num_actions = c.array.elements();
    m.branch_width = c.neural.branch_width;
    m.hidden_layers = c.neural.hidden_layers;
    m.hidden_width = c.neural.hidden_width;
    m.dropout_rate = c.neural.dropout_rate;
    m.learning_rate = c.neural.learning_rate;
    m.adam_beta1 = c.neural.adam_beta1;
    m.adam_beta2 = c.neural.adam_beta2;
    m.adam_epsilon = c.neural.adam_epsilon;
    return m;
}

AgentConfig derive_agent_config(const RunConfig& c)
{
    AgentConfig a;
    a.mlp = derive_mlp_config(c);
    a.schedule = c.agent.schedule;
    a.precision = c.neural.precision;
    a.replay_capacity = c.agent.replay_capacity;
    a.batch_size = c.agent.batch_size;
    a.replay_enabled = c.agent.replay_enabled;
    a.checkpoint_replay = c.agent.checkpoint_replay;
    return a;
}

Codebook build_run_codebook(const RunConfig& c)
{
    return build_codebook(c.array, c.phase_bits);
}

} // namespace wakebeam
