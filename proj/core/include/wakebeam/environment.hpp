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

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "wakebeam/channel.hpp"
#include "wakebeam/codebook.hpp"
#include "wakebeam/geometry.hpp"

namespace wakebeam {

/// Static description of the deployment: AP placement, power draw per
/// sleep state, the radio link budget, and the grid of candidate user
/// positions. APs are indexed by their position in `ap_positions`;
/// `sap_index` names the sleeping AP that hosts the learner.
struct NetworkLayout {
    std::vector<Vec3> ap_positions;
    int sap_index = 0;
    double tx_power_dbm = 20.0;
    double user_tx_power_dbm = 5.0; // recorded for completeness; uplink unused
    double awake_power_w = 1.0;
    double sleep_power_w = 0.01;
    double bandwidth_hz = 1.0e8;
    double noise_figure_db = 3.0;
    double antenna_gain_db = 5.0;
    // NaN derives thermal noise: -174 dBm/Hz + 10 log10(bandwidth) + noise figure.
    double noise_power_dbm_override = std::numeric_limits<double>::quiet_NaN();
    double room_min_x = 0.0, room_min_y = 0.0;
    double room_max_x = 60.0, room_max_y = 30.0;
    double user_grid_min_x = 1.0, user_grid_min_y = 1.0;
    double user_grid_max_x = 59.0, user_grid_max_y = 29.0;
    double user_grid_step_m = 1.0;
    double user_height_m = 1.0;
    // NaN = perfect channel estimates at the sleeping AP.
    double estimate_error_snr_db = std::numeric_limits<double>::quiet_NaN();

    int num_aps() const { return static_cast<int>(ap_positions.size()); }
    double noise_power_dbm() const;
    double noise_power_mw() const { return std::pow(10.0, noise_power_dbm() / 10.0); }

    /// Materializes the user grid in row order (y outer, x inner).
    std::vector<Vec3> user_positions() const;
};

/// Six APs on a 10 m grid centered under the ceiling of the 60 m x 30 m
/// office, 2.6 m above the floor.
NetworkLayout default_office_layout();

/// Bandit input: neighbor locations (planar coordinates normalized to the
/// room's bounding box) and the real/imaginary split of each neighbor's
/// chosen beam vector. Sizes are 2*N and 2*M*N for N neighbors, M elements.
struct Context {
    std::vector<double> locations;
    std::vector<double> beams;

    friend bool operator==(const Context&, const Context&) = default;
};

struct EpisodeOutcome {
    int chosen_action = 0;
    double reward = 0.0;     // alpha
    double reward_max = 0.0; // alpha_max from the exhaustive oracle
    double regret = 0.0;     // alpha_max - alpha
    double normalized_regret = 0.0;
    bool exploration = false;
};

/// Per-AP SNR: linear transmit power x linear gains x |h.b|^2 / noise.
double snr(double tx_power_dbm, std::span<const std::complex<double>> h,
           std::span<const std::complex<double>> beam, double noise_mw, double gain_db);

/// Reward of serving with beam b over channel h: the beam's SNR normalized
/// by the matched-filter optimum, alpha = |h.b|^2 / (sigma^2 ||h||^4).
double reward(std::span<const std::complex<double>> h, std::span<const std::complex<double>> beam,
              double noise_mw);

/// |h.b|^2 / ||h||^2, the fraction of the matched-filter beamforming gain a
/// unit-norm beam achieves. Equals reward * sigma^2 * ||h||^2, lies in
/// [0, 1], and shares the reward's argmax over beams; the learner regresses
/// this bounded form.
double matched_gain_fraction(std::span<const std::complex<double>> h,
                             std::span<const std::complex<double>> beam);

struct OracleResult {
    int best_index = 0;
    double reward_max = 0.0;
};

/// Exhaustive sweep over the codebook: evaluates the reward of every beam
/// and returns the argmax (ties to the lowest index) with its reward.
OracleResult best_beam_oracle(std::span<const std::complex<double>> h, const Codebook& codebook,
                              double noise_mw);

/// Per-AP beam sweep. The network-wide objective separates across APs
/// (each SNR term depends only on that AP's beam), so the sweep solves the
/// joint problem exactly.
std::vector<int> solve_pap_beams(std::span<const CVec> channels, const Codebook& codebook);
std::vector<int> solve_pap_beams(std::span<const ChannelRealization> channels, const Codebook& codebook);

/// Flattens neighbor positions and beam choices into the bandit context.
Context build_context(std::span<const Vec3> pap_positions, std::span<const int> pap_beams,
                      const Codebook& codebook, const NetworkLayout& layout);

double regret(double reward_value, double reward_max);
double normalized_regret(double reward_value, double reward_max);

/// Adds circularly-symmetric Gaussian estimation noise at the given SNR
/// (per-element noise power ||h||^2 / (M 10^(snr/10))). NaN returns h as-is.
CVec apply_estimate_error(const CVec& h, double estimate_snr_db, Rng& rng);

} // namespace wakebeam
