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

#include "wakebeam/environment.hpp"

#include <stdexcept>

#include "wakebeam/errors.hpp"

namespace wakebeam {

double NetworkLayout::noise_power_dbm() const
{
    if (!std::isnan(noise_power_dbm_override))
        return noise_power_dbm_override;
    return -174.0 + 10.0 * std::log10(bandwidth_hz) + noise_figure_db;
}

std::vector<Vec3> NetworkLayout::user_positions() const
{
    std::vector<Vec3> grid;
    const double step = user_grid_step_m;
    // Half-step slack keeps the far edge inclusive despite rounding.
    for (double y = user_grid_min_y; y <= user_grid_max_y + step * 0.5; y += step)
        for (double x = user_grid_min_x; x <= user_grid_max_x + step * 0.5; x += step)
            grid.push_back({x, y, user_height_m});
    return grid;
}

NetworkLayout default_office_layout()
{
    NetworkLayout layout;
    layout.ap_positions = {
        {20.0, 10.0, 2.6}, {30.0, 10.0, 2.6}, {40.0, 10.0, 2.6},
        {20.0, 20.0, 2.6}, {30.0, 20.0, 2.6}, {40.0, 20.0, 2.6},
    };
    return layout;
}

double snr(double tx_power_dbm, std::span<const std::complex<double>> h,
           std::span<const std::complex<double>> beam, double noise_mw, double gain_db)
{
    if (noise_mw <= 0.0)
        throw std::invalid_argument("snr: noise power must be positive");
    const double p_mw = std::pow(10.0, (tx_power_dbm + gain_db) / 10.0);
    return p_mw * beam_gain(h, beam) / noise_mw;
}

double reward(std::span<const std::complex<double>> h, std::span<const std::complex<double>> beam,
              double noise_mw)
{
    if (noise_mw <= 0.0)
        throw std::invalid_argument("reward: noise power must be positive");
    double h_norm2 = 0.0;
    for (const auto& v : h)
        h_norm2 += std::norm(v);
    if (h_norm2 <= 0.0)
        throw std::invalid_argument("reward: degenerate all-zero channel");
    return beam_gain(h, beam) / (noise_mw * h_norm2 * h_norm2);
}

double matched_gain_fraction(std::span<const std::complex<double>> h,
                             std::span<const std::complex<double>> beam)
{
    double h_norm2 = 0.0;
    for (const auto& v : h)
        h_norm2 += std::norm(v);
    if (h_norm2 <= 0.0)
        throw std::invalid_argument("matched_gain_fraction: degenerate all-zero channel");
    return beam_gain(h, beam) / h_norm2;
}

OracleResult best_beam_oracle(std::span<const std::complex<double>> h, const Codebook& codebook,
                              double noise_mw)
{
    if (codebook.size() == 0)
        throw std::invalid_argument("best_beam_oracle: empty codebook");
    OracleResult out;
    out.best_index = 0;
    out.reward_max = reward(h, codebook.beams[0], noise_mw);
    for (int i = 1; i < codebook.size(); ++i) {
        const double r = reward(h, codebook.beams[static_cast<std::size_t>(i)], noise_mw);
        if (r > out.reward_max) {
            out.reward_max = r;
            out.best_index = i;
        }
    }
    return out;
}

std::vector<int> solve_pap_beams(std::span<const CVec> channels, const Codebook& codebook)
{
    std::vector<int> beams;
    beams.reserve(channels.size());
    for (const auto& h : channels)
        beams.push_back(best_beam_index(h, codebook));
    return beams;
}

std::vector<int> solve_pap_beams(std::span<const ChannelRealization> channels, const Codebook& codebook)
{
    std::vector<int> beams;
    beams.reserve(channels.size());
    for (const auto& ch : channels)
        beams.push_back(best_beam_index(ch.h, codebook));
    return beams;
}

Context build_context(std::span<const Vec3> pap_positions, std::span<const int> pap_beams,
                      const Codebook& codebook, const NetworkLayout& layout)
{
    if (pap_positions.size() != pap_beams.size())
        throw std::invalid_argument("build_context: positions/beams count mismatch");
    const double span_x = layout.room_max_x - layout.room_min_x;
    const double span_y = layout.room_max_y - layout.room_min_y;
    if (span_x <= 0.0 || span_y <= 0.0)
        throw std::invalid_argument("build_context: empty room bounding box");

    Context ctx;
    ctx.locations.reserve(2 * pap_positions.size());
    for (const auto& p : pap_positions) {
        ctx.locations.push_back((p.x - layout.room_min_x) / span_x);
        ctx.locations.push_back((p.y - layout.room_min_y) / span_y);
    }
    const auto m = static_cast<std::size_t>(codebook.size() == 0 ? 0 : codebook.beams[0].size());
    ctx.beams.reserve(2 * m * pap_beams.size());
    for (const int idx : pap_beams) {
        if (idx < 0 || idx >= codebook.size())
            throw std::invalid_argument("build_context: beam index out of range");
        const auto& f = codebook.beams[static_cast<std::size_t>(idx)];
        for (const auto& v : f)
            ctx.beams.push_back(v.real());
        for (const auto& v : f)
            ctx.beams.push_back(v.imag());
    }
    return ctx;
}

double regret(double reward_value, double reward_max)
{
    if (reward_value > reward_max)
        throw InternalError("regret: reward exceeds the exhaustive oracle's maximum");
    return reward_max - reward_value;
}

double normalized_regret(double reward_value, double reward_max)
{
    if (reward_max <= 0.0)
        throw std::invalid_argument("normalized_regret: reward_max must be positive");
    return regret(reward_value, reward_max) / reward_max;
}

CVec apply_estimate_error(const CVec& h, double estimate_snr_db, Rng& rng)
{
    if (std::isnan(estimate_snr_db))
        return h;
    double h_norm2 = 0.0;
    for (const auto& v : h)
        h_norm2 += std::norm(v);
    const double per_element_var = h_norm2 / (static_cast<double>(h.size()) * std::pow(10.0, estimate_snr_db / 10.0));
    const double sigma = std::sqrt(per_element_var / 2.0);
    CVec noisy(h.size());
    for (std::size_t i = 0; i < h.size(); ++i)
        noisy[i] = h[i] + std::complex<double>(sigma * rng.normal(), sigma * rng.normal());
    return noisy;
}

} // namespace wakebeam
