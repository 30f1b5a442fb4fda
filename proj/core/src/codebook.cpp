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

#include "wakebeam/codebook.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace wakebeam {

Vec3 world_to_local(Orientation o, const Vec3& d)
{
    switch (o) {
    case Orientation::Identity:
        return d;
    case Orientation::CeilingDown:
        // 180 degree rotation about the world x axis: +x stays, +y and +z flip,
        // so the boresight (local +z) points straight down.
        return {d.x, -d.y, -d.z};
    }
    return d;
}

Angles local_angles(const Vec3& u)
{
    return {std::atan2(u.x, u.z), std::asin(std::clamp(u.y, -1.0, 1.0))};
}

CVec array_response(double azimuth, double elevation, const ArrayGeometry& geom)
{
    // Direction cosines along the panel axes. Both are odd in their angle,
    // which makes a(-az, -el) the entrywise conjugate of a(az, el).
    const double ux = std::sin(azimuth) * std::cos(elevation);
    const double uy = std::sin(elevation);

    CVec a(static_cast<std::size_t>(geom.elements()));
    const double k = 2.0 * kPi * geom.element_spacing;
    for (int r = 0; r < geom.rows; ++r) {
        for (int c = 0; c < geom.cols; ++c) {
            const double phase = k * (r * uy + c * ux);
            a[static_cast<std::size_t>(r * geom.cols + c)] = std::polar(1.0, phase);
        }
    }
    return a;
}

Codebook build_codebook(const ArrayGeometry& geom, int bits)
{
    if (bits < 0)
        throw std::invalid_argument("build_codebook: bits must be >= 0");

    const int m = geom.elements();
    const double quantum = bits > 0 ? 2.0 * kPi / static_cast<double>(1 << bits) : 0.0;

    Codebook cb;
    cb.phase_bits = bits;
    cb.beams.reserve(static_cast<std::size_t>(m));
    for (int p = 0; p < geom.rows; ++p) {
        for (int q = 0; q < geom.cols; ++q) {
            CVec f(static_cast<std::size_t>(m));
            for (int r = 0; r < geom.rows; ++r) {
                for (int c = 0; c < geom.cols; ++c) {
                    double phase = -2.0 * kPi
                        * (static_cast<double>(p * r) / geom.rows + static_cast<double>(q * c) / geom.cols);
                    if (bits > 0) {
                        phase = std::fmod(phase, 2.0 * kPi);
                        if (phase < 0.0)
                            phase += 2.0 * kPi;
                        const auto steps = static_cast<long>(std::llround(phase / quantum)) % (1L << bits);
                        phase = static_cast<double>(steps) * quantum;
                    }
                    f[static_cast<std::size_t>(r * geom.cols + c)] = std::polar(1.0, phase);
                }
            }
            double norm2 = 0.0;
            for (const auto& v : f)
                norm2 += std::norm(v);
            const double renorm = 1.0 / std::sqrt(norm2);
            for (auto& v : f)
                v *= renorm;
            cb.beams.push_back(std::move(f));
        }
    }
    return cb;
}

double beam_gain(std::span<const std::complex<double>> h, std::span<const std::complex<double>> f)
{
    if (h.size() != f.size())
        throw std::invalid_argument("beam_gain: dimension mismatch");
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t i = 0; i < h.size(); ++i)
        acc += h[i] * f[i];
    return std::norm(acc);
}

int best_beam_index(std::span<const std::complex<double>> h, const Codebook& codebook)
{
    int best = 0;
    double best_gain = -1.0;
    for (int i = 0; i < codebook.size(); ++i) {
        const double g = beam_gain(h, codebook.beams[static_cast<std::size_t>(i)]);
        if (g > best_gain) {
            best_gain = g;
            best = i;
        }
    }
    return best;
}

std::string codebook_to_json(const Codebook& codebook)
{
    nlohmann::json j;
    j["phase_bits"] = codebook.phase_bits;
    auto& beams = j["beams"] = nlohmann::json::array();
    for (const auto& f : codebook.beams) {
        nlohmann::json beam = nlohmann::json::array();
        for (const auto& v : f)
            beam.push_back({v.real(), v.imag()});
        beams.push_back(std::move(beam));
    }
    return j.dump(2);
}

} // namespace wakebeam
