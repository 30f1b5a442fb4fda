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

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "wakebeam/geometry.hpp"

namespace wakebeam {

using CVec = std::vector<std::complex<double>>;

/// Mounting of an access point's antenna panel.
enum class Orientation {
    Identity,    ///< panel axes coincide with the world axes, boresight +z
    CeilingDown, ///< panel flat against the ceiling, boresight straight down
};

/// Uniform rectangular planar array. Elements sit on a rows x cols grid with
/// `element_spacing` wavelengths between neighbors; element (r, c) maps to
/// vector index r * cols + c.
struct ArrayGeometry {
    int rows = 4;
    int cols = 4;
    double element_spacing = 0.5; // wavelengths
    double element_gain_db = 0.0; // folded into the link budget, not into a()
    Orientation orientation = Orientation::CeilingDown;

    int elements() const { return rows * cols; }
};

/// Rotates a world-frame unit direction into the panel's local frame.
Vec3 world_to_local(Orientation o, const Vec3& direction);

/// Local-frame angles of a local unit direction. Boresight (local +z) maps
/// to (0, 0); azimuth tilts toward local +x, elevation toward local +y.
Angles local_angles(const Vec3& local_direction);

/// Steering vector a(azimuth, elevation) of the panel, length rows*cols,
/// all entries unit modulus. Angles are in the panel's local frame, so
/// a(0, 0) is the all-ones broadside vector.
CVec array_response(double azimuth, double elevation, const ArrayGeometry& geom);

/// Analog beamforming codebook: M unit-norm vectors realizable with
/// phase shifters quantized to 2^phase_bits levels (0 = unquantized).
struct Codebook {
    std::vector<CVec> beams;
    int phase_bits = 6;

    int size() const { return static_cast<int>(beams.size()); }
};

/// 2-D DFT codebook over the array grid (Kronecker of the per-axis DFTs),
/// one beam per element, phases rounded to the quantizer grid and each beam
/// re-normalized to unit norm. bits == 0 disables quantization.
Codebook build_codebook(const ArrayGeometry& geom, int bits);

/// |h . f|^2 for row-vector channel h and beam f (plain bilinear product,
/// no conjugation; the matched beam is the entrywise conjugate of h).
double beam_gain(std::span<const std::complex<double>> h, std::span<const std::complex<double>> f);

/// Beam index maximizing beam_gain(h, f_i); ties resolve to the lowest index.
int best_beam_index(std::span<const std::complex<double>> h, const Codebook& codebook);

/// Debug/interop JSON dump of the beams as [[re, im], ...] arrays.
std::string codebook_to_json(const Codebook& codebook);

} // namespace wakebeam
