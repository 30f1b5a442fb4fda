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
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wakebeam/codebook.hpp"
#include "wakebeam/geometry.hpp"
#include "wakebeam/rng.hpp"

namespace wakebeam {

/// Clustered statistical channel. One LOS cluster aligned with the true
/// link geometry (subject to distance-dependent blockage) plus a few NLOS
/// clusters; every cluster carries `num_subpaths` Laplacian-spread subpaths
/// with Rayleigh weights.
///
/// With `static_geometry` (the default) the NLOS clusters point at virtual
/// scatterers placed by smooth pseudo-random fields of the user position,
/// and blockage is a fixed property of the (AP, position) pair. The
/// multipath layout of the room is then repeatable across episodes, the way
/// a fixed physical environment would be, and all APs see the same
/// scatterers; only the per-subpath fading is redrawn per realization.
/// Setting `static_geometry = false` redraws cluster directions and the
/// blockage coin on every realization instead.
struct ChannelParams {
    double carrier_frequency_hz = 6.0e10;
    int nlos_clusters_min = 1;
    int nlos_clusters_max = 4;
    int num_subpaths = 10;            // Q; subpaths per cluster
    double angular_spread_deg = 5.0;  // Laplacian std-dev around cluster centers
    double pathloss_intercept_db = 68.0; // PL0 at 1 m
    double pathloss_exponent = 2.0;      // LOS slope; see path_loss_db()
    double nlos_pathloss_exponent = 2.9;
    double nlos_extra_loss_db = 10.0;
    double cluster_decay_db = 0.0;    // extra loss per NLOS cluster index
    double los_decay_distance_m = 40.0; // P(LOS) = max(0, 1 - d/this); <= 0 keeps LOS always
    bool rayleigh_fading = true;      // false pins every subpath weight r to 1
    bool static_geometry = true;
    double geometry_lattice_m = 8.0;  // spatial scale of the scatterer/blockage fields
    double scatter_offset_m = 12.0;   // horizontal reach of virtual scatterers
    std::uint64_t rng_seed = 17;      // identity of the static environment
};

/// One resolved propagation path (subpath q of cluster k). Angles are the
/// world-frame departure angles at the AP; `gain` is the combined p*r factor
/// in front of the steering vector (the global 1/sqrt(Q) is not folded in).
struct PathComponent {
    int cluster = 0;
    int path = 0;
    std::complex<double> gain;
    double azimuth = 0.0;   // radians
    double elevation = 0.0; // radians
    bool los = false;
};

struct ChannelRealization {
    CVec h; // length M, row-vector channel
    Vec3 ap_position;
    Vec3 user_position;
    double distance = 0.0;
    bool los_present = false;
    std::vector<PathComponent> paths; // empty for imported dumps
};

/// PL0 + 10 n log10(d / 1 m) with the LOS exponent from `params`.
/// d below 0.1 m is rejected as degenerate geometry.
double path_loss_db(double distance_m, const ChannelParams& params);

/// Same slope-intercept form with explicit coefficients.
double path_loss_db(double distance_m, double intercept_db, double exponent);

/// Draws a channel realization for one AP-user link. Geometry-statics
/// (blockage, cluster count, scatterer positions) come from params.rng_seed
/// and the positions; per-realization fading comes from `rng`. The result
/// is bit-reproducible for identical (positions, params, rng state).
ChannelRealization generate_channel(const Vec3& ap_pos, const Vec3& user_pos,
                                    const ChannelParams& params, const ArrayGeometry& geom, Rng& rng);

/// Recomputes h as the 1/sqrt(Q)-scaled sum of gain x steering-vector over
/// the stored path records. Bit-identical to the generated h.
CVec reconstruct_channel(const ChannelRealization& realization, const ChannelParams& params,
                         const ArrayGeometry& geom);

/// True if the (AP, user) pair has an unblocked LOS path under `params`.
bool los_available(const Vec3& ap_pos, const Vec3& user_pos, const ChannelParams& params, Rng& rng);

/// JSON-Lines channel dump: one {"ap": [x,y,z], "user": [x,y,z],
/// "h": [[re,im], ...]} record per line.
void export_channels(const std::string& path, std::span<const ChannelRealization> channels);
std::string channels_to_jsonl(std::span<const ChannelRealization> channels);

/// Parses a channel dump, checking every record against the expected array
/// size. Errors carry the offending record's index.
std::vector<ChannelRealization> import_channels(const std::string& path, int expected_m);
std::vector<ChannelRealization> channels_from_jsonl(const std::string& text, int expected_m);

} // namespace wakebeam
