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

#include "wakebeam/channel.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "wakebeam/errors.hpp"

namespace wakebeam {

namespace {

constexpr double kMinDistance = 0.1;

// Salts for the static-environment hash streams.
constexpr std::uint64_t kSaltBlockage = 0xb10cu;
constexpr std::uint64_t kSaltClusterCount = 0xc0u;
constexpr std::uint64_t kSaltScatterBase = 0x5c00u;

std::uint64_t position_key(const Vec3& p)
{
    std::uint64_t s = 0x7a3e0f1du;
    s = mix_seed(s, static_cast<std::uint64_t>(std::llround(p.x * 1000.0)));
    s = mix_seed(s, static_cast<std::uint64_t>(std::llround(p.y * 1000.0)));
    s = mix_seed(s, static_cast<std::uint64_t>(std::llround(p.z * 1000.0)));
    return s;
}

double hash01(std::uint64_t seed, std::uint64_t salt, std::int64_t ix, std::int64_t iy)
{
    std::uint64_t s = mix_seed(mix_seed(seed, salt), static_cast<std::uint64_t>(ix) * 0x9e3779b97f4a7c15ULL
                                                          ^ static_cast<std::uint64_t>(iy));
    return static_cast<double>(splitmix64(s) >> 11) * 0x1.0p-53;
}

// Piecewise-constant field over lattice cells; pointwise uniform in [0,1).
double cell_field01(std::uint64_t seed, std::uint64_t salt, double x, double y, double lattice)
{
    const auto ix = static_cast<std::int64_t>(std::floor(x / lattice));
    const auto iy = static_cast<std::int64_t>(std::floor(y / lattice));
    return hash01(seed, salt, ix, iy);
}

// Value noise: smoothstep-blended lattice hashes, C1-continuous in (x, y).
double smooth_field01(std::uint64_t seed, std::uint64_t salt, double x, double y, double lattice)
{
    const double gx = x / lattice;
    const double gy = y / lattice;
    const auto ix = static_cast<std::int64_t>(std::floor(gx));
    const auto iy = static_cast<std::int64_t>(std::floor(gy));
    double fx = gx - static_cast<double>(ix);
    double fy = gy - static_cast<double>(iy);
    fx = fx * fx * (3.0 - 2.0 * fx);
    fy = fy * fy * (3.0 - 2.0 * fy);
    const double v00 = hash01(seed, salt, ix, iy);
    const double v10 = hash01(seed, salt, ix + 1, iy);
    const double v01 = hash01(seed, salt, ix, iy + 1);
    const double v11 = hash01(seed, salt, ix + 1, iy + 1);
    return (v00 * (1.0 - fx) + v10 * fx) * (1.0 - fy) + (v01 * (1.0 - fx) + v11 * fx) * fy;
}

// Keeps elevation in [-pi/2, pi/2] by folding across the poles, and azimuth
// in (-pi, pi].
Angles fold_angles(double azimuth, double elevation)
{
    if (elevation > kPi / 2.0) {
        elevation = kPi - elevation;
        azimuth += kPi;
    } else if (elevation < -kPi / 2.0) {
        elevation = -kPi - elevation;
        azimuth += kPi;
    }
    azimuth = std::remainder(azimuth, 2.0 * kPi);
    return {azimuth, elevation};
}

struct ClusterSpec {
    Angles center;
    double amplitude = 0.0;
    bool los = false;
};

Vec3 scatter_point(const ChannelParams& p, const Vec3& user, int k)
{
    const auto base = kSaltScatterBase + static_cast<std::uint64_t>(k) * 4u;
    const double ox = (2.0 * smooth_field01(p.rng_seed, base + 0, user.x, user.y, p.geometry_lattice_m) - 1.0)
        * p.scatter_offset_m;
    const double oy = (2.0 * smooth_field01(p.rng_seed, base + 1, user.x, user.y, p.geometry_lattice_m) - 1.0)
        * p.scatter_offset_m;
    const double sz = 0.5 + 2.0 * smooth_field01(p.rng_seed, base + 2, user.x, user.y, p.geometry_lattice_m);
    return {user.x + ox, user.y + oy, sz};
}

std::vector<ClusterSpec> draw_clusters(const Vec3& ap, const Vec3& user, const ChannelParams& p,
                                       bool los, Rng& rng)
{
    std::vector<ClusterSpec> clusters;
    const double d = distance(ap, user);

    if (los) {
        ClusterSpec c;
        c.center = angles_of_direction(normalized(user - ap));
        c.amplitude = std::pow(10.0, -path_loss_db(d, p.pathloss_intercept_db, p.pathloss_exponent) / 20.0);
        c.los = true;
        clusters.push_back(c);
    }

    int n_nlos;
    if (p.nlos_clusters_max <= 0) {
        n_nlos = 0;
    } else if (p.static_geometry) {
        const double u = cell_field01(p.rng_seed, kSaltClusterCount ^ position_key(ap), user.x, user.y,
                                      p.geometry_lattice_m);
        n_nlos = p.nlos_clusters_min
            + static_cast<int>(u * static_cast<double>(p.nlos_clusters_max - p.nlos_clusters_min + 1));
        n_nlos = std::min(n_nlos, p.nlos_clusters_max);
    } else {
        n_nlos = p.nlos_clusters_min
            + static_cast<int>(rng.uniform_int(
                static_cast<std::uint64_t>(p.nlos_clusters_max - p.nlos_clusters_min + 1)));
    }

    for (int k = 0; k < n_nlos; ++k) {
        ClusterSpec c;
        double path_length;
        if (p.static_geometry) {
            const Vec3 v = scatter_point(p, user, k);
            const Vec3 rel = v - ap;
            const double leg_in = std::max(rel.norm(), kMinDistance);
            const double leg_out = std::max(distance(v, user), kMinDistance);
            path_length = leg_in + leg_out;
            c.center = angles_of_direction(normalized(rel));
        } else {
            path_length = d;
            c.center = {rng.uniform(-kPi, kPi), rng.uniform(-kPi / 2.0, 0.0)};
        }
        const double pl = path_loss_db(path_length, p.pathloss_intercept_db, p.nlos_pathloss_exponent)
            + p.nlos_extra_loss_db + p.cluster_decay_db * static_cast<double>(k);
        c.amplitude = std::pow(10.0, -pl / 20.0);
        clusters.push_back(c);
    }
    return clusters;
}

CVec synthesize(std::span<const PathComponent> paths, int num_subpaths, const ArrayGeometry& geom)
{
    CVec h(static_cast<std::size_t>(geom.elements()), {0.0, 0.0});
    for (const auto& path : paths) {
        const Vec3 world_dir = direction_of_angles({path.azimuth, path.elevation});
        const Angles local = local_angles(world_to_local(geom.orientation, world_dir));
        const CVec a = array_response(local.azimuth, local.elevation, geom);
        for (std::size_t m = 0; m < h.size(); ++m)
            h[m] += path.gain * a[m];
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(num_subpaths));
    for (auto& v : h)
        v *= scale;
    return h;
}

} // namespace

double path_loss_db(double distance_m, double intercept_db, double exponent)
{
    if (distance_m < kMinDistance)
        throw std::invalid_argument("path_loss_db: degenerate geometry, distance below 0.1 m");
    return intercept_db + 10.0 * exponent * std::log10(distance_m);
}

double path_loss_db(double distance_m, const ChannelParams& params)
{
    return path_loss_db(distance_m, params.pathloss_intercept_db, params.pathloss_exponent);
}

bool los_available(const Vec3& ap_pos, const Vec3& user_pos, const ChannelParams& params, Rng& rng)
{
    if (params.los_decay_distance_m <= 0.0)
        return true;
    const double d = distance(ap_pos, user_pos);
    const double p_blocked = std::min(1.0, d / params.los_decay_distance_m);
    if (p_blocked >= 1.0)
        return false;
    const double u = params.static_geometry
        ? cell_field01(params.rng_seed, kSaltBlockage ^ position_key(ap_pos), user_pos.x, user_pos.y,
                       params.geometry_lattice_m)
        : rng.uniform01();
    return u >= p_blocked;
}

ChannelRealization generate_channel(const Vec3& ap_pos, const Vec3& user_pos,
                                    const ChannelParams& params, const ArrayGeometry& geom, Rng& rng)
{
    const double d = distance(ap_pos, user_pos);
    if (d < kMinDistance)
        throw std::invalid_argument("generate_channel: degenerate geometry, AP and user closer than 0.1 m");
    if (params.num_subpaths < 1)
        throw std::invalid_argument("generate_channel: num_subpaths must be >= 1");

    ChannelRealization out;
    out.ap_position = ap_pos;
    out.user_position = user_pos;
    out.distance = d;
    out.los_present = params.nlos_clusters_max <= 0 ? true : los_available(ap_pos, user_pos, params, rng);

    const auto clusters = draw_clusters(ap_pos, user_pos, params, out.los_present, rng);
    const double spread = deg_to_rad(params.angular_spread_deg);

    out.paths.reserve(clusters.size() * static_cast<std::size_t>(params.num_subpaths));
    for (std::size_t k = 0; k < clusters.size(); ++k) {
        const auto& cluster = clusters[k];
        for (int q = 0; q < params.num_subpaths; ++q) {
            // The direct ray is specular; angular spread models the diffuse
            // scattering of the NLOS clusters.
            double daz = 0.0, del = 0.0;
            if (!cluster.los) {
                daz = rng.laplacian(spread);
                del = rng.laplacian(spread);
            }
            const Angles dir = fold_angles(cluster.center.azimuth + daz, cluster.center.elevation + del);
            const double phase = rng.uniform(0.0, 2.0 * kPi);
            std::complex<double> fading{1.0, 0.0};
            if (params.rayleigh_fading) {
                const double re = rng.normal();
                const double im = rng.normal();
                fading = {re / std::sqrt(2.0), im / std::sqrt(2.0)};
            }
            PathComponent path;
            path.cluster = static_cast<int>(k);
            path.path = q;
            path.gain = cluster.amplitude * std::polar(1.0, phase) * fading;
            path.azimuth = dir.azimuth;
            path.elevation = dir.elevation;
            path.los = cluster.los;
            out.paths.push_back(path);
        }
    }

    out.h = synthesize(out.paths, params.num_subpaths, geom);
    return out;
}

CVec reconstruct_channel(const ChannelRealization& realization, const ChannelParams& params,
                         const ArrayGeometry& geom)
{
    return synthesize(realization.paths, params.num_subpaths, geom);
}

std::string channels_to_jsonl(std::span<const ChannelRealization> channels)
{
    std::ostringstream os;
    for (const auto& ch : channels) {
        nlohmann::json j;
        j["ap"] = {ch.ap_position.x, ch.ap_position.y, ch.ap_position.z};
        j["user"] = {ch.user_position.x, ch.user_position.y, ch.user_position.z};
        auto& h = j["h"] = nlohmann::json::array();
        for (const auto& v : ch.h)
            h.push_back({v.real(), v.imag()});
        os << j.dump() << '\n';
    }
    return os.str();
}

void export_channels(const std::string& path, std::span<const ChannelRealization> channels)
{
    std::ofstream out(path);
    if (!out)
        throw IoError("export_channels: cannot open '" + path + "' for writing");
    out << channels_to_jsonl(channels);
    if (!out)
        throw IoError("export_channels: write to '" + path + "' failed");
}

std::vector<ChannelRealization> channels_from_jsonl(const std::string& text, int expected_m)
{
    std::vector<ChannelRealization> out;
    std::istringstream is(text);
    std::string line;
    std::size_t record = 0;
    while (std::getline(is, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        ++record;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw ValidationError("channel dump record " + std::to_string(record) + ": parse error");
        try {
            ChannelRealization ch;
            const auto& ap = j.at("ap");
            const auto& user = j.at("user");
            if (!ap.is_array() || ap.size() != 3 || !user.is_array() || user.size() != 3)
                throw ValidationError("channel dump record " + std::to_string(record)
                                      + ": 'ap' and 'user' must be [x,y,z]");
            ch.ap_position = {ap[0].get<double>(), ap[1].get<double>(), ap[2].get<double>()};
            ch.user_position = {user[0].get<double>(), user[1].get<double>(), user[2].get<double>()};
            ch.distance = distance(ch.ap_position, ch.user_position);
            const auto& h = j.at("h");
            if (!h.is_array())
                throw ValidationError("channel dump record " + std::to_string(record) + ": 'h' must be an array");
            if (static_cast<int>(h.size()) != expected_m)
                throw ValidationError("channel dump record " + std::to_string(record) + ": dimension error, h has "
                                      + std::to_string(h.size()) + " entries, expected "
                                      + std::to_string(expected_m));
            ch.h.reserve(h.size());
            for (const auto& pair : h) {
                if (!pair.is_array() || pair.size() != 2)
                    throw ValidationError("channel dump record " + std::to_string(record)
                                          + ": each h entry must be [re, im]");
                ch.h.emplace_back(pair[0].get<double>(), pair[1].get<double>());
            }
            out.push_back(std::move(ch));
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError("channel dump record " + std::to_string(record) + ": " + e.what());
        }
    }
    return out;
}

std::vector<ChannelRealization> import_channels(const std::string& path, int expected_m)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("import_channels: cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return channels_from_jsonl(buffer.str(), expected_m);
}

} // namespace wakebeam
