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

#include <algorithm>
#include <cmath>

namespace wakebeam {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Vec3 operator*(double s, const Vec3& v) { return {s * v.x, s * v.y, s * v.z}; }
    friend bool operator==(const Vec3& a, const Vec3& b) = default;

    double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

inline double distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

inline Vec3 normalized(const Vec3& v)
{
    const double n = v.norm();
    return {v.x / n, v.y / n, v.z / n};
}

/// Azimuth/elevation pair in radians. Azimuth is measured in the horizontal
/// plane from +x toward +y; elevation from the horizontal plane, negative
/// downward (a user straight below a ceiling node sits at elevation -pi/2).
struct Angles {
    double azimuth = 0.0;
    double elevation = 0.0;
};

/// World-frame departure angles of the unit direction `e`.
inline Angles angles_of_direction(const Vec3& e)
{
    return {std::atan2(e.y, e.x), std::asin(std::clamp(e.z, -1.0, 1.0))};
}

inline Vec3 direction_of_angles(const Angles& a)
{
    const double c = std::cos(a.elevation);
    return {c * std::cos(a.azimuth), c * std::sin(a.azimuth), std::sin(a.elevation)};
}

constexpr double deg_to_rad(double deg) { return deg * 3.14159265358979323846 / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / 3.14159265358979323846; }

constexpr double kPi = 3.14159265358979323846;

} // namespace wakebeam
