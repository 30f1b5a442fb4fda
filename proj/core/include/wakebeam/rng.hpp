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
#include <cstdint>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

namespace wakebeam {

/// splitmix64 step; used for seed derivation and position hashing.
inline std::uint64_t splitmix64(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministically combines a seed with a salt into a new seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt)
{
    std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ULL + (salt << 6) + (salt >> 2));
    std::uint64_t a = splitmix64(s);
    s ^= salt;
    return a ^ splitmix64(s);
}

/// Random stream wrapper around std::mt19937_64.
///
/// The distribution transforms are hand-rolled so that a given seed yields
/// the same sequence on every standard library (std:: distributions are not
/// specified bit-exactly). State round-trips through text for checkpoints.
class Rng {
public:
    Rng() : engine_(0x2545f4914f6cdd1dULL) {}
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform integer in [0, n). n must be >= 1.
    std::uint64_t uniform_int(std::uint64_t n)
    {
        // Rejection sampling over the top multiple of n avoids modulo bias.
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t v = engine_();
        while (v >= limit)
            v = engine_();
        return v % n;
    }

    /// Standard normal via the polar method (no trig, platform-stable).
    double normal()
    {
        for (;;) {
            const double u = 2.0 * uniform01() - 1.0;
            const double v = 2.0 * uniform01() - 1.0;
            const double s = u * u + v * v;
            if (s > 0.0 && s < 1.0)
                return u * std::sqrt(-2.0 * std::log(s) / s);
        }
    }

    /// Zero-mean Laplacian with standard deviation sigma.
    double laplacian(double sigma)
    {
        const double b = sigma / std::sqrt(2.0);
        const double u = uniform01() - 0.5;
        return (u < 0.0 ? b : -b) * std::log(1.0 - 2.0 * std::abs(u));
    }

    std::uint64_t raw() { return engine_(); }

    std::string serialize() const
    {
        std::ostringstream os;
        os << engine_;
        return os.str();
    }

    static Rng deserialize(const std::string& text)
    {
        Rng r;
        std::istringstream is(text);
        is >> r.engine_;
        if (!is)
            throw std::invalid_argument("Rng::deserialize: malformed engine state");
        return r;
    }

    friend bool operator==(const Rng& a, const Rng& b) { return a.engine_ == b.engine_; }

private:
    std::mt19937_64 engine_;
};

} // namespace wakebeam
