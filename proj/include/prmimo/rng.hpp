// SPDX-License-Identifier: Apache-2.0
//
// prmimo: channel estimation and extrapolation for pattern-reconfigurable MIMO arrays
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
// ------------------------------------------------------------------------

#ifndef PRMIMO_RNG_HPP
#define PRMIMO_RNG_HPP

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>

namespace prmimo
{
    // SplitMix64 mixing step. Used both to expand seeds into generator state
    // and to derive independent child streams from a master seed.
    inline std::uint64_t mix64(std::uint64_t z)
    {
        z += 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Deterministic child-seed derivation. Every consumer of randomness owns a
    // (seed, stream) pair, so results do not depend on evaluation order.
    inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream)
    {
        return mix64(seed ^ mix64(stream + 0x632BE59BD9B4E019ULL));
    }

    // Stream ids of the seed hierarchy. A master seed plus these tags covers
    // all randomness in an experiment.
    namespace stream
    {
        inline constexpr std::uint64_t gain_model = 1;  // pattern-gain Fourier coefficients
        inline constexpr std::uint64_t calibration = 2; // covariance calibration draws
        inline constexpr std::uint64_t split = 3;       // train/test permutation
        inline constexpr std::uint64_t net_init = 4;    // network weight init
        inline constexpr std::uint64_t shuffle = 5;     // epoch shuffling
        inline constexpr std::uint64_t sample_base = 16; // per-sample seeds start here
        inline constexpr std::uint64_t paths = 0;       // within a sample: path geometry
        inline constexpr std::uint64_t noise = 1;       // within a sample: pilot noise
    }

    inline std::uint64_t sample_seed(std::uint64_t master_seed, std::uint64_t sample_index)
    {
        return split_seed(master_seed, stream::sample_base + sample_index);
    }

    // xoshiro256** with SplitMix64 seeding. Self-contained so that streams are
    // bit-identical across compilers and standard libraries.
    class Rng
    {
    public:
        explicit Rng(std::uint64_t seed)
        {
            std::uint64_t s = seed;
            for (auto &word : state_)
            {
                s = mix64(s);
                word = s;
            }
        }

        std::uint64_t next_u64()
        {
            const std::uint64_t result = rotl(state_[1] * 5ULL, 7) * 9ULL;
            const std::uint64_t t = state_[1] << 17;
            state_[2] ^= state_[0];
            state_[3] ^= state_[1];
            state_[1] ^= state_[2];
            state_[0] ^= state_[3];
            state_[2] ^= t;
            state_[3] = rotl(state_[3], 45);
            return result;
        }

        // Uniform on [0, 1), 53-bit resolution.
        double uniform()
        {
            return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
        }

        double uniform(double lo, double hi)
        {
            return lo + (hi - lo) * uniform();
        }

        // Standard normal via Box-Muller.
        double gaussian()
        {
            const double u1 = 1.0 - uniform(); // (0, 1]
            const double u2 = uniform();
            return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
        }

        // Circularly-symmetric complex Gaussian with unit variance,
        // i.e. real and imaginary parts are independent N(0, 1/2).
        std::complex<double> cgaussian()
        {
            const double u1 = 1.0 - uniform();
            const double u2 = uniform();
            const double r = std::sqrt(-std::log(u1));
            return {r * std::cos(two_pi * u2), r * std::sin(two_pi * u2)};
        }

    private:
        static constexpr double two_pi = 6.283185307179586476925286766559;

        static std::uint64_t rotl(std::uint64_t x, int k)
        {
            return (x << k) | (x >> (64 - k));
        }

        std::array<std::uint64_t, 4> state_{};
    };
}

#endif
