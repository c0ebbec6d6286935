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

#ifndef PRMIMO_CHANNEL_MODEL_HPP
#define PRMIMO_CHANNEL_MODEL_HPP

#include <armadillo>
#include <complex>
#include <cstdint>

namespace prmimo
{
    inline constexpr double speed_of_light = 299792458.0;

    // Uniform linear arrays at both ends. "chi" is the phase constant
    // 2*pi*d*f/c of the steering vector and is derived, not set.
    struct ArrayGeometry
    {
        arma::uword num_tx = 0;  // transmit antennas (the reconfigurable side)
        arma::uword num_rx = 0;  // receive antennas (omnidirectional)
        double spacing_m = 0.0;  // element spacing d
        double carrier_hz = 0.0; // carrier frequency f
        double chi = 0.0;        // 2*pi*d*f/c

        // spacing_m <= 0 selects half-wavelength spacing (chi = pi).
        static ArrayGeometry make(arma::uword num_tx, arma::uword num_rx,
                                  double carrier_hz = 2.5e9, double spacing_m = 0.0);

        void validate() const;
    };

    // One multipath realization: clustered rays with complex gains and
    // azimuth/elevation departure angles.
    struct PathSet
    {
        arma::uword num_clusters = 0;
        arma::uword rays_per_cluster = 0;
        arma::cx_mat gain;  // num_clusters x rays_per_cluster, CN(0,1)
        arma::mat azimuth;  // radians, [0, 2*pi]
        arma::mat elevation; // radians, [0, pi]

        arma::uword num_rays() const { return num_clusters * rays_per_cluster; }
        void validate() const;
    };

    // Cluster centers are uniform over the full angular ranges; rays sit
    // within +-spread of their center. Azimuth wraps, elevation clamps.
    PathSet sample_paths(std::uint64_t seed, arma::uword num_clusters,
                         arma::uword rays_per_cluster, double angular_spread_rad);

    // Complex directional gain b_p(theta, phi) of each radiation mode,
    // modeled as a truncated 2-D Fourier series with seeded coefficients,
    // normalized to unit average power over a 64x64 angular grid.
    //
    // Modes of one antenna are correlated pattern states, not independent
    // draws: every mode is a shared base pattern plus a mode-specific
    // perturbation scaled by "diversity" (0 makes all modes identical,
    // large values decorrelate them).
    class PatternGainModel
    {
    public:
        static constexpr double default_diversity = 0.22;

        PatternGainModel() = default;
        PatternGainModel(arma::uword num_modes, arma::uword order_azimuth,
                         arma::uword order_elevation, std::uint64_t seed,
                         double diversity = default_diversity);

        // Takes coefficients as given (no normalization). Cube layout is
        // (azimuth order u, elevation order v, mode p).
        static PatternGainModel from_coefficients(arma::cx_cube coefficients);

        std::complex<double> gain(arma::uword mode, double azimuth, double elevation) const;

        arma::uword num_modes() const { return coefficients_.n_slices; }
        arma::uword order_azimuth() const { return coefficients_.n_rows; }
        arma::uword order_elevation() const { return coefficients_.n_cols; }
        std::uint64_t seed() const { return seed_; }
        const arma::cx_cube &coefficients() const { return coefficients_; }

        // Average of |b_p|^2 over the normalization grid, for checks.
        double grid_average_power(arma::uword mode) const;

    private:
        arma::cx_cube coefficients_; // (u, v, p)
        std::uint64_t seed_ = 0;
    };

    // True channels of every radiation mode for one propagation state.
    // Slice p of "slices" is the num_rx x num_tx channel of mode p.
    struct ChannelTensor
    {
        arma::cx_cube slices;
        ArrayGeometry geometry;

        arma::uword num_modes() const { return slices.n_slices; }
    };

    // Entry k is exp(-j * chi * k * sin(azimuth)); entry 0 is always 1.
    arma::cx_vec steering_vector(const ArrayGeometry &geometry, double azimuth, arma::uword length);

    // Sum of per-ray rank-one terms weighted by gain and mode pattern,
    // scaled by 1/sqrt(num_tx * num_rx).
    arma::cx_mat generate_channel(const ArrayGeometry &geometry, const PathSet &paths,
                                  const PatternGainModel &gains, arma::uword mode);

    ChannelTensor generate_all_modes(const ArrayGeometry &geometry, const PathSet &paths,
                                     const PatternGainModel &gains);
}

#endif
