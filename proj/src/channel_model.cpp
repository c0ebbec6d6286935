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

#include "prmimo/channel_model.hpp"

#include <cmath>
#include <stdexcept>

#include "prmimo/rng.hpp"

namespace prmimo
{
    namespace
    {
        constexpr double two_pi = 6.283185307179586476925286766559;
        constexpr double pi = 3.1415926535897932384626433832795;

        // Normalization grid for the pattern-gain power, 64x64 cell midpoints
        // over [0, 2*pi] x [0, pi].
        constexpr arma::uword norm_grid = 64;

        double wrap_azimuth(double a)
        {
            a = std::fmod(a, two_pi);
            if (a < 0.0)
                a += two_pi;
            return a;
        }

        double clamp_elevation(double e)
        {
            if (e < 0.0)
                return 0.0;
            if (e > pi)
                return pi;
            return e;
        }
    }

    ArrayGeometry ArrayGeometry::make(arma::uword num_tx, arma::uword num_rx,
                                      double carrier_hz, double spacing_m)
    {
        if (num_tx < 1 || num_rx < 1)
            throw std::invalid_argument("ArrayGeometry: antenna counts must be >= 1");
        if (carrier_hz <= 0.0)
            throw std::invalid_argument("ArrayGeometry: carrier frequency must be positive");
        if (spacing_m <= 0.0)
            spacing_m = speed_of_light / (2.0 * carrier_hz); // half wavelength

        ArrayGeometry g;
        g.num_tx = num_tx;
        g.num_rx = num_rx;
        g.spacing_m = spacing_m;
        g.carrier_hz = carrier_hz;
        g.chi = two_pi * spacing_m * carrier_hz / speed_of_light;
        return g;
    }

    void ArrayGeometry::validate() const
    {
        if (num_tx < 1 || num_rx < 1)
            throw std::invalid_argument("ArrayGeometry: antenna counts must be >= 1");
        if (spacing_m <= 0.0 || carrier_hz <= 0.0)
            throw std::invalid_argument("ArrayGeometry: spacing and carrier must be positive");
        const double expected = two_pi * spacing_m * carrier_hz / speed_of_light;
        if (std::abs(chi - expected) > 1e-12 * std::abs(expected))
            throw std::invalid_argument("ArrayGeometry: chi inconsistent with spacing and carrier");
    }

    void PathSet::validate() const
    {
        const arma::uword rows = num_clusters, cols = rays_per_cluster;
        if (gain.n_rows != rows || gain.n_cols != cols ||
            azimuth.n_rows != rows || azimuth.n_cols != cols ||
            elevation.n_rows != rows || elevation.n_cols != cols)
            throw std::invalid_argument("PathSet: array shapes must be num_clusters x rays_per_cluster");
        if (azimuth.min() < 0.0 || azimuth.max() > two_pi)
            throw std::invalid_argument("PathSet: azimuth out of [0, 2*pi]");
        if (elevation.min() < 0.0 || elevation.max() > pi)
            throw std::invalid_argument("PathSet: elevation out of [0, pi]");
    }

    PathSet sample_paths(std::uint64_t seed, arma::uword num_clusters,
                         arma::uword rays_per_cluster, double angular_spread_rad)
    {
        if (num_clusters < 1 || rays_per_cluster < 1)
            throw std::invalid_argument("sample_paths: cluster and ray counts must be >= 1");
        if (angular_spread_rad < 0.0)
            throw std::invalid_argument("sample_paths: angular spread must be >= 0");

        PathSet p;
        p.num_clusters = num_clusters;
        p.rays_per_cluster = rays_per_cluster;
        p.gain.set_size(num_clusters, rays_per_cluster);
        p.azimuth.set_size(num_clusters, rays_per_cluster);
        p.elevation.set_size(num_clusters, rays_per_cluster);

        Rng rng(seed);
        for (arma::uword c = 0; c < num_clusters; ++c)
        {
            const double center_az = rng.uniform(0.0, two_pi);
            const double center_el = rng.uniform(0.0, pi);
            for (arma::uword r = 0; r < rays_per_cluster; ++r)
            {
                const double off_az = rng.uniform(-angular_spread_rad, angular_spread_rad);
                const double off_el = rng.uniform(-angular_spread_rad, angular_spread_rad);
                p.azimuth(c, r) = wrap_azimuth(center_az + off_az);
                p.elevation(c, r) = clamp_elevation(center_el + off_el);
                p.gain(c, r) = rng.cgaussian();
            }
        }
        return p;
    }

    PatternGainModel::PatternGainModel(arma::uword num_modes, arma::uword order_azimuth,
                                       arma::uword order_elevation, std::uint64_t seed,
                                       double diversity)
        : seed_(seed)
    {
        if (num_modes < 1 || order_azimuth < 1 || order_elevation < 1)
            throw std::invalid_argument("PatternGainModel: mode count and orders must be >= 1");
        if (diversity < 0.0)
            throw std::invalid_argument("PatternGainModel: diversity must be >= 0");

        coefficients_.set_size(order_azimuth, order_elevation, num_modes);
        const double scale = 1.0 / std::sqrt(static_cast<double>(order_azimuth * order_elevation));

        arma::cx_mat base(order_azimuth, order_elevation);
        Rng base_rng(split_seed(seed, 0xBA5E));
        for (arma::uword u = 0; u < order_azimuth; ++u)
            for (arma::uword v = 0; v < order_elevation; ++v)
                base(u, v) = scale * base_rng.cgaussian();

        for (arma::uword p = 0; p < num_modes; ++p)
        {
            Rng rng(split_seed(seed, p));
            for (arma::uword u = 0; u < order_azimuth; ++u)
                for (arma::uword v = 0; v < order_elevation; ++v)
                    coefficients_(u, v, p) = base(u, v) + diversity * scale * rng.cgaussian();

            // Scale to exact unit average power on the normalization grid.
            const double avg = grid_average_power(p);
            coefficients_.slice(p) /= std::sqrt(avg);
        }
    }

    PatternGainModel PatternGainModel::from_coefficients(arma::cx_cube coefficients)
    {
        if (coefficients.n_slices < 1 || coefficients.n_rows < 1 || coefficients.n_cols < 1)
            throw std::invalid_argument("PatternGainModel: empty coefficient cube");
        PatternGainModel m;
        m.coefficients_ = std::move(coefficients);
        return m;
    }

    std::complex<double> PatternGainModel::gain(arma::uword mode, double azimuth, double elevation) const
    {
        if (mode >= num_modes())
            throw std::invalid_argument("PatternGainModel: mode index out of range");

        // Horner-style sweep over e^{j(u*theta + v*phi)} without per-term
        // trigonometric calls.
        const std::complex<double> step_az = std::polar(1.0, azimuth);
        const std::complex<double> step_el = std::polar(1.0, elevation);
        std::complex<double> sum = 0.0;
        std::complex<double> phase_az = 1.0;
        for (arma::uword u = 0; u < coefficients_.n_rows; ++u)
        {
            std::complex<double> phase = phase_az;
            for (arma::uword v = 0; v < coefficients_.n_cols; ++v)
            {
                sum += coefficients_(u, v, mode) * phase;
                phase *= step_el;
            }
            phase_az *= step_az;
        }
        return sum;
    }

    double PatternGainModel::grid_average_power(arma::uword mode) const
    {
        if (mode >= num_modes())
            throw std::invalid_argument("PatternGainModel: mode index out of range");
        double acc = 0.0;
        for (arma::uword i = 0; i < norm_grid; ++i)
        {
            const double theta = two_pi * (static_cast<double>(i) + 0.5) / norm_grid;
            for (arma::uword j = 0; j < norm_grid; ++j)
            {
                const double phi = pi * (static_cast<double>(j) + 0.5) / norm_grid;
                acc += std::norm(gain(mode, theta, phi));
            }
        }
        return acc / static_cast<double>(norm_grid * norm_grid);
    }

    arma::cx_vec steering_vector(const ArrayGeometry &geometry, double azimuth, arma::uword length)
    {
        if (length < 1)
            throw std::invalid_argument("steering_vector: length must be >= 1");
        if (!std::isfinite(azimuth))
            throw std::invalid_argument("steering_vector: azimuth must be finite");

        arma::cx_vec a(length);
        const double phase_step = -geometry.chi * std::sin(azimuth);
        for (arma::uword k = 0; k < length; ++k)
            a(k) = std::polar(1.0, phase_step * static_cast<double>(k));
        return a;
    }

    arma::cx_mat generate_channel(const ArrayGeometry &geometry, const PathSet &paths,
                                  const PatternGainModel &gains, arma::uword mode)
    {
        paths.validate();
        if (mode >= gains.num_modes())
            throw std::invalid_argument("generate_channel: mode index out of range");

        const arma::uword n_rays = paths.num_rays();
        arma::cx_mat rx_steer(geometry.num_rx, n_rays);
        arma::cx_mat tx_steer(geometry.num_tx, n_rays);
        arma::cx_rowvec weight(n_rays);

        arma::uword r = 0;
        for (arma::uword c = 0; c < paths.num_clusters; ++c)
            for (arma::uword j = 0; j < paths.rays_per_cluster; ++j, ++r)
            {
                const double az = paths.azimuth(c, j);
                rx_steer.col(r) = steering_vector(geometry, az, geometry.num_rx);
                tx_steer.col(r) = steering_vector(geometry, az, geometry.num_tx);
                weight(r) = paths.gain(c, j) * gains.gain(mode, az, paths.elevation(c, j));
            }

        const double scale = 1.0 / std::sqrt(static_cast<double>(geometry.num_tx * geometry.num_rx));
        return scale * ((rx_steer.each_row() % weight) * tx_steer.t());
    }

    ChannelTensor generate_all_modes(const ArrayGeometry &geometry, const PathSet &paths,
                                     const PatternGainModel &gains)
    {
        ChannelTensor t;
        t.geometry = geometry;
        t.slices.set_size(geometry.num_rx, geometry.num_tx, gains.num_modes());
        for (arma::uword p = 0; p < gains.num_modes(); ++p)
            t.slices.slice(p) = generate_channel(geometry, paths, gains, p);
        return t;
    }
}
