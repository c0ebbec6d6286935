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

#include "prmimo/pilot_estimation.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "prmimo/errors.hpp"
#include "prmimo/rng.hpp"

namespace prmimo
{
    namespace
    {
        constexpr double rcond_floor = 1e-14;

        // Pairwise merge keeps the reduction independent of chunking order.
        arma::cx_mat pairwise_sum(std::vector<arma::cx_mat> &terms)
        {
            while (terms.size() > 1)
            {
                std::vector<arma::cx_mat> next;
                next.reserve((terms.size() + 1) / 2);
                for (std::size_t i = 0; i + 1 < terms.size(); i += 2)
                    next.push_back(terms[i] + terms[i + 1]);
                if (terms.size() % 2 == 1)
                    next.push_back(terms.back());
                terms.swap(next);
            }
            return terms.front();
        }
    }

    void GroupMap::validate() const
    {
        if (mode_of.n_elem != num_tx)
            throw std::invalid_argument("GroupMap: assignment length must equal antenna count");
        if (num_tx >= num_modes)
        {
            arma::uvec seen(num_modes, arma::fill::zeros);
            for (arma::uword m = 0; m < num_tx; ++m)
            {
                if (mode_of(m) >= num_modes)
                    throw std::invalid_argument("GroupMap: mode index out of range");
                seen(mode_of(m)) = 1;
            }
            if (arma::accu(seen) != num_modes)
                throw std::invalid_argument("GroupMap: some mode has no antenna");
        }
    }

    GroupMap partition_antennas(arma::uword num_tx, arma::uword num_modes)
    {
        if (num_tx < 1 || num_modes < 1)
            throw std::invalid_argument("partition_antennas: counts must be >= 1");
        if (num_tx < num_modes)
            throw std::invalid_argument("partition_antennas: need at least one antenna per mode");

        GroupMap map;
        map.num_tx = num_tx;
        map.num_modes = num_modes;
        map.mode_of.set_size(num_tx);

        const arma::uword base = num_tx / num_modes;
        arma::uword idx = 0;
        for (arma::uword g = 0; g + 1 < num_modes; ++g)
            for (arma::uword k = 0; k < base; ++k)
                map.mode_of(idx++) = g;
        while (idx < num_tx) // last group absorbs the remainder
            map.mode_of(idx++) = num_modes - 1;
        return map;
    }

    arma::cx_mat composite_channel(const ChannelTensor &tensor, const GroupMap &map)
    {
        map.validate();
        if (tensor.slices.n_cols != map.num_tx || tensor.num_modes() != map.num_modes)
            throw std::invalid_argument("composite_channel: tensor does not match group map");

        arma::cx_mat h(tensor.slices.n_rows, tensor.slices.n_cols);
        for (arma::uword m = 0; m < map.num_tx; ++m)
            h.col(m) = tensor.slices.slice(map.mode_of(m)).col(m);
        return h;
    }

    arma::cx_mat make_pilots(arma::uword num_tx)
    {
        if (num_tx < 1)
            throw std::invalid_argument("make_pilots: antenna count must be >= 1");

        const double scale = 1.0 / std::sqrt(static_cast<double>(num_tx));
        const double step = -2.0 * arma::datum::pi / static_cast<double>(num_tx);
        arma::cx_mat x(num_tx, num_tx);
        for (arma::uword a = 0; a < num_tx; ++a)
            for (arma::uword b = 0; b < num_tx; ++b)
                x(a, b) = scale * std::polar(1.0, step * static_cast<double>(a * b));
        return x;
    }

    double noise_variance(double snr_db)
    {
        if (std::isinf(snr_db) && snr_db > 0.0)
            return 0.0;
        return std::pow(10.0, -snr_db / 10.0);
    }

    arma::cx_mat transmit(const arma::cx_mat &channel, const arma::cx_mat &pilots,
                          double snr_db, std::uint64_t noise_seed)
    {
        if (channel.n_cols != pilots.n_rows)
            throw std::invalid_argument("transmit: channel and pilot dimensions do not agree");

        arma::cx_mat rx = channel * pilots;
        const double sigma2 = noise_variance(snr_db);
        if (sigma2 > 0.0)
        {
            const double sigma = std::sqrt(sigma2);
            Rng rng(noise_seed);
            // Column-major fill, same order as storage.
            for (arma::uword c = 0; c < rx.n_cols; ++c)
                for (arma::uword r = 0; r < rx.n_rows; ++r)
                    rx(r, c) += sigma * rng.cgaussian();
        }
        return rx;
    }

    ChannelCovariance estimate_covariance(const std::vector<arma::cx_mat> &samples)
    {
        if (samples.empty())
            throw std::invalid_argument("estimate_covariance: need at least one sample");

        const arma::uword m = samples.front().n_cols;
        std::vector<arma::cx_mat> terms;
        terms.reserve(samples.size());
        for (const auto &h : samples)
        {
            if (h.n_cols != m)
                throw std::invalid_argument("estimate_covariance: inconsistent sample dimensions");
            terms.push_back(h.t() * h);
        }

        arma::cx_mat r = pairwise_sum(terms) / static_cast<double>(samples.size());
        r = 0.5 * (r + r.t());

        ChannelCovariance cov;
        cov.r = std::move(r);
        cov.sample_count = samples.size();
        return cov;
    }

    arma::cx_mat lmmse_estimate(const arma::cx_mat &rx, const arma::cx_mat &pilots,
                                const ChannelCovariance &covariance, double noise_var,
                                arma::uword num_rx)
    {
        const arma::uword m = pilots.n_rows;
        if (pilots.n_cols != m || covariance.r.n_rows != m || covariance.r.n_cols != m)
            throw std::invalid_argument("lmmse_estimate: pilot and covariance dimensions do not agree");
        if (rx.n_rows != num_rx || rx.n_cols != m)
            throw std::invalid_argument("lmmse_estimate: received matrix has wrong shape");
        if (noise_var < 0.0)
            throw std::invalid_argument("lmmse_estimate: noise variance must be >= 0");

        const arma::cx_mat xh_r = pilots.t() * covariance.r;
        arma::cx_mat gram = xh_r * pilots;
        gram.diag() += noise_var * static_cast<double>(num_rx);
        gram = 0.5 * (gram + gram.t());

        const double rc = arma::rcond(gram);
        if (!(rc > rcond_floor))
        {
            std::ostringstream msg;
            msg << "lmmse_estimate: system is numerically singular, rcond = " << rc;
            throw numerical_error(msg.str());
        }

        // Solve gram * Z = X^H R instead of forming the inverse.
        arma::cx_mat z;
        if (!arma::solve(z, gram, xh_r, arma::solve_opts::likely_sympd))
            throw numerical_error("lmmse_estimate: Hermitian solve failed");
        return rx * z;
    }

    arma::cx_mat ls_estimate(const arma::cx_mat &rx, const arma::cx_mat &pilots)
    {
        const arma::uword m = pilots.n_rows;
        if (pilots.n_cols != m)
            throw std::invalid_argument("ls_estimate: pilot matrix must be square");
        if (rx.n_cols != m)
            throw std::invalid_argument("ls_estimate: received matrix has wrong shape");

        const double rc = arma::rcond(pilots);
        if (!(rc > rcond_floor))
        {
            std::ostringstream msg;
            msg << "ls_estimate: pilot matrix is numerically singular, rcond = " << rc;
            throw numerical_error(msg.str());
        }

        // Y * X^{-1} via a transposed solve.
        arma::cx_mat z;
        if (!arma::solve(z, pilots.st(), rx.st()))
            throw numerical_error("ls_estimate: solve failed");
        return z.st();
    }
}
