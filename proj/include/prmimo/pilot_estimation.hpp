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

#ifndef PRMIMO_PILOT_ESTIMATION_HPP
#define PRMIMO_PILOT_ESTIMATION_HPP

#include <armadillo>
#include <cstdint>
#include <vector>

#include "prmimo/channel_model.hpp"

namespace prmimo
{
    // Assignment of transmit antennas to radiation modes during the pilot
    // phase. Groups are contiguous: the first num_modes-1 groups have
    // floor(M/P) antennas, the last absorbs the remainder. Group g runs
    // mode g (identity assignment), 0-based.
    struct GroupMap
    {
        arma::uword num_tx = 0;
        arma::uword num_modes = 0;
        arma::uvec mode_of; // length num_tx, values in [0, num_modes)

        void validate() const;
    };

    GroupMap partition_antennas(arma::uword num_tx, arma::uword num_modes);

    // Mixed-mode channel seen during pilot transmission: column m comes from
    // the mode slice assigned to antenna m.
    arma::cx_mat composite_channel(const ChannelTensor &tensor, const GroupMap &map);

    // Unitary DFT pilot matrix, X * X^H = I.
    arma::cx_mat make_pilots(arma::uword num_tx);

    // sigma^2 = 10^(-snr_db/10) under unit-power symbols; +inf gives 0.
    double noise_variance(double snr_db);

    // Y = H*X + W with i.i.d. CN(0, sigma^2) noise, deterministic per seed.
    arma::cx_mat transmit(const arma::cx_mat &channel, const arma::cx_mat &pilots,
                          double snr_db, std::uint64_t noise_seed);

    struct ChannelCovariance
    {
        arma::cx_mat r; // M x M, Hermitian PSD, E[H^H H]
        arma::uword sample_count = 0;
    };

    // Sample average of H^H * H, Hermitian-symmetrized. Pairwise reduction so
    // the result does not depend on how the sample list is chunked.
    ChannelCovariance estimate_covariance(const std::vector<arma::cx_mat> &samples);

    // H_es = Y * (X^H R X + sigma^2 N I)^{-1} * X^H R via a Hermitian solve.
    // Throws numerical_error with the condition estimate when the system is
    // singular beyond tolerance.
    arma::cx_mat lmmse_estimate(const arma::cx_mat &rx, const arma::cx_mat &pilots,
                                const ChannelCovariance &covariance, double noise_var,
                                arma::uword num_rx);

    // H_ls = Y * X^{-1}; least-squares baseline.
    arma::cx_mat ls_estimate(const arma::cx_mat &rx, const arma::cx_mat &pilots);
}

#endif
