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

#ifndef PRMIMO_DATASET_HPP
#define PRMIMO_DATASET_HPP

#include <armadillo>
#include <cstdint>
#include <string>

#include "prmimo/channel_model.hpp"
#include "prmimo/experiment.hpp"
#include "prmimo/pilot_estimation.hpp"

namespace prmimo
{
    inline constexpr std::uint32_t layout_version = 1;

    // Fixed vectorization of the estimated and extrapolated channels.
    //
    // The input vector is vec(H_es), column-major, so entry (m * num_rx + n)
    // is the channel from transmit antenna m to receive antenna n.
    //
    // The target vector has num_modes-1 blocks of num_rx*num_tx entries.
    // Block k, column m holds the channel of antenna m's k-th non-native
    // mode, with non-native modes enumerated in ascending mode order.
    struct VectorLayout
    {
        arma::uword num_rx = 0;
        GroupMap group_map;

        static VectorLayout make(arma::uword num_rx, GroupMap group_map);

        arma::uword num_tx() const { return group_map.num_tx; }
        arma::uword num_modes() const { return group_map.num_modes; }
        arma::uword input_length() const { return num_rx * num_tx(); }
        arma::uword target_length() const { return num_rx * num_tx() * (num_modes() - 1); }

        // Ascending list of the modes antenna m does not transmit with.
        arma::uvec non_native_modes(arma::uword antenna) const;

        arma::cx_vec vectorize_composite(const arma::cx_mat &h_es) const;
        arma::cx_vec vectorize_targets(const arma::cx_cube &all_modes) const;

        // Inverse of the two vectorizations: rebuilds the full
        // num_rx x num_tx x num_modes tensor, covering every entry once.
        arma::cx_cube assemble(const arma::cx_vec &h_es, const arma::cx_vec &h_pre) const;
    };

    struct Sample
    {
        arma::cx_vec input;  // vec(H_es), estimated at the requested SNR
        arma::cx_vec target; // noiseless channels of non-native modes
        std::uint64_t seed = 0;
    };

    // Immutable per-configuration state shared by every sample: geometry,
    // pattern gains, grouping, pilots and the calibrated channel covariance.
    struct ExperimentContext
    {
        ExperimentConfig config;
        ArrayGeometry geometry;
        PatternGainModel gains;
        GroupMap groups;
        arma::cx_mat pilots;
        ChannelCovariance covariance;
        VectorLayout layout;

        static ExperimentContext prepare(const ExperimentConfig &config);
    };

    // Draws a fresh propagation state from the sample seed, runs the grouped
    // pilot round at snr_db through the LMMSE estimator, and vectorizes.
    // Targets always come from the noiseless tensor.
    Sample build_sample(const ExperimentContext &ctx, std::uint64_t seed, double snr_db);

    struct Dataset
    {
        arma::uword num_tx = 0, num_rx = 0, num_modes = 0;
        std::uint32_t test_fraction_num = 0, test_fraction_den = 1;
        double train_snr_db = 0.0;
        std::uint64_t master_seed = 0;
        std::uint32_t layout = layout_version;

        arma::cx_mat inputs;  // input_length x sample_count
        arma::cx_mat targets; // target_length x sample_count
        arma::uvec train_indices, test_indices;

        arma::uword sample_count() const { return inputs.n_cols; }
    };

    // Builds sample_count samples at the training SNR with per-sample seeds
    // and a seeded, disjoint, exhaustive train/test split.
    Dataset build_dataset(const ExperimentContext &ctx);

    // "PRNC" file: header, sample_count records of [h_es | h_pre] as
    // little-endian f32 (re, im) pairs, then a trailing FNV-1a checksum of
    // everything before it.
    void write_dataset(const Dataset &dataset, const std::string &path);
    Dataset read_dataset(const std::string &path);
}

#endif
