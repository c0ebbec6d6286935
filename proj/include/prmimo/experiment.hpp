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

#ifndef PRMIMO_EXPERIMENT_HPP
#define PRMIMO_EXPERIMENT_HPP

#include <armadillo>
#include <cstdint>
#include <string>
#include <vector>

namespace prmimo
{
    // Full description of one run. Everything needed to regenerate data,
    // models and metrics flows from these fields plus the master seed.
    struct ExperimentConfig
    {
        // dimensions
        arma::uword num_tx = 16;
        arma::uword num_rx = 4;
        arma::uword num_modes = 4;

        // channel
        arma::uword num_clusters = 4;
        arma::uword rays_per_cluster = 8;
        double angular_spread_deg = 7.5;
        double carrier_hz = 2.5e9;
        double spacing_m = 0.0; // 0 selects half-wavelength
        arma::uword pattern_order_az = 4;
        arma::uword pattern_order_el = 4;
        double pattern_diversity = 0.22; // cross-mode pattern decorrelation

        // dataset
        arma::uword sample_count = 4096;
        std::uint32_t test_fraction_num = 2;
        std::uint32_t test_fraction_den = 5;
        double train_snr_db = 25.0;
        arma::uword covariance_samples = 1000;

        // training
        std::vector<arma::uword> hidden = {128, 128, 128};
        arma::uword baseline_hidden = 0; // 0 derives the parameter-parity width
        double learning_rate = 1e-3;
        arma::uword batch_size = 32;
        arma::uword epochs = 150;
        std::uint64_t master_seed = 1;
        std::string model = "prnet"; // prnet | dnn

        // sweeps
        std::vector<double> snr_sweep_db = {0, 5, 10, 15, 20, 25, 30};
        std::vector<arma::uword> antenna_sweep = {8, 16};
        std::vector<arma::uword> mode_sweep = {2, 4};
        double eval_snr_db = 30.0;

        static ExperimentConfig desk_scale() { return {}; }
        static ExperimentConfig paper_scale();

        void validate() const;

        double test_fraction() const
        {
            return static_cast<double>(test_fraction_num) / static_cast<double>(test_fraction_den);
        }
        double angular_spread_rad() const;
        arma::uword test_count() const; // floor(sample_count * fraction)
        arma::uword train_count() const { return sample_count - test_count(); }
    };

    // Decimal string like "0.4" to a reduced fraction.
    void parse_fraction(const std::string &text, std::uint32_t &num, std::uint32_t &den);

    ExperimentConfig parse_config(const std::string &text, ExperimentConfig base = {});
    ExperimentConfig load_config_file(const std::string &path, ExperimentConfig base = {});
    std::string serialize_config(const ExperimentConfig &cfg);
    std::uint64_t config_checksum(const ExperimentConfig &cfg);

    // Network shapes implied by the configuration.
    std::vector<arma::uword> prnet_dims(const ExperimentConfig &cfg);
    std::vector<arma::uword> baseline_dims(const ExperimentConfig &cfg);

    // Hidden width of the real benchmark chosen so that its real-parameter
    // count matches the complex network's, rounded to a multiple of 8.
    arma::uword baseline_parity_width(const ExperimentConfig &cfg);

    struct ParameterParity
    {
        std::uint64_t prnet_parameters = 0;
        std::uint64_t baseline_parameters = 0;
        double ratio = 0.0; // baseline / prnet
    };

    ParameterParity parameter_parity(const ExperimentConfig &cfg);
}

#endif
