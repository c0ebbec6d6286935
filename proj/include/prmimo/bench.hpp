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

#ifndef PRMIMO_BENCH_HPP
#define PRMIMO_BENCH_HPP

#include <armadillo>
#include <cstdint>
#include <string>
#include <vector>

#include "prmimo/dataset.hpp"
#include "prmimo/experiment.hpp"
#include "prmimo/metrics.hpp"
#include "prmimo/real_dnn.hpp"
#include "prmimo/trainer.hpp"

namespace prmimo
{
    // A trained extrapolator of either flavor, with the normalization scalar
    // applied at the input and inverted at the output.
    struct TrainedModel
    {
        std::string kind; // "prnet" | "dnn"
        ComplexNetwork cnet;
        RealNetwork rnet;
        double norm_scale = 1.0;

        arma::cx_mat predict(const arma::cx_mat &inputs) const;
        std::uint64_t parameter_count() const;

        void save(const std::string &path) const;
        static TrainedModel load(const std::string &path); // dispatches on magic
    };

    // Trains the configured model on the dataset's training split. The
    // normalization scalar makes the training-set average per-entry power 1.
    TrainedModel train_model(const ExperimentContext &ctx, const Dataset &dataset,
                             const std::string &kind, TrainReport *report = nullptr);

    // Test-split NMSE with the stored inputs.
    double evaluate_dataset(const TrainedModel &model, const Dataset &dataset);

    // Test-split NMSE with inputs regenerated at snr_db from the dataset's
    // per-sample seeds; targets are unchanged (they are noiseless).
    double evaluate_at_snr(const ExperimentContext &ctx, const TrainedModel &model,
                           const Dataset &dataset, double snr_db);

    struct SweepPoint
    {
        double axis_value = 0.0;
        double nmse_linear = 0.0;
        double nmse_db = 0.0;
        arma::uword sample_count = 0; // not carried by the CSV form
        std::string model;
    };

    struct SweepResult
    {
        std::string axis_name; // snr_db | m | p
        std::vector<SweepPoint> points;
        std::uint64_t config_checksum = 0;
    };

    // Trains once at the configured training SNR, then re-estimates the test
    // inputs at every sweep SNR.
    SweepResult run_snr_sweep(const ExperimentConfig &cfg);

    // Fresh model per antenna count; network widths rescale with num_tx.
    SweepResult run_antenna_sweep(const ExperimentConfig &cfg);

    // Fresh pattern-gain model and network per mode count.
    SweepResult run_mode_sweep(const ExperimentConfig &cfg);

    std::string to_csv(const SweepResult &result);
    SweepResult parse_csv(const std::string &text);
}

#endif
