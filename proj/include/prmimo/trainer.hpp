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

#ifndef PRMIMO_TRAINER_HPP
#define PRMIMO_TRAINER_HPP

#include <armadillo>
#include <chrono>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "prmimo/cvnn.hpp"
#include "prmimo/metrics.hpp"
#include "prmimo/rng.hpp"

namespace prmimo
{
    struct TrainOptions
    {
        AdamOptions adam;
        arma::uword batch_size = 32;
        arma::uword epochs = 0;
        std::uint64_t shuffle_seed = 0;
    };

    struct TrainReport
    {
        std::vector<double> epoch_loss;            // mean squared residual per entry
        std::vector<double> epoch_validation_nmse; // NaN when no validation set
        std::vector<double> epoch_seconds;
        std::uint64_t final_parameter_checksum = 0;
    };

    inline arma::uvec shuffled_indices(arma::uword n, std::uint64_t seed)
    {
        arma::uvec idx = arma::regspace<arma::uvec>(0, n - 1);
        Rng rng(seed);
        for (arma::uword i = n - 1; i > 0; --i)
        {
            const arma::uword j = static_cast<arma::uword>(rng.next_u64() % (i + 1));
            std::swap(idx(i), idx(j));
        }
        return idx;
    }

    // One training loop for both network flavors. Batches are visited in
    // seeded shuffle order, sequentially, so runs are bit-reproducible.
    template <class Net>
    TrainReport train_network(Net &net,
                              const typename Net::batch_t &inputs,
                              const typename Net::batch_t &targets,
                              const typename Net::batch_t &val_inputs,
                              const typename Net::batch_t &val_targets,
                              const TrainOptions &opt)
    {
        const arma::uword n_samples = inputs.n_cols;
        if (n_samples == 0)
            throw std::invalid_argument("train: dataset is empty");
        if (targets.n_cols != n_samples)
            throw std::invalid_argument("train: input and target sample counts differ");
        if (inputs.n_rows != net.input_size() || targets.n_rows != net.output_size())
            throw std::invalid_argument("train: dataset dimensions do not match the network");
        if (opt.batch_size < 1 || opt.batch_size > n_samples)
            throw std::invalid_argument("train: batch size must be in [1, sample count]");

        const double entries = static_cast<double>(n_samples) * Net::loss_length(targets.n_rows);

        TrainReport report;
        report.epoch_loss.reserve(opt.epochs);
        report.epoch_validation_nmse.reserve(opt.epochs);
        report.epoch_seconds.reserve(opt.epochs);

        auto adam = init_adam(net, opt.adam);
        typename Net::ForwardCache cache;

        for (arma::uword epoch = 0; epoch < opt.epochs; ++epoch)
        {
            const auto t0 = std::chrono::steady_clock::now();
            const arma::uvec order = shuffled_indices(n_samples, split_seed(opt.shuffle_seed, epoch));

            double sse = 0.0;
            for (arma::uword start = 0; start < n_samples; start += opt.batch_size)
            {
                const arma::uword stop = std::min(start + opt.batch_size, n_samples) - 1;
                const arma::uvec batch_idx = order.subvec(start, stop);
                const typename Net::batch_t bin = inputs.cols(batch_idx);
                const typename Net::batch_t btg = targets.cols(batch_idx);

                const auto out = net.forward(bin, cache);
                sse += arma::accu(arma::square(arma::abs(out - btg)));
                const auto grads = net.backward(cache, btg);
                adam_step(net, grads, adam);
            }
            report.epoch_loss.push_back(sse / entries);

            double val = std::numeric_limits<double>::quiet_NaN();
            if (val_inputs.n_cols > 0)
                val = nmse(val_targets, net.forward(val_inputs));
            report.epoch_validation_nmse.push_back(val);

            const auto t1 = std::chrono::steady_clock::now();
            report.epoch_seconds.push_back(std::chrono::duration<double>(t1 - t0).count());
        }

        report.final_parameter_checksum = parameter_checksum(net);
        return report;
    }
}

#endif
