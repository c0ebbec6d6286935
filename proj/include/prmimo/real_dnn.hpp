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

#ifndef PRMIMO_REAL_DNN_HPP
#define PRMIMO_REAL_DNN_HPP

#include <armadillo>
#include <cstdint>
#include <string>
#include <vector>

#include "prmimo/cvnn.hpp"

namespace prmimo
{
    // Stack real on top of imaginary parts, one column per sample.
    arma::mat embed_complex(const arma::cx_mat &x);
    arma::cx_mat unembed_complex(const arma::mat &x);

    struct RealLayer
    {
        arma::mat weight;
        arma::vec bias;
        bool activated = true;
    };

    struct RealGradients
    {
        std::vector<arma::mat> weight;
        std::vector<arma::vec> bias;
    };

    // Real-valued benchmark network. Mirrors ComplexNetwork with real
    // arithmetic and plain ReLU; operates on re/im-stacked vectors.
    class RealNetwork
    {
    public:
        using batch_t = arma::mat;

        std::vector<RealLayer> layers;

        static RealNetwork init(const std::vector<arma::uword> &dims, std::uint64_t seed);

        std::vector<arma::uword> dims() const;
        arma::uword input_size() const { return layers.front().weight.n_cols; }
        arma::uword output_size() const { return layers.back().weight.n_rows; }
        std::uint64_t parameter_count() const;

        // Stacked vectors normalize by the complex length, half the rows.
        static double loss_length(arma::uword rows) { return static_cast<double>(rows) / 2.0; }

        struct ForwardCache
        {
            std::vector<batch_t> activation;
            std::vector<batch_t> pre_activation;
        };

        batch_t forward(const batch_t &input) const;
        batch_t forward(const batch_t &input, ForwardCache &cache) const;
        RealGradients backward(const ForwardCache &cache, const batch_t &targets) const;
    };

    struct RealAdamState
    {
        AdamOptions options;
        std::uint64_t step_count = 0;
        std::vector<arma::mat> m_weight, v_weight;
        std::vector<arma::vec> m_bias, v_bias;
    };

    RealAdamState init_adam(const RealNetwork &net, const AdamOptions &options);
    void adam_step(RealNetwork &net, const RealGradients &grads, RealAdamState &state);

    std::uint64_t parameter_checksum(const RealNetwork &net);

    // "PRNR" checkpoint, same layout as PRNW with real-only payloads.
    void save_network(const RealNetwork &net, double norm_scale, const std::string &path);

    struct LoadedRealNetwork
    {
        RealNetwork net;
        double norm_scale = 1.0;
    };

    LoadedRealNetwork load_real_network(const std::string &path);
}

#endif
