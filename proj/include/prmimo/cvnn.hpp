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

#ifndef PRMIMO_CVNN_HPP
#define PRMIMO_CVNN_HPP

#include <armadillo>
#include <cstdint>
#include <string>
#include <vector>

namespace prmimo
{
    // Split rectifier: ReLU applied independently to real and imaginary
    // parts. The subgradient at 0 is taken as 0 on each part.
    arma::cx_mat crelu(const arma::cx_mat &z);

    // Batch loss: (1 / (R * L)) * sum_r ||output_r - target_r||_2^2 with
    // complex squared magnitudes. Columns are samples.
    double loss(const arma::cx_mat &outputs, const arma::cx_mat &targets);
    double loss(const arma::mat &outputs, const arma::mat &targets);

    struct ComplexLayer
    {
        arma::cx_mat weight; // n_out x n_in
        arma::cx_vec bias;   // n_out
        bool activated = true;
    };

    struct ComplexGradients
    {
        std::vector<arma::cx_mat> weight;
        std::vector<arma::cx_vec> bias;
    };

    // Feedforward network on complex vectors. All layers apply the split
    // rectifier except the last, which is affine only. Gradients are complex
    // packings of the real partials: G = dL/dRe + j * dL/dIm, which makes the
    // backward pass ordinary backprop with conjugate-transposed weights.
    class ComplexNetwork
    {
    public:
        using batch_t = arma::cx_mat;

        std::vector<ComplexLayer> layers;

        // Weights i.i.d. CN(0, 1/n_in) per layer, biases zero. Requires at
        // least [input, hidden, output] and every width >= 1.
        static ComplexNetwork init(const std::vector<arma::uword> &dims, std::uint64_t seed);

        std::vector<arma::uword> dims() const;
        arma::uword input_size() const { return layers.front().weight.n_cols; }
        arma::uword output_size() const { return layers.back().weight.n_rows; }
        std::uint64_t parameter_count() const; // real scalars

        // Vector length entering the loss normalization.
        static double loss_length(arma::uword rows) { return static_cast<double>(rows); }

        struct ForwardCache
        {
            std::vector<batch_t> activation;     // activation[k] feeds layer k; size L+1
            std::vector<batch_t> pre_activation; // z of layer k; size L
        };

        batch_t forward(const batch_t &input) const;
        batch_t forward(const batch_t &input, ForwardCache &cache) const;

        // Wirtinger gradients of loss() w.r.t. every parameter, same shapes
        // as the layers. Throws std::logic_error on a cache that does not
        // match this network.
        ComplexGradients backward(const ForwardCache &cache, const batch_t &targets) const;
    };

    struct AdamOptions
    {
        double learning_rate = 1e-3;
        double beta1 = 0.9;
        double beta2 = 0.999;
        double epsilon = 1e-8;
    };

    // Bias-corrected Adam applied to real and imaginary parts as independent
    // real scalars. First moments pack re/im into one complex accumulator;
    // second moments are kept per part so they stay real and nonnegative.
    struct ComplexAdamState
    {
        AdamOptions options;
        std::uint64_t step_count = 0;
        std::vector<arma::cx_mat> m_weight;
        std::vector<arma::mat> v_weight_re, v_weight_im;
        std::vector<arma::cx_vec> m_bias;
        std::vector<arma::vec> v_bias_re, v_bias_im;
    };

    ComplexAdamState init_adam(const ComplexNetwork &net, const AdamOptions &options);
    void adam_step(ComplexNetwork &net, const ComplexGradients &grads, ComplexAdamState &state);

    // FNV-1a over the canonical parameter serialization (row-major Re/Im of
    // each weight matrix, then bias), for reproducibility checks.
    std::uint64_t parameter_checksum(const ComplexNetwork &net);

    // "PRNW" checkpoint: magic, u32 version, u32 dim count, u32 dims,
    // f64 normalization scale, then per layer Re and Im of W row-major and
    // Re and Im of b, all little-endian f64. Round-trips bit-exactly.
    void save_network(const ComplexNetwork &net, double norm_scale, const std::string &path);

    struct LoadedComplexNetwork
    {
        ComplexNetwork net;
        double norm_scale = 1.0;
    };

    LoadedComplexNetwork load_network(const std::string &path);
}

#endif
