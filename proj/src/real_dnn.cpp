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

#include "prmimo/real_dnn.hpp"

#include <cmath>
#include <stdexcept>

#include "prmimo/binio.hpp"
#include "prmimo/errors.hpp"
#include "prmimo/rng.hpp"

namespace prmimo
{
    namespace
    {
        const char checkpoint_magic[5] = "PRNR";
        constexpr std::uint32_t checkpoint_version = 1;

        void serialize_parameters(const RealNetwork &net, ByteWriter &w)
        {
            for (const auto &layer : net.layers)
            {
                for (arma::uword r = 0; r < layer.weight.n_rows; ++r)
                    for (arma::uword c = 0; c < layer.weight.n_cols; ++c)
                        w.f64(layer.weight(r, c));
                for (arma::uword r = 0; r < layer.bias.n_elem; ++r)
                    w.f64(layer.bias(r));
            }
        }
    }

    arma::mat embed_complex(const arma::cx_mat &x)
    {
        return arma::join_cols(arma::mat(arma::real(x)), arma::mat(arma::imag(x)));
    }

    arma::cx_mat unembed_complex(const arma::mat &x)
    {
        if (x.n_rows % 2 != 0)
            throw std::invalid_argument("unembed_complex: row count must be even");
        const arma::uword n = x.n_rows / 2;
        return arma::cx_mat(x.rows(0, n - 1), x.rows(n, x.n_rows - 1));
    }

    RealNetwork RealNetwork::init(const std::vector<arma::uword> &dims, std::uint64_t seed)
    {
        if (dims.size() < 3)
            throw std::invalid_argument("RealNetwork: need at least input, hidden and output widths");
        for (arma::uword d : dims)
            if (d < 1)
                throw std::invalid_argument("RealNetwork: every width must be >= 1");

        RealNetwork net;
        net.layers.resize(dims.size() - 1);
        for (std::size_t k = 0; k + 1 < dims.size(); ++k)
        {
            const arma::uword n_in = dims[k], n_out = dims[k + 1];
            RealLayer &layer = net.layers[k];
            layer.weight.set_size(n_out, n_in);
            layer.bias.zeros(n_out);
            layer.activated = (k + 2 < dims.size());

            const double scale = 1.0 / std::sqrt(static_cast<double>(n_in));
            Rng rng(split_seed(seed, k));
            for (arma::uword c = 0; c < n_in; ++c)
                for (arma::uword r = 0; r < n_out; ++r)
                    layer.weight(r, c) = scale * rng.gaussian();
        }
        return net;
    }

    std::vector<arma::uword> RealNetwork::dims() const
    {
        std::vector<arma::uword> d;
        d.reserve(layers.size() + 1);
        d.push_back(layers.front().weight.n_cols);
        for (const auto &layer : layers)
            d.push_back(layer.weight.n_rows);
        return d;
    }

    std::uint64_t RealNetwork::parameter_count() const
    {
        std::uint64_t count = 0;
        for (const auto &layer : layers)
            count += layer.weight.n_elem + layer.bias.n_elem;
        return count;
    }

    arma::mat RealNetwork::forward(const batch_t &input) const
    {
        if (input.n_rows != input_size())
            throw std::invalid_argument("forward: input length does not match the network");
        batch_t a = input;
        for (const auto &layer : layers)
        {
            batch_t z = layer.weight * a;
            z.each_col() += layer.bias;
            a = layer.activated ? arma::clamp(z, 0.0, arma::datum::inf) : std::move(z);
        }
        return a;
    }

    arma::mat RealNetwork::forward(const batch_t &input, ForwardCache &cache) const
    {
        if (input.n_rows != input_size())
            throw std::invalid_argument("forward: input length does not match the network");

        cache.activation.assign(layers.size() + 1, batch_t());
        cache.pre_activation.assign(layers.size(), batch_t());
        cache.activation[0] = input;
        for (std::size_t k = 0; k < layers.size(); ++k)
        {
            batch_t z = layers[k].weight * cache.activation[k];
            z.each_col() += layers[k].bias;
            cache.pre_activation[k] = std::move(z);
            cache.activation[k + 1] = layers[k].activated
                                          ? arma::clamp(cache.pre_activation[k], 0.0, arma::datum::inf)
                                          : cache.pre_activation[k];
        }
        return cache.activation.back();
    }

    RealGradients RealNetwork::backward(const ForwardCache &cache, const batch_t &targets) const
    {
        if (cache.activation.size() != layers.size() + 1 ||
            cache.pre_activation.size() != layers.size())
            throw std::logic_error("backward: cache does not match this network");
        for (std::size_t k = 0; k < layers.size(); ++k)
            if (cache.pre_activation[k].n_rows != layers[k].weight.n_rows ||
                cache.activation[k].n_rows != layers[k].weight.n_cols)
                throw std::logic_error("backward: cache does not match this network");
        const batch_t &output = cache.activation.back();
        if (targets.n_rows != output.n_rows || targets.n_cols != output.n_cols)
            throw std::invalid_argument("backward: target shape does not match the forward batch");

        const double batch = static_cast<double>(targets.n_cols);
        // Stacked re/im convention: the loss normalizes by the complex
        // vector length, half the stacked row count.
        const double out_len = static_cast<double>(targets.n_rows) / 2.0;

        RealGradients grads;
        grads.weight.resize(layers.size());
        grads.bias.resize(layers.size());

        batch_t s = (2.0 / (batch * out_len)) * (output - targets);
        for (std::size_t k = layers.size(); k-- > 0;)
        {
            if (layers[k].activated)
                s %= arma::conv_to<arma::mat>::from(cache.pre_activation[k] > 0.0);
            grads.weight[k] = s * cache.activation[k].t();
            grads.bias[k] = arma::sum(s, 1);
            if (k > 0)
                s = layers[k].weight.t() * s;
        }
        return grads;
    }

    RealAdamState init_adam(const RealNetwork &net, const AdamOptions &options)
    {
        RealAdamState st;
        st.options = options;
        for (const auto &layer : net.layers)
        {
            st.m_weight.emplace_back(layer.weight.n_rows, layer.weight.n_cols, arma::fill::zeros);
            st.v_weight.emplace_back(layer.weight.n_rows, layer.weight.n_cols, arma::fill::zeros);
            st.m_bias.emplace_back(layer.bias.n_elem, arma::fill::zeros);
            st.v_bias.emplace_back(layer.bias.n_elem, arma::fill::zeros);
        }
        return st;
    }

    namespace
    {
        template <class Mat>
        void adam_update(Mat &param, const Mat &grad, Mat &m, Mat &v,
                         const AdamOptions &o, double bias1, double bias2)
        {
            if (param.n_rows != grad.n_rows || param.n_cols != grad.n_cols)
                throw std::invalid_argument("adam_step: gradient shape does not match parameters");
            m = o.beta1 * m + (1.0 - o.beta1) * grad;
            v = o.beta2 * v + (1.0 - o.beta2) * arma::square(grad);
            param -= o.learning_rate * (m / bias1) / (arma::sqrt(v / bias2) + o.epsilon);
        }
    }

    void adam_step(RealNetwork &net, const RealGradients &grads, RealAdamState &state)
    {
        if (grads.weight.size() != net.layers.size() || grads.bias.size() != net.layers.size())
            throw std::invalid_argument("adam_step: gradient layer count does not match the network");

        state.step_count += 1;
        const double t = static_cast<double>(state.step_count);
        const double bias1 = 1.0 - std::pow(state.options.beta1, t);
        const double bias2 = 1.0 - std::pow(state.options.beta2, t);

        for (std::size_t k = 0; k < net.layers.size(); ++k)
        {
            adam_update(net.layers[k].weight, grads.weight[k],
                        state.m_weight[k], state.v_weight[k], state.options, bias1, bias2);
            adam_update(net.layers[k].bias, grads.bias[k],
                        state.m_bias[k], state.v_bias[k], state.options, bias1, bias2);
        }
    }

    std::uint64_t parameter_checksum(const RealNetwork &net)
    {
        ByteWriter w;
        serialize_parameters(net, w);
        return fnv1a(w.bytes().data(), w.size());
    }

    void save_network(const RealNetwork &net, double norm_scale, const std::string &path)
    {
        ByteWriter w;
        w.magic(checkpoint_magic);
        w.u32(checkpoint_version);
        const auto dims = net.dims();
        w.u32(static_cast<std::uint32_t>(dims.size()));
        for (arma::uword d : dims)
            w.u32(static_cast<std::uint32_t>(d));
        w.f64(norm_scale);
        serialize_parameters(net, w);
        write_file_bytes(path, w.bytes());
    }

    LoadedRealNetwork load_real_network(const std::string &path)
    {
        ByteReader r(read_file_bytes(path));
        if (r.magic() != checkpoint_magic)
            throw format_error("not a PRNR checkpoint (bad magic)", 0);
        const std::uint32_t version = r.u32();
        if (version != checkpoint_version)
            throw format_error("unsupported PRNR version " + std::to_string(version), r.offset() - 4);

        const std::uint32_t n_dims = r.u32();
        if (n_dims < 3)
            throw format_error("PRNR dims list too short", r.offset() - 4);
        std::vector<arma::uword> dims(n_dims);
        for (auto &d : dims)
        {
            d = r.u32();
            if (d < 1)
                throw format_error("PRNR width must be >= 1", r.offset() - 4);
        }

        LoadedRealNetwork loaded;
        loaded.norm_scale = r.f64();

        std::size_t expected = 0;
        for (std::size_t k = 0; k + 1 < dims.size(); ++k)
            expected += (dims[k] * dims[k + 1] + dims[k + 1]) * 8;
        if (r.size() - r.offset() != expected)
            throw format_error("PRNR payload size mismatch: expected " + std::to_string(expected) +
                                   " bytes, have " + std::to_string(r.size() - r.offset()),
                               r.offset());

        loaded.net.layers.resize(dims.size() - 1);
        for (std::size_t k = 0; k + 1 < dims.size(); ++k)
        {
            RealLayer &layer = loaded.net.layers[k];
            layer.weight.set_size(dims[k + 1], dims[k]);
            layer.bias.set_size(dims[k + 1]);
            layer.activated = (k + 2 < dims.size());
            for (arma::uword row = 0; row < layer.weight.n_rows; ++row)
                for (arma::uword col = 0; col < layer.weight.n_cols; ++col)
                    layer.weight(row, col) = r.f64();
            for (arma::uword row = 0; row < layer.bias.n_elem; ++row)
                layer.bias(row) = r.f64();
        }
        return loaded;
    }
}
