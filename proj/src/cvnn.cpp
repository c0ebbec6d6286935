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

#include "prmimo/cvnn.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "prmimo/binio.hpp"
#include "prmimo/errors.hpp"
#include "prmimo/rng.hpp"

namespace prmimo
{
    namespace
    {
        const char checkpoint_magic[5] = "PRNW";
        constexpr std::uint32_t checkpoint_version = 1;

        void serialize_parameters(const ComplexNetwork &net, ByteWriter &w)
        {
            for (const auto &layer : net.layers)
            {
                for (arma::uword r = 0; r < layer.weight.n_rows; ++r)
                    for (arma::uword c = 0; c < layer.weight.n_cols; ++c)
                        w.f64(layer.weight(r, c).real());
                for (arma::uword r = 0; r < layer.weight.n_rows; ++r)
                    for (arma::uword c = 0; c < layer.weight.n_cols; ++c)
                        w.f64(layer.weight(r, c).imag());
                for (arma::uword r = 0; r < layer.bias.n_elem; ++r)
                    w.f64(layer.bias(r).real());
                for (arma::uword r = 0; r < layer.bias.n_elem; ++r)
                    w.f64(layer.bias(r).imag());
            }
        }
    }

    arma::cx_mat crelu(const arma::cx_mat &z)
    {
        arma::cx_mat out(z.n_rows, z.n_cols);
        const std::complex<double> *src = z.memptr();
        std::complex<double> *dst = out.memptr();
        for (arma::uword i = 0; i < z.n_elem; ++i)
            dst[i] = {src[i].real() > 0.0 ? src[i].real() : 0.0,
                      src[i].imag() > 0.0 ? src[i].imag() : 0.0};
        return out;
    }

    double loss(const arma::cx_mat &outputs, const arma::cx_mat &targets)
    {
        if (outputs.n_rows != targets.n_rows || outputs.n_cols != targets.n_cols)
            throw std::invalid_argument("loss: output and target shapes differ");
        if (outputs.n_cols < 1 || outputs.n_rows < 1)
            throw std::invalid_argument("loss: empty batch");
        const double sse = arma::accu(arma::square(arma::abs(outputs - targets)));
        return sse / static_cast<double>(outputs.n_rows * outputs.n_cols);
    }

    // Real overload for re/im-stacked vectors: the vector length in the
    // normalization is the complex length, so this is numerically equal to
    // the complex loss on the same data.
    double loss(const arma::mat &outputs, const arma::mat &targets)
    {
        if (outputs.n_rows != targets.n_rows || outputs.n_cols != targets.n_cols)
            throw std::invalid_argument("loss: output and target shapes differ");
        if (outputs.n_cols < 1 || outputs.n_rows < 1)
            throw std::invalid_argument("loss: empty batch");
        if (outputs.n_rows % 2 != 0)
            throw std::invalid_argument("loss: stacked batch must have an even row count");
        const double sse = arma::accu(arma::square(outputs - targets));
        return sse / static_cast<double>((outputs.n_rows / 2) * outputs.n_cols);
    }

    ComplexNetwork ComplexNetwork::init(const std::vector<arma::uword> &dims, std::uint64_t seed)
    {
        if (dims.size() < 3)
            throw std::invalid_argument("ComplexNetwork: need at least input, hidden and output widths");
        for (arma::uword d : dims)
            if (d < 1)
                throw std::invalid_argument("ComplexNetwork: every width must be >= 1");

        ComplexNetwork net;
        net.layers.resize(dims.size() - 1);
        for (std::size_t k = 0; k + 1 < dims.size(); ++k)
        {
            const arma::uword n_in = dims[k], n_out = dims[k + 1];
            ComplexLayer &layer = net.layers[k];
            layer.weight.set_size(n_out, n_in);
            layer.bias.zeros(n_out);
            layer.activated = (k + 2 < dims.size());

            const double scale = 1.0 / std::sqrt(static_cast<double>(n_in));
            Rng rng(split_seed(seed, k));
            for (arma::uword c = 0; c < n_in; ++c)
                for (arma::uword r = 0; r < n_out; ++r)
                    layer.weight(r, c) = scale * rng.cgaussian();
        }
        return net;
    }

    std::vector<arma::uword> ComplexNetwork::dims() const
    {
        std::vector<arma::uword> d;
        d.reserve(layers.size() + 1);
        d.push_back(layers.front().weight.n_cols);
        for (const auto &layer : layers)
            d.push_back(layer.weight.n_rows);
        return d;
    }

    std::uint64_t ComplexNetwork::parameter_count() const
    {
        std::uint64_t count = 0;
        for (const auto &layer : layers)
            count += 2 * (layer.weight.n_elem + layer.bias.n_elem);
        return count;
    }

    arma::cx_mat ComplexNetwork::forward(const batch_t &input) const
    {
        if (input.n_rows != input_size())
            throw std::invalid_argument("forward: input length does not match the network");
        batch_t a = input;
        for (const auto &layer : layers)
        {
            batch_t z = layer.weight * a;
            z.each_col() += layer.bias;
            a = layer.activated ? crelu(z) : std::move(z);
        }
        return a;
    }

    arma::cx_mat ComplexNetwork::forward(const batch_t &input, ForwardCache &cache) const
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
            cache.activation[k + 1] = layers[k].activated ? crelu(cache.pre_activation[k])
                                                          : cache.pre_activation[k];
        }
        return cache.activation.back();
    }

    ComplexGradients ComplexNetwork::backward(const ForwardCache &cache, const batch_t &targets) const
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
        const double out_len = static_cast<double>(targets.n_rows);

        ComplexGradients grads;
        grads.weight.resize(layers.size());
        grads.bias.resize(layers.size());

        // Sensitivity w.r.t. the current layer's pre-activation, packed as
        // dL/dRe + j * dL/dIm.
        batch_t s = (2.0 / (batch * out_len)) * (output - targets);

        for (std::size_t k = layers.size(); k-- > 0;)
        {
            if (layers[k].activated)
            {
                const std::complex<double> *z = cache.pre_activation[k].memptr();
                std::complex<double> *sp = s.memptr();
                for (arma::uword i = 0; i < s.n_elem; ++i)
                    sp[i] = {z[i].real() > 0.0 ? sp[i].real() : 0.0,
                             z[i].imag() > 0.0 ? sp[i].imag() : 0.0};
            }
            grads.weight[k] = s * cache.activation[k].t();
            grads.bias[k] = arma::sum(s, 1);
            if (k > 0)
                s = layers[k].weight.t() * s;
        }
        return grads;
    }

    ComplexAdamState init_adam(const ComplexNetwork &net, const AdamOptions &options)
    {
        ComplexAdamState st;
        st.options = options;
        for (const auto &layer : net.layers)
        {
            st.m_weight.emplace_back(layer.weight.n_rows, layer.weight.n_cols, arma::fill::zeros);
            st.v_weight_re.emplace_back(layer.weight.n_rows, layer.weight.n_cols, arma::fill::zeros);
            st.v_weight_im.emplace_back(layer.weight.n_rows, layer.weight.n_cols, arma::fill::zeros);
            st.m_bias.emplace_back(layer.bias.n_elem, arma::fill::zeros);
            st.v_bias_re.emplace_back(layer.bias.n_elem, arma::fill::zeros);
            st.v_bias_im.emplace_back(layer.bias.n_elem, arma::fill::zeros);
        }
        return st;
    }

    namespace
    {
        template <class CxMat, class ReMat>
        void adam_update(CxMat &param, const CxMat &grad,
                         CxMat &m, ReMat &v_re, ReMat &v_im,
                         const AdamOptions &o, double bias1, double bias2)
        {
            if (param.n_rows != grad.n_rows || param.n_cols != grad.n_cols)
                throw std::invalid_argument("adam_step: gradient shape does not match parameters");

            m = o.beta1 * m + (1.0 - o.beta1) * grad;
            const ReMat g_re = arma::real(grad), g_im = arma::imag(grad);
            v_re = o.beta2 * v_re + (1.0 - o.beta2) * arma::square(g_re);
            v_im = o.beta2 * v_im + (1.0 - o.beta2) * arma::square(g_im);

            const ReMat step_re = (arma::real(m) / bias1) / (arma::sqrt(v_re / bias2) + o.epsilon);
            const ReMat step_im = (arma::imag(m) / bias1) / (arma::sqrt(v_im / bias2) + o.epsilon);
            param -= o.learning_rate * CxMat(step_re, step_im);
        }
    }

    void adam_step(ComplexNetwork &net, const ComplexGradients &grads, ComplexAdamState &state)
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
                        state.m_weight[k], state.v_weight_re[k], state.v_weight_im[k],
                        state.options, bias1, bias2);
            adam_update(net.layers[k].bias, grads.bias[k],
                        state.m_bias[k], state.v_bias_re[k], state.v_bias_im[k],
                        state.options, bias1, bias2);
        }
    }

    std::uint64_t parameter_checksum(const ComplexNetwork &net)
    {
        ByteWriter w;
        serialize_parameters(net, w);
        return fnv1a(w.bytes().data(), w.size());
    }

    void save_network(const ComplexNetwork &net, double norm_scale, const std::string &path)
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

    LoadedComplexNetwork load_network(const std::string &path)
    {
        ByteReader r(read_file_bytes(path));
        if (r.magic() != checkpoint_magic)
            throw format_error("not a PRNW checkpoint (bad magic)", 0);
        const std::uint32_t version = r.u32();
        if (version != checkpoint_version)
            throw format_error("unsupported PRNW version " + std::to_string(version), r.offset() - 4);

        const std::uint32_t n_dims = r.u32();
        if (n_dims < 3)
            throw format_error("PRNW dims list too short", r.offset() - 4);
        std::vector<arma::uword> dims(n_dims);
        for (auto &d : dims)
        {
            d = r.u32();
            if (d < 1)
                throw format_error("PRNW width must be >= 1", r.offset() - 4);
        }

        LoadedComplexNetwork loaded;
        loaded.norm_scale = r.f64();

        // Whole-payload size check up front so truncation names the deficit.
        std::size_t expected = 0;
        for (std::size_t k = 0; k + 1 < dims.size(); ++k)
            expected += 2 * (dims[k] * dims[k + 1] + dims[k + 1]) * 8;
        if (r.size() - r.offset() != expected)
            throw format_error("PRNW payload size mismatch: expected " + std::to_string(expected) +
                                   " bytes, have " + std::to_string(r.size() - r.offset()),
                               r.offset());

        loaded.net.layers.resize(dims.size() - 1);
        for (std::size_t k = 0; k + 1 < dims.size(); ++k)
        {
            ComplexLayer &layer = loaded.net.layers[k];
            layer.weight.set_size(dims[k + 1], dims[k]);
            layer.bias.set_size(dims[k + 1]);
            layer.activated = (k + 2 < dims.size());
            arma::mat re(dims[k + 1], dims[k]), im(dims[k + 1], dims[k]);
            for (arma::uword row = 0; row < re.n_rows; ++row)
                for (arma::uword col = 0; col < re.n_cols; ++col)
                    re(row, col) = r.f64();
            for (arma::uword row = 0; row < im.n_rows; ++row)
                for (arma::uword col = 0; col < im.n_cols; ++col)
                    im(row, col) = r.f64();
            layer.weight = arma::cx_mat(re, im);
            arma::vec bre(dims[k + 1]), bim(dims[k + 1]);
            for (arma::uword row = 0; row < bre.n_elem; ++row)
                bre(row) = r.f64();
            for (arma::uword row = 0; row < bim.n_elem; ++row)
                bim(row) = r.f64();
            layer.bias = arma::cx_vec(bre, bim);
        }
        return loaded;
    }
}
