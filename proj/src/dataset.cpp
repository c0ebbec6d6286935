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

#include "prmimo/dataset.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "prmimo/binio.hpp"
#include "prmimo/errors.hpp"
#include "prmimo/rng.hpp"
#include "prmimo/trainer.hpp"

namespace prmimo
{
    namespace
    {
        const char dataset_magic[5] = "PRNC";
        constexpr std::uint32_t dataset_version = 1;

        // Samples own their seeds, so chunked execution cannot change results.
        void parallel_for(arma::uword n, const std::function<void(arma::uword)> &fn)
        {
            const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
            const unsigned workers = static_cast<unsigned>(std::min<arma::uword>(hw, n));
            if (workers <= 1 || n < 64)
            {
                for (arma::uword i = 0; i < n; ++i)
                    fn(i);
                return;
            }
            std::vector<std::thread> pool;
            pool.reserve(workers);
            for (unsigned w = 0; w < workers; ++w)
                pool.emplace_back([&, w]() {
                    for (arma::uword i = w; i < n; i += workers)
                        fn(i);
                });
            for (auto &t : pool)
                t.join();
        }

        void split_indices(arma::uword count, std::uint32_t num, std::uint32_t den,
                           std::uint64_t master_seed, arma::uvec &train, arma::uvec &test)
        {
            const arma::uword n_test = static_cast<arma::uword>(
                (static_cast<std::uint64_t>(count) * num) / den);
            const arma::uvec perm = shuffled_indices(count, split_seed(master_seed, stream::split));
            test = n_test > 0 ? arma::sort(perm.head(n_test)) : arma::uvec();
            train = arma::sort(perm.tail(count - n_test));
        }
    }

    VectorLayout VectorLayout::make(arma::uword num_rx, GroupMap group_map)
    {
        group_map.validate();
        if (num_rx < 1)
            throw std::invalid_argument("VectorLayout: receive antenna count must be >= 1");
        VectorLayout layout;
        layout.num_rx = num_rx;
        layout.group_map = std::move(group_map);
        return layout;
    }

    arma::uvec VectorLayout::non_native_modes(arma::uword antenna) const
    {
        if (antenna >= num_tx())
            throw std::invalid_argument("VectorLayout: antenna index out of range");
        const arma::uword native = group_map.mode_of(antenna);
        arma::uvec modes(num_modes() - 1);
        arma::uword k = 0;
        for (arma::uword p = 0; p < num_modes(); ++p)
            if (p != native)
                modes(k++) = p;
        return modes;
    }

    arma::cx_vec VectorLayout::vectorize_composite(const arma::cx_mat &h_es) const
    {
        if (h_es.n_rows != num_rx || h_es.n_cols != num_tx())
            throw std::invalid_argument("VectorLayout: composite has wrong shape");
        return arma::vectorise(h_es);
    }

    arma::cx_vec VectorLayout::vectorize_targets(const arma::cx_cube &all_modes) const
    {
        if (all_modes.n_rows != num_rx || all_modes.n_cols != num_tx() ||
            all_modes.n_slices != num_modes())
            throw std::invalid_argument("VectorLayout: tensor has wrong shape");

        arma::cx_vec out(target_length());
        const arma::uword block = num_rx * num_tx();
        for (arma::uword m = 0; m < num_tx(); ++m)
        {
            const arma::uvec modes = non_native_modes(m);
            for (arma::uword k = 0; k < modes.n_elem; ++k)
                out.subvec(k * block + m * num_rx, arma::size(num_rx, 1)) =
                    all_modes.slice(modes(k)).col(m);
        }
        return out;
    }

    arma::cx_cube VectorLayout::assemble(const arma::cx_vec &h_es, const arma::cx_vec &h_pre) const
    {
        if (h_es.n_elem != input_length() || h_pre.n_elem != target_length())
            throw std::invalid_argument("VectorLayout: vector lengths do not match the layout");

        arma::cx_cube full(num_rx, num_tx(), num_modes());
        const arma::uword block = num_rx * num_tx();
        for (arma::uword m = 0; m < num_tx(); ++m)
        {
            full.slice(group_map.mode_of(m)).col(m) =
                h_es.subvec(m * num_rx, arma::size(num_rx, 1));
            const arma::uvec modes = non_native_modes(m);
            for (arma::uword k = 0; k < modes.n_elem; ++k)
                full.slice(modes(k)).col(m) =
                    h_pre.subvec(k * block + m * num_rx, arma::size(num_rx, 1));
        }
        return full;
    }

    ExperimentContext ExperimentContext::prepare(const ExperimentConfig &config)
    {
        config.validate();

        ExperimentContext ctx;
        ctx.config = config;
        ctx.geometry = ArrayGeometry::make(config.num_tx, config.num_rx,
                                           config.carrier_hz, config.spacing_m);
        ctx.gains = PatternGainModel(config.num_modes, config.pattern_order_az,
                                     config.pattern_order_el,
                                     split_seed(config.master_seed, stream::gain_model),
                                     config.pattern_diversity);
        ctx.groups = partition_antennas(config.num_tx, config.num_modes);
        ctx.pilots = make_pilots(config.num_tx);
        ctx.layout = VectorLayout::make(config.num_rx, ctx.groups);

        // Covariance of the mixed-mode channel, estimated once per
        // configuration from noiseless calibration draws.
        const std::uint64_t cal_seed = split_seed(config.master_seed, stream::calibration);
        std::vector<arma::cx_mat> calibration(config.covariance_samples);
        parallel_for(config.covariance_samples, [&](arma::uword s) {
            const PathSet paths = sample_paths(split_seed(cal_seed, s), config.num_clusters,
                                               config.rays_per_cluster, config.angular_spread_rad());
            calibration[s] = composite_channel(generate_all_modes(ctx.geometry, paths, ctx.gains),
                                               ctx.groups);
        });
        ctx.covariance = estimate_covariance(calibration);
        return ctx;
    }

    Sample build_sample(const ExperimentContext &ctx, std::uint64_t seed, double snr_db)
    {
        const PathSet paths = sample_paths(split_seed(seed, stream::paths),
                                           ctx.config.num_clusters, ctx.config.rays_per_cluster,
                                           ctx.config.angular_spread_rad());
        const ChannelTensor tensor = generate_all_modes(ctx.geometry, paths, ctx.gains);
        const arma::cx_mat composite = composite_channel(tensor, ctx.groups);
        const arma::cx_mat rx = transmit(composite, ctx.pilots, snr_db,
                                         split_seed(seed, stream::noise));
        const arma::cx_mat estimate = lmmse_estimate(rx, ctx.pilots, ctx.covariance,
                                                     noise_variance(snr_db), ctx.geometry.num_rx);

        Sample s;
        s.seed = seed;
        s.input = ctx.layout.vectorize_composite(estimate);
        s.target = ctx.layout.vectorize_targets(tensor.slices);
        return s;
    }

    Dataset build_dataset(const ExperimentContext &ctx)
    {
        const ExperimentConfig &cfg = ctx.config;

        Dataset d;
        d.num_tx = cfg.num_tx;
        d.num_rx = cfg.num_rx;
        d.num_modes = cfg.num_modes;
        d.test_fraction_num = cfg.test_fraction_num;
        d.test_fraction_den = cfg.test_fraction_den;
        d.train_snr_db = cfg.train_snr_db;
        d.master_seed = cfg.master_seed;
        d.inputs.set_size(ctx.layout.input_length(), cfg.sample_count);
        d.targets.set_size(ctx.layout.target_length(), cfg.sample_count);

        parallel_for(cfg.sample_count, [&](arma::uword i) {
            const Sample s = build_sample(ctx, sample_seed(cfg.master_seed, i), cfg.train_snr_db);
            d.inputs.col(i) = s.input;
            if (s.target.n_elem > 0)
                d.targets.col(i) = s.target;
        });

        split_indices(cfg.sample_count, cfg.test_fraction_num, cfg.test_fraction_den,
                      cfg.master_seed, d.train_indices, d.test_indices);
        return d;
    }

    void write_dataset(const Dataset &d, const std::string &path)
    {
        ByteWriter w;
        w.magic(dataset_magic);
        w.u32(dataset_version);
        w.u32(static_cast<std::uint32_t>(d.num_tx));
        w.u32(static_cast<std::uint32_t>(d.num_rx));
        w.u32(static_cast<std::uint32_t>(d.num_modes));
        w.u64(d.sample_count());
        w.u32(d.test_fraction_num);
        w.u32(d.test_fraction_den);
        w.i32(static_cast<std::int32_t>(std::llround(d.train_snr_db * 100.0)));
        w.u64(d.master_seed);
        w.u32(d.layout);
        for (arma::uword i = 0; i < d.sample_count(); ++i)
        {
            for (arma::uword r = 0; r < d.inputs.n_rows; ++r)
            {
                w.f32(static_cast<float>(d.inputs(r, i).real()));
                w.f32(static_cast<float>(d.inputs(r, i).imag()));
            }
            for (arma::uword r = 0; r < d.targets.n_rows; ++r)
            {
                w.f32(static_cast<float>(d.targets(r, i).real()));
                w.f32(static_cast<float>(d.targets(r, i).imag()));
            }
        }
        w.u64(fnv1a(w.bytes().data(), w.size()));
        write_file_bytes(path, w.bytes());
    }

    Dataset read_dataset(const std::string &path)
    {
        ByteReader r(read_file_bytes(path));
        if (r.magic() != dataset_magic)
            throw format_error("not a PRNC dataset (bad magic)", 0);
        const std::uint32_t version = r.u32();
        if (version != dataset_version)
            throw format_error("unsupported PRNC version " + std::to_string(version), r.offset() - 4);

        Dataset d;
        d.num_tx = r.u32();
        d.num_rx = r.u32();
        d.num_modes = r.u32();
        const std::uint64_t count = r.u64();
        d.test_fraction_num = r.u32();
        d.test_fraction_den = r.u32();
        d.train_snr_db = static_cast<double>(r.i32()) / 100.0;
        d.master_seed = r.u64();
        d.layout = r.u32();
        if (d.layout != layout_version)
            throw format_error("unsupported layout version " + std::to_string(d.layout),
                               r.offset() - 4);
        if (d.num_tx < 1 || d.num_rx < 1 || d.num_modes < 1 || d.num_tx < d.num_modes)
            throw format_error("PRNC header has inconsistent dimensions", r.offset());
        if (d.test_fraction_den == 0 || d.test_fraction_num >= d.test_fraction_den)
            throw format_error("PRNC header has an invalid test fraction", r.offset());

        const std::uint64_t record =
            static_cast<std::uint64_t>(d.num_rx) * d.num_tx * d.num_modes * 8;
        const std::uint64_t expected = r.offset() + count * record + 8;
        if (r.size() != expected)
            throw format_error("dataset size mismatch: expected " + std::to_string(expected) +
                                   " bytes for " + std::to_string(count) + " samples, have " +
                                   std::to_string(r.size()),
                               r.offset());

        const std::uint64_t stored_sum =
            fnv1a(r.bytes().data(), r.size() - 8);
        // Trailing checksum sits after the records.
        std::uint64_t file_sum = 0;
        for (int i = 0; i < 8; ++i)
            file_sum |= static_cast<std::uint64_t>(r.bytes()[r.size() - 8 + static_cast<std::size_t>(i)]) << (8 * i);
        if (stored_sum != file_sum)
            throw format_error("dataset checksum mismatch", r.size() - 8);

        const arma::uword in_len = d.num_rx * d.num_tx;
        const arma::uword tg_len = in_len * (d.num_modes - 1);
        d.inputs.set_size(in_len, count);
        d.targets.set_size(tg_len, count);
        for (std::uint64_t i = 0; i < count; ++i)
        {
            for (arma::uword row = 0; row < in_len; ++row)
            {
                const double re = r.f32(), im = r.f32();
                d.inputs(row, i) = {re, im};
            }
            for (arma::uword row = 0; row < tg_len; ++row)
            {
                const double re = r.f32(), im = r.f32();
                d.targets(row, i) = {re, im};
            }
        }

        split_indices(count, d.test_fraction_num, d.test_fraction_den, d.master_seed,
                      d.train_indices, d.test_indices);
        return d;
    }
}
