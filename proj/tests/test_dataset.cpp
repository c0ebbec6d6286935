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

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <limits>

#include "prmimo/binio.hpp"
#include "prmimo/dataset.hpp"
#include "prmimo/errors.hpp"
#include "prmimo/rng.hpp"

using namespace prmimo;

namespace
{
    ExperimentConfig tiny_config()
    {
        ExperimentConfig cfg;
        cfg.num_tx = 6;
        cfg.num_rx = 2;
        cfg.num_modes = 3;
        cfg.num_clusters = 2;
        cfg.rays_per_cluster = 3;
        cfg.sample_count = 12;
        cfg.covariance_samples = 64;
        cfg.hidden = {8};
        cfg.epochs = 1;
        cfg.batch_size = 4;
        return cfg;
    }
}

TEST_CASE("layout lengths satisfy the counting identity")
{
    const auto map = partition_antennas(6, 3);
    const auto layout = VectorLayout::make(2, map);
    CHECK(layout.input_length() == 12);
    CHECK(layout.target_length() == 24);
    CHECK(layout.input_length() + layout.target_length() ==
          layout.num_rx * layout.num_tx() * layout.num_modes());
}

TEST_CASE("vectorization is a bijection onto the full tensor")
{
    // M=6, N=2, P=3: 36 tensor entries, 12 estimated + 24 extrapolated.
    const auto map = partition_antennas(6, 3);
    const auto layout = VectorLayout::make(2, map);

    // Tag every tensor entry with a unique value, then check that both
    // vectorizations cover everything exactly once and invert bit-exactly.
    arma::cx_cube tensor(2, 6, 3);
    arma::uword tag = 0;
    for (arma::uword p = 0; p < 3; ++p)
        for (arma::uword m = 0; m < 6; ++m)
            for (arma::uword n = 0; n < 2; ++n)
            {
                ++tag;
                tensor(n, m, p) = {static_cast<double>(tag), -static_cast<double>(tag)};
            }

    ChannelTensor full;
    full.geometry = ArrayGeometry::make(6, 2);
    full.slices = tensor;
    const arma::cx_mat composite = composite_channel(full, map);
    const arma::cx_vec h_es = layout.vectorize_composite(composite);
    const arma::cx_vec h_pre = layout.vectorize_targets(tensor);

    // Every tag appears exactly once across the two vectors.
    arma::uvec seen(36, arma::fill::zeros);
    auto mark = [&](const arma::cx_vec &v) {
        for (const auto &value : v)
        {
            const auto t = static_cast<arma::uword>(value.real());
            REQUIRE(t >= 1);
            REQUIRE(t <= 36);
            seen(t - 1) += 1;
        }
    };
    mark(h_es);
    mark(h_pre);
    CHECK(arma::accu(seen) == 36);
    CHECK(seen.min() == 1);
    CHECK(seen.max() == 1);

    // Reassembly inverts both vectorizations bit-exactly.
    const arma::cx_cube rebuilt = layout.assemble(h_es, h_pre);
    CHECK(arma::norm(arma::vectorise(rebuilt - tensor)) == 0.0);

    // h_es follows vec(): index (m * N + n).
    for (arma::uword m = 0; m < 6; ++m)
        for (arma::uword n = 0; n < 2; ++n)
            REQUIRE(h_es(m * 2 + n) == composite(n, m));

    // h_pre block k holds antenna m's k-th non-native mode, ascending.
    const arma::uword block = 12;
    for (arma::uword m = 0; m < 6; ++m)
    {
        const auto modes = layout.non_native_modes(m);
        for (arma::uword k = 0; k < modes.n_elem; ++k)
            for (arma::uword n = 0; n < 2; ++n)
                REQUIRE(h_pre(k * block + m * 2 + n) == tensor(n, m, modes(k)));
    }
}

TEST_CASE("samples are deterministic and degrade gracefully at P=1")
{
    auto cfg = tiny_config();
    const auto ctx = ExperimentContext::prepare(cfg);

    const auto a = build_sample(ctx, sample_seed(cfg.master_seed, 0), cfg.train_snr_db);
    const auto b = build_sample(ctx, sample_seed(cfg.master_seed, 0), cfg.train_snr_db);
    CHECK(arma::norm(a.input - b.input) == 0.0);
    CHECK(arma::norm(a.target - b.target) == 0.0);

    auto single = cfg;
    single.num_modes = 1;
    const auto ctx1 = ExperimentContext::prepare(single);
    const auto s = build_sample(ctx1, 5, single.train_snr_db);
    CHECK(s.input.n_elem == 12);
    CHECK(s.target.n_elem == 0);
}

TEST_CASE("noiseless estimation recovers the composite exactly")
{
    const auto cfg = tiny_config();
    const auto ctx = ExperimentContext::prepare(cfg);
    const double inf = std::numeric_limits<double>::infinity();

    const auto s = build_sample(ctx, 42, inf);

    // Rebuild the composite from the same seed path.
    const auto paths = sample_paths(split_seed(42ULL, stream::paths), cfg.num_clusters,
                                    cfg.rays_per_cluster, cfg.angular_spread_rad());
    const auto tensor = generate_all_modes(ctx.geometry, paths, ctx.gains);
    const auto composite = composite_channel(tensor, ctx.groups);
    const arma::cx_vec expect = ctx.layout.vectorize_composite(composite);

    CHECK(arma::norm(s.input - expect) / arma::norm(expect) < 1e-8);
}

TEST_CASE("the noiseless pair is a pure function of the propagation state")
{
    const auto cfg = tiny_config();
    const auto ctx = ExperimentContext::prepare(cfg);
    const double inf = std::numeric_limits<double>::infinity();

    // Same PathSet pushed through the pilot round with two different noise
    // streams: with the noise disabled, both (h_es, h_pre) pairs must match
    // exactly, making the estimated-to-extrapolated relation deterministic.
    const auto paths = sample_paths(77, cfg.num_clusters, cfg.rays_per_cluster,
                                    cfg.angular_spread_rad());
    const auto tensor = generate_all_modes(ctx.geometry, paths, ctx.gains);
    const auto composite = composite_channel(tensor, ctx.groups);

    auto run = [&](std::uint64_t noise_seed) {
        const auto rx = transmit(composite, ctx.pilots, inf, noise_seed);
        const auto est = lmmse_estimate(rx, ctx.pilots, ctx.covariance, 0.0, ctx.geometry.num_rx);
        return std::make_pair(ctx.layout.vectorize_composite(est),
                              ctx.layout.vectorize_targets(tensor.slices));
    };
    const auto [in1, tg1] = run(1);
    const auto [in2, tg2] = run(2);
    CHECK(arma::norm(in1 - in2) == 0.0);
    CHECK(arma::norm(tg1 - tg2) == 0.0);
}

TEST_CASE("dataset split is disjoint, exhaustive and sized by the floor rule")
{
    auto cfg = tiny_config();
    cfg.sample_count = 5;
    const auto ctx = ExperimentContext::prepare(cfg);
    const auto d = build_dataset(ctx);

    CHECK(d.test_indices.n_elem == 2); // floor(5 * 2/5)
    CHECK(d.train_indices.n_elem == 3);

    arma::uvec seen(5, arma::fill::zeros);
    for (arma::uword i : d.train_indices)
        seen(i) += 1;
    for (arma::uword i : d.test_indices)
        seen(i) += 1;
    CHECK(seen.min() == 1);
    CHECK(seen.max() == 1);

    // Config arithmetic at the published scale.
    ExperimentConfig big;
    big.sample_count = 10240;
    big.test_fraction_num = 2;
    big.test_fraction_den = 5;
    CHECK(big.test_count() == 4096);
    CHECK(big.train_count() == 6144);
}

TEST_CASE("dataset files are byte-identical across rebuilds and round-trip")
{
    const auto cfg = tiny_config();
    const auto ctx = ExperimentContext::prepare(cfg);

    const std::string p1 = "test_dataset_a.prnc", p2 = "test_dataset_b.prnc",
                      p3 = "test_dataset_c.prnc";
    write_dataset(build_dataset(ctx), p1);
    write_dataset(build_dataset(ctx), p2);
    const auto b1 = read_file_bytes(p1), b2 = read_file_bytes(p2);
    CHECK(b1 == b2);

    const auto loaded = read_dataset(p1);
    CHECK(loaded.sample_count() == cfg.sample_count);
    CHECK(loaded.num_tx == cfg.num_tx);
    CHECK(loaded.num_rx == cfg.num_rx);
    CHECK(loaded.num_modes == cfg.num_modes);
    CHECK(loaded.train_snr_db == doctest::Approx(cfg.train_snr_db));
    CHECK(loaded.master_seed == cfg.master_seed);

    // Write after read reproduces the file bit for bit.
    write_dataset(loaded, p3);
    const auto b3 = read_file_bytes(p3);
    CHECK(b1 == b3);

    std::remove(p1.c_str());
    std::remove(p2.c_str());
    std::remove(p3.c_str());
}

TEST_CASE("malformed dataset files raise format errors")
{
    const auto cfg = tiny_config();
    const auto ctx = ExperimentContext::prepare(cfg);
    const std::string path = "test_dataset_bad.prnc";
    write_dataset(build_dataset(ctx), path);
    const auto good = read_file_bytes(path);

    SUBCASE("corrupted magic")
    {
        auto bad = good;
        bad[0] = 'Z';
        write_file_bytes(path, bad);
        CHECK_THROWS_AS(read_dataset(path), format_error);
    }

    SUBCASE("truncated records name expected and actual sizes")
    {
        auto bad = good;
        bad.resize(bad.size() - 24);
        write_file_bytes(path, bad);
        try
        {
            read_dataset(path);
            FAIL("expected format_error");
        }
        catch (const format_error &e)
        {
            const std::string msg = e.what();
            CHECK(msg.find("expected") != std::string::npos);
            CHECK(msg.find(std::to_string(good.size())) != std::string::npos);
        }
    }

    SUBCASE("flipped payload byte fails the checksum")
    {
        auto bad = good;
        bad[good.size() / 2] ^= 0x40;
        write_file_bytes(path, bad);
        try
        {
            read_dataset(path);
            FAIL("expected format_error");
        }
        catch (const format_error &e)
        {
            CHECK(std::string(e.what()).find("checksum") != std::string::npos);
        }
    }

    std::remove(path.c_str());
}
