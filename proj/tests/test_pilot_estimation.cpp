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
#include <complex>
#include <vector>

#include "prmimo/errors.hpp"
#include "prmimo/pilot_estimation.hpp"
#include "prmimo/rng.hpp"

using namespace prmimo;

namespace
{
    arma::cx_mat random_cx(arma::uword rows, arma::uword cols, std::uint64_t seed)
    {
        Rng rng(seed);
        arma::cx_mat m(rows, cols);
        for (arma::uword c = 0; c < cols; ++c)
            for (arma::uword r = 0; r < rows; ++r)
                m(r, c) = rng.cgaussian();
        return m;
    }

    // Explicit-inverse evaluation of the LMMSE formula.
    arma::cx_mat lmmse_oracle(const arma::cx_mat &rx, const arma::cx_mat &pilots,
                              const arma::cx_mat &r_h, double noise_var, arma::uword num_rx)
    {
        const arma::uword m = pilots.n_rows;
        const arma::cx_mat inner = pilots.t() * r_h * pilots +
                                   noise_var * static_cast<double>(num_rx) *
                                       arma::cx_mat(arma::eye<arma::mat>(m, m),
                                                    arma::zeros<arma::mat>(m, m));
        return rx * arma::inv(inner) * pilots.t() * r_h;
    }

    // Random Hermitian positive definite matrix.
    arma::cx_mat random_hpd(arma::uword m, std::uint64_t seed)
    {
        const arma::cx_mat a = random_cx(m, m + 2, seed);
        arma::cx_mat r = a * a.t() / static_cast<double>(m + 2);
        r.diag() += 0.1;
        return 0.5 * (r + r.t());
    }
}

TEST_CASE("antenna partition follows the remainder-absorbing rule")
{
    const auto even = partition_antennas(64, 8);
    for (arma::uword m = 0; m < 64; ++m)
        REQUIRE(even.mode_of(m) == m / 8);

    const auto ragged = partition_antennas(10, 4);
    arma::uvec sizes(4, arma::fill::zeros);
    for (arma::uword m = 0; m < 10; ++m)
        sizes(ragged.mode_of(m)) += 1;
    CHECK(sizes(0) == 2);
    CHECK(sizes(1) == 2);
    CHECK(sizes(2) == 2);
    CHECK(sizes(3) == 4);

    const auto square = partition_antennas(5, 5);
    for (arma::uword m = 0; m < 5; ++m)
        REQUIRE(square.mode_of(m) == m);

    CHECK_THROWS_AS(partition_antennas(3, 4), std::invalid_argument);
    CHECK_THROWS_AS(partition_antennas(0, 1), std::invalid_argument);
}

TEST_CASE("partition sizes sum to the antenna count for every M, P pair")
{
    for (arma::uword m = 1; m <= 256; ++m)
        for (arma::uword p = 1; p <= m; ++p)
        {
            const auto map = partition_antennas(m, p);
            REQUIRE(map.mode_of.n_elem == m);
            arma::uvec sizes(p, arma::fill::zeros);
            for (arma::uword a = 0; a < m; ++a)
                sizes(map.mode_of(a)) += 1;
            REQUIRE(arma::accu(sizes) == m);
            const arma::uword base = m / p;
            for (arma::uword g = 0; g + 1 < p; ++g)
                REQUIRE(sizes(g) == base);
            REQUIRE(sizes(p - 1) == m - (p - 1) * base);
        }
}

TEST_CASE("composite channel picks the assigned mode column by column")
{
    ChannelTensor tensor;
    tensor.geometry = ArrayGeometry::make(4, 3);
    tensor.slices.set_size(3, 4, 2);
    tensor.slices.slice(0) = random_cx(3, 4, 1);
    tensor.slices.slice(1) = random_cx(3, 4, 2);

    const auto map = partition_antennas(4, 2);
    const auto composite = composite_channel(tensor, map);
    for (arma::uword m = 0; m < 4; ++m)
    {
        const arma::uword mode = m < 2 ? 0 : 1;
        REQUIRE(arma::norm(composite.col(m) - tensor.slices.slice(mode).col(m)) == 0.0);
    }

    SUBCASE("single mode equals the only slice")
    {
        ChannelTensor single;
        single.geometry = tensor.geometry;
        single.slices.set_size(3, 4, 1);
        single.slices.slice(0) = tensor.slices.slice(0);
        const auto one = composite_channel(single, partition_antennas(4, 1));
        CHECK(arma::norm(one - single.slices.slice(0), "fro") == 0.0);
    }

    SUBCASE("identical slices make the composite equal any slice")
    {
        ChannelTensor same = tensor;
        same.slices.slice(1) = same.slices.slice(0);
        const auto c = composite_channel(same, map);
        CHECK(arma::norm(c - same.slices.slice(0), "fro") == 0.0);
    }

    SUBCASE("entries outside the group map never reach the composite")
    {
        const auto before = composite_channel(tensor, map);
        auto modified = tensor;
        for (arma::uword m = 0; m < map.num_tx; ++m)
            for (arma::uword p = 0; p < map.num_modes; ++p)
                if (p != map.mode_of(m))
                    modified.slices.slice(p).col(m) += std::complex<double>(3.0, -7.0);
        const auto after = composite_channel(modified, map);
        CHECK(arma::norm(before - after, "fro") == 0.0);
    }
}

TEST_CASE("pilot matrices are unitary DFT matrices")
{
    const auto x1 = make_pilots(1);
    CHECK(std::abs(x1(0, 0) - std::complex<double>(1.0, 0.0)) < 1e-14);

    const auto x2 = make_pilots(2);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(x2(0, 0) - inv_sqrt2) < 1e-12);
    CHECK(std::abs(x2(0, 1) - inv_sqrt2) < 1e-12);
    CHECK(std::abs(x2(1, 0) - inv_sqrt2) < 1e-12);
    CHECK(std::abs(x2(1, 1) + inv_sqrt2) < 1e-12);

    for (arma::uword m : {3, 8, 17, 64})
    {
        const auto x = make_pilots(m);
        const arma::cx_mat eye(arma::eye<arma::mat>(m, m), arma::zeros<arma::mat>(m, m));
        REQUIRE(arma::norm(x * x.t() - eye, "fro") < 1e-10);
    }
}

TEST_CASE("transmit adds calibrated noise")
{
    const auto h = random_cx(4, 4, 3);
    const auto x = make_pilots(4);

    SUBCASE("infinite SNR is exact")
    {
        const auto y = transmit(h, x, std::numeric_limits<double>::infinity(), 1);
        CHECK(arma::norm(y - h * x, "fro") == 0.0);
    }

    SUBCASE("zero channel leaves pure noise at the right variance")
    {
        const arma::cx_mat zero(100, 100, arma::fill::zeros);
        const auto xi = arma::cx_mat(arma::eye<arma::mat>(100, 100),
                                     arma::zeros<arma::mat>(100, 100));
        const double snr_db = 3.0;
        const auto y = transmit(zero, xi, snr_db, 7);
        const double sigma2 = noise_variance(snr_db);
        const double sample_var = arma::accu(arma::square(arma::abs(y))) /
                                  static_cast<double>(y.n_elem);
        CHECK(std::abs(sample_var - sigma2) / sigma2 < 0.05);
    }

    SUBCASE("fixed seed reproduces the draw")
    {
        const auto y1 = transmit(h, x, 10.0, 42);
        const auto y2 = transmit(h, x, 10.0, 42);
        CHECK(arma::norm(y1 - y2, "fro") == 0.0);
        const auto y3 = transmit(h, x, 10.0, 43);
        CHECK(arma::norm(y1 - y3, "fro") > 0.0);
    }
}

TEST_CASE("noise variance convention")
{
    CHECK(noise_variance(0.0) == doctest::Approx(1.0));
    CHECK(noise_variance(10.0) == doctest::Approx(0.1));
    CHECK(noise_variance(25.0) == doctest::Approx(std::pow(10.0, -2.5)));
    CHECK(noise_variance(std::numeric_limits<double>::infinity()) == 0.0);
}

TEST_CASE("covariance estimation matches the scalar oracle")
{
    SUBCASE("single sample")
    {
        const auto h = random_cx(3, 4, 11);
        const auto cov = estimate_covariance({h});
        CHECK(arma::norm(cov.r - h.t() * h, "fro") < 1e-12);
        CHECK(cov.sample_count == 1);
    }

    SUBCASE("identity stack")
    {
        const arma::cx_mat eye(arma::eye<arma::mat>(4, 4), arma::zeros<arma::mat>(4, 4));
        const auto cov = estimate_covariance({eye, eye, eye});
        CHECK(arma::norm(cov.r - eye, "fro") < 1e-12);
    }

    SUBCASE("two samples against explicit loops")
    {
        const auto h1 = random_cx(3, 4, 12), h2 = random_cx(3, 4, 13);
        const auto cov = estimate_covariance({h1, h2});
        arma::cx_mat want(4, 4, arma::fill::zeros);
        for (const auto &h : {h1, h2})
            for (arma::uword a = 0; a < 4; ++a)
                for (arma::uword b = 0; b < 4; ++b)
                    for (arma::uword n = 0; n < 3; ++n)
                        want(a, b) += std::conj(h(n, a)) * h(n, b) / 2.0;
        CHECK(arma::norm(cov.r - want, "fro") < 1e-10);
    }

    SUBCASE("reduction order does not matter")
    {
        std::vector<arma::cx_mat> samples;
        for (std::uint64_t s = 0; s < 257; ++s)
            samples.push_back(random_cx(2, 4, 100 + s));
        auto reversed = samples;
        std::reverse(reversed.begin(), reversed.end());
        const auto a = estimate_covariance(samples);
        const auto b = estimate_covariance(reversed);
        CHECK(arma::norm(a.r - b.r, "fro") < 1e-12);
    }

    SUBCASE("empty input is rejected")
    {
        CHECK_THROWS_AS(estimate_covariance({}), std::invalid_argument);
    }

    SUBCASE("result is Hermitian PSD")
    {
        std::vector<arma::cx_mat> samples;
        for (std::uint64_t s = 0; s < 40; ++s)
            samples.push_back(random_cx(3, 5, 200 + s));
        const auto cov = estimate_covariance(samples);
        CHECK(arma::norm(cov.r - cov.r.t(), "fro") < 1e-10);
        const arma::vec eig = arma::eig_sym(cov.r);
        CHECK(eig.min() >= -1e-8 * eig.max());
    }
}

TEST_CASE("LMMSE fixed points and oracle agreement")
{
    SUBCASE("noiseless identity covariance recovers the channel")
    {
        const auto h = random_cx(3, 4, 21);
        const auto x = make_pilots(4);
        ChannelCovariance cov;
        cov.r = arma::cx_mat(arma::eye<arma::mat>(4, 4), arma::zeros<arma::mat>(4, 4));
        cov.sample_count = 1;
        const auto est = lmmse_estimate(h * x, x, cov, 0.0, 3);
        CHECK(arma::norm(est - h, "fro") / arma::norm(h, "fro") < 1e-12);
    }

    SUBCASE("scalar case halves the observation")
    {
        arma::cx_mat y(1, 1);
        y(0, 0) = {0.8, -0.4};
        arma::cx_mat x(1, 1);
        x(0, 0) = 1.0;
        ChannelCovariance cov;
        cov.r = arma::cx_mat(1, 1);
        cov.r(0, 0) = 1.0;
        const auto est = lmmse_estimate(y, x, cov, 1.0, 1);
        CHECK(std::abs(est(0, 0) - y(0, 0) / 2.0) < 1e-14);
    }

    SUBCASE("random instances match the explicit inverse")
    {
        Rng rng(31);
        for (int trial = 0; trial < 20; ++trial)
        {
            const arma::uword m = 2 + rng.next_u64() % 3;
            const arma::uword n = 1 + rng.next_u64() % 3;
            const auto h = random_cx(n, m, 400 + static_cast<std::uint64_t>(trial));
            const auto x = make_pilots(m);
            ChannelCovariance cov;
            cov.r = random_hpd(m, 500 + static_cast<std::uint64_t>(trial));
            cov.sample_count = 10;
            const double sigma2 = 0.1 + rng.uniform();
            const auto y = transmit(h, x, 10.0, 600 + static_cast<std::uint64_t>(trial));
            const auto got = lmmse_estimate(y, x, cov, sigma2, n);
            const auto want = lmmse_oracle(y, x, cov.r, sigma2, n);
            REQUIRE(arma::norm(got - want, "fro") / arma::norm(want, "fro") < 1e-9);
        }
    }

    SUBCASE("singular system names the condition estimate")
    {
        const auto x = make_pilots(2);
        ChannelCovariance cov;
        cov.r = arma::cx_mat(2, 2, arma::fill::zeros); // rank 0
        cov.sample_count = 1;
        const arma::cx_mat y = random_cx(2, 2, 1);
        CHECK_THROWS_AS(lmmse_estimate(y, x, cov, 0.0, 2), numerical_error);
        try
        {
            lmmse_estimate(y, x, cov, 0.0, 2);
        }
        catch (const numerical_error &e)
        {
            CHECK(std::string(e.what()).find("rcond") != std::string::npos);
        }
    }
}

TEST_CASE("LS estimation")
{
    const auto h = random_cx(3, 4, 51);
    const auto x = make_pilots(4);

    SUBCASE("noiseless is exact")
    {
        const auto est = ls_estimate(h * x, x);
        CHECK(arma::norm(est - h, "fro") / arma::norm(h, "fro") < 1e-12);
    }

    SUBCASE("zero observation gives zero")
    {
        const arma::cx_mat zero(3, 4, arma::fill::zeros);
        const auto est = ls_estimate(zero, x);
        CHECK(arma::norm(est, "fro") == 0.0);
    }

    SUBCASE("noisy instance matches the direct solve")
    {
        const auto y = transmit(h, x, 5.0, 7);
        const auto got = ls_estimate(y, x);
        const arma::cx_mat want = y * arma::inv(x);
        CHECK(arma::norm(got - want, "fro") / arma::norm(want, "fro") < 1e-10);
    }

    SUBCASE("singular pilots are rejected")
    {
        const arma::cx_mat bad(4, 4, arma::fill::zeros);
        CHECK_THROWS_AS(ls_estimate(h, bad), numerical_error);
    }
}

TEST_CASE("LMMSE beats LS in ensemble MSE at low and moderate SNR")
{
    // Channels drawn from the clustered model; covariance calibrated from an
    // independent draw, exactly as the pipeline does.
    const auto geometry = ArrayGeometry::make(8, 2);
    const PatternGainModel gains(2, 4, 4, 5);
    const auto map = partition_antennas(8, 2);
    const auto x = make_pilots(8);

    std::vector<arma::cx_mat> calibration;
    for (std::uint64_t s = 0; s < 400; ++s)
        calibration.push_back(composite_channel(
            generate_all_modes(geometry, sample_paths(9000 + s, 4, 8, 0.13), gains), map));
    const auto cov = estimate_covariance(calibration);

    for (double snr_db : {0.0, 10.0, 20.0})
    {
        double mse_lmmse = 0.0, mse_ls = 0.0;
        const int trials = 200;
        for (int t = 0; t < trials; ++t)
        {
            const auto h = composite_channel(
                generate_all_modes(geometry,
                                   sample_paths(100 + static_cast<std::uint64_t>(t), 4, 8, 0.13),
                                   gains),
                map);
            const auto y = transmit(h, x, snr_db, 5000 + static_cast<std::uint64_t>(t));
            const double sigma2 = noise_variance(snr_db);
            const auto est_l = lmmse_estimate(y, x, cov, sigma2, 2);
            const auto est_s = ls_estimate(y, x);
            mse_lmmse += arma::accu(arma::square(arma::abs(est_l - h)));
            mse_ls += arma::accu(arma::square(arma::abs(est_s - h)));
        }
        REQUIRE(mse_lmmse <= mse_ls);
        if (snr_db == 0.0)
            REQUIRE(mse_lmmse < mse_ls);
    }
}
