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

#include "prmimo/rng.hpp"

using namespace prmimo;

TEST_CASE("same seed reproduces the same stream")
{
    Rng a(42), b(42);
    for (int i = 0; i < 1000; ++i)
        REQUIRE(a.next_u64() == b.next_u64());
}

TEST_CASE("different streams from one master seed differ")
{
    Rng a(split_seed(7, 1)), b(split_seed(7, 2));
    int equal = 0;
    for (int i = 0; i < 64; ++i)
        equal += (a.next_u64() == b.next_u64());
    CHECK(equal == 0);
}

TEST_CASE("uniform stays in [0, 1) with a sane mean")
{
    Rng rng(3);
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i)
    {
        const double u = rng.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    CHECK(std::abs(sum / n - 0.5) < 0.01);
}

TEST_CASE("gaussian moments")
{
    Rng rng(11);
    double sum = 0.0, sq = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i)
    {
        const double g = rng.gaussian();
        sum += g;
        sq += g * g;
    }
    CHECK(std::abs(sum / n) < 0.02);
    CHECK(std::abs(sq / n - 1.0) < 0.02);
}

TEST_CASE("complex gaussian has unit variance split evenly")
{
    Rng rng(13);
    double power = 0.0, re2 = 0.0, im2 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i)
    {
        const auto z = rng.cgaussian();
        power += std::norm(z);
        re2 += z.real() * z.real();
        im2 += z.imag() * z.imag();
    }
    CHECK(std::abs(power / n - 1.0) < 0.02);
    CHECK(std::abs(re2 / n - 0.5) < 0.02);
    CHECK(std::abs(im2 / n - 0.5) < 0.02);
}

TEST_CASE("sample seeds are distinct across indices")
{
    CHECK(sample_seed(1, 0) != sample_seed(1, 1));
    CHECK(sample_seed(1, 0) != sample_seed(2, 0));
}
