// SPDX-License-Identifier: Apache-2.0
//
// sfield — measurement of sound fields with moving microphones
// Copyright (C) 2026 The sfield authors
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

#include "sfield/errors.hpp"
#include "sfield/interp.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace sfield;

namespace
{
GridSpec make_grid(double spacing, int nx, int ny, int nz = 1, Vec3 origin = Vec3(0, 0, 0))
{
    GridSpec g;
    g.origin = origin;
    g.spacing = spacing;
    g.nx = nx;
    g.ny = ny;
    g.nz = nz;
    return g;
}

const InterpolationKernel kLinear{KernelKind::Linear, 1};
const InterpolationKernel kLagrange19{KernelKind::Lagrange, 19};
} // namespace

TEST_CASE("node positions reproduce one-hot stencils for both kernels")
{
    const GridSpec g = make_grid(0.02, 5, 5, 1, Vec3(2.75, 1.4, 0.8));
    for (const auto &kernel : {kLinear, kLagrange19})
        for (int u = 0; u < g.count(); ++u)
        {
            const WeightStencil st = weights(kernel, g, g.point(u));
            REQUIRE(st.entries.size() == 1);
            CHECK(st.entries[0].first == u);
            CHECK(st.entries[0].second == 1.0);
        }
}

TEST_CASE("linear midpoint weights are (1/2, 1/2)")
{
    const GridSpec g = make_grid(1.0, 2, 1);
    const WeightStencil st = weights(kLinear, g, Vec3(0.5, 0.0, 0.0));
    REQUIRE(st.entries.size() == 2);
    CHECK(st.entries[0].second == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(st.entries[1].second == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("cubic lagrange midpoint weights are (-1/16, 9/16, 9/16, -1/16)")
{
    // nodes at -D, 0, D, 2D; query at D/2
    const GridSpec g = make_grid(0.02, 4, 1, 1, Vec3(-0.02, 0, 0));
    const InterpolationKernel cubic{KernelKind::Lagrange, 3};
    const WeightStencil st = weights(cubic, g, Vec3(0.01, 0.0, 0.0));
    REQUIRE(st.entries.size() == 4);
    CHECK(st.entries[0].second == doctest::Approx(-1.0 / 16).epsilon(1e-12));
    CHECK(st.entries[1].second == doctest::Approx(9.0 / 16).epsilon(1e-12));
    CHECK(st.entries[2].second == doctest::Approx(9.0 / 16).epsilon(1e-12));
    CHECK(st.entries[3].second == doctest::Approx(-1.0 / 16).epsilon(1e-12));
}

TEST_CASE("partition of unity over random interior positions")
{
    const GridSpec g = make_grid(0.02, 6, 5, 2, Vec3(1.0, 1.0, 1.0));
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> ux(0.0, 0.02 * 5), uy(0.0, 0.02 * 4), uz(0.0, 0.02 * 1);
    for (int trial = 0; trial < 10000; ++trial)
    {
        const Vec3 p = g.origin + Vec3(ux(rng), uy(rng), uz(rng));
        for (const auto &kernel : {kLinear, kLagrange19})
        {
            const WeightStencil st = weights(kernel, g, p);
            CHECK(st.sum() == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("linear stencils have at most 4 nonzeros on a planar grid")
{
    const GridSpec g = make_grid(0.02, 5, 5);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 0.08);
    for (int trial = 0; trial < 100; ++trial)
    {
        const WeightStencil st = weights(kLinear, g, g.origin + Vec3(u(rng), u(rng), 0.0));
        CHECK(st.entries.size() <= 4);
    }
}

TEST_CASE("lagrange reproduces separable polynomials up to its degree")
{
    const GridSpec g = make_grid(0.5, 6, 6);
    const int d = 4;
    const InterpolationKernel kernel{KernelKind::Lagrange, d};

    // samples of p(x) q(y) with per-axis degree d on the grid
    auto poly = [](double t) { return ((1.3 * t - 0.7) * t + 0.4) * t * t + 0.2; }; // degree 4
    Eigen::VectorXd values(g.count());
    for (int u = 0; u < g.count(); ++u)
    {
        const Vec3 p = g.point(u);
        values[u] = poly(p[0]) * poly(p[1]);
    }

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> uu(0.0, 2.5);
    for (int trial = 0; trial < 200; ++trial)
    {
        const Vec3 p = g.origin + Vec3(uu(rng), uu(rng), 0.0);
        const WeightStencil st = weights(kernel, g, p);
        double acc = 0.0;
        for (const auto &[u, w] : st.entries)
            acc += w * values[u];
        const double expected = poly(p[0]) * poly(p[1]);
        CHECK(acc == doctest::Approx(expected).epsilon(1e-10));
    }
}

TEST_CASE("lagrange degree 1 equals linear on interior cells")
{
    const GridSpec g = make_grid(0.25, 7, 7);
    const InterpolationKernel lag1{KernelKind::Lagrange, 1};
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.01, 0.25 * 6 - 0.01);
    for (int trial = 0; trial < 500; ++trial)
    {
        const Vec3 p = g.origin + Vec3(u(rng), u(rng), 0.0);
        const WeightStencil a = weights(kLinear, g, p);
        const WeightStencil b = weights(lag1, g, p);
        REQUIRE(a.entries.size() == b.entries.size());
        for (std::size_t i = 0; i < a.entries.size(); ++i)
        {
            CHECK(a.entries[i].first == b.entries[i].first);
            CHECK(a.entries[i].second == doctest::Approx(b.entries[i].second).epsilon(1e-13));
        }
    }
}

TEST_CASE("1-D lagrange weights equal the maximally flat FIR fractional delay filter")
{
    for (int d : {1, 2, 3, 5, 7})
    {
        for (double tau : {0.3, 1.7, 0.5 * d + 0.25})
        {
            if (tau >= d + 1)
                continue;
            int first = 0;
            const std::vector<double> w = lagrange_axis_weights(tau, d + 1, d, &first);
            REQUIRE(first == 0);
            const Eigen::VectorXd mf = sfield::test::maximally_flat_fd(tau, d);
            REQUIRE(static_cast<int>(w.size()) == d + 1);
            for (int k = 0; k <= d; ++k)
                CHECK(w[k] == doctest::Approx(mf[k]).epsilon(1e-10));
        }
    }
}

TEST_CASE("positions outside the hull are rejected")
{
    const GridSpec g = make_grid(0.02, 5, 5);
    CHECK_THROWS_AS(weights(kLinear, g, g.origin + Vec3(-0.01, 0.0, 0.0)), validation_error);
    CHECK_THROWS_AS(weights(kLinear, g, g.origin + Vec3(0.0, 0.09, 0.0)), validation_error);
    CHECK_THROWS_AS(weights(kLagrange19, g, g.origin + Vec3(0.0, 0.0, 0.001)), validation_error);
}

TEST_CASE("boundary windows shift inward and keep the degree feasible")
{
    const GridSpec g = make_grid(1.0, 5, 1);
    const InterpolationKernel kernel{KernelKind::Lagrange, 19}; // clipped to degree 4
    const WeightStencil st = weights(kernel, g, Vec3(0.1, 0.0, 0.0));
    CHECK(st.entries.size() == 5); // all five nodes, window clipped at the left edge
    CHECK(st.sum() == doctest::Approx(1.0).epsilon(1e-12));
}
