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
#include "sfield/geometry.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

using namespace sfield;

namespace
{
GridSpec make_grid(double spacing, int nx, int ny, int nz = 1, Vec3 origin = Vec3(2.75, 1.4, 0.8))
{
    GridSpec g;
    g.origin = origin;
    g.spacing = spacing;
    g.nx = nx;
    g.ny = ny;
    g.nz = nz;
    return g;
}
} // namespace

TEST_CASE("nyquist spacing values")
{
    // f_c = 4 kHz in air: just above the 0.04 m grid used in practice
    const double d = nyquist_spacing(4000.0, 343.0);
    CHECK(d == doctest::Approx(0.0428875).epsilon(1e-12));
    CHECK(d > 0.04);
    CHECK(d < 0.043);

    // the 10^6 points per cubic meter example
    CHECK(nyquist_spacing(17000.0, 340.0) == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(nyquist_spacing(1.0, 2.0) == doctest::Approx(1.0));

    CHECK_THROWS_AS(nyquist_spacing(0.0, 343.0), validation_error);
    CHECK_THROWS_AS(nyquist_spacing(4000.0, -1.0), validation_error);
}

TEST_CASE("grid index round trip is the identity")
{
    const GridSpec g = make_grid(0.02, 5, 4, 3);
    for (int u = 0; u < g.count(); ++u)
    {
        const Vec3 p = g.point(u);
        const Eigen::Vector3i idx = g.nearestIndex(p);
        CHECK(g.rowIndex(idx[0], idx[1], idx[2]) == u);
        CHECK(g.onGridPoint(p));
    }
}

TEST_CASE("grid row ordering is x fastest, then y, then z")
{
    const GridSpec g = make_grid(1.0, 2, 3, 2, Vec3(0, 0, 0));
    CHECK(g.rowIndex(1, 0, 0) == 1);
    CHECK(g.rowIndex(0, 1, 0) == 2);
    CHECK(g.rowIndex(0, 0, 1) == 6);
    CHECK(g.point(1)[0] == doctest::Approx(1.0));
    CHECK(g.point(2)[1] == doctest::Approx(1.0));
    CHECK(g.point(6)[2] == doctest::Approx(1.0));
}

TEST_CASE("grid snapped poses occupy distinct grid points")
{
    const GridSpec g = make_grid(0.02, 5, 5);
    const Trajectory t = gen_grid_snapped(g, 25, 12, 42);
    CHECK(t.gridSnapped());
    CHECK(t.micCount() == 25);
    for (int n = 0; n < t.sampleCount(); ++n)
    {
        std::set<int> nodes;
        for (int q = 0; q < 25; ++q)
        {
            const Vec3 p = t.position(n, q);
            REQUIRE(g.onGridPoint(p, 1e-12));
            const Eigen::Vector3i idx = g.nearestIndex(p);
            nodes.insert(g.rowIndex(idx[0], idx[1], idx[2]));
        }
        // Q = N: every grid point occupied at every step
        CHECK(nodes.size() == 25);
    }
}

TEST_CASE("single microphone on a 2x2 grid stays on the four nodes")
{
    const GridSpec g = make_grid(0.05, 2, 2);
    const Trajectory t = gen_grid_snapped(g, 1, 8, 7);
    for (int n = 0; n < 8; ++n)
        CHECK(g.onGridPoint(t.position(n, 0), 1e-12));
}

TEST_CASE("grid snapped coverage visits every node")
{
    const GridSpec g = make_grid(0.02, 5, 5);
    for (int q : {5, 10, 15, 20})
    {
        const int steps = 50 * (25 / q + 1);
        const Trajectory t = gen_grid_snapped(g, q, steps, 11);
        std::set<int> seen;
        for (int n = 0; n < t.sampleCount(); ++n)
            for (int m = 0; m < q; ++m)
            {
                const Eigen::Vector3i idx = g.nearestIndex(t.position(n, m));
                seen.insert(g.rowIndex(idx[0], idx[1], idx[2]));
            }
        CHECK(seen.size() == 25);
    }
}

TEST_CASE("grid snapped rejects infeasible requests")
{
    const GridSpec g = make_grid(0.02, 5, 5);
    CHECK_THROWS_AS(gen_grid_snapped(g, 26, 4, 1), validation_error);
    CHECK_THROWS_AS(gen_grid_snapped(make_grid(0.02, 5, 5, 2), 5, 4, 1), validation_error);
    // 7 = 7x1 does not fit a 5x5 grid in any orientation
    CHECK_THROWS_AS(gen_grid_snapped(g, 7, 4, 1), validation_error);
}

TEST_CASE("grid snapped is deterministic per seed")
{
    const GridSpec g = make_grid(0.02, 5, 5);
    const Trajectory a = gen_grid_snapped(g, 10, 40, 3);
    const Trajectory b = gen_grid_snapped(g, 10, 40, 3);
    const Trajectory c = gen_grid_snapped(g, 10, 40, 4);
    REQUIRE(a.positions().size() == b.positions().size());
    bool equal = true, differs = false;
    for (std::size_t i = 0; i < a.positions().size(); ++i)
    {
        equal &= a.positions()[i] == b.positions()[i];
        differs |= a.positions()[i] != c.positions()[i];
    }
    CHECK(equal);
    CHECK(differs);
}

TEST_CASE("lissajous ratio 1/1 draws the inscribed ellipse")
{
    const GridSpec g = make_grid(0.04, 11, 11);
    const int steps = 400;
    const Trajectory t = gen_lissajous(g, 1, 1, steps, 0.0);
    const double ax = 0.5 * 0.4, ay = 0.5 * 0.4;
    const Vec3 c = g.origin + Vec3(ax, ay, 0.0);
    for (int n = 0; n < steps; ++n)
    {
        const Vec3 p = t.position(n, 0);
        // sin with pi/2 offset against sin: x^2/ax^2 + y^2/ay^2 = 1
        const double e = std::pow((p[0] - c[0]) / ax, 2) + std::pow((p[1] - c[1]) / ay, 2);
        CHECK(e == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("lissajous spans the margin-inset bounding box")
{
    const GridSpec g = make_grid(0.04, 20, 20);
    const double margin = 0.01;
    // steps divisible by 4 * 17 * 16 so the extremes are hit exactly
    const int steps = 4 * 17 * 16;
    const Trajectory t = gen_lissajous(g, 17, 16, steps, margin);
    double min_x = 1e9, max_x = -1e9, min_y = 1e9, max_y = -1e9;
    for (int n = 0; n < steps; ++n)
    {
        const Vec3 p = t.position(n, 0);
        min_x = std::min(min_x, p[0]);
        max_x = std::max(max_x, p[0]);
        min_y = std::min(min_y, p[1]);
        max_y = std::max(max_y, p[1]);
        CHECK(g.containsInHull(p));
    }
    const double lo_x = g.origin[0] + margin, hi_x = g.origin[0] + 19 * 0.04 - margin;
    const double lo_y = g.origin[1] + margin, hi_y = g.origin[1] + 19 * 0.04 - margin;
    CHECK(min_x == doctest::Approx(lo_x).epsilon(1e-9));
    CHECK(max_x == doctest::Approx(hi_x).epsilon(1e-9));
    CHECK(min_y == doctest::Approx(lo_y).epsilon(1e-9));
    CHECK(max_y == doctest::Approx(hi_y).epsilon(1e-9));
}

TEST_CASE("lissajous is deterministic")
{
    const GridSpec g = make_grid(0.04, 10, 10);
    const Trajectory a = gen_lissajous(g, 17, 16, 100, 0.0);
    const Trajectory b = gen_lissajous(g, 17, 16, 100, 0.0);
    for (int n = 0; n < 100; ++n)
        CHECK(a.position(n, 0) == b.position(n, 0));
}

TEST_CASE("trajectory csv round trip is bitwise")
{
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "sfield_test_geometry";
    fs::create_directories(dir);
    const std::string path = (dir / "traj.csv").string();

    const GridSpec g = make_grid(0.02, 5, 5);
    const Trajectory a = gen_grid_snapped(g, 10, 17, 5);
    save_trajectory(a, path);
    const Trajectory b = load_trajectory(path);
    REQUIRE(b.micCount() == a.micCount());
    REQUIRE(b.sampleCount() == a.sampleCount());
    for (int n = 0; n < a.sampleCount(); ++n)
        for (int q = 0; q < a.micCount(); ++q)
            CHECK(a.position(n, q) == b.position(n, q));

    SUBCASE("empty file errors")
    {
        const std::string empty = (dir / "empty.csv").string();
        std::ofstream(empty).close();
        CHECK_THROWS_AS(load_trajectory(empty), validation_error);
    }

    SUBCASE("handcrafted three-line file")
    {
        const std::string hand = (dir / "hand.csv").string();
        {
            std::ofstream f(hand);
            f << "n,mic,x,y,z\n";
            f << "0,0,1.5,2.25,0.5\n";
            f << "1,0,1.25,2,0.75\n";
            f << "2,0,1,1.75,1\n";
        }
        const Trajectory t = load_trajectory(hand);
        CHECK(t.sampleCount() == 3);
        CHECK(t.micCount() == 1);
        CHECK(t.position(0, 0) == Vec3(1.5, 2.25, 0.5));
        CHECK(t.position(2, 0) == Vec3(1.0, 1.75, 1.0));
    }

    SUBCASE("malformed row reports the line number")
    {
        const std::string bad = (dir / "bad.csv").string();
        {
            std::ofstream f(bad);
            f << "n,mic,x,y,z\n";
            f << "0,0,1.5,2.25,0.5\n";
            f << "1,0,oops,2,0.75\n";
        }
        try
        {
            load_trajectory(bad);
            FAIL("expected validation_error");
        }
        catch (const validation_error &e)
        {
            CHECK(std::string(e.what()).find("line 3") != std::string::npos);
        }
    }

    fs::remove_all(dir);
}

TEST_CASE("static grid trajectory pins every node for every sample")
{
    const GridSpec g = make_grid(0.02, 3, 2);
    const Trajectory t = gen_static_grid(g, 5);
    CHECK(t.micCount() == 6);
    CHECK(t.sampleCount() == 5);
    for (int n = 0; n < 5; ++n)
        for (int u = 0; u < 6; ++u)
            CHECK(t.position(n, u) == g.point(u));
}
