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
#include "sfield/room.hpp"
#include "support/oracles.hpp"

#include <doctest.h>
#include <unsupported/Eigen/FFT>

#include <cmath>
#include <filesystem>

using namespace sfield;

namespace
{

RoomSpec paper_room()
{
    RoomSpec r;
    r.dimensions = Vec3(5.8, 4.15, 2.55);
    r.rt60 = 0.3;
    r.source_position = Vec3(1.4, 1.6, 1.0);
    return r;
}

RoomSpec free_field_room()
{
    RoomSpec r;
    r.dimensions = Vec3(6.0, 4.0, 3.0);
    r.rt60 = 0.0;
    r.source_position = Vec3(1.0, 2.0, 1.5);
    return r;
}

GridSpec paper_grid()
{
    GridSpec g;
    g.origin = Vec3(2.75, 1.4, 0.8);
    g.spacing = 0.02;
    g.nx = 5;
    g.ny = 5;
    g.nz = 1;
    return g;
}

} // namespace

TEST_CASE("free-field pulse lands at the exact integer delay")
{
    // 3.43 m at c0 = 343 m/s and f_s = 8 kHz is exactly 80 samples
    const RoomSpec room = free_field_room();
    const Vec3 receiver = room.source_position + Vec3(3.43, 0.0, 0.0);
    const Eigen::VectorXd h = simulate_rir(room, receiver, 200);

    Eigen::Index peak;
    h.cwiseAbs().maxCoeff(&peak);
    CHECK(peak == 80);

    // peak amplitude: kernel gain 2*nu at t=0 times 1/(4 pi d)
    const double expected = 0.9 / (4.0 * M_PI * 3.43);
    CHECK(h[80] == doctest::Approx(expected).epsilon(1e-9));

    // single pulse: everything outside the kernel window is zero
    for (Eigen::Index n = 0; n < h.size(); ++n)
        if (n < 80 - 41 || n > 80 + 41)
            CHECK(h[n] == 0.0);
}

TEST_CASE("coincident source and receiver clamps the distance attenuation")
{
    const RoomSpec room = free_field_room();
    const Eigen::VectorXd h = simulate_rir(room, room.source_position, 64);
    CHECK(h.allFinite());
    const double clamp_gain = 0.9 / (4.0 * M_PI * room.speed_of_sound / room.sample_rate);
    CHECK(h[0] == doctest::Approx(clamp_gain).epsilon(1e-9));
}

TEST_CASE("free-field reciprocity: swapping source and receiver is exact")
{
    RoomSpec a = free_field_room();
    const Vec3 other(4.2, 1.3, 2.1);
    const Eigen::VectorXd ha = simulate_rir(a, other, 256);

    RoomSpec b = a;
    b.source_position = other;
    const Eigen::VectorXd hb = simulate_rir(b, a.source_position, 256);
    CHECK((ha - hb).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("schroeder rt60 of the simulated room is within 20 percent")
{
    RoomSpec room = paper_room();
    const Eigen::VectorXd h = simulate_rir(room, Vec3(2.75, 1.4, 0.8), 1600);
    const double rt = test::schroeder_rt60(h, room.sample_rate);
    CHECK(rt == doctest::Approx(0.3).epsilon(0.20));
}

TEST_CASE("schroeder decay curve is monotonically non-increasing")
{
    RoomSpec room = paper_room();
    const Eigen::VectorXd h = simulate_rir(room, Vec3(3.0, 2.0, 1.2), 800);
    double acc = 0.0;
    Eigen::VectorXd decay(h.size());
    for (Eigen::Index i = h.size() - 1; i >= 0; --i)
    {
        acc += h[i] * h[i];
        decay[i] = acc;
    }
    for (Eigen::Index i = 1; i < decay.size(); ++i)
        CHECK(decay[i] <= decay[i - 1]);
}

TEST_CASE("spectral content above the cutoff is attenuated by at least 40 dB")
{
    RoomSpec room = paper_room();
    room.sample_rate = 16000.0;
    room.cutoff = 4000.0;
    const int len = 2048;
    const Eigen::VectorXd h = simulate_rir(room, Vec3(3.1, 2.2, 1.3), len);

    Eigen::FFT<double> fft;
    std::vector<double> in(h.data(), h.data() + len);
    std::vector<std::complex<double>> spec;
    fft.fwd(spec, in);

    const double df = room.sample_rate / len;
    double pass = 0.0, stop = 0.0;
    int pass_n = 0, stop_n = 0;
    for (int k = 0; k < len / 2; ++k)
    {
        const double f = k * df;
        const double p = std::norm(spec[k]);
        if (f >= 0.1 * room.cutoff && f <= 0.8 * room.cutoff)
        {
            pass += p;
            ++pass_n;
        }
        else if (f >= 1.2 * room.cutoff)
        {
            stop += p;
            ++stop_n;
        }
    }
    const double ratio_db = 10.0 * std::log10((pass / pass_n) / (stop / stop_n));
    CHECK(ratio_db >= 40.0);
}

TEST_CASE("grid rir set has the expected shape and is deterministic")
{
    RoomSpec room = paper_room();
    const GridSpec grid = paper_grid();
    const RirSet a = simulate_grid_rirs(room, grid, 500);
    CHECK(a.count() == 25);
    CHECK(a.length() == 500);

    const RirSet b = simulate_grid_rirs(room, grid, 500);
    CHECK((a.data() - b.data()).cwiseAbs().maxCoeff() == 0.0);

    // single-point grid equals simulate_rir at the origin
    GridSpec one = grid;
    one.nx = one.ny = one.nz = 1;
    const RirSet c = simulate_grid_rirs(room, one, 300);
    const Eigen::VectorXd direct = simulate_rir(room, grid.origin, 300);
    CHECK((c.data().row(0).transpose() - direct).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("sfr round trip is bitwise")
{
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "sfield_test_room";
    fs::create_directories(dir);
    const std::string path = (dir / "t.sfr").string();

    RoomSpec room = paper_room();
    const RirSet a = simulate_grid_rirs(room, paper_grid(), 128);
    a.saveSfr(path);
    const RirSet b = RirSet::loadSfr(path);
    CHECK(b.grid().nx == 5);
    CHECK(b.grid().spacing == a.grid().spacing);
    CHECK(b.grid().origin == a.grid().origin);
    CHECK(b.sampleRate() == a.sampleRate());
    CHECK((a.data() - b.data()).cwiseAbs().maxCoeff() == 0.0);

    a.saveCsv((dir / "t.csv").string());
    CHECK(fs::exists(dir / "t.csv"));
    fs::remove_all(dir);
}

TEST_CASE("invalid inputs are rejected")
{
    RoomSpec room = paper_room();
    CHECK_THROWS_AS(simulate_rir(room, Vec3(-0.1, 1.0, 1.0), 100), validation_error);
    CHECK_THROWS_AS(simulate_rir(room, Vec3(1.0, 1.0, 1.0), 0), validation_error);

    RoomSpec bad = room;
    bad.source_position = Vec3(6.0, 1.0, 1.0);
    CHECK_THROWS_AS(bad.validate(), validation_error);

    bad = room;
    bad.cutoff = 5000.0; // above f_s / 2
    CHECK_THROWS_AS(bad.validate(), validation_error);

    GridSpec outside = paper_grid();
    outside.origin = Vec3(5.7, 4.0, 2.5);
    CHECK_THROWS_AS(simulate_grid_rirs(room, outside, 100), validation_error);
}

TEST_CASE("eyring reflection coefficient for the reference room")
{
    const RoomSpec room = paper_room();
    const double beta = room.reflection_coefficient();
    CHECK(beta > 0.8);
    CHECK(beta < 0.9);
    RoomSpec anechoic = room;
    anechoic.rt60 = 0.0;
    CHECK(anechoic.reflection_coefficient() == 0.0);
}

TEST_CASE("dc highpass removes the zero-frequency component")
{
    RoomSpec room = paper_room();
    room.highpass_hz = 100.0;
    const Eigen::VectorXd h = simulate_rir(room, Vec3(2.8, 1.5, 0.9), 1600);
    RoomSpec plain = room;
    plain.highpass_hz = 0.0;
    const Eigen::VectorXd h0 = simulate_rir(plain, Vec3(2.8, 1.5, 0.9), 1600);
    CHECK(std::abs(h.sum()) < 0.05 * std::abs(h0.sum()));
}
