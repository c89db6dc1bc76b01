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
#include "sfield/signals.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>

using namespace sfield;

TEST_CASE("mls period lengths match the LFSR order")
{
    CHECK(generate_mls(9, 1.0).period() == 511);
    CHECK(generate_mls(10, 1.0).period() == 1023);
    CHECK(generate_mls(3, 1.0).period() == 7);
}

TEST_CASE("mls order 3 has the two-valued periodic autocorrelation")
{
    const ExcitationSignal s = generate_mls(3, 1.0);
    const Eigen::VectorXd r = test::brute_autocorrelation(s.samples());
    CHECK(r[0] == doctest::Approx(7.0).epsilon(1e-15));
    for (int m = 1; m < 7; ++m)
        CHECK(r[m] == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("mls autocorrelation is (L, -1, ..., -1) * power for orders 3..10")
{
    for (int order = 3; order <= 10; ++order)
    {
        const double power = 2.25;
        const ExcitationSignal s = generate_mls(order, power);
        const Eigen::VectorXd r = periodic_autocorrelation(s);
        const int period = s.period();
        CHECK(r[0] == doctest::Approx(period * power).epsilon(1e-12));
        for (int m = 1; m < period; ++m)
            CHECK(r[m] == doctest::Approx(-power).epsilon(1e-12));
    }
}

TEST_CASE("every supported LFSR order has full period")
{
    // The sequence period equals the register period. It always divides
    // L = 2^m - 1, so it is exactly L iff the sequence differs from itself
    // under a shift of L/p for every prime p dividing L.
    for (int order = 2; order <= 24; ++order)
    {
        const ExcitationSignal s = generate_mls(order, 1.0);
        const long period = s.period();
        REQUIRE(period == (1L << order) - 1);

        long rem = period;
        for (long p = 3; p * p <= rem; p += 2)
        {
            if (rem % p != 0)
                continue;
            while (rem % p == 0)
                rem /= p;
            const long shift = period / p;
            bool differs = false;
            for (long i = 0; i < period && !differs; ++i)
                differs = s.samples()[i] != s.samples()[(i + shift) % period];
            CHECK_MESSAGE(differs, "order ", order, ": sub-period ", shift);
        }
        if (rem > 1)
        {
            const long shift = period / rem;
            bool differs = false;
            for (long i = 0; i < period && !differs; ++i)
                differs = s.samples()[i] != s.samples()[(i + shift) % period];
            CHECK_MESSAGE(differs, "order ", order, ": sub-period ", shift);
        }

        // balance: 2^(m-1) of one sign, 2^(m-1) - 1 of the other
        long plus = 0;
        for (long i = 0; i < period; ++i)
            if (s.samples()[i] > 0)
                ++plus;
        const long expected_half = (period + 1) / 2;
        CHECK((plus == expected_half || plus == expected_half - 1));
    }
}

TEST_CASE("mls is deterministic")
{
    const ExcitationSignal a = generate_mls(9, 1.0);
    const ExcitationSignal b = generate_mls(9, 1.0);
    CHECK((a.samples() - b.samples()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("mls rejects unsupported orders")
{
    CHECK_THROWS_AS(generate_mls(1, 1.0), validation_error);
    CHECK_THROWS_AS(generate_mls(25, 1.0), validation_error);
    CHECK_THROWS_AS(generate_mls(9, 0.0), validation_error);
}

TEST_CASE("flat spectrum period 2 forces autocorrelation (2, 0)")
{
    const ExcitationSignal s = generate_flat_spectrum(2, 1.0, 123);
    const Eigen::VectorXd r = periodic_autocorrelation(s);
    CHECK(r[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(r[1] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("flat spectrum is an exactly perfect sequence")
{
    for (int period : {8, 16, 511})
    {
        const ExcitationSignal s = generate_flat_spectrum(period, 1.0, 7);
        const Eigen::VectorXd r = test::brute_autocorrelation(s.samples());
        CHECK(r[0] == doctest::Approx(static_cast<double>(period)).epsilon(1e-9));
        for (int m = 1; m < period; ++m)
            CHECK(std::abs(r[m]) <= 1e-9 * period);
    }
}

TEST_CASE("flat spectrum power and determinism per seed")
{
    const ExcitationSignal a = generate_flat_spectrum(64, 3.5, 99);
    const ExcitationSignal b = generate_flat_spectrum(64, 3.5, 99);
    const ExcitationSignal c = generate_flat_spectrum(64, 3.5, 100);
    CHECK(a.samples().squaredNorm() / 64 == doctest::Approx(3.5).epsilon(1e-12));
    CHECK((a.samples() - b.samples()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.samples() - c.samples()).cwiseAbs().maxCoeff() > 0.0);
    CHECK_THROWS_AS(generate_flat_spectrum(1, 1.0, 0), validation_error);
}

TEST_CASE("autocorrelation of a constant sequence is L*c^2 at every lag")
{
    Eigen::VectorXd v = Eigen::VectorXd::Constant(5, 3.0);
    const ExcitationSignal s(ExcitationKind::FlatSpectrum, v, 9.0);
    const Eigen::VectorXd r = periodic_autocorrelation(s);
    for (int m = 0; m < 5; ++m)
        CHECK(r[m] == doctest::Approx(45.0).epsilon(1e-12));
}

TEST_CASE("excitation csv round trip")
{
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "sfield_test_signals";
    fs::create_directories(dir);
    const std::string path = (dir / "exc.csv").string();

    const ExcitationSignal a = generate_flat_spectrum(32, 2.0, 5);
    save_excitation_csv(a, path);
    const ExcitationSignal b = load_excitation_csv(path);
    CHECK(b.kind() == a.kind());
    CHECK(b.period() == a.period());
    CHECK(b.power() == a.power());
    CHECK((a.samples() - b.samples()).cwiseAbs().maxCoeff() == 0.0);

    const ExcitationSignal m = generate_mls(5, 1.0);
    save_excitation_csv(m, path);
    const ExcitationSignal m2 = load_excitation_csv(path);
    CHECK(m2.kind() == ExcitationKind::Mls);
    CHECK((m.samples() - m2.samples()).cwiseAbs().maxCoeff() == 0.0);

    fs::remove_all(dir);
}

TEST_CASE("excitation constructor validates the declared power")
{
    Eigen::VectorXd v(4);
    v << 1, -1, 1, -1;
    CHECK_THROWS_AS(ExcitationSignal(ExcitationKind::FlatSpectrum, v, 2.0), validation_error);
}
