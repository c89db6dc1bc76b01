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

#include "sfield/signals.hpp"
#include "sfield/errors.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

namespace sfield
{

namespace
{

// Feedback taps of one primitive polynomial per order (Fibonacci LFSR,
// stage numbering 1..m). Periods are verified exhaustively in the test
// suite for every order listed here.
struct TapEntry
{
    int order;
    int taps[4]; // zero-terminated
};

constexpr TapEntry kLfsrTaps[] = {
    {2, {2, 1, 0, 0}},    {3, {3, 1, 0, 0}},     {4, {4, 1, 0, 0}},
    {5, {5, 2, 0, 0}},    {6, {6, 1, 0, 0}},     {7, {7, 1, 0, 0}},
    {8, {8, 4, 3, 2}},    {9, {9, 4, 0, 0}},     {10, {10, 3, 0, 0}},
    {11, {11, 2, 0, 0}},  {12, {12, 6, 4, 1}},   {13, {13, 4, 3, 1}},
    {14, {14, 5, 3, 1}},  {15, {15, 1, 0, 0}},   {16, {16, 15, 13, 4}},
    {17, {17, 3, 0, 0}},  {18, {18, 7, 0, 0}},   {19, {19, 6, 2, 1}},
    {20, {20, 3, 0, 0}},  {21, {21, 2, 0, 0}},   {22, {22, 1, 0, 0}},
    {23, {23, 5, 0, 0}},  {24, {24, 7, 2, 1}},
};

const TapEntry *find_taps(int order)
{
    for (const auto &e : kLfsrTaps)
        if (e.order == order)
            return &e;
    return nullptr;
}

} // namespace

ExcitationSignal::ExcitationSignal(ExcitationKind kind, Eigen::VectorXd samples, double power)
    : kind_(kind), samples_(std::move(samples)), power_(power)
{
    const auto n = samples_.size();
    if (n < 1)
        throw validation_error("excitation: empty sample vector");
    if (!(power_ > 0.0))
        throw validation_error("excitation: power must be positive");
    if (!samples_.allFinite())
        throw validation_error("excitation: non-finite sample");

    const double mean_power = samples_.squaredNorm() / static_cast<double>(n);
    if (std::abs(mean_power - power_) > 1e-9 * power_)
        throw validation_error("excitation: sample power deviates from declared power");

    if (kind_ == ExcitationKind::Mls)
    {
        // period must be 2^m - 1 and every sample +-sqrt(power)
        long p = n;
        if (p < 3 || ((p + 1) & p) != 0)
            throw validation_error("excitation: MLS period must be 2^m - 1");
        const double amp = std::sqrt(power_);
        for (long i = 0; i < p; ++i)
            if (std::abs(std::abs(samples_[i]) - amp) > 1e-12 * amp)
                throw validation_error("excitation: MLS samples must be +-sqrt(power)");
    }
}

ExcitationSignal generate_mls(int order, double power)
{
    if (order < 2 || order > 24)
        throw validation_error("generate_mls: order must be in [2, 24]");
    if (!(power > 0.0))
        throw validation_error("generate_mls: power must be positive");

    const TapEntry *entry = find_taps(order);
    if (entry == nullptr)
        throw validation_error("generate_mls: no primitive polynomial for this order");

    const long period = (1L << order) - 1;
    const double amp = std::sqrt(power);
    Eigen::VectorXd s(period);

    std::uint32_t state = (1u << order) - 1u; // all ones
    for (long i = 0; i < period; ++i)
    {
        const std::uint32_t out = state & 1u;
        s[i] = out ? amp : -amp;
        std::uint32_t fb = 0;
        for (int t = 0; t < 4 && entry->taps[t] != 0; ++t)
            fb ^= (state >> (entry->taps[t] - 1)) & 1u;
        state = (state >> 1) | (fb << (order - 1));
    }
    return ExcitationSignal(ExcitationKind::Mls, std::move(s), power);
}

ExcitationSignal generate_flat_spectrum(int period, double power, std::uint64_t seed)
{
    if (period < 2)
        throw validation_error("generate_flat_spectrum: period must be >= 2");
    if (!(power > 0.0))
        throw validation_error("generate_flat_spectrum: power must be positive");

    // Constant-magnitude spectrum, random phases, conjugate symmetric.
    const int n = period;
    const double mag = std::sqrt(static_cast<double>(n) * power);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);

    Eigen::VectorXcd spec(n);
    spec[0] = mag; // DC kept real and positive
    for (int k = 1; k < (n + 1) / 2; ++k)
    {
        const double ph = phase(rng);
        spec[k] = std::polar(mag, ph);
        spec[n - k] = std::conj(spec[k]);
    }
    if (n % 2 == 0)
        spec[n / 2] = (phase(rng) < M_PI) ? mag : -mag; // Nyquist bin real

    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> in(spec.data(), spec.data() + n);
    std::vector<std::complex<double>> out(n);
    fft.inv(out, in);

    Eigen::VectorXd s(n);
    for (int i = 0; i < n; ++i)
        s[i] = out[i].real();

    // Remove FFT round-off from the power normalization; a uniform rescale
    // preserves spectral flatness exactly.
    const double actual = s.squaredNorm() / n;
    s *= std::sqrt(power / actual);

    return ExcitationSignal(ExcitationKind::FlatSpectrum, std::move(s), power);
}

Eigen::VectorXd periodic_autocorrelation(const ExcitationSignal &sig)
{
    const Eigen::VectorXd &s = sig.samples();
    const int n = sig.period();
    Eigen::VectorXd r(n);
    for (int m = 0; m < n; ++m)
    {
        double acc = 0.0;
        for (int i = 0; i < n; ++i)
            acc += s[i] * s[(i + m) % n];
        r[m] = acc;
    }
    return r;
}

Eigen::VectorXcd period_spectrum(const ExcitationSignal &sig)
{
    const int n = sig.period();
    Eigen::FFT<double> fft;
    std::vector<double> in(sig.samples().data(), sig.samples().data() + n);
    std::vector<std::complex<double>> out;
    fft.fwd(out, in);
    Eigen::VectorXcd spec(n);
    for (int i = 0; i < n; ++i)
        spec[i] = out[i];
    return spec;
}

void save_excitation_csv(const ExcitationSignal &sig, const std::string &path)
{
    std::ofstream f(path);
    if (!f)
        throw validation_error("save_excitation_csv: cannot open " + path);
    const char *kind = sig.kind() == ExcitationKind::Mls ? "MLS" : "FlatSpectrum";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", sig.power());
    f << "# " << kind << "," << sig.period() << "," << buf << "\n";
    for (int i = 0; i < sig.period(); ++i)
    {
        std::snprintf(buf, sizeof buf, "%.17g", sig.samples()[i]);
        f << buf << "\n";
    }
}

ExcitationSignal load_excitation_csv(const std::string &path)
{
    std::ifstream f(path);
    if (!f)
        throw validation_error("load_excitation_csv: cannot open " + path);
    std::string header;
    if (!std::getline(f, header) || header.size() < 2 || header[0] != '#')
        throw validation_error("load_excitation_csv: missing header line");

    std::string body = header.substr(1);
    std::replace(body.begin(), body.end(), ',', ' ');
    std::istringstream hs(body);
    std::string kind_str;
    long declared_period = 0;
    double power = 0.0;
    if (!(hs >> kind_str >> declared_period >> power))
        throw validation_error("load_excitation_csv: malformed header");

    ExcitationKind kind;
    if (kind_str == "MLS")
        kind = ExcitationKind::Mls;
    else if (kind_str == "FlatSpectrum")
        kind = ExcitationKind::FlatSpectrum;
    else
        throw validation_error("load_excitation_csv: unknown kind '" + kind_str + "'");

    std::vector<double> vals;
    std::string line;
    int lineno = 1;
    while (std::getline(f, line))
    {
        ++lineno;
        if (line.empty())
            continue;
        try
        {
            std::size_t pos = 0;
            double v = std::stod(line, &pos);
            vals.push_back(v);
        }
        catch (const std::exception &)
        {
            throw validation_error("load_excitation_csv: bad sample at line " + std::to_string(lineno));
        }
    }
    if (static_cast<long>(vals.size()) != declared_period)
        throw validation_error("load_excitation_csv: sample count does not match header period");

    Eigen::VectorXd s = Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<long>(vals.size()));
    return ExcitationSignal(kind, std::move(s), power);
}

} // namespace sfield
