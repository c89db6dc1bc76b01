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

#include "sfield/room.hpp"
#include "sfield/errors.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace sfield
{

namespace
{
constexpr int kKernelHalf = 40; // 81-tap Hann-windowed sinc
}

void RoomSpec::validate() const
{
    if (!(dimensions.minCoeff() > 0.0))
        throw validation_error("room: dimensions must be positive");
    if (rt60 < 0.0)
        throw validation_error("room: rt60 must be non-negative");
    if (!(speed_of_sound > 0.0))
        throw validation_error("room: speed of sound must be positive");
    if (!(sample_rate > 0.0))
        throw validation_error("room: sample rate must be positive");
    if (!(cutoff > 0.0) || !(cutoff <= 0.5 * sample_rate))
        throw validation_error("room: cutoff must satisfy 0 < f_c <= f_s / 2");
    for (int a = 0; a < 3; ++a)
        if (!(source_position[a] > 0.0) || !(source_position[a] < dimensions[a]))
            throw validation_error("room: source must lie strictly inside the room");
    if (highpass_hz < 0.0)
        throw validation_error("room: highpass frequency must be non-negative");
}

bool RoomSpec::contains(const Vec3 &p) const
{
    for (int a = 0; a < 3; ++a)
        if (p[a] < 0.0 || p[a] > dimensions[a])
            return false;
    return true;
}

double RoomSpec::reflection_coefficient() const
{
    if (rt60 == 0.0)
        return 0.0;
    const double volume = dimensions.prod();
    const double surface = 2.0 * (dimensions[0] * dimensions[1] + dimensions[0] * dimensions[2] +
                                  dimensions[1] * dimensions[2]);
    // Eyring: RT60 = 0.161 V / (-S ln(1 - alpha))
    const double alpha = 1.0 - std::exp(-0.161 * volume / (surface * rt60));
    return std::sqrt(1.0 - alpha);
}

RirSet::RirSet(GridSpec grid, double sample_rate, Eigen::MatrixXd data)
    : grid_(std::move(grid)), sample_rate_(sample_rate), data_(std::move(data))
{
    grid_.validate();
    if (data_.rows() != grid_.count())
        throw validation_error("rir set: row count must equal the grid point count");
    if (data_.cols() < 1)
        throw validation_error("rir set: length must be positive");
    if (!(sample_rate_ > 0.0))
        throw validation_error("rir set: sample rate must be positive");
    if (!data_.allFinite())
        throw validation_error("rir set: non-finite sample");
}

void apply_dc_highpass(Eigen::VectorXd &h, double highpass_hz, double sample_rate)
{
    if (highpass_hz <= 0.0)
        return;
    // Allen-Berkley style 2nd-order highpass
    const double w = 2.0 * M_PI * highpass_hz / sample_rate;
    const double r1 = std::exp(-w);
    const double b1 = 2.0 * r1 * std::cos(w);
    const double b2 = -r1 * r1;
    const double a1 = -(1.0 + r1);
    double y0 = 0.0, y1 = 0.0, y2 = 0.0;
    for (Eigen::Index n = 0; n < h.size(); ++n)
    {
        const double x0 = h[n];
        y2 = y1;
        y1 = y0;
        y0 = b1 * y1 + b2 * y2 + x0;
        h[n] = y0 + a1 * y1 + r1 * y2;
    }
}

ImageSourceModel::ImageSourceModel(const RoomSpec &room, int rir_length)
    : room_(room), rir_length_(rir_length)
{
    room_.validate();
    if (rir_length_ < 1)
        throw validation_error("image source model: RIR length must be positive");

    kernel_cutoff_ = std::min(room_.cutoff, 0.45 * room_.sample_rate) / room_.sample_rate;

    const double beta = room_.reflection_coefficient();
    const double c_ts = room_.speed_of_sound / room_.sample_rate;
    const double max_dist = (static_cast<double>(rir_length_) + kKernelHalf + 1) * c_ts;

    const Vec3 &L = room_.dimensions;
    const Vec3 &s = room_.source_position;
    int n_lim[3];
    for (int a = 0; a < 3; ++a)
        n_lim[a] = beta == 0.0 ? 0 : static_cast<int>(std::ceil(max_dist / (2.0 * L[a])));

    for (int mx = -n_lim[0]; mx <= n_lim[0]; ++mx)
        for (int my = -n_lim[1]; my <= n_lim[1]; ++my)
            for (int mz = -n_lim[2]; mz <= n_lim[2]; ++mz)
                for (int q = 0; q <= 1; ++q)
                    for (int j = 0; j <= 1; ++j)
                        for (int k = 0; k <= 1; ++k)
                        {
                            const int m[3] = {mx, my, mz};
                            const int sgn[3] = {q, j, k};
                            int refl_count = 0;
                            for (int a = 0; a < 3; ++a)
                                refl_count += std::abs(m[a] - sgn[a]) + std::abs(m[a]);
                            if (beta == 0.0 && refl_count > 0)
                                continue;
                            if (room_.max_image_order >= 0)
                            {
                                const int order = std::abs(2 * mx - q) + std::abs(2 * my - j) +
                                                  std::abs(2 * mz - k);
                                if (order > room_.max_image_order)
                                    continue;
                            }
                            ImageSource img;
                            for (int a = 0; a < 3; ++a)
                                img.position[a] = (1 - 2 * sgn[a]) * s[a] + 2.0 * m[a] * L[a];
                            img.amplitude = std::pow(beta, refl_count);
                            images_.push_back(img);
                        }
}

Eigen::VectorXd ImageSourceModel::rir(const Vec3 &receiver) const
{
    if (!room_.contains(receiver))
        throw validation_error("simulate_rir: receiver outside the room");

    const double c_ts = room_.speed_of_sound / room_.sample_rate;
    const int len = rir_length_;
    const double nu = kernel_cutoff_;
    Eigen::VectorXd h = Eigen::VectorXd::Zero(len);

    static bool warned_near_field = false;

    for (const ImageSource &img : images_)
    {
        const double dist = (img.position - receiver).norm();
        const double delay = dist / c_ts; // samples
        if (delay > static_cast<double>(len) + kKernelHalf)
            continue;

        // Near-coincident source and receiver: clamp the 1/d attenuation at
        // one sample of travel distance.
        double dist_eff = dist;
        if (dist_eff < c_ts)
        {
            dist_eff = c_ts;
            if (!warned_near_field)
            {
                std::fprintf(stderr,
                             "sfield: receiver within one sample of an image source; clamping 1/d at c0/fs\n");
                warned_near_field = true;
            }
        }
        const double gain = img.amplitude / (4.0 * M_PI * dist_eff);

        const long center = std::lround(delay);
        const long m_lo = std::max(center - kKernelHalf, 0L);
        const long m_hi = std::min(center + kKernelHalf, static_cast<long>(len) - 1);
        for (long m = m_lo; m <= m_hi; ++m)
        {
            const double t = static_cast<double>(m) - delay;
            const double x = 2.0 * M_PI * nu * t;
            const double sinc = std::abs(x) < 1e-12 ? 1.0 : std::sin(x) / x;
            const double win = 0.5 * (1.0 + std::cos(2.0 * M_PI * t / (2 * kKernelHalf + 1)));
            h[m] += gain * win * 2.0 * nu * sinc;
        }
    }

    apply_dc_highpass(h, room_.highpass_hz, room_.sample_rate);
    return h;
}

Eigen::VectorXd simulate_rir(const RoomSpec &room, const Vec3 &receiver, int length)
{
    return ImageSourceModel(room, length).rir(receiver);
}

RirSet simulate_grid_rirs(const RoomSpec &room, const GridSpec &grid, int length)
{
    grid.validate();
    const int n_points = grid.count();
    for (int u = 0; u < n_points; ++u)
        if (!room.contains(grid.point(u)))
            throw validation_error("simulate_grid_rirs: grid point outside the room");

    const ImageSourceModel model(room, length);
    Eigen::MatrixXd data(n_points, length);
#pragma omp parallel for schedule(dynamic)
    for (int u = 0; u < n_points; ++u)
        data.row(u) = model.rir(grid.point(u)).transpose();
    return RirSet(grid, room.sample_rate, std::move(data));
}

namespace
{

constexpr char kSfrMagic[6] = {'S', 'F', 'R', 'I', 'R', '\0'};
constexpr std::uint16_t kSfrVersion = 1;

template <typename T> void write_pod(std::ofstream &f, const T &v)
{
    f.write(reinterpret_cast<const char *>(&v), sizeof v);
}

template <typename T> void read_pod(std::ifstream &f, T &v)
{
    f.read(reinterpret_cast<char *>(&v), sizeof v);
}

} // namespace

void RirSet::saveSfr(const std::string &path) const
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw validation_error("saveSfr: cannot open " + path);
    f.write(kSfrMagic, sizeof kSfrMagic);
    write_pod(f, kSfrVersion);
    write_pod(f, static_cast<std::uint32_t>(grid_.nx));
    write_pod(f, static_cast<std::uint32_t>(grid_.ny));
    write_pod(f, static_cast<std::uint32_t>(grid_.nz));
    write_pod(f, static_cast<std::uint32_t>(length()));
    write_pod(f, grid_.spacing);
    write_pod(f, grid_.origin[0]);
    write_pod(f, grid_.origin[1]);
    write_pod(f, grid_.origin[2]);
    write_pod(f, sample_rate_);
    for (int u = 0; u < count(); ++u)
        for (int n = 0; n < length(); ++n)
            write_pod(f, data_(u, n));
    if (!f)
        throw validation_error("saveSfr: write failed for " + path);
}

RirSet RirSet::loadSfr(const std::string &path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw validation_error("loadSfr: cannot open " + path);
    char magic[6];
    f.read(magic, sizeof magic);
    if (!f || std::memcmp(magic, kSfrMagic, sizeof kSfrMagic) != 0)
        throw validation_error("loadSfr: bad magic in " + path);
    std::uint16_t version = 0;
    read_pod(f, version);
    if (version != kSfrVersion)
        throw validation_error("loadSfr: unsupported version in " + path);
    std::uint32_t nx = 0, ny = 0, nz = 0, len = 0;
    read_pod(f, nx);
    read_pod(f, ny);
    read_pod(f, nz);
    read_pod(f, len);
    GridSpec grid;
    read_pod(f, grid.spacing);
    read_pod(f, grid.origin[0]);
    read_pod(f, grid.origin[1]);
    read_pod(f, grid.origin[2]);
    grid.nx = static_cast<int>(nx);
    grid.ny = static_cast<int>(ny);
    grid.nz = static_cast<int>(nz);
    double sample_rate = 0.0;
    read_pod(f, sample_rate);

    Eigen::MatrixXd data(static_cast<Eigen::Index>(nx) * ny * nz, len);
    for (Eigen::Index u = 0; u < data.rows(); ++u)
        for (std::uint32_t n = 0; n < len; ++n)
            read_pod(f, data(u, n));
    if (!f)
        throw validation_error("loadSfr: truncated file " + path);
    return RirSet(grid, sample_rate, std::move(data));
}

void RirSet::saveCsv(const std::string &path) const
{
    std::ofstream f(path);
    if (!f)
        throw validation_error("saveCsv: cannot open " + path);
    char buf[48];
    for (int u = 0; u < count(); ++u)
    {
        for (int n = 0; n < length(); ++n)
        {
            std::snprintf(buf, sizeof buf, "%.17g", data_(u, n));
            f << buf << (n + 1 < length() ? "," : "");
        }
        f << "\n";
    }
}

} // namespace sfield
