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

#include "sfield/geometry.hpp"
#include "sfield/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace sfield
{

double nyquist_spacing(double cutoff_hz, double speed_of_sound)
{
    if (!(cutoff_hz > 0.0))
        throw validation_error("nyquist_spacing: cutoff must be positive");
    if (!(speed_of_sound > 0.0))
        throw validation_error("nyquist_spacing: speed of sound must be positive");
    return speed_of_sound / (2.0 * cutoff_hz);
}

void GridSpec::validate() const
{
    if (!(spacing > 0.0))
        throw validation_error("grid: spacing must be positive");
    if (nx < 1 || ny < 1 || nz < 1)
        throw validation_error("grid: extents must be positive");
    if (!origin.allFinite())
        throw validation_error("grid: origin must be finite");
}

Vec3 GridSpec::point(int row) const
{
    const int ix = row % nx;
    const int iy = (row / nx) % ny;
    const int iz = row / (nx * ny);
    return point(ix, iy, iz);
}

Eigen::Vector3i GridSpec::nearestIndex(const Vec3 &p) const
{
    Eigen::Vector3i idx;
    for (int a = 0; a < 3; ++a)
        idx[a] = static_cast<int>(std::lround((p[a] - origin[a]) / spacing));
    return idx;
}

bool GridSpec::containsInHull(const Vec3 &p, double eps) const
{
    const int dims[3] = {nx, ny, nz};
    for (int a = 0; a < 3; ++a)
    {
        const double lo = origin[a];
        const double hi = origin[a] + spacing * (dims[a] - 1);
        if (p[a] < lo - eps || p[a] > hi + eps)
            return false;
    }
    return true;
}

bool GridSpec::onGridPoint(const Vec3 &p, double eps) const
{
    const Eigen::Vector3i idx = nearestIndex(p);
    if (idx[0] < 0 || idx[0] >= nx || idx[1] < 0 || idx[1] >= ny || idx[2] < 0 || idx[2] >= nz)
        return false;
    return (p - point(idx[0], idx[1], idx[2])).cwiseAbs().maxCoeff() <= eps;
}

Trajectory::Trajectory(std::vector<Vec3> positions, int mic_count, bool grid_snapped)
    : positions_(std::move(positions)), mic_count_(mic_count), grid_snapped_(grid_snapped)
{
    if (mic_count_ < 1)
        throw validation_error("trajectory: mic count must be positive");
    if (positions_.empty() || positions_.size() % static_cast<std::size_t>(mic_count_) != 0)
        throw validation_error("trajectory: position count must be a positive multiple of mic count");
    for (const Vec3 &p : positions_)
        if (!p.allFinite())
            throw validation_error("trajectory: non-finite position");
}

namespace
{

// Anchor offsets that tile [0, dim) with windows of width w: stride-w steps
// plus the flush-right anchor. Gives the most even coverage a rigid window
// allows.
std::vector<int> balanced_anchors(int dim, int w)
{
    std::vector<int> a;
    for (int x = 0; x + w <= dim; x += w)
        a.push_back(x);
    if (a.empty() || a.back() != dim - w)
        a.push_back(dim - w);
    return a;
}

struct Pose
{
    int ax = 0, ay = 0; // anchor in grid indices
    int bw = 0, bh = 0; // bounding box of the rotated array
    bool transposed = false;
};

} // namespace

Trajectory gen_grid_snapped(const GridSpec &grid, int mic_count, int steps, std::uint64_t seed)
{
    grid.validate();
    if (grid.nz != 1)
        throw validation_error("gen_grid_snapped: only planar grids (Z = 1) are supported");
    if (mic_count < 1 || mic_count > grid.nx * grid.ny)
        throw validation_error("gen_grid_snapped: mic count exceeds grid capacity");
    if (steps < 1)
        throw validation_error("gen_grid_snapped: steps must be positive");

    // Rectangular array shape w x h, as square as possible, fitting the grid
    // in at least one orientation.
    int w = 0, h = 0;
    for (int d = static_cast<int>(std::sqrt(static_cast<double>(mic_count))); d >= 1; --d)
    {
        if (mic_count % d != 0)
            continue;
        const int e = mic_count / d;
        if ((e <= grid.nx && d <= grid.ny) || (d <= grid.nx && e <= grid.ny))
        {
            w = e;
            h = d;
            break;
        }
    }
    if (w == 0)
        throw validation_error("gen_grid_snapped: mic count has no rectangular layout fitting the grid");
    if (w > grid.nx || h > grid.ny)
        std::swap(w, h);

    // Pose family: distinct node sets of the array over both orientations and
    // balanced anchor translations. The schedule sweeps the family in a
    // seeded random order; cycling keeps per-node visit counts even, which a
    // per-step independent draw does not.
    std::vector<Pose> family;
    auto add_orientation = [&](int bw, int bh, bool transposed) {
        if (bw > grid.nx || bh > grid.ny)
            return;
        for (int ay : balanced_anchors(grid.ny, bh))
            for (int ax : balanced_anchors(grid.nx, bw))
            {
                Pose p{ax, ay, bw, bh, transposed};
                bool dup = false;
                for (const Pose &q : family)
                    dup |= (q.ax == p.ax && q.ay == p.ay && q.bw == p.bw && q.bh == p.bh);
                if (!dup)
                    family.push_back(p);
            }
    };
    add_orientation(w, h, false);
    if (w != h)
        add_orientation(h, w, true);

    std::mt19937_64 rng(seed);
    std::vector<std::size_t> order(family.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);

    std::uniform_int_distribution<int> flip(0, 1);
    std::vector<Vec3> positions;
    positions.reserve(static_cast<std::size_t>(steps) * mic_count);

    for (int n = 0; n < steps; ++n)
    {
        const Pose &pose = family[order[n % order.size()]];
        const int k = flip(rng); // extra 180-degree rotation of the mic assignment
        for (int q = 0; q < mic_count; ++q)
        {
            // mic q at (i, j) in the array frame, x fastest
            const int i = q % w;
            const int j = q / w;
            int u, v;
            if (!pose.transposed)
            {
                u = i;
                v = j;
            }
            else
            {
                u = j;
                v = w - 1 - i;
            }
            if (k)
            {
                u = pose.bw - 1 - u;
                v = pose.bh - 1 - v;
            }
            positions.push_back(grid.point(pose.ax + u, pose.ay + v, 0));
        }
    }
    return Trajectory(std::move(positions), mic_count, true);
}

Trajectory gen_lissajous(const GridSpec &grid, int ratio_num, int ratio_den, int steps, double margin)
{
    grid.validate();
    if (steps < 2)
        throw validation_error("gen_lissajous: need at least 2 samples");
    if (ratio_num < 1 || ratio_den < 1)
        throw validation_error("gen_lissajous: frequency ratio terms must be positive");
    if (margin < 0.0)
        throw validation_error("gen_lissajous: margin must be non-negative");

    const double ext_x = grid.spacing * (grid.nx - 1);
    const double ext_y = grid.spacing * (grid.ny - 1);
    const double ax = 0.5 * ext_x - margin;
    const double ay = 0.5 * ext_y - margin;
    if (ax < 0.0 || ay < 0.0)
        throw validation_error("gen_lissajous: margin exceeds half the grid extent");

    const Vec3 center = grid.origin + 0.5 * Vec3(ext_x, ext_y, grid.spacing * (grid.nz - 1));
    std::vector<Vec3> positions;
    positions.reserve(steps);
    for (int n = 0; n < steps; ++n)
    {
        const double t = static_cast<double>(n) / static_cast<double>(steps);
        const double px = ax * std::sin(2.0 * M_PI * ratio_num * t + 0.5 * M_PI);
        const double py = ay * std::sin(2.0 * M_PI * ratio_den * t);
        positions.push_back(center + Vec3(px, py, 0.0));
    }
    return Trajectory(std::move(positions), 1, false);
}

Trajectory gen_static_grid(const GridSpec &grid, int steps)
{
    grid.validate();
    if (steps < 1)
        throw validation_error("gen_static_grid: steps must be positive");
    const int n_points = grid.count();
    std::vector<Vec3> positions;
    positions.reserve(static_cast<std::size_t>(steps) * n_points);
    for (int n = 0; n < steps; ++n)
        for (int u = 0; u < n_points; ++u)
            positions.push_back(grid.point(u));
    return Trajectory(std::move(positions), n_points, true);
}

void save_trajectory(const Trajectory &traj, const std::string &path)
{
    std::ofstream f(path);
    if (!f)
        throw validation_error("save_trajectory: cannot open " + path);
    f << "n,mic,x,y,z\n";
    char buf[160];
    for (int n = 0; n < traj.sampleCount(); ++n)
        for (int q = 0; q < traj.micCount(); ++q)
        {
            const Vec3 &p = traj.position(n, q);
            std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g,%.17g\n", n, q, p[0], p[1], p[2]);
            f << buf;
        }
}

Trajectory load_trajectory(const std::string &path)
{
    std::ifstream f(path);
    if (!f)
        throw validation_error("load_trajectory: cannot open " + path);
    std::string line;
    if (!std::getline(f, line))
        throw validation_error("load_trajectory: empty file " + path);
    // header "n,mic,x,y,z"

    std::vector<Vec3> positions;
    std::vector<std::pair<int, int>> indices; // (n, mic) per row
    std::vector<int> linenos;
    int lineno = 1;
    int max_q = -1;
    while (std::getline(f, line))
    {
        ++lineno;
        if (line.empty())
            continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        int n, q;
        double x, y, z;
        if (!(ls >> n >> q >> x >> y >> z) || n < 0 || q < 0)
            throw validation_error("load_trajectory: malformed row at line " + std::to_string(lineno));
        positions.emplace_back(x, y, z);
        indices.emplace_back(n, q);
        linenos.push_back(lineno);
        max_q = std::max(max_q, q);
    }
    if (positions.empty())
        throw validation_error("load_trajectory: no rows in " + path);

    const int mic_count = max_q + 1;
    if (positions.size() % static_cast<std::size_t>(mic_count) != 0)
        throw validation_error("load_trajectory: row count is not a multiple of the mic count");
    for (std::size_t i = 0; i < indices.size(); ++i)
    {
        const int want_n = static_cast<int>(i) / mic_count;
        const int want_q = static_cast<int>(i) % mic_count;
        if (indices[i].first != want_n || indices[i].second != want_q)
            throw validation_error("load_trajectory: out-of-order row at line " + std::to_string(linenos[i]));
    }
    return Trajectory(std::move(positions), mic_count, false);
}

} // namespace sfield
