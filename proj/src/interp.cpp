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

#include "sfield/interp.hpp"
#include "sfield/errors.hpp"

#include <algorithm>
#include <cmath>

namespace sfield
{

namespace
{
// Positions this close to a node (in grid units) are treated as exactly on
// it, so grid-snapped trajectories yield exactly one-hot stencils.
constexpr double kNodeSnapEps = 1e-9;
} // namespace

void InterpolationKernel::validate() const
{
    if (kind == KernelKind::Lagrange && max_degree < 1)
        throw validation_error("interpolation kernel: max_degree must be >= 1");
}

std::vector<double> lagrange_axis_weights(double query, int node_count, int degree, int *first_node)
{
    const int d = std::min(degree, node_count - 1);
    int start = static_cast<int>(std::lround(query - 0.5 * d));
    start = std::clamp(start, 0, node_count - 1 - d);
    *first_node = start;

    std::vector<double> w(static_cast<std::size_t>(d) + 1, 1.0);
    for (int i = 0; i <= d; ++i)
        for (int j = 0; j <= d; ++j)
        {
            if (j == i)
                continue;
            w[i] *= (query - (start + j)) / static_cast<double>(i - j);
        }
    return w;
}

namespace
{

// Per-axis weights: (first node, weight list) in grid units.
void axis_weights(const InterpolationKernel &kernel, double q, int node_count,
                  std::vector<double> &w, int &start)
{
    // Snap to the nearest node when (numerically) on it.
    const double r = std::round(q);
    if (std::abs(q - r) <= kNodeSnapEps && r >= 0.0 && r < node_count)
    {
        start = static_cast<int>(r);
        w.assign(1, 1.0);
        return;
    }

    if (node_count == 1)
    {
        // hull check already guaranteed |q| <= eps, handled by the snap above
        start = 0;
        w.assign(1, 1.0);
        return;
    }

    if (kernel.kind == KernelKind::Linear)
    {
        int i0 = static_cast<int>(std::floor(q));
        i0 = std::clamp(i0, 0, node_count - 2);
        const double f = q - i0;
        start = i0;
        w.assign({1.0 - f, f});
        return;
    }

    w = lagrange_axis_weights(q, node_count, kernel.max_degree, &start);
}

} // namespace

WeightStencil weights(const InterpolationKernel &kernel, const GridSpec &grid, const Vec3 &position)
{
    kernel.validate();
    grid.validate();
    if (!grid.containsInHull(position, kNodeSnapEps * grid.spacing))
        throw validation_error("interpolation: position outside the grid hull");

    const int dims[3] = {grid.nx, grid.ny, grid.nz};
    std::vector<double> axis_w[3];
    int axis_start[3];
    for (int a = 0; a < 3; ++a)
    {
        const double q = (position[a] - grid.origin[a]) / grid.spacing;
        axis_weights(kernel, q, dims[a], axis_w[a], axis_start[a]);
    }

    WeightStencil st;
    st.entries.reserve(axis_w[0].size() * axis_w[1].size() * axis_w[2].size());
    for (std::size_t kz = 0; kz < axis_w[2].size(); ++kz)
        for (std::size_t ky = 0; ky < axis_w[1].size(); ++ky)
        {
            const double wyz = axis_w[1][ky] * axis_w[2][kz];
            for (std::size_t kx = 0; kx < axis_w[0].size(); ++kx)
            {
                const double w = axis_w[0][kx] * wyz;
                if (w == 0.0)
                    continue;
                const int row = grid.rowIndex(axis_start[0] + static_cast<int>(kx),
                                              axis_start[1] + static_cast<int>(ky),
                                              axis_start[2] + static_cast<int>(kz));
                st.entries.emplace_back(row, w);
            }
        }
    return st;
}

} // namespace sfield
