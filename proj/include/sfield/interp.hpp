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

#ifndef SFIELD_INTERP_HPP
#define SFIELD_INTERP_HPP

#include "sfield/geometry.hpp"

#include <utility>
#include <vector>

namespace sfield
{

enum class KernelKind
{
    Linear,
    Lagrange,
};

/// Spatial interpolation kernel coupling off-grid positions to grid RIRs.
/// 3-D weights are tensor products of per-axis 1-D weights. Lagrange uses
/// the (d+1)-node window centered on the query point, shifted inward at grid
/// boundaries; the per-axis degree is min(max_degree, nodes available - 1).
struct InterpolationKernel
{
    KernelKind kind = KernelKind::Linear;
    int max_degree = 1; // Lagrange only

    void validate() const;
};

/// Sparse interpolation weights over grid rows. Weights sum to 1 (partition
/// of unity); Lagrange weights may be negative.
struct WeightStencil
{
    std::vector<std::pair<int, double>> entries; // (grid row, weight)

    double sum() const
    {
        double acc = 0.0;
        for (const auto &e : entries)
            acc += e.second;
        return acc;
    }
    double sumSquares() const
    {
        double acc = 0.0;
        for (const auto &e : entries)
            acc += e.second * e.second;
        return acc;
    }
};

/// Interpolation weights for a position inside the grid hull. Positions
/// within 1e-9 grid units of a node snap to it and return a one-hot stencil.
/// Throws validation_error for positions outside the hull (no extrapolation).
WeightStencil weights(const InterpolationKernel &kernel, const GridSpec &grid, const Vec3 &position);

/// 1-D Lagrange weights on integer nodes [0, node_count) for a query in grid
/// units. Exposed for direct use and testing; `weights` builds tensor
/// products of these.
std::vector<double> lagrange_axis_weights(double query, int node_count, int degree, int *first_node);

} // namespace sfield

#endif
