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

#ifndef SFIELD_GEOMETRY_HPP
#define SFIELD_GEOMETRY_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace sfield
{

using Vec3 = Eigen::Vector3d;

/// Spatial Nyquist bound c0 / (2 f_c). Grid spacings must stay strictly
/// below the returned value to avoid spatial aliasing.
double nyquist_spacing(double cutoff_hz, double speed_of_sound);

/// Equidistant Cartesian grid of nx*ny*nz points: point (ix,iy,iz) sits at
/// origin + spacing * (ix,iy,iz).
///
/// Canonical row ordering (used by every N-row matrix in the toolkit):
/// row = ix + nx*(iy + ny*iz), i.e. x fastest, then y, then z.
struct GridSpec
{
    Vec3 origin = Vec3::Zero();
    double spacing = 0.0;
    int nx = 0;
    int ny = 0;
    int nz = 0;

    void validate() const;
    int count() const { return nx * ny * nz; }

    int rowIndex(int ix, int iy, int iz) const { return ix + nx * (iy + ny * iz); }
    Vec3 point(int ix, int iy, int iz) const
    {
        return origin + spacing * Vec3(static_cast<double>(ix), static_cast<double>(iy), static_cast<double>(iz));
    }
    Vec3 point(int row) const;

    /// Nearest grid indices, unclamped (may fall outside the index set).
    Eigen::Vector3i nearestIndex(const Vec3 &p) const;

    /// True when p lies inside the per-axis hull [origin, origin+(dim-1)*spacing]
    /// up to eps (meters) slack per axis.
    bool containsInHull(const Vec3 &p, double eps = 1e-9) const;

    /// True when p coincides with a grid point within eps (meters).
    bool onGridPoint(const Vec3 &p, double eps = 1e-12) const;
};

/// Per-time-sample positions of Q microphones. Stored row-major:
/// position(n, q) for n in [0, sampleCount), q in [0, micCount).
class Trajectory
{
  public:
    Trajectory() = default;
    Trajectory(std::vector<Vec3> positions, int mic_count, bool grid_snapped = false);

    int micCount() const { return mic_count_; }
    int sampleCount() const { return mic_count_ ? static_cast<int>(positions_.size()) / mic_count_ : 0; }
    bool gridSnapped() const { return grid_snapped_; }

    const Vec3 &position(int n, int q) const { return positions_[static_cast<std::size_t>(n) * mic_count_ + q]; }
    const std::vector<Vec3> &positions() const { return positions_; }

  private:
    std::vector<Vec3> positions_;
    int mic_count_ = 0;
    bool grid_snapped_ = false;
};

/// Grid-constrained motion of a rectangular Q-microphone array on a planar
/// grid (nz == 1): each step places the array on grid points with a random
/// pi/2 rotation; when Q < nx*ny the pose additionally translates by grid
/// steps. Poses are drawn as a seeded random sweep over a balanced pose
/// family, so coverage of the grid stays even over time. Deterministic per
/// seed; the result has the grid_snapped flag set.
Trajectory gen_grid_snapped(const GridSpec &grid, int mic_count, int steps, std::uint64_t seed);

/// Planar single-microphone Lissajous curve spanning the grid bounding box
/// inset by margin:
///   r(n) = center + A .* [sin(2 pi a n / M + pi/2), sin(2 pi b n / M), 0].
/// Deterministic, no RNG.
Trajectory gen_lissajous(const GridSpec &grid, int ratio_num, int ratio_den, int steps, double margin);

/// All grid points as Q = N static microphones for the given number of steps
/// (the classical fixed-array measurement setup).
Trajectory gen_static_grid(const GridSpec &grid, int steps);

/// CSV with header "n,mic,x,y,z"; positions round-trip bitwise.
void save_trajectory(const Trajectory &traj, const std::string &path);
Trajectory load_trajectory(const std::string &path);

} // namespace sfield

#endif
