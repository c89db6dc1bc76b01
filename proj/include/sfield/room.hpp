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

#ifndef SFIELD_ROOM_HPP
#define SFIELD_ROOM_HPP

#include "sfield/geometry.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace sfield
{

/// Shoebox room for the image source method.
///
/// rt60 == 0 switches all reflections off (free field). For rt60 > 0 a
/// uniform wall reflection coefficient is derived from Eyring's relation.
/// highpass_hz > 0 enables the classic image-method DC-removal highpass
/// (2nd-order IIR) on every simulated response.
struct RoomSpec
{
    Vec3 dimensions = Vec3::Zero();   // meters
    double rt60 = 0.0;                // seconds; 0 = anechoic
    double speed_of_sound = 343.0;    // m/s
    double sample_rate = 8000.0;      // Hz
    double cutoff = 4000.0;           // Hz, RIR band limit
    Vec3 source_position = Vec3::Zero();
    int max_image_order = -1;         // -1: every image within the time window
    double highpass_hz = 0.0;         // 0 = off

    void validate() const;
    bool contains(const Vec3 &p) const;

    /// Uniform amplitude reflection coefficient from Eyring's relation.
    double reflection_coefficient() const;
};

/// RIRs on a grid: row u holds the response at grid point u in canonical
/// ordering (x fastest, then y, then z).
class RirSet
{
  public:
    RirSet() = default;
    RirSet(GridSpec grid, double sample_rate, Eigen::MatrixXd data);

    const GridSpec &grid() const { return grid_; }
    double sampleRate() const { return sample_rate_; }
    int length() const { return static_cast<int>(data_.cols()); }
    int count() const { return static_cast<int>(data_.rows()); }
    const Eigen::MatrixXd &data() const { return data_; }
    Eigen::MatrixXd &data() { return data_; }

    void saveSfr(const std::string &path) const;
    static RirSet loadSfr(const std::string &path);
    void saveCsv(const std::string &path) const;

  private:
    GridSpec grid_;
    double sample_rate_ = 0.0;
    Eigen::MatrixXd data_; // N x L
};

/// Image source expanded over the reflection lattice: world position and the
/// accumulated reflection amplitude (distance attenuation excluded).
struct ImageSource
{
    Vec3 position;
    double amplitude;
};

/// Image list for one room, bounded by the RIR time window. The expansion is
/// receiver independent, so the list can be shared across many receivers.
class ImageSourceModel
{
  public:
    ImageSourceModel(const RoomSpec &room, int rir_length);

    const RoomSpec &room() const { return room_; }
    int rirLength() const { return rir_length_; }
    const std::vector<ImageSource> &images() const { return images_; }

    /// Normalized lowpass cutoff of the fractional-delay kernel (cycles per
    /// sample): min(cutoff, 0.45 * sample_rate) / sample_rate.
    double kernelCutoff() const { return kernel_cutoff_; }

    /// Exact band-limited RIR at the receiver, length rirLength() samples.
    Eigen::VectorXd rir(const Vec3 &receiver) const;

  private:
    RoomSpec room_;
    int rir_length_;
    double kernel_cutoff_;
    std::vector<ImageSource> images_;
};

/// Band-limited image-source RIR at one receiver inside the room.
Eigen::VectorXd simulate_rir(const RoomSpec &room, const Vec3 &receiver, int length);

/// RIRs at every grid point; rows are independent and computed in parallel.
RirSet simulate_grid_rirs(const RoomSpec &room, const GridSpec &grid, int length);

/// Apply the image-method DC-removal highpass in place.
void apply_dc_highpass(Eigen::VectorXd &h, double highpass_hz, double sample_rate);

} // namespace sfield

#endif
