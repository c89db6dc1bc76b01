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

#ifndef SFIELD_SYSTEM_HPP
#define SFIELD_SYSTEM_HPP

#include "sfield/geometry.hpp"
#include "sfield/interp.hpp"
#include "sfield/room.hpp"
#include "sfield/signals.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sfield
{

/// Stacked samples of a dynamic measurement run. Stacking order is fixed:
/// sample index n major, microphone index q minor, so samples[n*Q + q] is
/// microphone q at time n.
struct MeasurementRecord
{
    Eigen::VectorXd samples;
    Trajectory trajectory;
    ExcitationSignal excitation;
    int periods = 0;
    std::optional<double> snr_db;
    std::uint64_t noise_seed = 0;

    int micCount() const { return trajectory.micCount(); }
    int sampleCount() const { return trajectory.sampleCount(); }
};

enum class SynthesisMode
{
    /// Per-position image-source RIR, truncated to the requested length,
    /// then steady-state periodic convolution. RIRs are cached per unique
    /// position, so grid-constrained trajectories stay cheap.
    Exact,
    /// Evaluates the same model through an oversampled band-limited table of
    /// the periodic excitation (relative error around 1e-6). Intended for
    /// trajectories where nearly every sample sits at a fresh position.
    /// Requires highpass_hz == 0.
    FastBandlimited,
};

/// Simulates x(n) = sum_k h(r_q(n), k) s(n-k) + eta(n) with the exact
/// image-source RIR at each microphone position (not the grid-interpolated
/// model, so interpolation error shows up as model error downstream).
/// Periodic excitation in steady state; rir_length <= excitation period.
/// White Gaussian noise at sigma_eta^2 = power / 10^(snr_db/10) when snr_db
/// is given.
MeasurementRecord simulate_measurement(const RoomSpec &room, const Trajectory &traj,
                                       const ExcitationSignal &excitation, int periods,
                                       int rir_length, std::optional<double> snr_db,
                                       std::uint64_t noise_seed,
                                       SynthesisMode mode = SynthesisMode::Exact);

/// Dense system x = A h with A = [Phi_1 S, ..., Phi_N S]: column block u is
/// the periodic convolution matrix of the excitation scaled row-wise by the
/// interpolation weight of grid point u.
struct FullSystem
{
    Eigen::MatrixXd matrix; // M x (N*L)
    Eigen::VectorXd rhs;    // M
    GridSpec grid;
    int rir_length = 0;
};

inline constexpr std::size_t kDefaultFullMatrixMaxEntries = 200'000'000;

FullSystem assemble_full(const MeasurementRecord &record, const InterpolationKernel &kernel,
                         const GridSpec &grid, int rir_length,
                         std::size_t max_entries = kDefaultFullMatrixMaxEntries);

/// The L_p decoupled sub-systems: block l couples every L_p-th measurement
/// (offset l) to the N transformed unknowns h~_u(l) through gamma-scaled
/// interpolation weights. Blocks are materialized on demand from the stored
/// stencils; the stacked A~ never exists in memory.
class DecoupledSystem
{
  public:
    DecoupledSystem(GridSpec grid, int period, int periods, int mic_count, double gamma,
                    std::vector<WeightStencil> stencils, Eigen::VectorXd rhs);

    const GridSpec &grid() const { return grid_; }
    int period() const { return period_; }      // L_p = number of blocks
    int periodsR() const { return periods_; }   // R
    int micCount() const { return mic_count_; } // Q
    int rowsPerBlock() const { return periods_ * mic_count_; }
    double gamma() const { return gamma_; }
    const Eigen::VectorXd &rhs() const { return rhs_; }
    const std::vector<WeightStencil> &stencils() const { return stencils_; }

    /// Dense (R*Q) x N matrix of block l.
    Eigen::MatrixXd blockMatrix(int l) const;
    /// Sub-vector of a full-length rhs belonging to block l.
    Eigen::VectorXd blockRhs(int l, const Eigen::VectorXd &rhs) const;
    Eigen::VectorXd blockRhs(int l) const { return blockRhs(l, rhs_); }

  private:
    GridSpec grid_;
    int period_;
    int periods_;
    int mic_count_;
    double gamma_;
    std::vector<WeightStencil> stencils_; // one per (n, q), n major
    Eigen::VectorXd rhs_;
};

DecoupledSystem assemble_decoupled(const MeasurementRecord &record, const InterpolationKernel &kernel,
                                   const GridSpec &grid);

/// Measurement CSV ("n,q,x") plus a key=value sidecar at <path>.meta holding
/// the excitation parameters, periods, noise settings and the trajectory
/// file reference.
void save_measurement(const MeasurementRecord &record, const std::string &path,
                      const std::string &trajectory_path);
MeasurementRecord load_measurement(const std::string &path);

} // namespace sfield

#endif
