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

#ifndef SFIELD_SOLVE_HPP
#define SFIELD_SOLVE_HPP

#include "sfield/room.hpp"
#include "sfield/signals.hpp"
#include "sfield/system.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace sfield
{

enum class SolveMethod
{
    FullLs,      // dense least squares on the full system
    DecoupledLs, // per-block least squares on the decoupled systems
    Ridge,       // Tikhonov-regularized; lambda = sigma_eta^2 / sigma_h^2
                 // realizes the linear MMSE estimator
};

struct SolverConfig
{
    SolveMethod method = SolveMethod::DecoupledLs;
    double ridge_lambda = 0.0;    // Ridge only
    double rank_tolerance = 1e-10;
    bool iterative = false;       // conjugate-gradient path instead of dense QR
    int rir_length = 0;           // decoupled: truncate estimates; 0 keeps L_p

    void validate() const;
};

struct BlockDiagnostics
{
    int block = 0;
    double residual = 0.0;
    double condition = 0.0;
};

struct SolveDiagnostics
{
    double residual_norm = 0.0;
    Eigen::Index rank = 0;
    double truncated_energy_fraction = 0.0; // decoupled path only
    std::vector<BlockDiagnostics> blocks;   // decoupled path only
};

struct SolveResult
{
    RirSet rirs;
    SolveDiagnostics diagnostics;
};

/// Least-squares / ridge solve of the dense system. FullLs requires an
/// overdetermined system and full column rank (the rank-revealing QR
/// reports the deficiency otherwise); Ridge accepts any shape.
SolveResult solve_full(const FullSystem &sys, const SolverConfig &cfg, double sample_rate);

/// Solves the L_p independent blocks, reassembles the transformed RIRs
/// h~_u, recovers h_u by exact circulant inversion of the excitation
/// period (the MLS spectrum has no zero bins), and truncates to the
/// requested RIR length.
SolveResult solve_decoupled(const DecoupledSystem &sys, const ExcitationSignal &excitation,
                            const SolverConfig &cfg, double sample_rate);

/// Same as solve_decoupled for several right-hand sides sharing one system;
/// each block is factorized once.
std::vector<SolveResult> solve_decoupled_multi(const DecoupledSystem &sys,
                                               const ExcitationSignal &excitation,
                                               const SolverConfig &cfg, double sample_rate,
                                               const std::vector<Eigen::VectorXd> &rhs_list);

/// Classical static baseline: every microphone rests on a distinct grid
/// node and together they cover the grid; the R periods are averaged and
/// deconvolved by exact circulant inversion, then truncated to rir_length.
RirSet static_deconvolve(const MeasurementRecord &record, const GridSpec &grid, double sample_rate,
                         int rir_length);

/// Solves (s circularly convolved with h) = y for h via frequency-domain
/// division. Throws numerical_error when the excitation spectrum has a
/// (near-)zero bin.
Eigen::VectorXd circulant_deconvolve(const Eigen::VectorXd &y, const ExcitationSignal &excitation);

/// Diagnostics CSV: overall residual/rank rows plus one row per block.
void save_diagnostics_csv(const SolveDiagnostics &diag, const std::string &path);

} // namespace sfield

#endif
