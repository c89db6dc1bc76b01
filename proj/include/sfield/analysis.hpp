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

#ifndef SFIELD_ANALYSIS_HPP
#define SFIELD_ANALYSIS_HPP

#include "sfield/geometry.hpp"
#include "sfield/interp.hpp"
#include "sfield/room.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <utility>

namespace sfield
{

/// Signal/noise/prior variances of the stochastic measurement model.
struct NoiseModel
{
    double sigma_s2 = 1.0;   // excitation power
    double sigma_eta2 = 1.0; // measurement noise power
    double sigma_h2 = 1.0;   // prior variance of the RIR coefficients

    void validate() const;
};

/// Mean normalized system misalignment in dB:
/// 10 log10( (1/N) sum_u ||h_u - h^_u||^2 / ||h_u||^2 ).
/// Perfect reconstruction returns -infinity (documented sentinel).
double mnsm_db(const RirSet &truth, const RirSet &estimate);

struct MmsePrediction
{
    double total = 0.0;           // predicted MMSE over all coefficients
    Eigen::VectorXd per_sample;   // contribution of each measurement sample
    Eigen::VectorXd sum_phi_sq;   // sum_u phi^2(r(n), r_u) per sample
};

/// Closed-form MMSE prediction from the interpolation weights alone:
///   sigma_h^2 * sum_n 1 / (1 + (sigma_h^2/sigma_eta^2) L sigma_s^2 sum_u phi_u^2(n)).
/// L is the excitation period. Exact (equals the error-covariance trace)
/// when distinct measurement rows are uncorrelated, e.g. a single microphone
/// over one period, or one period of multiple microphones with disjoint
/// stencils; see the tests for the machine-checked equivalences.
MmsePrediction predict_mmse(const Trajectory &traj, const InterpolationKernel &kernel,
                            const GridSpec &grid, const NoiseModel &noise, int period);

/// Both sides of tr{[I + B C^T]^-1} = tr{[I + C^T B]^-1} - (W - S) for
/// S x W matrices B, C. Throws numerical_error when either matrix to invert
/// is singular.
std::pair<double, double> trace_identity_check(const Eigen::MatrixXd &B, const Eigen::MatrixXd &C);

/// Monte Carlo estimate of the MMSE of the ridge estimator with
/// lambda = sigma_eta^2 / sigma_h^2 on the fixed system matrix A: draws
/// h ~ N(0, sigma_h^2 I) and eta ~ N(0, sigma_eta^2 I), reconstructs, and
/// averages ||h^ - h||^2 over the trials. Per-trial seeds are derived from
/// the base seed, so the result is independent of scheduling.
double empirical_mmse(const Eigen::MatrixXd &A, const NoiseModel &noise, int trials,
                      std::uint64_t seed);

} // namespace sfield

#endif
