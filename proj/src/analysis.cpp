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

#include "sfield/analysis.hpp"
#include "sfield/errors.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace sfield
{

void NoiseModel::validate() const
{
    if (!(sigma_s2 > 0.0) || !(sigma_eta2 > 0.0) || !(sigma_h2 > 0.0))
        throw validation_error("noise model: all variances must be positive");
}

double mnsm_db(const RirSet &truth, const RirSet &estimate)
{
    const GridSpec &ga = truth.grid(), &gb = estimate.grid();
    if (ga.nx != gb.nx || ga.ny != gb.ny || ga.nz != gb.nz || truth.length() != estimate.length())
        throw validation_error("mnsm: truth and estimate shapes do not match");

    const int n_points = truth.count();
    double acc = 0.0;
    for (int u = 0; u < n_points; ++u)
    {
        const double ref = truth.data().row(u).squaredNorm();
        if (ref == 0.0)
            throw validation_error("mnsm: truth row " + std::to_string(u) + " has zero norm");
        acc += (truth.data().row(u) - estimate.data().row(u)).squaredNorm() / ref;
    }
    const double mean = acc / n_points;
    if (mean == 0.0)
        return -std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(mean);
}

MmsePrediction predict_mmse(const Trajectory &traj, const InterpolationKernel &kernel,
                            const GridSpec &grid, const NoiseModel &noise, int period)
{
    noise.validate();
    if (period < 1)
        throw validation_error("predict_mmse: period must be positive");

    const long m_total = static_cast<long>(traj.sampleCount()) * traj.micCount();
    MmsePrediction pred;
    pred.per_sample.resize(m_total);
    pred.sum_phi_sq.resize(m_total);

    const double snr_gain = noise.sigma_h2 / noise.sigma_eta2 * period * noise.sigma_s2;
    for (int n = 0; n < traj.sampleCount(); ++n)
        for (int q = 0; q < traj.micCount(); ++q)
        {
            const long flat = static_cast<long>(n) * traj.micCount() + q;
            const WeightStencil st = weights(kernel, grid, traj.position(n, q));
            const double sphi2 = st.sumSquares();
            pred.sum_phi_sq[flat] = sphi2;
            pred.per_sample[flat] = noise.sigma_h2 / (1.0 + snr_gain * sphi2);
        }
    pred.total = pred.per_sample.sum();
    return pred;
}

std::pair<double, double> trace_identity_check(const Eigen::MatrixXd &B, const Eigen::MatrixXd &C)
{
    if (B.rows() != C.rows() || B.cols() != C.cols())
        throw validation_error("trace_identity_check: B and C must have the same shape");
    const Eigen::Index s = B.rows();
    const Eigen::Index w = B.cols();

    const Eigen::MatrixXd lhs_m = Eigen::MatrixXd::Identity(s, s) + B * C.transpose();
    const Eigen::MatrixXd rhs_m = Eigen::MatrixXd::Identity(w, w) + C.transpose() * B;

    Eigen::FullPivLU<Eigen::MatrixXd> lu_l(lhs_m);
    if (!lu_l.isInvertible())
        throw numerical_error("trace_identity_check: I + B C^T is singular");
    Eigen::FullPivLU<Eigen::MatrixXd> lu_r(rhs_m);
    if (!lu_r.isInvertible())
        throw numerical_error("trace_identity_check: I + C^T B is singular");

    const double lhs = lu_l.inverse().trace();
    const double rhs = lu_r.inverse().trace() - static_cast<double>(w - s);
    return {lhs, rhs};
}

double empirical_mmse(const Eigen::MatrixXd &A, const NoiseModel &noise, int trials,
                      std::uint64_t seed)
{
    noise.validate();
    if (trials < 1)
        throw validation_error("empirical_mmse: trials must be positive");

    const Eigen::Index m = A.rows();
    const Eigen::Index u = A.cols();
    const double lambda = noise.sigma_eta2 / noise.sigma_h2;
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(A.transpose() * A +
                                            lambda * Eigen::MatrixXd::Identity(u, u));

    const double sigma_h = std::sqrt(noise.sigma_h2);
    const double sigma_eta = std::sqrt(noise.sigma_eta2);

    std::vector<double> mse(trials);
#pragma omp parallel for schedule(static)
    for (int t = 0; t < trials; ++t)
    {
        std::mt19937_64 rng(seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(t) + 1));
        std::normal_distribution<double> gauss(0.0, 1.0);
        Eigen::VectorXd h(u), eta(m);
        for (Eigen::Index i = 0; i < u; ++i)
            h[i] = sigma_h * gauss(rng);
        for (Eigen::Index i = 0; i < m; ++i)
            eta[i] = sigma_eta * gauss(rng);
        const Eigen::VectorXd x = A * h + eta;
        const Eigen::VectorXd h_hat = ldlt.solve(A.transpose() * x);
        mse[t] = (h_hat - h).squaredNorm();
    }

    double acc = 0.0;
    for (double v : mse)
        acc += v;
    return acc / trials;
}

} // namespace sfield
