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

#include "sfield/solve.hpp"
#include "sfield/errors.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace sfield
{

void SolverConfig::validate() const
{
    if (ridge_lambda < 0.0)
        throw validation_error("solver: ridge_lambda must be non-negative");
    if (!(rank_tolerance > 0.0))
        throw validation_error("solver: rank_tolerance must be positive");
    if (rir_length < 0)
        throw validation_error("solver: rir_length must be non-negative");
}

Eigen::VectorXd circulant_deconvolve(const Eigen::VectorXd &y, const ExcitationSignal &excitation)
{
    const int n = excitation.period();
    if (y.size() != n)
        throw validation_error("circulant_deconvolve: vector length must equal the period");

    const Eigen::VectorXcd spec = period_spectrum(excitation);
    const double floor = 1e-12 * spec.cwiseAbs().maxCoeff();
    for (int k = 0; k < n; ++k)
        if (std::abs(spec[k]) < floor)
            throw numerical_error("circulant_deconvolve: excitation spectrum has a zero bin at k=" +
                                  std::to_string(k));

    Eigen::FFT<double> fft;
    std::vector<double> in(y.data(), y.data() + n);
    std::vector<std::complex<double>> yf;
    fft.fwd(yf, in);
    for (int k = 0; k < n; ++k)
        yf[k] /= spec[k];
    std::vector<double> out(n);
    fft.inv(out, yf);
    return Eigen::Map<Eigen::VectorXd>(out.data(), n);
}

namespace
{

RirSet make_rirs(const GridSpec &grid, double sample_rate, Eigen::MatrixXd data)
{
    return RirSet(grid, sample_rate, std::move(data));
}

} // namespace

SolveResult solve_full(const FullSystem &sys, const SolverConfig &cfg, double sample_rate)
{
    cfg.validate();
    const Eigen::MatrixXd &A = sys.matrix;
    const Eigen::VectorXd &x = sys.rhs;
    const Eigen::Index n_unknowns = A.cols();
    const int n_points = sys.grid.count();
    const int length = sys.rir_length;

    Eigen::VectorXd h;
    SolveDiagnostics diag;

    if (cfg.method == SolveMethod::Ridge)
    {
        const Eigen::MatrixXd gram =
            A.transpose() * A + cfg.ridge_lambda * Eigen::MatrixXd::Identity(n_unknowns, n_unknowns);
        h = Eigen::LDLT<Eigen::MatrixXd>(gram).solve(A.transpose() * x);
        diag.rank = n_unknowns;
    }
    else if (cfg.iterative)
    {
        Eigen::LeastSquaresConjugateGradient<Eigen::MatrixXd> lscg(A);
        lscg.setTolerance(1e-12);
        lscg.setMaxIterations(10 * n_unknowns);
        h = lscg.solve(x);
        if (lscg.info() != Eigen::Success)
            throw numerical_error("solve_full: conjugate gradient did not converge");
        diag.rank = n_unknowns;
    }
    else
    {
        if (A.rows() < n_unknowns)
            throw validation_error("solve_full: underdetermined system (rows < unknowns); "
                                   "least squares requires full column rank");
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
        qr.setThreshold(cfg.rank_tolerance);
        diag.rank = qr.rank();
        if (diag.rank < n_unknowns)
            throw numerical_error("solve_full: rank-deficient system matrix (rank " +
                                  std::to_string(diag.rank) + " of " + std::to_string(n_unknowns) +
                                  " unknowns); no unique least-squares solution");
        h = qr.solve(x);
    }

    diag.residual_norm = (x - A * h).norm();

    Eigen::MatrixXd data(n_points, length);
    for (int u = 0; u < n_points; ++u)
        data.row(u) = h.segment(static_cast<long>(u) * length, length).transpose();
    return SolveResult{make_rirs(sys.grid, sample_rate, std::move(data)), std::move(diag)};
}

std::vector<SolveResult> solve_decoupled_multi(const DecoupledSystem &sys,
                                               const ExcitationSignal &excitation,
                                               const SolverConfig &cfg, double sample_rate,
                                               const std::vector<Eigen::VectorXd> &rhs_list)
{
    cfg.validate();
    if (excitation.period() != sys.period())
        throw validation_error("solve_decoupled: excitation period does not match the system");
    const int n_points = sys.grid().count();
    const int period = sys.period();
    const int out_length = cfg.rir_length > 0 ? cfg.rir_length : period;
    if (out_length > period)
        throw validation_error("solve_decoupled: rir_length exceeds the period");
    if (cfg.method != SolveMethod::Ridge && sys.rowsPerBlock() < n_points)
        throw validation_error("solve_decoupled: underdetermined blocks (R*Q < N); "
                               "use Ridge or more periods");

    const std::size_t n_rhs = rhs_list.size();
    // h~ per grid point, one column per rhs
    std::vector<Eigen::MatrixXd> h_tilde(n_rhs, Eigen::MatrixXd(n_points, period));
    std::vector<SolveDiagnostics> diags(n_rhs);
    for (auto &d : diags)
        d.blocks.resize(period);
    int singular_block = -1;

#pragma omp parallel for schedule(dynamic)
    for (int l = 0; l < period; ++l)
    {
        const Eigen::MatrixXd block = sys.blockMatrix(l);
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr;
        Eigen::LDLT<Eigen::MatrixXd> ldlt;
        double cond = 0.0;

        if (cfg.method == SolveMethod::Ridge)
        {
            // prior variance transforms as sigma_h~^2 = sigma_h^2 / gamma
            const double lambda = cfg.ridge_lambda * sys.gamma();
            ldlt.compute(block.transpose() * block +
                         lambda * Eigen::MatrixXd::Identity(n_points, n_points));
        }
        else
        {
            qr.compute(block);
            qr.setThreshold(cfg.rank_tolerance);
            if (qr.rank() < n_points)
            {
#pragma omp critical
                if (singular_block < 0 || l < singular_block)
                    singular_block = l;
                continue;
            }
            const auto &R = qr.matrixR();
            const double rmax = std::abs(R(0, 0));
            const double rmin = std::abs(R(n_points - 1, n_points - 1));
            cond = rmin > 0.0 ? rmax / rmin : std::numeric_limits<double>::infinity();
        }

        for (std::size_t r = 0; r < n_rhs; ++r)
        {
            const Eigen::VectorXd z = sys.blockRhs(l, rhs_list[r]);
            Eigen::VectorXd sol;
            if (cfg.method == SolveMethod::Ridge)
                sol = ldlt.solve(block.transpose() * z);
            else
                sol = qr.solve(z);
            h_tilde[r].col(l) = sol;
            diags[r].blocks[l] = BlockDiagnostics{l, (z - block * sol).norm(), cond};
        }
    }

    if (singular_block >= 0)
        throw numerical_error("solve_decoupled: singular block l=" + std::to_string(singular_block));

    std::vector<SolveResult> results;
    results.reserve(n_rhs);
    for (std::size_t r = 0; r < n_rhs; ++r)
    {
        SolveDiagnostics &diag = diags[r];
        double res_sq = 0.0;
        for (const BlockDiagnostics &b : diag.blocks)
            res_sq += b.residual * b.residual;
        diag.residual_norm = std::sqrt(res_sq);
        diag.rank = static_cast<Eigen::Index>(n_points) * period;

        // back-transform: h_u = gamma * S^-1 h~_u via frequency-domain division
        Eigen::MatrixXd data(n_points, out_length);
        double kept = 0.0, discarded = 0.0;
        for (int u = 0; u < n_points; ++u)
        {
            const Eigen::VectorXd full =
                sys.gamma() * circulant_deconvolve(h_tilde[r].row(u).transpose(), excitation);
            data.row(u) = full.head(out_length).transpose();
            kept += full.head(out_length).squaredNorm();
            discarded += full.tail(period - out_length).squaredNorm();
        }
        diag.truncated_energy_fraction = (kept + discarded) > 0.0 ? discarded / (kept + discarded) : 0.0;

        results.push_back(
            SolveResult{make_rirs(sys.grid(), sample_rate, std::move(data)), std::move(diag)});
    }
    return results;
}

SolveResult solve_decoupled(const DecoupledSystem &sys, const ExcitationSignal &excitation,
                            const SolverConfig &cfg, double sample_rate)
{
    std::vector<Eigen::VectorXd> rhs{sys.rhs()};
    auto results = solve_decoupled_multi(sys, excitation, cfg, sample_rate, rhs);
    return std::move(results.front());
}

RirSet static_deconvolve(const MeasurementRecord &record, const GridSpec &grid, double sample_rate,
                         int rir_length)
{
    grid.validate();
    const Trajectory &traj = record.trajectory;
    const int q_count = traj.micCount();
    const int n_count = traj.sampleCount();
    const int period = record.excitation.period();
    if (n_count != record.periods * period)
        throw validation_error("static_deconvolve: sample count must equal R * period");
    if (rir_length < 1 || rir_length > period)
        throw validation_error("static_deconvolve: rir_length must be in [1, period]");

    const int n_points = grid.count();
    if (q_count != n_points)
        throw validation_error("static_deconvolve: need exactly one microphone per grid node");

    // map each microphone to its node and require full, unique coverage
    std::vector<int> node_of(q_count, -1);
    std::vector<bool> covered(n_points, false);
    for (int q = 0; q < q_count; ++q)
    {
        const Vec3 &p0 = traj.position(0, q);
        for (int n = 1; n < n_count; ++n)
            if ((traj.position(n, q) - p0).cwiseAbs().maxCoeff() != 0.0)
                throw validation_error("static_deconvolve: microphone " + std::to_string(q) +
                                       " is not static");
        if (!grid.onGridPoint(p0, 1e-9 * grid.spacing))
            throw validation_error("static_deconvolve: microphone " + std::to_string(q) +
                                   " is not on a grid node");
        const Eigen::Vector3i idx = grid.nearestIndex(p0);
        const int u = grid.rowIndex(idx[0], idx[1], idx[2]);
        if (covered[u])
            throw validation_error("static_deconvolve: grid node covered twice");
        covered[u] = true;
        node_of[q] = u;
    }

    Eigen::MatrixXd data(n_points, rir_length);
    for (int q = 0; q < q_count; ++q)
    {
        // average the R periods
        Eigen::VectorXd avg = Eigen::VectorXd::Zero(period);
        for (int i = 0; i < record.periods; ++i)
            for (int l = 0; l < period; ++l)
                avg[l] += record.samples[(static_cast<long>(i) * period + l) * q_count + q];
        avg /= static_cast<double>(record.periods);

        const Eigen::VectorXd h = circulant_deconvolve(avg, record.excitation);
        data.row(node_of[q]) = h.head(rir_length).transpose();
    }
    return RirSet(grid, sample_rate, std::move(data));
}

void save_diagnostics_csv(const SolveDiagnostics &diag, const std::string &path)
{
    std::ofstream f(path);
    if (!f)
        throw validation_error("save_diagnostics_csv: cannot open " + path);
    char buf[64];
    f << "metric,value\n";
    std::snprintf(buf, sizeof buf, "%.17g", diag.residual_norm);
    f << "residual_norm," << buf << "\n";
    f << "rank," << diag.rank << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", diag.truncated_energy_fraction);
    f << "truncated_energy_fraction," << buf << "\n";
    if (!diag.blocks.empty())
    {
        f << "block,residual,condition\n";
        for (const BlockDiagnostics &b : diag.blocks)
        {
            std::snprintf(buf, sizeof buf, "%.8g", b.residual);
            f << b.block << "," << buf << ",";
            std::snprintf(buf, sizeof buf, "%.8g", b.condition);
            f << buf << "\n";
        }
    }
}

} // namespace sfield
