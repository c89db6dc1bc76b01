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

#include "sfield/experiments.hpp"
#include "sfield/analysis.hpp"
#include "sfield/errors.hpp"
#include "sfield/solve.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

namespace sfield
{

RoomSpec paper_room()
{
    RoomSpec room;
    room.dimensions = Vec3(5.8, 4.15, 2.55);
    room.rt60 = 0.3;
    room.speed_of_sound = 343.0;
    room.sample_rate = 8000.0;
    room.cutoff = 4000.0;
    room.source_position = Vec3(1.4, 1.6, 1.0);
    room.max_image_order = -1;
    room.highpass_hz = 100.0;
    return room;
}

Eigen::VectorXd with_noise(const Eigen::VectorXd &clean, double power, double snr_db,
                           std::uint64_t seed)
{
    const double sigma_eta = std::sqrt(power / std::pow(10.0, snr_db / 10.0));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, sigma_eta);
    Eigen::VectorXd out = clean;
    for (Eigen::Index i = 0; i < out.size(); ++i)
        out[i] += gauss(rng);
    return out;
}

namespace
{

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b, std::uint64_t c)
{
    std::uint64_t h = base;
    for (std::uint64_t v : {a, b, c})
    {
        h ^= v + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
        h *= 0xff51afd7ed558ccdULL;
    }
    return h;
}

GridSpec paper_grid(double delta, int nx, int ny)
{
    GridSpec grid;
    grid.origin = Vec3(2.75, 1.4, 0.8);
    grid.spacing = delta;
    grid.nx = nx;
    grid.ny = ny;
    grid.nz = 1;
    return grid;
}

} // namespace

Table1Result run_table1(const Table1Options &opts)
{
    if (opts.noise_seeds < 1)
        throw validation_error("table1: need at least one noise seed");

    const RoomSpec room = paper_room();
    const GridSpec grid = paper_grid(0.02, 5, 5);
    const int rir_length = 500;
    const int periods = 10;
    const ExcitationSignal exc = generate_mls(9, 1.0);
    const int period = exc.period(); // 511
    const int steps = periods * period;

    const RirSet truth = simulate_grid_rirs(room, grid, rir_length);

    Table1Result result;
    result.snrs_db = opts.snrs_db;
    result.rows.push_back("Static");
    if (opts.run_dynamic)
        for (int q : opts.mic_counts)
            result.rows.push_back("Dyn-" + std::to_string(q));
    result.mnsm_db.resize(static_cast<Eigen::Index>(result.rows.size()),
                          static_cast<Eigen::Index>(opts.snrs_db.size()));

    const auto mean_over_seeds = [&](auto &&solve_one, std::uint64_t setup_tag, double snr) {
        double acc = 0.0;
        for (int k = 0; k < opts.noise_seeds; ++k)
            acc += solve_one(snr, mix_seed(opts.base_seed, setup_tag,
                                           static_cast<std::uint64_t>(std::llround(snr * 100)),
                                           static_cast<std::uint64_t>(k)));
        return acc / opts.noise_seeds;
    };

    // --- static baseline -------------------------------------------------
    {
        const Trajectory traj = gen_static_grid(grid, steps);
        const MeasurementRecord clean =
            simulate_measurement(room, traj, exc, periods, rir_length, std::nullopt, 0);

        for (std::size_t si = 0; si < opts.snrs_db.size(); ++si)
        {
            const double snr = opts.snrs_db[si];
            result.mnsm_db(0, static_cast<Eigen::Index>(si)) = mean_over_seeds(
                [&](double snr_db, std::uint64_t seed) {
                    MeasurementRecord rec = clean;
                    rec.samples = with_noise(clean.samples, exc.power(), snr_db, seed);
                    rec.snr_db = snr_db;
                    rec.noise_seed = seed;
                    const RirSet est = static_deconvolve(rec, grid, room.sample_rate, rir_length);
                    return mnsm_db(truth, est);
                },
                0, snr);
        }
    }

    // --- dynamic grid-snapped runs ---------------------------------------
    if (opts.run_dynamic)
    {
        SolverConfig cfg;
        cfg.method = SolveMethod::DecoupledLs;
        cfg.rir_length = rir_length;

        for (std::size_t qi = 0; qi < opts.mic_counts.size(); ++qi)
        {
            const int q = opts.mic_counts[qi];
            const Trajectory traj =
                gen_grid_snapped(grid, q, steps, mix_seed(opts.base_seed, 1000 + q, 0, 0));
            const MeasurementRecord clean =
                simulate_measurement(room, traj, exc, periods, rir_length, std::nullopt, 0);
            const InterpolationKernel kernel{KernelKind::Linear, 1};
            const DecoupledSystem sys = assemble_decoupled(clean, kernel, grid);

            // all (snr, seed) right-hand sides at once: blocks factor once
            std::vector<Eigen::VectorXd> rhs_list;
            rhs_list.reserve(opts.snrs_db.size() * opts.noise_seeds);
            for (double snr : opts.snrs_db)
                for (int k = 0; k < opts.noise_seeds; ++k)
                    rhs_list.push_back(with_noise(clean.samples, exc.power(), snr,
                                                  mix_seed(opts.base_seed, 1 + q,
                                                           static_cast<std::uint64_t>(std::llround(snr * 100)),
                                                           static_cast<std::uint64_t>(k))));

            const std::vector<SolveResult> solved =
                solve_decoupled_multi(sys, exc, cfg, room.sample_rate, rhs_list);

            std::size_t idx = 0;
            for (std::size_t si = 0; si < opts.snrs_db.size(); ++si)
            {
                double acc = 0.0;
                for (int k = 0; k < opts.noise_seeds; ++k)
                    acc += mnsm_db(truth, solved[idx++].rirs);
                result.mnsm_db(static_cast<Eigen::Index>(1 + qi), static_cast<Eigen::Index>(si)) =
                    acc / opts.noise_seeds;
            }
        }
    }
    return result;
}

void save_table1_csv(const Table1Result &result, const std::string &path)
{
    std::ofstream f(path);
    if (!f)
        throw validation_error("save_table1_csv: cannot open " + path);
    f << "sampling";
    for (double snr : result.snrs_db)
        f << "," << snr;
    f << "\n";
    char buf[32];
    for (std::size_t r = 0; r < result.rows.size(); ++r)
    {
        f << result.rows[r];
        for (Eigen::Index c = 0; c < result.mnsm_db.cols(); ++c)
        {
            std::snprintf(buf, sizeof buf, "%.4f", result.mnsm_db(static_cast<Eigen::Index>(r), c));
            f << "," << buf;
        }
        f << "\n";
    }
}

Fig1Result run_fig1(const Fig1Options &opts)
{
    RoomSpec room = paper_room();
    room.highpass_hz = 0.0; // fast synthesis path

    int nx, ny, rir_length, mls_order, periods;
    std::optional<double> snr;
    if (opts.scale == Fig1Options::Scale::Desk)
    {
        nx = ny = 10;
        rir_length = 256;
        mls_order = 9; // L_p = 511
        periods = 200; // R >= 2N per block
        snr = 30.0;
    }
    else
    {
        nx = ny = 20;
        rir_length = 1000;
        mls_order = 10; // L_p = 1023
        periods = 1000;
        snr = std::nullopt;
    }
    if (opts.snr_db_override)
        snr = *opts.snr_db_override;

    const ExcitationSignal exc = generate_mls(mls_order, 1.0);
    const int steps = periods * exc.period();

    Fig1Result result;
    result.deltas = opts.deltas;
    result.mnsm_db.resize(static_cast<Eigen::Index>(opts.deltas.size()), 2);

    SolverConfig cfg;
    cfg.method = SolveMethod::DecoupledLs;
    cfg.rir_length = rir_length;

    for (std::size_t di = 0; di < opts.deltas.size(); ++di)
    {
        const GridSpec grid = paper_grid(opts.deltas[di], nx, ny);
        const RirSet truth = simulate_grid_rirs(room, grid, rir_length);
        const Trajectory traj = gen_lissajous(grid, 17, 16, steps, 0.0);
        const MeasurementRecord rec =
            simulate_measurement(room, traj, exc, periods, rir_length, snr, opts.noise_seed,
                                 SynthesisMode::FastBandlimited);

        const InterpolationKernel kernels[2] = {{KernelKind::Linear, 1}, {KernelKind::Lagrange, 19}};
        for (int ki = 0; ki < 2; ++ki)
        {
            const DecoupledSystem sys = assemble_decoupled(rec, kernels[ki], grid);
            const SolveResult solved = solve_decoupled(sys, exc, cfg, room.sample_rate);
            result.mnsm_db(static_cast<Eigen::Index>(di), ki) = mnsm_db(truth, solved.rirs);
        }
    }
    return result;
}

void save_fig1_csv(const Fig1Result &result, const std::string &path)
{
    std::ofstream f(path);
    if (!f)
        throw validation_error("save_fig1_csv: cannot open " + path);
    f << "delta,linear_mnsm_db,lagrange_mnsm_db\n";
    char buf[96];
    for (std::size_t i = 0; i < result.deltas.size(); ++i)
    {
        std::snprintf(buf, sizeof buf, "%g,%.4f,%.4f\n", result.deltas[i],
                      result.mnsm_db(static_cast<Eigen::Index>(i), 0),
                      result.mnsm_db(static_cast<Eigen::Index>(i), 1));
        f << buf;
    }
}

} // namespace sfield
