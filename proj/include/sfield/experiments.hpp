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

#ifndef SFIELD_EXPERIMENTS_HPP
#define SFIELD_EXPERIMENTS_HPP

#include "sfield/system.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sfield
{

/// Grid-RIR recovery benchmark on the 5x5 plane: the classical static
/// measurement against dynamic grid-constrained sampling with
/// Q in {25, 20, 15, 10, 5} microphones, swept over noise levels.
struct Table1Options
{
    std::vector<double> snrs_db = {10, 20, 30, 40, 50, 60, 70};
    std::vector<int> mic_counts = {25, 20, 15, 10, 5};
    int noise_seeds = 5;
    std::uint64_t base_seed = 1;
    bool run_dynamic = true;
};

struct Table1Result
{
    std::vector<double> snrs_db;
    std::vector<std::string> rows; // "Static", "Dyn-25", ...
    Eigen::MatrixXd mnsm_db;       // rows.size() x snrs.size(), seed-averaged
};

Table1Result run_table1(const Table1Options &opts);
void save_table1_csv(const Table1Result &result, const std::string &path);

/// Lissajous-trajectory recovery quality versus grid spacing and
/// interpolation kernel (linear vs Lagrange).
struct Fig1Options
{
    enum class Scale
    {
        Desk, // 10x10 grid, L=256, L_p=511, R=200, SNR 30 dB
        Paper // 20x20 grid, L=1000, L_p=1023, R=1000, noise free
    };
    Scale scale = Scale::Desk;
    std::vector<double> deltas = {0.04, 0.03, 0.02, 0.015, 0.01};
    std::optional<double> snr_db_override;
    std::uint64_t noise_seed = 1;
};

struct Fig1Result
{
    std::vector<double> deltas;
    Eigen::MatrixXd mnsm_db; // deltas.size() x 2: column 0 linear, column 1 Lagrange
};

Fig1Result run_fig1(const Fig1Options &opts);
void save_fig1_csv(const Fig1Result &result, const std::string &path);

/// The section-5 room shared by both experiments.
RoomSpec paper_room();

/// Gaussian noise at the given SNR added to a clean record (same noise model
/// as simulate_measurement uses internally).
Eigen::VectorXd with_noise(const Eigen::VectorXd &clean, double power, double snr_db,
                           std::uint64_t seed);

} // namespace sfield

#endif
