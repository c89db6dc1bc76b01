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

#ifndef SFIELD_CONFIG_HPP
#define SFIELD_CONFIG_HPP

#include "sfield/geometry.hpp"
#include "sfield/interp.hpp"
#include "sfield/room.hpp"
#include "sfield/signals.hpp"
#include "sfield/solve.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace sfield
{

enum class TrajectoryKind
{
    GridSnapped,
    Lissajous,
    StaticGrid,
    File,
};

struct ExcitationConfig
{
    ExcitationKind kind = ExcitationKind::Mls;
    int order = 9;      // MLS
    int period = 511;   // FlatSpectrum
    double power = 1.0;
    std::uint64_t seed = 1;

    int effectivePeriod() const { return kind == ExcitationKind::Mls ? (1 << order) - 1 : period; }
};

struct TrajectoryConfig
{
    TrajectoryKind kind = TrajectoryKind::GridSnapped;
    int mics = 1;
    std::uint64_t seed = 1;
    int ratio_num = 17;
    int ratio_den = 16;
    double margin = 0.0;
    std::string file;
};

struct MeasureConfig
{
    int periods = 10;
    int rir_length = 500;
    std::vector<double> snr_db; // empty = noise free
    std::uint64_t noise_seed = 1;
};

/// Experiment description parsed from a flat key=value text file
/// ("section.key = value", '#' comments). Unknown keys are rejected.
struct ExperimentConfig
{
    RoomSpec room;
    GridSpec grid;
    ExcitationConfig excitation;
    TrajectoryConfig trajectory;
    MeasureConfig measure;
    InterpolationKernel kernel;
    SolverConfig solver;
    double sigma_h2 = 1.0; // prior variance for MMSE prediction / ridge

    static ExperimentConfig load(const std::string &path);
    static ExperimentConfig parse(const std::string &text);
    std::string serialize() const;

    /// Cross-field validation; returns human-readable warnings (e.g. a grid
    /// spacing at or above the spatial Nyquist bound, which is legal but
    /// noteworthy).
    std::vector<std::string> validate() const;

    ExcitationSignal makeExcitation() const;
    Trajectory makeTrajectory(int steps) const;
    int defaultSteps() const { return measure.periods * excitation.effectivePeriod(); }
};

} // namespace sfield

#endif
