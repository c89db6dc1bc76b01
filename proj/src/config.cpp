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

#include "sfield/config.hpp"
#include "sfield/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace sfield
{

namespace
{

std::string trim(const std::string &s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

class KeyValueReader
{
  public:
    explicit KeyValueReader(const std::string &text)
    {
        std::istringstream in(text);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line))
        {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos)
                line = line.substr(0, hash);
            line = trim(line);
            if (line.empty())
                continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw validation_error("config: missing '=' at line " + std::to_string(lineno));
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (key.empty())
                throw validation_error("config: empty key at line " + std::to_string(lineno));
            kv_[key] = value;
        }
    }

    bool has(const std::string &key) const { return kv_.count(key) != 0; }

    std::string str(const std::string &key, const std::string &fallback)
    {
        auto it = kv_.find(key);
        if (it == kv_.end())
            return fallback;
        used_.insert(it->first);
        return it->second;
    }

    double num(const std::string &key, double fallback)
    {
        auto it = kv_.find(key);
        if (it == kv_.end())
            return fallback;
        used_.insert(it->first);
        try
        {
            return std::stod(it->second);
        }
        catch (const std::exception &)
        {
            throw validation_error("config: " + key + " is not a number");
        }
    }

    long integer(const std::string &key, long fallback)
    {
        auto it = kv_.find(key);
        if (it == kv_.end())
            return fallback;
        used_.insert(it->first);
        try
        {
            return std::stol(it->second);
        }
        catch (const std::exception &)
        {
            throw validation_error("config: " + key + " is not an integer");
        }
    }

    bool boolean(const std::string &key, bool fallback)
    {
        auto it = kv_.find(key);
        if (it == kv_.end())
            return fallback;
        used_.insert(it->first);
        if (it->second == "true" || it->second == "1")
            return true;
        if (it->second == "false" || it->second == "0")
            return false;
        throw validation_error("config: " + key + " must be true or false");
    }

    std::vector<double> numbers(const std::string &key, std::vector<double> fallback)
    {
        auto it = kv_.find(key);
        if (it == kv_.end())
            return fallback;
        used_.insert(it->first);
        if (it->second == "none")
            return {};
        std::istringstream vs(it->second);
        std::vector<double> out;
        double v;
        while (vs >> v)
            out.push_back(v);
        if (out.empty() && !it->second.empty())
            throw validation_error("config: " + key + " is not a number list");
        return out;
    }

    Vec3 vec3(const std::string &key, const Vec3 &fallback)
    {
        auto it = kv_.find(key);
        if (it == kv_.end())
            return fallback;
        used_.insert(it->first);
        std::istringstream vs(it->second);
        Vec3 out;
        if (!(vs >> out[0] >> out[1] >> out[2]))
            throw validation_error("config: " + key + " must be three numbers");
        return out;
    }

    void rejectUnknown() const
    {
        for (const auto &[key, value] : kv_)
            if (!used_.count(key))
                throw validation_error("config: unknown key '" + key + "'");
    }

  private:
    std::map<std::string, std::string> kv_;
    std::set<std::string> used_;
};

std::string fmt(double v)
{
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt(const Vec3 &v) { return fmt(v[0]) + " " + fmt(v[1]) + " " + fmt(v[2]); }

} // namespace

ExperimentConfig ExperimentConfig::load(const std::string &path)
{
    std::ifstream f(path);
    if (!f)
        throw validation_error("config: cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str());
}

ExperimentConfig ExperimentConfig::parse(const std::string &text)
{
    KeyValueReader r(text);
    ExperimentConfig cfg;

    cfg.room.dimensions = r.vec3("room.dimensions", Vec3(5.8, 4.15, 2.55));
    cfg.room.rt60 = r.num("room.rt60", 0.3);
    cfg.room.speed_of_sound = r.num("room.speed_of_sound", 343.0);
    cfg.room.sample_rate = r.num("room.sample_rate", 8000.0);
    cfg.room.cutoff = r.num("room.cutoff", 4000.0);
    cfg.room.source_position = r.vec3("room.source", Vec3(1.4, 1.6, 1.0));
    cfg.room.max_image_order = static_cast<int>(r.integer("room.max_image_order", -1));
    cfg.room.highpass_hz = r.num("room.highpass_hz", 0.0);

    cfg.grid.origin = r.vec3("grid.origin", Vec3(2.75, 1.4, 0.8));
    cfg.grid.spacing = r.num("grid.spacing", 0.02);
    {
        const Vec3 ext = r.vec3("grid.extent", Vec3(5, 5, 1));
        cfg.grid.nx = static_cast<int>(ext[0]);
        cfg.grid.ny = static_cast<int>(ext[1]);
        cfg.grid.nz = static_cast<int>(ext[2]);
    }

    const std::string exc_kind = r.str("excitation.kind", "mls");
    if (exc_kind == "mls")
        cfg.excitation.kind = ExcitationKind::Mls;
    else if (exc_kind == "flat")
        cfg.excitation.kind = ExcitationKind::FlatSpectrum;
    else
        throw validation_error("config: excitation.kind must be mls or flat");
    cfg.excitation.order = static_cast<int>(r.integer("excitation.order", 9));
    cfg.excitation.period = static_cast<int>(r.integer("excitation.period", 511));
    cfg.excitation.power = r.num("excitation.power", 1.0);
    cfg.excitation.seed = static_cast<std::uint64_t>(r.integer("excitation.seed", 1));

    const std::string traj_kind = r.str("trajectory.kind", "grid_snapped");
    if (traj_kind == "grid_snapped")
        cfg.trajectory.kind = TrajectoryKind::GridSnapped;
    else if (traj_kind == "lissajous")
        cfg.trajectory.kind = TrajectoryKind::Lissajous;
    else if (traj_kind == "static_grid")
        cfg.trajectory.kind = TrajectoryKind::StaticGrid;
    else if (traj_kind == "file")
        cfg.trajectory.kind = TrajectoryKind::File;
    else
        throw validation_error("config: trajectory.kind must be grid_snapped, lissajous, static_grid or file");
    cfg.trajectory.mics = static_cast<int>(r.integer("trajectory.mics", 1));
    cfg.trajectory.seed = static_cast<std::uint64_t>(r.integer("trajectory.seed", 1));
    {
        const Vec3 ratio = r.vec3("trajectory.ratio", Vec3(17, 16, 0));
        cfg.trajectory.ratio_num = static_cast<int>(ratio[0]);
        cfg.trajectory.ratio_den = static_cast<int>(ratio[1]);
    }
    cfg.trajectory.margin = r.num("trajectory.margin", 0.0);
    cfg.trajectory.file = r.str("trajectory.file", "");

    cfg.measure.periods = static_cast<int>(r.integer("measure.periods", 10));
    cfg.measure.rir_length = static_cast<int>(r.integer("measure.rir_length", 500));
    cfg.measure.snr_db = r.numbers("measure.snr_db", {});
    cfg.measure.noise_seed = static_cast<std::uint64_t>(r.integer("measure.noise_seed", 1));

    const std::string kern = r.str("kernel.kind", "linear");
    if (kern == "linear")
        cfg.kernel.kind = KernelKind::Linear;
    else if (kern == "lagrange")
        cfg.kernel.kind = KernelKind::Lagrange;
    else
        throw validation_error("config: kernel.kind must be linear or lagrange");
    cfg.kernel.max_degree = static_cast<int>(r.integer("kernel.max_degree", 19));

    const std::string method = r.str("solver.method", "decoupled");
    if (method == "full")
        cfg.solver.method = SolveMethod::FullLs;
    else if (method == "decoupled")
        cfg.solver.method = SolveMethod::DecoupledLs;
    else if (method == "ridge")
        cfg.solver.method = SolveMethod::Ridge;
    else
        throw validation_error("config: solver.method must be full, decoupled or ridge");
    cfg.solver.ridge_lambda = r.num("solver.ridge_lambda", 0.0);
    cfg.solver.rank_tolerance = r.num("solver.rank_tolerance", 1e-10);
    cfg.solver.iterative = r.boolean("solver.iterative", false);
    cfg.solver.rir_length = cfg.measure.rir_length;

    cfg.sigma_h2 = r.num("analysis.sigma_h2", 1.0);

    r.rejectUnknown();
    return cfg;
}

std::string ExperimentConfig::serialize() const
{
    std::ostringstream out;
    out << "room.dimensions = " << fmt(room.dimensions) << "\n";
    out << "room.rt60 = " << fmt(room.rt60) << "\n";
    out << "room.speed_of_sound = " << fmt(room.speed_of_sound) << "\n";
    out << "room.sample_rate = " << fmt(room.sample_rate) << "\n";
    out << "room.cutoff = " << fmt(room.cutoff) << "\n";
    out << "room.source = " << fmt(room.source_position) << "\n";
    out << "room.max_image_order = " << room.max_image_order << "\n";
    out << "room.highpass_hz = " << fmt(room.highpass_hz) << "\n";
    out << "grid.origin = " << fmt(grid.origin) << "\n";
    out << "grid.spacing = " << fmt(grid.spacing) << "\n";
    out << "grid.extent = " << grid.nx << " " << grid.ny << " " << grid.nz << "\n";
    out << "excitation.kind = " << (excitation.kind == ExcitationKind::Mls ? "mls" : "flat") << "\n";
    out << "excitation.order = " << excitation.order << "\n";
    out << "excitation.period = " << excitation.period << "\n";
    out << "excitation.power = " << fmt(excitation.power) << "\n";
    out << "excitation.seed = " << excitation.seed << "\n";
    out << "trajectory.kind = ";
    switch (trajectory.kind)
    {
    case TrajectoryKind::GridSnapped: out << "grid_snapped"; break;
    case TrajectoryKind::Lissajous: out << "lissajous"; break;
    case TrajectoryKind::StaticGrid: out << "static_grid"; break;
    case TrajectoryKind::File: out << "file"; break;
    }
    out << "\n";
    out << "trajectory.mics = " << trajectory.mics << "\n";
    out << "trajectory.seed = " << trajectory.seed << "\n";
    out << "trajectory.ratio = " << trajectory.ratio_num << " " << trajectory.ratio_den << "\n";
    out << "trajectory.margin = " << fmt(trajectory.margin) << "\n";
    if (!trajectory.file.empty())
        out << "trajectory.file = " << trajectory.file << "\n";
    out << "measure.periods = " << measure.periods << "\n";
    out << "measure.rir_length = " << measure.rir_length << "\n";
    out << "measure.snr_db =";
    if (measure.snr_db.empty())
        out << " none";
    else
        for (double v : measure.snr_db)
            out << " " << fmt(v);
    out << "\n";
    out << "measure.noise_seed = " << measure.noise_seed << "\n";
    out << "kernel.kind = " << (kernel.kind == KernelKind::Linear ? "linear" : "lagrange") << "\n";
    out << "kernel.max_degree = " << kernel.max_degree << "\n";
    out << "solver.method = ";
    switch (solver.method)
    {
    case SolveMethod::FullLs: out << "full"; break;
    case SolveMethod::DecoupledLs: out << "decoupled"; break;
    case SolveMethod::Ridge: out << "ridge"; break;
    }
    out << "\n";
    out << "solver.ridge_lambda = " << fmt(solver.ridge_lambda) << "\n";
    out << "solver.rank_tolerance = " << fmt(solver.rank_tolerance) << "\n";
    out << "solver.iterative = " << (solver.iterative ? "true" : "false") << "\n";
    out << "analysis.sigma_h2 = " << fmt(sigma_h2) << "\n";
    return out.str();
}

std::vector<std::string> ExperimentConfig::validate() const
{
    room.validate();
    grid.validate();
    kernel.validate();
    solver.validate();

    if (excitation.kind == ExcitationKind::Mls && (excitation.order < 2 || excitation.order > 24))
        throw validation_error("config: excitation.order out of range [2, 24]");
    if (excitation.kind == ExcitationKind::FlatSpectrum && excitation.period < 2)
        throw validation_error("config: excitation.period must be >= 2");
    if (!(excitation.power > 0.0))
        throw validation_error("config: excitation.power must be positive");

    const int period = excitation.effectivePeriod();
    if (measure.rir_length < 1 || measure.rir_length > period)
        throw validation_error("config: measure.rir_length must be in [1, excitation period]");
    if (measure.periods < 1)
        throw validation_error("config: measure.periods must be positive");

    for (int u = 0; u < grid.count(); ++u)
        if (!room.contains(grid.point(u)))
            throw validation_error("config: grid does not fit inside the room");

    if (trajectory.kind == TrajectoryKind::GridSnapped &&
        (trajectory.mics < 1 || trajectory.mics > grid.nx * grid.ny * grid.nz))
        throw validation_error("config: trajectory.mics exceeds the grid capacity");
    if (trajectory.kind == TrajectoryKind::File && trajectory.file.empty())
        throw validation_error("config: trajectory.file required for trajectory.kind = file");

    if (!(sigma_h2 > 0.0))
        throw validation_error("config: analysis.sigma_h2 must be positive");

    std::vector<std::string> warnings;
    const double bound = nyquist_spacing(room.cutoff, room.speed_of_sound);
    if (grid.spacing >= bound)
    {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "grid spacing %.6g m is at or above the spatial Nyquist bound %.6g m",
                      grid.spacing, bound);
        warnings.emplace_back(buf);
    }
    return warnings;
}

ExcitationSignal ExperimentConfig::makeExcitation() const
{
    if (excitation.kind == ExcitationKind::Mls)
        return generate_mls(excitation.order, excitation.power);
    return generate_flat_spectrum(excitation.period, excitation.power, excitation.seed);
}

Trajectory ExperimentConfig::makeTrajectory(int steps) const
{
    switch (trajectory.kind)
    {
    case TrajectoryKind::GridSnapped:
        return gen_grid_snapped(grid, trajectory.mics, steps, trajectory.seed);
    case TrajectoryKind::Lissajous:
        return gen_lissajous(grid, trajectory.ratio_num, trajectory.ratio_den, steps, trajectory.margin);
    case TrajectoryKind::StaticGrid:
        return gen_static_grid(grid, steps);
    case TrajectoryKind::File:
        return load_trajectory(trajectory.file);
    }
    throw validation_error("config: unknown trajectory kind");
}

} // namespace sfield
