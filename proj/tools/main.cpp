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
#include "sfield/config.hpp"
#include "sfield/errors.hpp"
#include "sfield/experiments.hpp"
#include "sfield/solve.hpp"
#include "sfield/system.hpp"

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace
{

using namespace sfield;

void set_threads(int threads)
{
#ifdef _OPENMP
    if (threads > 0)
        omp_set_num_threads(threads);
#else
    (void)threads;
#endif
}

ExperimentConfig load_config(const std::string &path)
{
    ExperimentConfig cfg = ExperimentConfig::load(path);
    for (const std::string &w : cfg.validate())
        std::cerr << "warning: " << w << "\n";
    return cfg;
}

void write_metrics_csv(const std::string &path, const std::vector<std::tuple<std::string, double, std::string>> &rows)
{
    std::ofstream f(path);
    if (!f)
        throw validation_error("cannot open " + path);
    f << "metric,value,unit\n";
    char buf[48];
    for (const auto &[name, value, unit] : rows)
    {
        if (std::isinf(value) && value < 0)
            f << name << ",-inf," << unit << "\n";
        else
        {
            std::snprintf(buf, sizeof buf, "%.10g", value);
            f << name << "," << buf << "," << unit << "\n";
        }
    }
}

int cmd_simulate(const std::string &config_path, const std::string &out_path)
{
    const ExperimentConfig cfg = load_config(config_path);
    const RirSet rirs = simulate_grid_rirs(cfg.room, cfg.grid, cfg.measure.rir_length);
    rirs.saveSfr(out_path);
    const double bound = nyquist_spacing(cfg.room.cutoff, cfg.room.speed_of_sound);
    std::printf("grid points N = %d\n", cfg.grid.count());
    std::printf("rir length  L = %d\n", cfg.measure.rir_length);
    std::printf("spacing     D = %g m\n", cfg.grid.spacing);
    std::printf("nyquist bound = %g m (margin %.3f)\n", bound, bound / cfg.grid.spacing);
    std::printf("wrote %s\n", out_path.c_str());
    return 0;
}

int cmd_trajectory(const std::string &config_path, const std::string &out_path, int steps)
{
    const ExperimentConfig cfg = load_config(config_path);
    const int n = steps > 0 ? steps : cfg.defaultSteps();
    const Trajectory traj = cfg.makeTrajectory(n);
    save_trajectory(traj, out_path);
    std::printf("wrote %s (%d samples x %d mics)\n", out_path.c_str(), traj.sampleCount(),
                traj.micCount());
    return 0;
}

int cmd_measure(const std::string &config_path, const std::string &traj_path,
                const std::string &out_path, std::optional<std::uint64_t> seed_override)
{
    const ExperimentConfig cfg = load_config(config_path);
    const ExcitationSignal exc = cfg.makeExcitation();
    const Trajectory traj = traj_path.empty() ? cfg.makeTrajectory(cfg.defaultSteps())
                                              : load_trajectory(traj_path);
    std::optional<double> snr;
    if (!cfg.measure.snr_db.empty())
        snr = cfg.measure.snr_db.front();
    const std::uint64_t seed = seed_override.value_or(cfg.measure.noise_seed);
    const MeasurementRecord rec = simulate_measurement(cfg.room, traj, exc, cfg.measure.periods,
                                                       cfg.measure.rir_length, snr, seed);
    save_measurement(rec, out_path, out_path + ".trajectory.csv");
    std::printf("wrote %s (%ld samples, %d mics, snr %s)\n", out_path.c_str(),
                static_cast<long>(rec.samples.size()), rec.micCount(),
                snr ? std::to_string(*snr).c_str() : "none");
    return 0;
}

int cmd_reconstruct(const std::string &config_path, const std::string &measurement_path,
                    const std::string &out_path, const std::string &truth_path,
                    const std::string &diagnostics_path)
{
    const ExperimentConfig cfg = load_config(config_path);
    const MeasurementRecord rec = load_measurement(measurement_path);

    SolveResult solved = [&] {
        if (cfg.solver.method == SolveMethod::DecoupledLs)
        {
            const DecoupledSystem sys = assemble_decoupled(rec, cfg.kernel, cfg.grid);
            return solve_decoupled(sys, rec.excitation, cfg.solver, cfg.room.sample_rate);
        }
        SolverConfig scfg = cfg.solver;
        if (scfg.method == SolveMethod::Ridge && scfg.ridge_lambda == 0.0)
        {
            // lambda = sigma_eta^2 / sigma_h^2 with the default prior estimate
            const double sigma_eta2 =
                rec.snr_db ? rec.excitation.power() / std::pow(10.0, *rec.snr_db / 10.0) : 0.0;
            const double sigma_h2 = rec.samples.squaredNorm() /
                                    (static_cast<double>(rec.samples.size()) * rec.excitation.period() *
                                     rec.excitation.power());
            scfg.ridge_lambda = sigma_h2 > 0.0 ? sigma_eta2 / sigma_h2 : 0.0;
        }
        const FullSystem sys = assemble_full(rec, cfg.kernel, cfg.grid, cfg.measure.rir_length);
        return solve_full(sys, scfg, cfg.room.sample_rate);
    }();

    solved.rirs.saveSfr(out_path);
    if (!diagnostics_path.empty())
        save_diagnostics_csv(solved.diagnostics, diagnostics_path);
    std::printf("wrote %s (residual %.6g, rank %ld)\n", out_path.c_str(),
                solved.diagnostics.residual_norm, static_cast<long>(solved.diagnostics.rank));

    if (!truth_path.empty())
    {
        const RirSet truth = RirSet::loadSfr(truth_path);
        const double m = mnsm_db(truth, solved.rirs);
        std::printf("mnsm = %.4f dB\n", m);
        if (!diagnostics_path.empty())
        {
            std::ofstream f(diagnostics_path, std::ios::app);
            f << "mnsm_db," << m << "\n";
        }
    }
    return 0;
}

int cmd_evaluate(const std::string &truth_path, const std::string &estimate_path,
                 const std::string &out_path)
{
    const RirSet truth = RirSet::loadSfr(truth_path);
    const RirSet est = RirSet::loadSfr(estimate_path);
    const double m = mnsm_db(truth, est);
    if (std::isinf(m) && m < 0)
        std::printf("mnsm = -inf dB (exact reconstruction)\n");
    else
        std::printf("mnsm = %.4f dB\n", m);
    if (!out_path.empty())
        write_metrics_csv(out_path, {{"mnsm_db", m, "dB"}});
    return 0;
}

int cmd_predict_mmse(const std::string &config_path, const std::string &traj_path,
                     const std::string &out_path)
{
    const ExperimentConfig cfg = load_config(config_path);
    if (cfg.measure.snr_db.empty())
        throw validation_error("predict-mmse: measure.snr_db must contain at least one value");
    const Trajectory traj = traj_path.empty() ? cfg.makeTrajectory(cfg.defaultSteps())
                                              : load_trajectory(traj_path);
    NoiseModel noise;
    noise.sigma_s2 = cfg.excitation.power;
    noise.sigma_eta2 = cfg.excitation.power / std::pow(10.0, cfg.measure.snr_db.front() / 10.0);
    noise.sigma_h2 = cfg.sigma_h2;

    const MmsePrediction pred =
        predict_mmse(traj, cfg.kernel, cfg.grid, noise, cfg.excitation.effectivePeriod());
    std::printf("predicted mmse = %.10g\n", pred.total);

    if (!out_path.empty())
    {
        std::ofstream f(out_path);
        if (!f)
            throw validation_error("cannot open " + out_path);
        f << "sample,sum_phi_sq,mmse_term\n";
        char buf[96];
        for (Eigen::Index i = 0; i < pred.per_sample.size(); ++i)
        {
            std::snprintf(buf, sizeof buf, "%ld,%.10g,%.10g\n", static_cast<long>(i),
                          pred.sum_phi_sq[i], pred.per_sample[i]);
            f << buf;
        }
    }
    return 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"sound field measurement with moving microphones"};
    app.require_subcommand(1);

    int threads = 0;
    app.add_option("--threads", threads, "cap worker threads (0 = library default)");

    std::string config_path, out_path, traj_path, measurement_path, truth_path, diag_path,
        estimate_path;
    int steps = 0;
    std::optional<std::uint64_t> seed;

    auto *sim = app.add_subcommand("simulate", "simulate ground-truth grid RIRs (.sfr)");
    sim->add_option("--config", config_path)->required()->check(CLI::ExistingFile);
    sim->add_option("--out", out_path)->required();

    auto *traj = app.add_subcommand("trajectory", "generate a microphone trajectory (CSV)");
    traj->add_option("--config", config_path)->required()->check(CLI::ExistingFile);
    traj->add_option("--out", out_path)->required();
    traj->add_option("--steps", steps, "number of time samples (default: R * L_p)");

    auto *meas = app.add_subcommand("measure", "simulate a dynamic measurement run (CSV + sidecar)");
    meas->add_option("--config", config_path)->required()->check(CLI::ExistingFile);
    meas->add_option("--trajectory", traj_path, "trajectory CSV (default: generated from config)");
    meas->add_option("--out", out_path)->required();
    std::uint64_t seed_value = 0;
    auto *seed_opt = meas->add_option("--seed", seed_value, "noise seed override");

    auto *rec = app.add_subcommand("reconstruct", "recover grid RIRs from a measurement");
    rec->add_option("--config", config_path)->required()->check(CLI::ExistingFile);
    rec->add_option("--measurement", measurement_path)->required()->check(CLI::ExistingFile);
    rec->add_option("--out", out_path)->required();
    rec->add_option("--truth", truth_path, "ground-truth .sfr for MNSM reporting")
        ->check(CLI::ExistingFile);
    rec->add_option("--diagnostics", diag_path, "solver diagnostics CSV");

    auto *eval = app.add_subcommand("evaluate", "MNSM between truth and estimate (.sfr files)");
    eval->add_option("--truth", truth_path)->required()->check(CLI::ExistingFile);
    eval->add_option("--estimate", estimate_path)->required()->check(CLI::ExistingFile);
    eval->add_option("--out", out_path, "metrics CSV");

    auto *pred = app.add_subcommand("predict-mmse", "closed-form MMSE prediction for a trajectory");
    pred->add_option("--config", config_path)->required()->check(CLI::ExistingFile);
    pred->add_option("--trajectory", traj_path, "trajectory CSV (default: generated from config)");
    pred->add_option("--out", out_path, "per-sample profile CSV");

    auto *exp = app.add_subcommand("experiment", "reproducible experiment pipelines");
    exp->require_subcommand(1);

    auto *t1 = exp->add_subcommand("table1", "static vs dynamic grid sampling across SNR");
    std::string t1_out;
    int t1_seeds = 5;
    std::uint64_t t1_seed = 1;
    std::vector<double> t1_snrs = {10, 20, 30, 40, 50, 60, 70};
    t1->add_option("--out", t1_out)->required();
    t1->add_option("--seeds", t1_seeds, "noise seeds per cell");
    t1->add_option("--seed", t1_seed, "base seed");
    t1->add_option("--snr", t1_snrs, "SNR list in dB");

    auto *f1 = exp->add_subcommand("fig1", "recovery quality vs grid spacing and kernel");
    std::string f1_out, f1_scale = "desk";
    std::vector<double> f1_deltas = {0.04, 0.03, 0.02, 0.015, 0.01};
    std::optional<double> f1_snr;
    double f1_snr_value = 0.0;
    f1->add_option("--out", f1_out)->required();
    f1->add_option("--scale", f1_scale)->check(CLI::IsMember({"desk", "paper"}));
    f1->add_option("--deltas", f1_deltas, "grid spacings to sweep (m)");
    auto *f1_snr_opt = f1->add_option("--snr", f1_snr_value, "SNR override in dB");

    CLI11_PARSE(app, argc, argv);
    set_threads(threads);

    try
    {
        if (sim->parsed())
            return cmd_simulate(config_path, out_path);
        if (traj->parsed())
            return cmd_trajectory(config_path, out_path, steps);
        if (meas->parsed())
        {
            if (seed_opt->count() > 0)
                seed = seed_value;
            return cmd_measure(config_path, traj_path, out_path, seed);
        }
        if (rec->parsed())
            return cmd_reconstruct(config_path, measurement_path, out_path, truth_path, diag_path);
        if (eval->parsed())
            return cmd_evaluate(truth_path, estimate_path, out_path);
        if (pred->parsed())
            return cmd_predict_mmse(config_path, traj_path, out_path);
        if (t1->parsed())
        {
            Table1Options opts;
            opts.snrs_db = t1_snrs;
            opts.noise_seeds = t1_seeds;
            opts.base_seed = t1_seed;
            const Table1Result result = run_table1(opts);
            save_table1_csv(result, t1_out);
            std::printf("wrote %s\n", t1_out.c_str());
            return 0;
        }
        if (f1->parsed())
        {
            Fig1Options opts;
            opts.scale = f1_scale == "paper" ? Fig1Options::Scale::Paper : Fig1Options::Scale::Desk;
            opts.deltas = f1_deltas;
            if (f1_snr_opt->count() > 0)
                opts.snr_db_override = f1_snr_value;
            (void)f1_snr;
            const Fig1Result result = run_fig1(opts);
            save_fig1_csv(result, f1_out);
            std::printf("wrote %s\n", f1_out.c_str());
            return 0;
        }
    }
    catch (const validation_error &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    catch (const numerical_error &e)
    {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
