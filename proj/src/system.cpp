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

#include "sfield/system.hpp"
#include "sfield/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <unordered_map>

namespace sfield
{

namespace
{

struct Vec3Key
{
    std::uint64_t bits[3];
    bool operator==(const Vec3Key &o) const
    {
        return bits[0] == o.bits[0] && bits[1] == o.bits[1] && bits[2] == o.bits[2];
    }
};

struct Vec3KeyHash
{
    std::size_t operator()(const Vec3Key &k) const
    {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (std::uint64_t b : k.bits)
        {
            h ^= b;
            h *= 0x100000001b3ULL;
        }
        return static_cast<std::size_t>(h);
    }
};

Vec3Key make_key(const Vec3 &p)
{
    Vec3Key k;
    static_assert(sizeof(double) == sizeof(std::uint64_t));
    std::memcpy(&k.bits[0], &p[0], sizeof(double));
    std::memcpy(&k.bits[1], &p[1], sizeof(double));
    std::memcpy(&k.bits[2], &p[2], sizeof(double));
    return k;
}

// Exact path: one band-limited RIR per unique position, then the one-period
// steady-state response y(l) = sum_k h(k) s((l-k) mod L_p); every occurrence
// of the position reads y at its time slot.
void synthesize_exact(const RoomSpec &room, const Trajectory &traj, const ExcitationSignal &exc,
                      int rir_length, Eigen::VectorXd &x)
{
    const int q_count = traj.micCount();
    const int n_count = traj.sampleCount();
    const int period = exc.period();

    std::unordered_map<Vec3Key, std::vector<long>, Vec3KeyHash> occurrences;
    std::vector<Vec3> unique_positions;
    for (int n = 0; n < n_count; ++n)
        for (int q = 0; q < q_count; ++q)
        {
            const Vec3 &p = traj.position(n, q);
            const Vec3Key key = make_key(p);
            auto it = occurrences.find(key);
            if (it == occurrences.end())
            {
                it = occurrences.emplace(key, std::vector<long>()).first;
                unique_positions.push_back(p);
            }
            it->second.push_back(static_cast<long>(n) * q_count + q);
        }

    const ImageSourceModel model(room, rir_length);
    const Eigen::VectorXd &s = exc.samples();

    const long n_unique = static_cast<long>(unique_positions.size());
#pragma omp parallel for schedule(dynamic)
    for (long ui = 0; ui < n_unique; ++ui)
    {
        const Vec3 &p = unique_positions[ui];
        const Eigen::VectorXd h = model.rir(p);

        Eigen::VectorXd y = Eigen::VectorXd::Zero(period);
        for (int l = 0; l < period; ++l)
        {
            double acc = 0.0;
            for (int k = 0; k < rir_length; ++k)
            {
                int idx = l - k;
                idx %= period;
                if (idx < 0)
                    idx += period;
                acc += h[k] * s[idx];
            }
            y[l] = acc;
        }

        const auto &occ = occurrences.at(make_key(p));
        for (long flat : occ)
        {
            const long n = flat / q_count;
            x[flat] = y[n % period];
        }
    }
}

// Fast path: oversampled band-limited table of the periodic excitation. An
// image whose kernel window lies fully inside [0, rir_length) contributes a
// single table lookup per sample; images near the truncation boundaries get
// the partial kernel sum so the result matches the exact path's truncation.
class FastSynthesizer
{
  public:
    static constexpr int kOversample = 1024;
    static constexpr int kHalf = 40;

    FastSynthesizer(const RoomSpec &room, const ExcitationSignal &exc, int rir_length)
        : model_(room, rir_length), rir_length_(rir_length), period_(exc.period()),
          samples_(exc.samples())
    {
        if (room.highpass_hz > 0.0)
            throw validation_error("simulate_measurement: fast synthesis requires highpass_hz == 0");

        const double nu = model_.kernelCutoff();
        const int kern_len = (2 * kHalf + 1) * kOversample;
        kern_os_.resize(kern_len + 1);
        for (int i = 0; i <= kern_len; ++i)
        {
            const double t = static_cast<double>(i) / kOversample - (kHalf + 0.5);
            if (std::abs(t) > kHalf + 0.5)
            {
                kern_os_[i] = 0.0;
                continue;
            }
            const double xx = 2.0 * M_PI * nu * t;
            const double sinc = std::abs(xx) < 1e-12 ? 1.0 : std::sin(xx) / xx;
            const double win = 0.5 * (1.0 + std::cos(2.0 * M_PI * t / (2 * kHalf + 1)));
            kern_os_[i] = win * 2.0 * nu * sinc;
        }

        // u[m] = sum_k s(k) kern(m/OS - k), periodic in m with period L_p*OS
        table_.assign(static_cast<std::size_t>(period_) * kOversample, 0.0);
        const long tab_len = static_cast<long>(table_.size());
        for (int k = 0; k < period_; ++k)
        {
            const double sk = samples_[k];
            const long base = static_cast<long>(k) * kOversample;
            for (int i = 0; i <= kern_len; ++i)
            {
                long m = base + i - (kHalf * kOversample + kOversample / 2);
                m %= tab_len;
                if (m < 0)
                    m += tab_len;
                table_[m] += sk * kern_os_[i];
            }
        }
    }

    // x(n) for a microphone at position p at time n.
    double sample(const Vec3 &p, long n) const
    {
        const RoomSpec &room = model_.room();
        const double c_ts = room.speed_of_sound / room.sample_rate;
        const long tab_len = static_cast<long>(table_.size());
        double acc = 0.0;
        for (const ImageSource &img : model_.images())
        {
            const double dist = (img.position - p).norm();
            const double delay = dist / c_ts;
            if (delay > rir_length_ + kHalf + 1)
                continue;
            const double gain = img.amplitude / (4.0 * M_PI * std::max(dist, c_ts));

            if (delay >= kHalf + 1 && delay <= rir_length_ - kHalf - 2)
            {
                // full kernel window inside the truncation interval
                double pos = std::fmod((static_cast<double>(n % period_) - delay) * kOversample,
                                       static_cast<double>(tab_len));
                if (pos < 0)
                    pos += tab_len;
                const long i0 = static_cast<long>(pos);
                const double f = pos - i0;
                const long i1 = i0 + 1 == tab_len ? 0 : i0 + 1;
                acc += gain * ((1.0 - f) * table_[i0] + f * table_[i1]);
            }
            else
            {
                // partial kernel: k restricted to [0, rir_length)
                const long k_lo = std::max(0L, static_cast<long>(std::ceil(delay - kHalf - 0.5)));
                const long k_hi =
                    std::min(static_cast<long>(rir_length_) - 1, static_cast<long>(std::floor(delay + kHalf + 0.5)));
                double part = 0.0;
                for (long k = k_lo; k <= k_hi; ++k)
                {
                    const double t = static_cast<double>(k) - delay; // in [-40.5, 40.5]
                    const double ti = (t + kHalf + 0.5) * kOversample;
                    const long j0 = static_cast<long>(ti);
                    if (j0 < 0 || j0 + 1 >= static_cast<long>(kern_os_.size()))
                        continue;
                    const double f = ti - j0;
                    const double kv = (1.0 - f) * kern_os_[j0] + f * kern_os_[j0 + 1];
                    long idx = (n - k) % period_;
                    if (idx < 0)
                        idx += period_;
                    part += kv * samples_[idx];
                }
                acc += gain * part;
            }
        }
        return acc;
    }

  private:
    ImageSourceModel model_;
    int rir_length_;
    int period_;
    Eigen::VectorXd samples_;
    std::vector<double> kern_os_;
    std::vector<double> table_;
};

} // namespace

MeasurementRecord simulate_measurement(const RoomSpec &room, const Trajectory &traj,
                                       const ExcitationSignal &excitation, int periods,
                                       int rir_length, std::optional<double> snr_db,
                                       std::uint64_t noise_seed, SynthesisMode mode)
{
    room.validate();
    if (periods < 1)
        throw validation_error("simulate_measurement: periods must be positive");
    if (rir_length < 1)
        throw validation_error("simulate_measurement: RIR length must be positive");
    if (rir_length > excitation.period())
        throw validation_error("simulate_measurement: period shorter than RIR");
    if (traj.sampleCount() != periods * excitation.period())
        throw validation_error("simulate_measurement: trajectory length must equal periods * period");
    for (const Vec3 &p : traj.positions())
        if (!room.contains(p))
            throw validation_error("simulate_measurement: trajectory leaves the room");

    const long m_total = static_cast<long>(traj.sampleCount()) * traj.micCount();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(m_total);

    if (mode == SynthesisMode::Exact)
    {
        synthesize_exact(room, traj, excitation, rir_length, x);
    }
    else
    {
        const FastSynthesizer synth(room, excitation, rir_length);
        const int q_count = traj.micCount();
        const long n_count = traj.sampleCount();
#pragma omp parallel for schedule(static)
        for (long n = 0; n < n_count; ++n)
            for (int q = 0; q < q_count; ++q)
                x[n * q_count + q] = synth.sample(traj.position(static_cast<int>(n), q), n);
    }

    if (snr_db)
    {
        const double sigma_eta = std::sqrt(excitation.power() / std::pow(10.0, *snr_db / 10.0));
        std::mt19937_64 rng(noise_seed);
        std::normal_distribution<double> gauss(0.0, sigma_eta);
        for (long i = 0; i < m_total; ++i)
            x[i] += gauss(rng);
    }

    MeasurementRecord rec{std::move(x), traj, excitation, periods, snr_db, noise_seed};
    return rec;
}

FullSystem assemble_full(const MeasurementRecord &record, const InterpolationKernel &kernel,
                         const GridSpec &grid, int rir_length, std::size_t max_entries)
{
    grid.validate();
    kernel.validate();
    if (rir_length < 1)
        throw validation_error("assemble_full: RIR length must be positive");
    const Trajectory &traj = record.trajectory;
    const long m_rows = static_cast<long>(traj.sampleCount()) * traj.micCount();
    const long n_cols = static_cast<long>(grid.count()) * rir_length;
    if (m_rows < 1)
        throw validation_error("assemble_full: empty measurement");
    if (static_cast<std::size_t>(m_rows) * static_cast<std::size_t>(n_cols) > max_entries)
        throw validation_error("assemble_full: matrix exceeds the size threshold; use the decoupled path");

    const ExcitationSignal &exc = record.excitation;
    FullSystem sys;
    sys.grid = grid;
    sys.rir_length = rir_length;
    sys.rhs = record.samples;
    sys.matrix = Eigen::MatrixXd::Zero(m_rows, n_cols);

    const int q_count = traj.micCount();
    for (long row = 0; row < m_rows; ++row)
    {
        const long n = row / q_count;
        const int q = static_cast<int>(row % q_count);
        const WeightStencil st = weights(kernel, grid, traj.position(static_cast<int>(n), q));
        for (const auto &[u, w] : st.entries)
            for (int k = 0; k < rir_length; ++k)
                sys.matrix(row, static_cast<long>(u) * rir_length + k) = w * exc.at(n - k);
    }
    return sys;
}

DecoupledSystem::DecoupledSystem(GridSpec grid, int period, int periods, int mic_count, double gamma,
                                 std::vector<WeightStencil> stencils, Eigen::VectorXd rhs)
    : grid_(std::move(grid)), period_(period), periods_(periods), mic_count_(mic_count),
      gamma_(gamma), stencils_(std::move(stencils)), rhs_(std::move(rhs))
{
    const long expected = static_cast<long>(period_) * periods_ * mic_count_;
    if (static_cast<long>(stencils_.size()) != expected || rhs_.size() != expected)
        throw validation_error("decoupled system: inconsistent sizes");
}

Eigen::MatrixXd DecoupledSystem::blockMatrix(int l) const
{
    Eigen::MatrixXd block = Eigen::MatrixXd::Zero(rowsPerBlock(), grid_.count());
    for (int i = 0; i < periods_; ++i)
        for (int q = 0; q < mic_count_; ++q)
        {
            const long flat = (static_cast<long>(i) * period_ + l) * mic_count_ + q;
            const int row = i * mic_count_ + q;
            for (const auto &[u, w] : stencils_[flat].entries)
                block(row, u) = gamma_ * w;
        }
    return block;
}

Eigen::VectorXd DecoupledSystem::blockRhs(int l, const Eigen::VectorXd &rhs) const
{
    if (rhs.size() != rhs_.size())
        throw validation_error("decoupled system: rhs length mismatch");
    Eigen::VectorXd out(rowsPerBlock());
    for (int i = 0; i < periods_; ++i)
        for (int q = 0; q < mic_count_; ++q)
            out[i * mic_count_ + q] = rhs[(static_cast<long>(i) * period_ + l) * mic_count_ + q];
    return out;
}

DecoupledSystem assemble_decoupled(const MeasurementRecord &record, const InterpolationKernel &kernel,
                                   const GridSpec &grid)
{
    grid.validate();
    kernel.validate();
    const Trajectory &traj = record.trajectory;
    const int period = record.excitation.period();
    if (traj.sampleCount() % period != 0)
        throw validation_error("assemble_decoupled: sample count is not a multiple of the period");
    const int periods = traj.sampleCount() / period;

    std::vector<WeightStencil> stencils;
    stencils.reserve(static_cast<std::size_t>(traj.sampleCount()) * traj.micCount());
    for (int n = 0; n < traj.sampleCount(); ++n)
        for (int q = 0; q < traj.micCount(); ++q)
            stencils.push_back(weights(kernel, grid, traj.position(n, q)));

    const double gamma = static_cast<double>(period) * record.excitation.power();
    return DecoupledSystem(grid, period, periods, traj.micCount(), gamma, std::move(stencils),
                           record.samples);
}

void save_measurement(const MeasurementRecord &record, const std::string &path,
                      const std::string &trajectory_path)
{
    save_trajectory(record.trajectory, trajectory_path);

    std::ofstream f(path);
    if (!f)
        throw validation_error("save_measurement: cannot open " + path);
    f << "n,q,x\n";
    char buf[64];
    const int q_count = record.micCount();
    for (long i = 0; i < record.samples.size(); ++i)
    {
        std::snprintf(buf, sizeof buf, "%ld,%d,%.17g\n", i / q_count, static_cast<int>(i % q_count),
                      record.samples[i]);
        f << buf;
    }

    const std::string excitation_path = path + ".excitation.csv";
    save_excitation_csv(record.excitation, excitation_path);

    std::ofstream meta(path + ".meta");
    if (!meta)
        throw validation_error("save_measurement: cannot open " + path + ".meta");
    meta << "excitation=" << std::filesystem::path(excitation_path).filename().string() << "\n";
    meta << "periods=" << record.periods << "\n";
    if (record.snr_db)
    {
        std::snprintf(buf, sizeof buf, "%.17g", *record.snr_db);
        meta << "snr_db=" << buf << "\n";
    }
    else
    {
        meta << "snr_db=none\n";
    }
    meta << "noise_seed=" << record.noise_seed << "\n";
    meta << "trajectory=" << std::filesystem::path(trajectory_path).filename().string() << "\n";
}

namespace
{

std::unordered_map<std::string, std::string> read_meta(const std::string &path)
{
    std::ifstream f(path);
    if (!f)
        throw validation_error("load_measurement: cannot open " + path);
    std::unordered_map<std::string, std::string> kv;
    std::string line;
    while (std::getline(f, line))
    {
        if (line.empty() || line[0] == '#')
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw validation_error("load_measurement: malformed meta line: " + line);
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return kv;
}

const std::string &meta_get(const std::unordered_map<std::string, std::string> &kv,
                            const std::string &key)
{
    auto it = kv.find(key);
    if (it == kv.end())
        throw validation_error("load_measurement: missing meta key " + key);
    return it->second;
}

} // namespace

MeasurementRecord load_measurement(const std::string &path)
{
    const auto kv = read_meta(path + ".meta");
    const auto dir = std::filesystem::path(path).parent_path();

    ExcitationSignal exc = load_excitation_csv((dir / meta_get(kv, "excitation")).string());
    Trajectory traj = load_trajectory((dir / meta_get(kv, "trajectory")).string());

    std::ifstream f(path);
    if (!f)
        throw validation_error("load_measurement: cannot open " + path);
    std::string line;
    std::getline(f, line); // header
    std::vector<double> vals;
    int lineno = 1;
    while (std::getline(f, line))
    {
        ++lineno;
        if (line.empty())
            continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        long n;
        int q;
        double v;
        if (!(ls >> n >> q >> v))
            throw validation_error("load_measurement: malformed row at line " + std::to_string(lineno));
        vals.push_back(v);
    }
    const long expected = static_cast<long>(traj.sampleCount()) * traj.micCount();
    if (static_cast<long>(vals.size()) != expected)
        throw validation_error("load_measurement: sample count does not match the trajectory");

    MeasurementRecord rec{Eigen::Map<Eigen::VectorXd>(vals.data(), expected), std::move(traj),
                          std::move(exc), std::stoi(meta_get(kv, "periods")), std::nullopt,
                          std::stoull(meta_get(kv, "noise_seed"))};
    const std::string snr = meta_get(kv, "snr_db");
    if (snr != "none")
        rec.snr_db = std::stod(snr);
    return rec;
}

} // namespace sfield
