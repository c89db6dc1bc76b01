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

#ifndef SFIELD_SIGNALS_HPP
#define SFIELD_SIGNALS_HPP

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <string>

namespace sfield
{

enum class ExcitationKind
{
    Mls,          // binary maximum-length sequence, period 2^m - 1
    FlatSpectrum, // random-phase sequence with exactly constant spectral magnitude
};

/// One period of a periodic excitation signal.
///
/// The defining property exploited throughout the toolkit is the periodic
/// autocorrelation: FlatSpectrum sequences are exactly perfect
/// (r_ss(m) = L * power * delta(m mod L) in the unnormalized convention),
/// MLS sequences are perfect up to a constant -power at off-peak lags.
class ExcitationSignal
{
  public:
    ExcitationSignal(ExcitationKind kind, Eigen::VectorXd samples, double power);

    ExcitationKind kind() const { return kind_; }
    const Eigen::VectorXd &samples() const { return samples_; }
    int period() const { return static_cast<int>(samples_.size()); }
    double power() const { return power_; }

    /// Sample with periodic indexing; n may be negative (steady state).
    double at(long n) const
    {
        long p = period();
        long m = n % p;
        if (m < 0)
            m += p;
        return samples_[m];
    }

  private:
    ExcitationKind kind_;
    Eigen::VectorXd samples_;
    double power_;
};

/// Binary MLS of period 2^order - 1 from a Fibonacci LFSR seeded with all
/// ones. One fixed primitive polynomial per order (see kLfsrTaps in the
/// implementation); deterministic, no RNG involved. Samples are +-sqrt(power).
///
/// Supported orders: 2..24. Throws validation_error otherwise.
ExcitationSignal generate_mls(int order, double power);

/// Exactly perfect periodic sequence of arbitrary period >= 2: constant
/// spectral magnitude with random phases (conjugate-symmetric, so the
/// sequence is real), rescaled to the requested mean power. Deterministic
/// per seed.
ExcitationSignal generate_flat_spectrum(int period, double power, std::uint64_t seed);

/// Unnormalized periodic autocorrelation r(m) = sum_n s(n) s((n+m) mod L),
/// m = 0..L-1. Lag 0 equals L * power. This is the convention under which a
/// perfect sequence gives r(m) = L * power * delta(m).
Eigen::VectorXd periodic_autocorrelation(const ExcitationSignal &sig);

/// DFT of one period. Used for exact circulant deconvolution.
Eigen::VectorXcd period_spectrum(const ExcitationSignal &sig);

/// CSV export: header "# kind,L_p,power", then one sample per line.
void save_excitation_csv(const ExcitationSignal &sig, const std::string &path);
ExcitationSignal load_excitation_csv(const std::string &path);

} // namespace sfield

#endif
