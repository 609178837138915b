// SPDX-License-Identifier: Apache-2.0
//
// wfgame: power-allocation games on frequency-selective interference channels
// Copyright (C) 2026 The wfgame Authors
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

#ifndef WFGAME_INSTANCE_HPP
#define WFGAME_INSTANCE_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace wfgame {

using Index = Eigen::Index;

/**
 * One K-user, N-bin water-filling game.
 *
 * All channel data is already normalized by the direct-link gain of the
 * receiving user, so `noise(k, n)` is the equivalent noise PSD seen by user k
 * in bin n and `gain(j, k)` is the row of normalized cross gains from
 * transmitter j into receiver k. The diagonal pairs (k, k) are stored and are
 * always zero.
 */
struct GameInstance
{
    Index num_users = 0;
    Index num_bins = 0;

    Eigen::MatrixXd noise;       ///< K x N
    Eigen::MatrixXd cross_gain;  ///< (K*K) x N, row j*K + k holds alpha_{jk}
    Eigen::VectorXd budget;      ///< K

    // Generation metadata (zero for hand-built instances).
    std::uint64_t seed = 0;
    std::uint64_t redraws = 0;

    GameInstance() = default;
    GameInstance(Index users, Index bins);

    auto gain(Index from, Index to) { return cross_gain.row(from * num_users + to); }
    auto gain(Index from, Index to) const { return cross_gain.row(from * num_users + to); }

    double& gain(Index from, Index to, Index bin) { return cross_gain(from * num_users + to, bin); }
    double gain(Index from, Index to, Index bin) const { return cross_gain(from * num_users + to, bin); }

    /// K x K matrix of bin n with entry (i, j) = alpha_{ji}, i.e. row i collects
    /// the gains of every other transmitter into receiver i. Zero diagonal.
    Eigen::MatrixXd coupling_matrix(Index bin) const;
};

/// Parameters of the tapped-delay-line Rayleigh channel model.
struct ChannelModelParams
{
    Index num_bins = 200;
    double band_hz = 1.0e7;
    Index num_rays = 4;
    double rms_delay_s = 1.0e-7;
    double direct_power = 1.0;
    double cross_power = 0.5;
    double noise_psd = 0.01;
    double budget_per_user = 200.0;
};

/// Per-tap delays and variances (normalized to unit total power) of the
/// exponential power-delay profile. Taps sit at l * spacing, l = 0..L-1, with
/// variance proportional to exp(-l), and the spacing is chosen so that the
/// power-weighted RMS delay spread equals `params.rms_delay_s`.
struct DelayProfile
{
    Eigen::VectorXd delay_s;
    Eigen::VectorXd weight;
};

DelayProfile exponential_delay_profile(const ChannelModelParams& params);

/// Draws a random instance. Deterministic in (params, num_users, seed); the
/// generator is std::mt19937_64 seeded with `seed` and complex tap gains are
/// built from pairs of std::normal_distribution draws. If any direct-link
/// power |H_kk(f_n)|^2 falls below 1e-12 the whole instance is redrawn from a
/// derived seed and the redraw count is stored in `redraws`.
GameInstance generate_instance(const ChannelModelParams& params, Index num_users, std::uint64_t seed);

/// Squared channel magnitude |H(f_n)|^2 for one link, evaluated at the bin
/// centres f_n = (n - 1/2) * band / N. Exposed for diagnostics and tests.
Eigen::VectorXd channel_power_response(const Eigen::VectorXcd& taps, const DelayProfile& profile,
                                       const ChannelModelParams& params);

/// Empty iff every invariant of `inst` holds.
std::vector<std::string> validate_instance(const GameInstance& inst);

/// Throws std::invalid_argument listing every violation.
void require_valid(const GameInstance& inst);

// Flat text format: "K N", then K noise rows, then K*K gain rows (pair
// (j, k) at row j*K + k), then one budget row. Whitespace separated.
void write_instance(std::ostream& os, const GameInstance& inst);
GameInstance read_instance(std::istream& is);
void save_instance(const std::string& path, const GameInstance& inst);
GameInstance load_instance(const std::string& path);

}  // namespace wfgame

#endif  // WFGAME_INSTANCE_HPP
