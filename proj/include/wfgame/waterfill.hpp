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

#ifndef WFGAME_WATERFILL_HPP
#define WFGAME_WATERFILL_HPP

#include "wfgame/instance.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace wfgame {

/// A joint power profile is a K x N matrix; row k is user k's per-bin PSD.
using PowerProfile = Eigen::MatrixXd;

/// Relative slack allowed on a user's total-power constraint.
inline constexpr double feasibility_tol = 1e-9;

/// One user's allocation, tagged with its owner.
struct PowerAllocation
{
    Eigen::VectorXd power;
    Index owner = 0;
};

template <typename Scalar>
struct WaterfillResultT
{
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> power;
    Scalar water_level{};
    std::vector<Index> active;  ///< ascending bin indices with power > 0
};

using WaterfillResult = WaterfillResultT<double>;

/**
 * Single-user water-filling: maximizes sum_n ln(1 + P_n / sigma_n) subject to
 * sum_n P_n <= budget, P_n >= 0. The solution is P_n = max(nu - sigma_n, 0)
 * with the water level nu chosen so that the budget binds.
 *
 * Sort-and-scan, O(N log N). Bins with sigma_n >= nu get zero power, so a
 * bin sitting exactly at the water level is inactive.
 */
template <typename Derived>
WaterfillResultT<typename Derived::Scalar> waterfill_best_response(const Eigen::MatrixBase<Derived>& sigma_eff,
                                                                   typename Derived::Scalar budget)
{
    using Scalar = typename Derived::Scalar;
    const Index n_bins = sigma_eff.size();
    if (n_bins == 0)
        throw std::invalid_argument("waterfill: empty noise vector");
    if (!(budget > Scalar(0)))
        throw std::invalid_argument("waterfill: budget must be positive");
    if (!(sigma_eff.minCoeff() > Scalar(0)))
        throw std::invalid_argument("waterfill: effective noise must be positive");

    std::vector<Index> order(static_cast<std::size_t>(n_bins));
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(), [&](Index a, Index b) { return sigma_eff(a) < sigma_eff(b); });

    // Grow the active set through the sorted noise floors until the next
    // floor is at or above the level the budget can reach.
    Scalar prefix(0);
    Scalar level(0);
    Index count = 0;
    for (Index m = 0; m < n_bins; ++m) {
        const Scalar s = sigma_eff(order[static_cast<std::size_t>(m)]);
        if (m > 0 && s >= level)
            break;
        prefix += s;
        count = m + 1;
        level = (budget + prefix) / Scalar(count);
    }

    WaterfillResultT<Scalar> out;
    out.water_level = level;
    out.power.setZero(n_bins);
    for (Index n = 0; n < n_bins; ++n) {
        if (sigma_eff(n) < level) {
            out.power(n) = level - sigma_eff(n);
            out.active.push_back(n);
        }
    }
    return out;
}

/// Sum over bins of log2(1 + P / (sigma + I)), all arguments per bin.
template <typename DerivedP, typename DerivedS, typename DerivedI>
typename DerivedP::Scalar rate_bits(const Eigen::MatrixBase<DerivedP>& power, const Eigen::MatrixBase<DerivedS>& sigma,
                                    const Eigen::MatrixBase<DerivedI>& interference)
{
    using Scalar = typename DerivedP::Scalar;
    const auto snr = power.array() / (sigma.array() + interference.array());
    return snr.log1p().sum() / Scalar(std::log(2.0));
}

/// Accumulated interference I_k^n = sum_{i != k} alpha_{ik}^n P_i^n.
Eigen::VectorXd stationary_interference(const GameInstance& inst, const PowerProfile& profile, Index user);

/// Achievable rate of `user` in bits (per-bin sum, no bin-width factor).
double achievable_rate(const GameInstance& inst, const PowerProfile& profile, Index user);

/// Achievable rates of all users, in bits.
Eigen::VectorXd achievable_rates(const GameInstance& inst, const PowerProfile& profile);

/// User `user`'s water-filling response to the other rows of `profile`.
WaterfillResult best_response(const GameInstance& inst, const PowerProfile& profile, Index user);

/// Throws std::invalid_argument if a row has negative entries or exceeds
/// its owner's budget beyond `feasibility_tol`.
void require_feasible(const GameInstance& inst, const PowerAllocation& alloc);

}  // namespace wfgame

#endif  // WFGAME_WATERFILL_HPP
