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

#include "wfgame/waterfill.hpp"

#include <string>

namespace wfgame {

Eigen::VectorXd stationary_interference(const GameInstance& inst, const PowerProfile& profile, Index user)
{
    Eigen::VectorXd total = Eigen::VectorXd::Zero(inst.num_bins);
    for (Index i = 0; i < inst.num_users; ++i)
        if (i != user)
            total += inst.gain(i, user).transpose().cwiseProduct(profile.row(i).transpose());
    return total;
}

double achievable_rate(const GameInstance& inst, const PowerProfile& profile, Index user)
{
    return rate_bits(profile.row(user).transpose(), inst.noise.row(user).transpose(),
                     stationary_interference(inst, profile, user));
}

Eigen::VectorXd achievable_rates(const GameInstance& inst, const PowerProfile& profile)
{
    Eigen::VectorXd r(inst.num_users);
    for (Index k = 0; k < inst.num_users; ++k)
        r(k) = achievable_rate(inst, profile, k);
    return r;
}

WaterfillResult best_response(const GameInstance& inst, const PowerProfile& profile, Index user)
{
    const Eigen::VectorXd sigma = inst.noise.row(user).transpose() + stationary_interference(inst, profile, user);
    return waterfill_best_response(sigma, inst.budget(user));
}

void require_feasible(const GameInstance& inst, const PowerAllocation& alloc)
{
    if (alloc.owner < 0 || alloc.owner >= inst.num_users)
        throw std::invalid_argument("allocation owner " + std::to_string(alloc.owner) + " out of range");
    if (alloc.power.size() != inst.num_bins)
        throw std::invalid_argument("allocation of user " + std::to_string(alloc.owner) + " has wrong length");
    if (alloc.power.minCoeff() < 0)
        throw std::invalid_argument("allocation of user " + std::to_string(alloc.owner) + " has negative power");
    const double cap = inst.budget(alloc.owner);
    if (alloc.power.sum() > cap * (1.0 + feasibility_tol))
        throw std::invalid_argument("allocation of user " + std::to_string(alloc.owner) + " exceeds its budget");
}

}  // namespace wfgame
