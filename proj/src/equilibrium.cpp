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

#include "wfgame/equilibrium.hpp"

#include <string>
#include <vector>

namespace wfgame {

namespace {

NashOutcome sweep_to_equilibrium(const GameInstance& inst, Index fixed_user, PowerProfile profile, double tol,
                                 Index max_iter, bool reverse)
{
    if (!(tol > 0))
        throw std::invalid_argument("iterative water-filling: tol must be positive");
    if (max_iter <= 0)
        throw std::invalid_argument("iterative water-filling: max_iter must be positive");

    const Index K = inst.num_users;
    std::vector<Index> order;
    for (Index k = 0; k < K; ++k) {
        const Index u = reverse ? K - 1 - k : k;
        if (u != fixed_user)
            order.push_back(u);
    }

    NashOutcome out;
    out.water_levels = Eigen::VectorXd::Zero(K);
    for (Index sweep = 1; sweep <= max_iter; ++sweep) {
        double change = 0;
        for (const Index u : order) {
            WaterfillResult br = best_response(inst, profile, u);
            change = std::max(change, (br.power - profile.row(u).transpose()).cwiseAbs().maxCoeff());
            profile.row(u) = br.power.transpose();
            out.water_levels(u) = br.water_level;
        }
        out.iterations = sweep;
        out.residual = change;
        if (order.size() == 1) {
            out.residual = 0;
            out.converged = true;
            break;
        }
        if (change <= tol) {
            out.converged = true;
            break;
        }
    }
    out.profile = std::move(profile);
    return out;
}

PowerProfile starting_profile(const GameInstance& inst, const PowerProfile* init)
{
    if (init == nullptr)
        return PowerProfile::Zero(inst.num_users, inst.num_bins);
    if (init->rows() != inst.num_users || init->cols() != inst.num_bins)
        throw std::invalid_argument("iterative water-filling: initial profile must be K x N");
    return *init;
}

}  // namespace

NashOutcome iterate_waterfilling(const GameInstance& inst, const NashOptions& opts)
{
    PowerProfile profile = starting_profile(inst, opts.init ? &*opts.init : nullptr);
    Index fixed_user = -1;
    if (opts.fixed) {
        require_feasible(inst, *opts.fixed);
        fixed_user = opts.fixed->owner;
        profile.row(fixed_user) = opts.fixed->power.transpose();
    }
    return sweep_to_equilibrium(inst, fixed_user, std::move(profile), opts.tol, opts.max_iter, opts.reverse_order);
}

NashOutcome follower_equilibrium(const GameInstance& inst, Index leader, const Eigen::VectorXd& leader_power,
                                 const PowerProfile* warm_start, double tol, Index max_iter)
{
    if (leader < 0 || leader >= inst.num_users)
        throw std::invalid_argument("follower equilibrium: leader index out of range");
    if (leader_power.size() != inst.num_bins || leader_power.minCoeff() < 0)
        throw std::invalid_argument("follower equilibrium: leader power must be a non-negative N-vector");
    PowerProfile profile = starting_profile(inst, warm_start);
    profile.row(leader) = leader_power.transpose();
    return sweep_to_equilibrium(inst, leader, std::move(profile), tol, max_iter, false);
}

double best_response_gap(const GameInstance& inst, const PowerProfile& profile, Index skip)
{
    double gap = 0;
    for (Index k = 0; k < inst.num_users; ++k) {
        if (k == skip)
            continue;
        const WaterfillResult br = best_response(inst, profile, k);
        gap = std::max(gap, (br.power - profile.row(k).transpose()).cwiseAbs().maxCoeff());
    }
    return gap;
}

UniquenessReport check_uniqueness_condition(const GameInstance& inst)
{
    UniquenessReport rep;
    for (Index n = 0; n < inst.num_bins; ++n) {
        const double norm = inst.coupling_matrix(n).cwiseAbs().rowwise().sum().maxCoeff();
        if (n == 0 || norm > rep.worst_norm) {
            rep.worst_norm = norm;
            rep.worst_bin = n;
        }
    }
    rep.holds = rep.worst_norm < 1.0;
    return rep;
}

}  // namespace wfgame
