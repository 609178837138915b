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

#include "wfgame/crm.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace wfgame {

namespace {

constexpr std::array<double, 4> budget_fractions{1.0, 0.9, 0.75, 0.5};
constexpr int zoom_factor = 8;
constexpr int max_zoom_passes = 64;

// Calls visit(c) for every composition c of `total` into c.size() parts.
void for_each_composition(Eigen::VectorXi& c, Index pos, int remaining, const std::function<void(const Eigen::VectorXi&)>& visit)
{
    if (pos == c.size() - 1) {
        c(pos) = remaining;
        visit(c);
        return;
    }
    for (int v = 0; v <= remaining; ++v) {
        c(pos) = v;
        for_each_composition(c, pos + 1, remaining - v, visit);
    }
}

}  // namespace

StackelbergResult grid_search_se(const GameInstance& inst, Index resolution, double follower_tol, Index refine_levels)
{
    if (inst.num_bins > 4 || inst.num_users > 3)
        throw std::invalid_argument("grid_search_se: desk-scale guard is N <= 4 and K <= 3");
    if (resolution <= 0)
        throw std::invalid_argument("grid_search_se: resolution must be positive");
    if (refine_levels < 0)
        throw std::invalid_argument("grid_search_se: refine_levels must be non-negative");
    if (!check_uniqueness_condition(inst).holds)
        throw std::invalid_argument("grid_search_se: instance fails the uniqueness screen");

    const Index N = inst.num_bins;
    const double budget = inst.budget(leader);
    PowerProfile warm = PowerProfile::Zero(inst.num_users, N);

    auto evaluate = [&](const Eigen::VectorXd& p, PowerProfile* out_profile) {
        NashOutcome ne = follower_equilibrium(inst, leader, p, &warm, follower_tol);
        if (!ne.converged)
            throw ConvergenceError("grid_search_se: followers do not converge");
        warm = ne.profile;
        const double r = achievable_rate(inst, ne.profile, leader);
        if (out_profile)
            *out_profile = std::move(ne.profile);
        return r;
    };

    StackelbergResult best;
    best.leader_rate = -1;
    double best_fraction = 1.0;
    Eigen::VectorXi comp(N);
    for (const double fraction : budget_fractions) {
        const double unit = fraction * budget / static_cast<double>(resolution);
        for_each_composition(comp, 0, static_cast<int>(resolution), [&](const Eigen::VectorXi& c) {
            const Eigen::VectorXd p = c.cast<double>() * unit;
            const double r = evaluate(p, nullptr);
            ++best.evaluated;
            if (r > best.leader_rate) {
                best.leader_rate = r;
                best.leader_power = p;
                best_fraction = fraction;
            }
        });
    }

    // Zoom: re-grid a box of one step around the winner at 1/zoom_factor of
    // the step, keeping its total power, refine_levels times. Within a level
    // the box follows the winner until it stops moving.
    const double total = best_fraction * budget;
    double step = total / static_cast<double>(resolution);
    Eigen::VectorXi offset(N > 1 ? N - 1 : 1);
    for (Index level = 0; level < refine_levels && N > 1; ++level) {
        step /= zoom_factor;
        Eigen::VectorXd centre;
        bool moved = false;
        std::function<void(Index)> scan = [&](Index pos) {
            if (pos == N - 1) {
                Eigen::VectorXd p = centre;
                p.head(N - 1) += offset.head(N - 1).cast<double>() * step;
                p(N - 1) = total - p.head(N - 1).sum();
                if (p.minCoeff() < 0)
                    return;
                const double r = evaluate(p, nullptr);
                ++best.evaluated;
                if (r > best.leader_rate) {
                    best.leader_rate = r;
                    best.leader_power = p;
                    moved = true;
                }
                return;
            }
            for (int o = -zoom_factor; o <= zoom_factor; ++o) {
                offset(pos) = o;
                scan(pos + 1);
            }
        };
        for (int pass = 0; pass < max_zoom_passes; ++pass) {
            centre = best.leader_power;
            moved = false;
            scan(0);
            if (!moved)
                break;
        }
    }

    // Rate change for moving one grid step of power between any two bins.
    const double grid_step = total / static_cast<double>(resolution);
    for (Index from = 0; from < N; ++from) {
        if (best.leader_power(from) < grid_step)
            continue;
        for (Index to = 0; to < N; ++to) {
            if (to == from)
                continue;
            Eigen::VectorXd p = best.leader_power;
            p(from) -= grid_step;
            p(to) += grid_step;
            const double r = evaluate(p, nullptr);
            best.grid_error = std::max(best.grid_error, std::abs(r - best.leader_rate));
        }
    }

    best.leader_rate = evaluate(best.leader_power, &best.profile);
    best.rates = achievable_rates(inst, best.profile);
    return best;
}

}  // namespace wfgame
