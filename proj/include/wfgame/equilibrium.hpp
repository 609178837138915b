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

#ifndef WFGAME_EQUILIBRIUM_HPP
#define WFGAME_EQUILIBRIUM_HPP

#include "wfgame/instance.hpp"
#include "wfgame/waterfill.hpp"

#include <optional>
#include <stdexcept>

namespace wfgame {

/// Raised when a solve that must converge (e.g. the followers' equilibrium
/// behind a leader evaluation) does not.
class ConvergenceError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

struct NashOptions
{
    /// User held at a given allocation; the others play the lower-level game.
    std::optional<PowerAllocation> fixed;
    /// Starting profile (K x N). Rows of non-fixed users default to zero.
    std::optional<PowerProfile> init;
    double tol = 1e-8;
    Index max_iter = 10000;
    /// Sweep users from K-1 down to 0 instead of 0 up to K-1.
    bool reverse_order = false;
};

struct NashOutcome
{
    /// Full K x N profile; the fixed user's row (if any) is its given allocation.
    PowerProfile profile;
    bool converged = false;
    Index iterations = 0;
    double residual = 0;            ///< max-norm change of the last sweep
    Eigen::VectorXd water_levels;   ///< per user; 0 for the fixed user
};

/**
 * Iterative water-filling with Gauss-Seidel sweeps: in user order every
 * non-fixed user replaces its allocation by its water-filling response to the
 * current interference. Stops once a full sweep changes no entry by more than
 * `tol`, or after `max_iter` sweeps (then `converged` is false).
 *
 * With exactly one non-fixed user a single sweep is final, since that user's
 * response does not depend on its own power.
 *
 * Throws std::invalid_argument if the fixed allocation is infeasible.
 */
NashOutcome iterate_waterfilling(const GameInstance& inst, const NashOptions& opts = {});

/// Lower-level game: user `leader` fixed at `leader_power`, everybody else
/// water-fills to equilibrium. Unlike iterate_waterfilling the leader's budget
/// is not enforced, so probes slightly above the budget are accepted.
NashOutcome follower_equilibrium(const GameInstance& inst, Index leader, const Eigen::VectorXd& leader_power,
                                 const PowerProfile* warm_start = nullptr, double tol = 1e-8,
                                 Index max_iter = 10000);

/// Largest max-norm distance between a user's row and its water-filling
/// response to the rest of `profile`, over all users except `skip`.
double best_response_gap(const GameInstance& inst, const PowerProfile& profile, Index skip = -1);

struct UniquenessReport
{
    bool holds = false;
    double worst_norm = 0;
    Index worst_bin = 0;
};

/// Screens the sufficient condition max_n ||G_n||_inf < 1, where G_n is the
/// zero-diagonal coupling matrix of bin n (row i holds the gains into user i).
UniquenessReport check_uniqueness_condition(const GameInstance& inst);

}  // namespace wfgame

#endif  // WFGAME_EQUILIBRIUM_HPP
