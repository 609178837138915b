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

#ifndef WFGAME_CRM_HPP
#define WFGAME_CRM_HPP

#include "wfgame/conjecture.hpp"
#include "wfgame/equilibrium.hpp"
#include "wfgame/instance.hpp"

#include <optional>
#include <string>
#include <vector>

namespace wfgame {

struct CrmOptions
{
    /// Per-bin cap on |P' - P_t| inside the dual solver (modified CRM).
    std::optional<double> trust_radius;
    Index line_search_points = 101;
    double improvement_tol = 1e-6;  ///< bits
    Index max_outer_iter = 50;
    double eta_bisect_tol = 1e-10;
    FdMode fd_mode = FdMode::per_bin;
    double fd_eps = 0;  ///< <= 0 selects 1e-4 * budget / N
    double ne_tol = 1e-8;
    Index ne_max_iter = 10000;
    double follower_tol = 1e-11;
};

/// Throws std::invalid_argument on a non-positive field.
void validate(const CrmOptions& opts);

/// Per-bin search interval [lower, upper] of the dual solver's inner step.
struct BinBox
{
    double lower = 0;
    double upper = 0;
};

/// Sum of ln(1 + P / (sigma + beta - gamma P)), in nats. Throws
/// std::domain_error naming the first bin outside the belief's domain.
double conjectured_rate(const Eigen::VectorXd& sigma, const Belief& belief, const Eigen::VectorXd& power);

/// ln(1 + P / (sigma + beta - gamma P)) - eta P for one bin.
double inner_objective(double sigma, double beta, double gamma, double eta, double power);

/**
 * Maximizer of ln(1 + P / (sigma + beta - gamma P)) - eta P over the belief's
 * domain intersected with [floor, cap].
 *
 * The stationary points solve
 *   gamma (gamma - 1) P^2 - a (2 gamma - 1) P + a^2 - a / eta = 0,  a = sigma + beta,
 * whose discriminant simplifies to a^2 + 4 gamma (gamma - 1) a / eta. Roots
 * inside the interval are compared with its end points. For |gamma| <= 1e-9
 * the water-filling limit max(0, 1/eta - a) is used; near gamma = 1, where the
 * quadratic degenerates, a golden-section search runs instead.
 */
double inner_max_per_bin(double sigma, double beta, double gamma, double eta, std::optional<double> cap = std::nullopt,
                         double floor = 0.0);

struct DualSolution
{
    Eigen::VectorXd power;
    double eta = 0;
    double conjectured_rate = 0;  ///< nats
    double dual_value = 0;        ///< d(eta) at the returned multiplier
    double duality_gap = 0;       ///< dual_value - conjectured_rate
    Index iterations = 0;
    bool truncated = false;       ///< power was scaled down to the budget
    bool recovered = false;       ///< power mixes the two bracket solutions
};

/**
 * Dual bisection for max sum_n f_n(P_n) s.t. sum_n P_n <= budget over the
 * belief domain. `boxes`, when given, restricts bin n to boxes[n] (trust
 * region). Bins whose domain is the single point 0 get zero power.
 *
 * When the final bracket straddles a jump of the per-bin maximizers (a
 * duality gap, typical at small N), three feasible points are compared by
 * conjectured rate: the under-budget solution, the over-budget solution
 * scaled to the budget, and a greedy mix of the two.
 */
DualSolution dual_bisection(const Eigen::VectorXd& sigma, const Belief& belief, double budget, const CrmOptions& opts,
                            const std::vector<BinBox>* boxes = nullptr);

/// Trust-region boxes [max(0, P - r), P + r] per bin.
std::vector<BinBox> trust_boxes(const Eigen::VectorXd& center, double radius);

struct LineSearchResult
{
    Eigen::VectorXd power;
    double v = 1;
    double rate = 0;          ///< true leader rate at `power`, bits
    PowerProfile profile;     ///< followers re-equilibrated for `power`
    Index skipped = 0;        ///< candidates dropped for follower non-convergence
};

/**
 * Evaluates the true leader rate on v = 0, 1/(M-1), ..., 1 along
 * v P_t + (1 - v) P_c, each with the followers re-equilibrated, and returns
 * the best point. Ties go to the larger v. `warm_start` seeds the follower
 * solves; v = 1 is always evaluated first so the result never falls below
 * the rate at P_t.
 */
LineSearchResult line_search(const GameInstance& inst, const Eigen::VectorXd& current, const Eigen::VectorXd& candidate,
                             const CrmOptions& opts, const PowerProfile* warm_start = nullptr);

struct CrmStep
{
    Belief belief;
    Eigen::VectorXd candidate;
    Eigen::VectorXd chosen;
    double v = 1;
    double leader_rate = 0;          ///< bits, at `chosen`
    Eigen::VectorXd follower_rates;  ///< bits, all users at `chosen`
    bool sc1 = false;
    double residual = 0;             ///< max-norm CE residual of `belief` at `chosen`
    double duality_gap = 0;
};

struct CrmTrace
{
    std::vector<CrmStep> steps;
    Eigen::VectorXd initial_allocation;  ///< leader's IW allocation
    PowerProfile initial_profile;
    Eigen::VectorXd initial_rates;
    Eigen::VectorXd final_allocation;
    PowerProfile final_profile;
    Eigen::VectorXd final_rates;
    bool converged_to_ce = false;
    std::string stop_reason;  ///< "no_improvement", "fixed_point" or "max_iter"
    std::size_t warnings = 0; ///< clamped beta bins plus skipped line-search points

    Index iterations() const { return static_cast<Index>(steps.size()); }
    /// Leader rate before step 0 followed by the rate after every step.
    std::vector<double> leader_rates() const;
};

/**
 * Conjecture-based rate maximization for user 0 against myopic users 1..K-1.
 * Starts at the leader's allocation in the full-game IW equilibrium and
 * repeats: tangent belief from measured interference and slopes, candidate
 * from the dual solver, true-rate line search towards it.
 *
 * Throws ConvergenceError when the full-game IW does not converge.
 */
CrmTrace crm(const GameInstance& inst, const CrmOptions& opts = {});

struct StackelbergResult
{
    Eigen::VectorXd leader_power;
    double leader_rate = 0;          ///< bits
    Eigen::VectorXd rates;           ///< all users, bits
    PowerProfile profile;
    double grid_error = 0;           ///< largest rate change for one grid-step move between bins
    Index evaluated = 0;
};

/**
 * Exhaustive grid search for the leader's Stackelberg allocation. Enumerates
 * P = s * budget * c / resolution over integer compositions c of
 * `resolution` into N parts, for total fractions s in {1, 0.9, 0.75, 0.5}, and
 * solves the followers' equilibrium at every point. The winner is then
 * refined refine_levels times on a local grid, each 8x finer than the last,
 * spanning one previous step around it at the same total power; each
 * level re-centres on the winner until it stops moving.
 *
 * Desk-scale only: rejects N > 4, K > 3 and instances failing the
 * uniqueness screen with std::invalid_argument.
 */
StackelbergResult grid_search_se(const GameInstance& inst, Index resolution, double follower_tol = 1e-10,
                                 Index refine_levels = 3);

}  // namespace wfgame

#endif  // WFGAME_CRM_HPP
