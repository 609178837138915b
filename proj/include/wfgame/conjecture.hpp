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

#ifndef WFGAME_CONJECTURE_HPP
#define WFGAME_CONJECTURE_HPP

// Belief machinery of the foresighted user. User 0 is always the foresighted
// user; users 1..K-1 are myopic water-fillers.

#include "wfgame/equilibrium.hpp"
#include "wfgame/instance.hpp"
#include "wfgame/waterfill.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace wfgame {

inline constexpr Index leader = 0;

/// Linear conjecture of the stationary interference: I(P) = beta - gamma * P,
/// per bin.
struct Belief
{
    Eigen::VectorXd beta;
    Eigen::VectorXd gamma;

    Index size() const { return beta.size(); }

    /// Largest per-bin power keeping the conjectured interference
    /// non-negative (+inf when gamma <= 0).
    double domain_upper(Index bin) const;

    Eigen::VectorXd interference(const Eigen::VectorXd& power) const
    {
        return beta - gamma.cwiseProduct(power);
    }
};

enum class DerivativeMethod { closed_form, finite_difference };

struct DerivativeEstimate
{
    double value = 0;
    // Present together, only when the one-sided slopes differ (a kink of the
    // piecewise-affine follower response).
    std::optional<double> left;
    std::optional<double> right;
    DerivativeMethod method = DerivativeMethod::finite_difference;
};

enum class FdMode {
    per_bin,  ///< two follower solves per bin
    batch     ///< two follower solves in total, all bins perturbed at once
};

struct FdOptions
{
    double eps = 0;  ///< <= 0 selects 1e-4 * budget / N
    FdMode mode = FdMode::per_bin;
    double follower_tol = 1e-11;
    Index follower_max_iter = 10000;
};

/// Followers (users other than the leader) transmitting in `bin` with power
/// above `threshold`.
std::vector<Index> active_followers(const PowerProfile& profile, Index bin, double threshold = 0.0);

/// -h (I + G)^{-1} g restricted to the active followers of `bin`, with
/// h_i = alpha_{i0}, g_i = alpha_{0i} and G(i, j) = alpha_{ji}. Returns 0 for
/// an empty active set and throws std::runtime_error when the restricted
/// I + G is singular.
double closed_form_derivative(const GameInstance& inst, Index bin, const std::vector<Index>& active);

/**
 * Finite-difference slope dI_0^n / dP_0^n: re-solves the followers'
 * equilibrium with the leader's bin-n power moved by +-eps and takes the
 * central difference of the realized interference (forward difference when
 * P_0^n < eps). If the one-sided slopes disagree by more than
 * 10 eps (|fwd| + |bwd| + 1) both are reported.
 *
 * `base` is the followers' equilibrium at `leader_power`; it is computed when
 * null. Throws ConvergenceError if a follower solve fails.
 */
DerivativeEstimate estimate_derivative_fd(const GameInstance& inst, const Eigen::VectorXd& leader_power, Index bin,
                                          double eps, const FdOptions& opts = {},
                                          const NashOutcome* base = nullptr);

/// Slopes of every bin. In batch mode all bins are perturbed together and
/// bins where the kink test fires are redone one at a time.
std::vector<DerivativeEstimate> estimate_derivatives(const GameInstance& inst, const Eigen::VectorXd& leader_power,
                                                     const FdOptions& opts = {}, const NashOutcome* base = nullptr);

Eigen::VectorXd slopes(const std::vector<DerivativeEstimate>& estimates);

/// Tangent-line belief at the operating point: beta = I - P * d, gamma = -d.
/// A negative beta (only reachable through noisy slopes) is clamped to zero;
/// the number of clamped bins is added to `clamped` when given.
Belief update_belief(const Eigen::VectorXd& interference, const Eigen::VectorXd& power, const Eigen::VectorXd& slope,
                     std::size_t* clamped = nullptr);

struct Sc1Report
{
    bool holds = false;
    /// gamma - 0.5 (1 - beta / sigma) per bin; negative means the bound holds.
    Eigen::VectorXd margin;
};

/// Per bin: beta > 0 and gamma < 0.5 (1 - beta / sigma). When every bin
/// passes, the conjectured-rate problem is a convex program.
Sc1Report check_sc1(const Eigen::VectorXd& sigma, const Belief& belief);

/// I_0(P) - (beta - gamma P) per bin, with I_0 realized at the followers'
/// equilibrium for `leader_power`. Throws ConvergenceError if that solve fails.
Eigen::VectorXd ce_residual(const GameInstance& inst, const Belief& belief, const Eigen::VectorXd& leader_power,
                            double follower_tol = 1e-11, const PowerProfile* warm_start = nullptr);

/// Same residual from an already measured interference vector.
Eigen::VectorXd ce_residual(const Eigen::VectorXd& interference, const Belief& belief,
                            const Eigen::VectorXd& leader_power);

}  // namespace wfgame

#endif  // WFGAME_CONJECTURE_HPP
