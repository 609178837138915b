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

#include "wfgame/conjecture.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace wfgame {

namespace {

NashOutcome solve_followers(const GameInstance& inst, const Eigen::VectorXd& leader_power, const FdOptions& opts,
                            const PowerProfile* warm)
{
    NashOutcome ne = follower_equilibrium(inst, leader, leader_power, warm, opts.follower_tol, opts.follower_max_iter);
    if (!ne.converged)
        throw ConvergenceError("followers' equilibrium did not converge (residual " + std::to_string(ne.residual) +
                               ")");
    return ne;
}

double default_eps(const GameInstance& inst)
{
    return 1e-4 * inst.budget(leader) / static_cast<double>(inst.num_bins);
}

bool is_kink(double fwd, double bwd, double eps)
{
    return std::abs(fwd - bwd) > 10.0 * eps * (std::abs(fwd) + std::abs(bwd) + 1.0);
}

DerivativeEstimate from_one_sided(double fwd, std::optional<double> bwd, double eps)
{
    DerivativeEstimate d;
    d.method = DerivativeMethod::finite_difference;
    if (!bwd) {
        d.value = fwd;
        return d;
    }
    d.value = 0.5 * (fwd + *bwd);
    if (is_kink(fwd, *bwd, eps)) {
        d.left = *bwd;
        d.right = fwd;
    }
    return d;
}

}  // namespace

double Belief::domain_upper(Index bin) const
{
    if (gamma(bin) <= 0)
        return std::numeric_limits<double>::infinity();
    return std::max(beta(bin), 0.0) / gamma(bin);
}

std::vector<Index> active_followers(const PowerProfile& profile, Index bin, double threshold)
{
    std::vector<Index> act;
    for (Index k = 0; k < profile.rows(); ++k)
        if (k != leader && profile(k, bin) > threshold)
            act.push_back(k);
    return act;
}

double closed_form_derivative(const GameInstance& inst, Index bin, const std::vector<Index>& active)
{
    if (active.empty())
        return 0.0;
    const Index m = static_cast<Index>(active.size());
    Eigen::VectorXd h(m);
    Eigen::VectorXd g(m);
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(m, m);
    for (Index r = 0; r < m; ++r) {
        const Index i = active[static_cast<std::size_t>(r)];
        h(r) = inst.gain(i, leader, bin);
        g(r) = inst.gain(leader, i, bin);
        for (Index c = 0; c < m; ++c)
            if (c != r)
                a(r, c) = inst.gain(active[static_cast<std::size_t>(c)], i, bin);
    }
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (!lu.isInvertible())
        throw std::runtime_error("closed-form derivative: singular coupling matrix in bin " + std::to_string(bin));
    return -h.dot(lu.solve(g));
}

DerivativeEstimate estimate_derivative_fd(const GameInstance& inst, const Eigen::VectorXd& leader_power, Index bin,
                                          double eps, const FdOptions& opts, const NashOutcome* base)
{
    if (bin < 0 || bin >= inst.num_bins)
        throw std::invalid_argument("finite difference: bin out of range");
    if (!(eps > 0))
        eps = default_eps(inst);

    NashOutcome own_base;
    if (base == nullptr) {
        own_base = solve_followers(inst, leader_power, opts, nullptr);
        base = &own_base;
    }
    const double i0 = stationary_interference(inst, base->profile, leader)(bin);

    Eigen::VectorXd probe = leader_power;
    probe(bin) = leader_power(bin) + eps;
    const NashOutcome up = solve_followers(inst, probe, opts, &base->profile);
    const double fwd = (stationary_interference(inst, up.profile, leader)(bin) - i0) / eps;

    if (leader_power(bin) < eps)
        return from_one_sided(fwd, std::nullopt, eps);

    probe(bin) = leader_power(bin) - eps;
    const NashOutcome down = solve_followers(inst, probe, opts, &base->profile);
    const double bwd = (i0 - stationary_interference(inst, down.profile, leader)(bin)) / eps;
    return from_one_sided(fwd, bwd, eps);
}

std::vector<DerivativeEstimate> estimate_derivatives(const GameInstance& inst, const Eigen::VectorXd& leader_power,
                                                     const FdOptions& opts, const NashOutcome* base)
{
    const double eps = opts.eps > 0 ? opts.eps : default_eps(inst);
    NashOutcome own_base;
    if (base == nullptr) {
        own_base = solve_followers(inst, leader_power, opts, nullptr);
        base = &own_base;
    }

    const Index N = inst.num_bins;
    std::vector<DerivativeEstimate> out(static_cast<std::size_t>(N));
    if (opts.mode == FdMode::per_bin) {
        for (Index n = 0; n < N; ++n)
            out[static_cast<std::size_t>(n)] = estimate_derivative_fd(inst, leader_power, n, eps, opts, base);
        return out;
    }

    const Eigen::VectorXd i0 = stationary_interference(inst, base->profile, leader);
    const Eigen::VectorXd up_power = leader_power.array() + eps;
    const Eigen::VectorXd down_power = (leader_power.array() >= eps).select(leader_power.array() - eps, leader_power);
    const NashOutcome up = solve_followers(inst, up_power, opts, &base->profile);
    const NashOutcome down = solve_followers(inst, down_power, opts, &base->profile);
    const Eigen::VectorXd i_up = stationary_interference(inst, up.profile, leader);
    const Eigen::VectorXd i_down = stationary_interference(inst, down.profile, leader);

    for (Index n = 0; n < N; ++n) {
        const double fwd = (i_up(n) - i0(n)) / eps;
        std::optional<double> bwd;
        if (leader_power(n) >= eps)
            bwd = (i0(n) - i_down(n)) / eps;
        DerivativeEstimate d = from_one_sided(fwd, bwd, eps);
        if (d.left)
            d = estimate_derivative_fd(inst, leader_power, n, eps, opts, base);
        out[static_cast<std::size_t>(n)] = d;
    }
    return out;
}

Eigen::VectorXd slopes(const std::vector<DerivativeEstimate>& estimates)
{
    Eigen::VectorXd s(static_cast<Index>(estimates.size()));
    for (std::size_t n = 0; n < estimates.size(); ++n)
        s(static_cast<Index>(n)) = estimates[n].value;
    return s;
}

Belief update_belief(const Eigen::VectorXd& interference, const Eigen::VectorXd& power, const Eigen::VectorXd& slope,
                     std::size_t* clamped)
{
    if (interference.size() != power.size() || slope.size() != power.size())
        throw std::invalid_argument("update_belief: size mismatch");
    Belief b;
    b.beta = interference - power.cwiseProduct(slope);
    b.gamma = -slope;
    std::size_t count = 0;
    for (Index n = 0; n < b.beta.size(); ++n) {
        if (b.beta(n) < 0) {
            b.beta(n) = 0;
            ++count;
        }
    }
    if (clamped != nullptr)
        *clamped += count;
    return b;
}

Sc1Report check_sc1(const Eigen::VectorXd& sigma, const Belief& belief)
{
    Sc1Report rep;
    rep.margin = belief.gamma.array() - 0.5 * (1.0 - belief.beta.array() / sigma.array());
    rep.holds = (belief.beta.array() > 0).all() && (rep.margin.array() < 0).all();
    return rep;
}

Eigen::VectorXd ce_residual(const GameInstance& inst, const Belief& belief, const Eigen::VectorXd& leader_power,
                            double follower_tol, const PowerProfile* warm_start)
{
    FdOptions opts;
    opts.follower_tol = follower_tol;
    const NashOutcome ne = solve_followers(inst, leader_power, opts, warm_start);
    return ce_residual(stationary_interference(inst, ne.profile, leader), belief, leader_power);
}

Eigen::VectorXd ce_residual(const Eigen::VectorXd& interference, const Belief& belief,
                            const Eigen::VectorXd& leader_power)
{
    return interference - belief.interference(leader_power);
}

}  // namespace wfgame
