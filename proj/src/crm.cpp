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

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace wfgame {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();
constexpr double fixed_point_tol = 1e-8;
constexpr double ce_tol = 1e-6;
constexpr double tie_tol = 1e-12;

double golden_section_max(double sigma, double beta, double gamma, double eta, double lo, double hi)
{
    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo;
    double b = hi;
    double c = b - ratio * (b - a);
    double d = a + ratio * (b - a);
    double fc = inner_objective(sigma, beta, gamma, eta, c);
    double fd = inner_objective(sigma, beta, gamma, eta, d);
    for (int it = 0; it < 200 && (b - a) > 1e-14 * (1.0 + std::abs(b)); ++it) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = inner_objective(sigma, beta, gamma, eta, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = inner_objective(sigma, beta, gamma, eta, d);
        }
    }
    return 0.5 * (a + b);
}

struct BinRange
{
    double lo;
    double hi;
};

// Feasible range of one bin: belief domain intersected with [floor, cap].
// An empty intersection collapses onto the domain end nearest the box.
BinRange bin_range(double beta, double gamma, std::optional<double> cap, double floor)
{
    double hi = cap ? *cap : inf;
    if (gamma > 0)
        hi = std::min(hi, std::max(beta, 0.0) / gamma);
    const double lo = std::min(std::max(floor, 0.0), hi);
    return {lo, hi};
}

}  // namespace

void validate(const CrmOptions& opts)
{
    if (opts.trust_radius && !(*opts.trust_radius > 0))
        throw std::invalid_argument("trust_radius must be positive");
    if (opts.line_search_points < 2)
        throw std::invalid_argument("line_search_points must be at least 2");
    if (!(opts.improvement_tol > 0) || !(opts.eta_bisect_tol > 0) || !(opts.ne_tol > 0) || !(opts.follower_tol > 0))
        throw std::invalid_argument("tolerances must be positive");
    if (opts.max_outer_iter <= 0 || opts.ne_max_iter <= 0)
        throw std::invalid_argument("iteration limits must be positive");
}

double inner_objective(double sigma, double beta, double gamma, double eta, double power)
{
    const double interference = std::max(beta - gamma * power, 0.0);
    return std::log1p(power / (sigma + interference)) - eta * power;
}

double conjectured_rate(const Eigen::VectorXd& sigma, const Belief& belief, const Eigen::VectorXd& power)
{
    double total = 0;
    for (Index n = 0; n < power.size(); ++n) {
        const double interference = belief.beta(n) - belief.gamma(n) * power(n);
        const double slack = 1e-12 * (1.0 + std::abs(belief.beta(n)));
        if (power(n) < 0 || interference < -slack)
            throw std::domain_error("conjectured rate: power outside the belief domain in bin " + std::to_string(n));
        total += std::log1p(power(n) / (sigma(n) + std::max(interference, 0.0)));
    }
    return total;
}

double inner_max_per_bin(double sigma, double beta, double gamma, double eta, std::optional<double> cap, double floor)
{
    if (gamma > 0 && beta <= 0)
        return 0.0;
    const BinRange r = bin_range(beta, gamma, cap, floor);
    if (!(eta > 0)) {
        // objective strictly increasing in P
        if (!std::isfinite(r.hi))
            throw std::invalid_argument("inner maximization: unbounded interval with zero price");
        return r.hi;
    }

    const double a = sigma + beta;
    double candidates[4];
    int count = 0;
    auto consider = [&](double p) {
        if (std::isfinite(p) && p >= r.lo && p <= r.hi)
            candidates[count++] = p;
    };
    consider(r.lo);
    if (std::isfinite(r.hi))
        consider(r.hi);

    const double quad = gamma * (gamma - 1.0);
    if (std::abs(gamma) <= 1e-9) {
        consider(std::clamp(1.0 / eta - a, r.lo, std::isfinite(r.hi) ? r.hi : inf));
    } else if (std::abs(quad) <= 1e-12) {
        consider(golden_section_max(sigma, beta, gamma, eta, r.lo, r.hi));
    } else {
        const double disc = a * a + 4.0 * quad * a / eta;
        if (disc >= 0) {
            const double b = -a * (2.0 * gamma - 1.0);
            const double c = a * a - a / eta;
            const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
            consider(q / quad);
            if (q != 0)
                consider(c / q);
        }
    }

    double best = candidates[0];
    double best_val = inner_objective(sigma, beta, gamma, eta, best);
    for (int i = 1; i < count; ++i) {
        const double val = inner_objective(sigma, beta, gamma, eta, candidates[i]);
        if (val > best_val) {
            best_val = val;
            best = candidates[i];
        }
    }
    return best;
}

std::vector<BinBox> trust_boxes(const Eigen::VectorXd& center, double radius)
{
    std::vector<BinBox> boxes(static_cast<std::size_t>(center.size()));
    for (Index n = 0; n < center.size(); ++n)
        boxes[static_cast<std::size_t>(n)] = {std::max(0.0, center(n) - radius), center(n) + radius};
    return boxes;
}

DualSolution dual_bisection(const Eigen::VectorXd& sigma, const Belief& belief, double budget, const CrmOptions& opts,
                            const std::vector<BinBox>* boxes)
{
    const Index N = sigma.size();
    if (belief.size() != N)
        throw std::invalid_argument("dual bisection: belief and noise sizes differ");
    if (boxes && static_cast<Index>(boxes->size()) != N)
        throw std::invalid_argument("dual bisection: one box per bin required");
    if (!(budget > 0))
        throw std::invalid_argument("dual bisection: budget must be positive");

    auto floor_of = [&](Index n) { return boxes ? (*boxes)[static_cast<std::size_t>(n)].lower : 0.0; };
    // no bin can hold more than the whole budget
    auto cap_of = [&](Index n) { return boxes ? std::min(budget, (*boxes)[static_cast<std::size_t>(n)].upper) : budget; };

    auto primal = [&](double eta) {
        Eigen::VectorXd p(N);
        for (Index n = 0; n < N; ++n)
            p(n) = inner_max_per_bin(sigma(n), belief.beta(n), belief.gamma(n), eta, cap_of(n), floor_of(n));
        return p;
    };
    auto dual_value = [&](double eta, const Eigen::VectorXd& p) {
        double d = eta * budget;
        for (Index n = 0; n < N; ++n)
            d += inner_objective(sigma(n), belief.beta(n), belief.gamma(n), eta, p(n));
        return d;
    };
    auto finish = [&](DualSolution s) {
        s.conjectured_rate = conjectured_rate(sigma, belief, s.power);
        s.dual_value = dual_value(s.eta, s.power);
        s.duality_gap = s.dual_value - s.conjectured_rate;
        return s;
    };
    const double slack = budget * (1.0 + feasibility_tol);

    DualSolution sol;
    sol.power = primal(0.0);
    if (sol.power.sum() <= slack)
        return finish(sol);

    double eta_lo = 0;
    double eta_hi = 2.0 * (sigma + belief.beta.cwiseMax(0.0)).cwiseInverse().maxCoeff();
    // Non-concave bins can stay active above the zero-power marginal value.
    for (int grow = 0; grow < 200 && primal(eta_hi).sum() > budget; ++grow)
        eta_hi *= 2.0;

    Index iter = 0;
    while (eta_hi - eta_lo > opts.eta_bisect_tol * (1.0 + eta_hi) && iter < 10000) {
        const double eta = 0.5 * (eta_lo + eta_hi);
        if (primal(eta).sum() < budget)
            eta_hi = eta;
        else
            eta_lo = eta;
        ++iter;
    }
    sol.iterations = iter;

    const Eigen::VectorXd p_hi = primal(eta_hi);
    const Eigen::VectorXd p_lo = eta_lo > 0 ? primal(eta_lo) : p_hi;
    sol.eta = eta_hi;
    sol.power = p_hi;
    double best = conjectured_rate(sigma, belief, p_hi);
    const double lo_sum = p_lo.sum();
    if (lo_sum <= slack) {
        sol.eta = eta_lo;
        sol.power = p_lo;
        return finish(sol);
    }

    Eigen::VectorXd cut = p_lo * (budget / lo_sum);
    bool ok = true;
    for (Index n = 0; n < N && ok; ++n)
        ok = cut(n) >= floor_of(n) - 1e-12;
    if (ok) {
        const double r = conjectured_rate(sigma, belief, cut);
        if (r > best) {
            best = r;
            sol.eta = eta_lo;
            sol.power = std::move(cut);
            sol.truncated = true;
        }
    }

    // Primal recovery for a duality gap: bins whose maximizer jumps across
    // the bracket take their eta_lo power, best gain per unit power first,
    // while the budget lasts; the first bin that does not fit gets the rest.
    std::vector<Index> jumping;
    for (Index n = 0; n < N; ++n)
        if (p_lo(n) > p_hi(n))
            jumping.push_back(n);
    if (!jumping.empty()) {
        auto f = [&](Index n, double q) { return inner_objective(sigma(n), belief.beta(n), belief.gamma(n), 0.0, q); };
        auto gain = [&](Index n) { return (f(n, p_lo(n)) - f(n, p_hi(n))) / (p_lo(n) - p_hi(n)); };
        std::stable_sort(jumping.begin(), jumping.end(), [&](Index a, Index b) { return gain(a) > gain(b); });
        Eigen::VectorXd mixed = p_hi;
        double left = budget - p_hi.sum();
        for (const Index n : jumping) {
            const double need = p_lo(n) - p_hi(n);
            if (need <= left) {
                mixed(n) = p_lo(n);
                left -= need;
            } else {
                mixed(n) += std::max(left, 0.0);
                break;
            }
        }
        const double r = conjectured_rate(sigma, belief, mixed);
        if (r > best) {
            sol.eta = eta_hi;
            sol.power = std::move(mixed);
            sol.truncated = false;
            sol.recovered = true;
        }
    }
    return finish(sol);
}

LineSearchResult line_search(const GameInstance& inst, const Eigen::VectorXd& current, const Eigen::VectorXd& candidate,
                             const CrmOptions& opts, const PowerProfile* warm_start)
{
    const Index M = opts.line_search_points;
    if (M < 2)
        throw std::invalid_argument("line search needs at least two points");
    LineSearchResult best;
    bool have_best = false;
    PowerProfile warm = warm_start ? *warm_start : PowerProfile::Zero(inst.num_users, inst.num_bins);
    for (Index i = M - 1; i >= 0; --i) {
        const double v = static_cast<double>(i) / static_cast<double>(M - 1);
        const Eigen::VectorXd p = (i == M - 1) ? current : Eigen::VectorXd(v * current + (1.0 - v) * candidate);
        NashOutcome ne = follower_equilibrium(inst, leader, p, &warm, opts.follower_tol, opts.ne_max_iter);
        if (!ne.converged) {
            if (i == M - 1)
                throw ConvergenceError("line search: followers do not converge at the current point");
            ++best.skipped;
            continue;
        }
        const double rate = achievable_rate(inst, ne.profile, leader);
        warm = ne.profile;
        // ties, up to rounding of the interpolation, keep the larger v
        if (!have_best || rate > best.rate + tie_tol * (1.0 + std::abs(best.rate))) {
            best.power = p;
            best.v = v;
            best.rate = rate;
            best.profile = std::move(ne.profile);
            have_best = true;
        }
    }
    return best;
}

std::vector<double> CrmTrace::leader_rates() const
{
    std::vector<double> r;
    r.push_back(initial_rates.size() ? initial_rates(leader) : 0.0);
    for (const auto& s : steps)
        r.push_back(s.leader_rate);
    return r;
}

CrmTrace crm(const GameInstance& inst, const CrmOptions& opts)
{
    validate(opts);
    NashOptions ne_opts;
    ne_opts.tol = opts.ne_tol;
    ne_opts.max_iter = opts.ne_max_iter;
    const NashOutcome ne = iterate_waterfilling(inst, ne_opts);
    if (!ne.converged)
        throw ConvergenceError("crm: iterative water-filling did not converge");

    CrmTrace trace;
    Eigen::VectorXd power = ne.profile.row(leader).transpose();
    NashOutcome base = follower_equilibrium(inst, leader, power, &ne.profile, opts.follower_tol, opts.ne_max_iter);
    if (!base.converged)
        throw ConvergenceError("crm: followers do not converge at the IW point");
    double rate = achievable_rate(inst, base.profile, leader);

    trace.initial_allocation = power;
    trace.initial_profile = base.profile;
    trace.initial_rates = achievable_rates(inst, base.profile);

    FdOptions fd;
    fd.eps = opts.fd_eps;
    fd.mode = opts.fd_mode;
    fd.follower_tol = opts.follower_tol;
    fd.follower_max_iter = opts.ne_max_iter;

    const Eigen::VectorXd sigma = inst.noise.row(leader).transpose();
    const double budget = inst.budget(leader);
    trace.stop_reason = "max_iter";

    for (Index t = 0; t < opts.max_outer_iter; ++t) {
        const Eigen::VectorXd interference = stationary_interference(inst, base.profile, leader);
        const auto estimates = estimate_derivatives(inst, power, fd, &base);

        CrmStep step;
        step.belief = update_belief(interference, power, slopes(estimates), &trace.warnings);
        step.sc1 = check_sc1(sigma, step.belief).holds;

        std::vector<BinBox> boxes;
        if (opts.trust_radius)
            boxes = trust_boxes(power, *opts.trust_radius);
        const DualSolution dual = dual_bisection(sigma, step.belief, budget, opts, opts.trust_radius ? &boxes : nullptr);
        step.candidate = dual.power;
        step.duality_gap = dual.duality_gap;

        if ((dual.power - power).cwiseAbs().maxCoeff() <= fixed_point_tol) {
            step.chosen = power;
            step.leader_rate = rate;
            step.follower_rates = achievable_rates(inst, base.profile);
            step.residual = ce_residual(interference, step.belief, power).cwiseAbs().maxCoeff();
            trace.converged_to_ce = step.residual <= ce_tol;
            // The IW point reproducing itself is the trivial conjectural
            // equilibrium; it is reported as a failure to improve.
            trace.stop_reason = t == 0 ? "no_improvement" : "fixed_point";
            trace.steps.push_back(std::move(step));
            break;
        }

        LineSearchResult ls = line_search(inst, power, dual.power, opts, &base.profile);
        trace.warnings += static_cast<std::size_t>(ls.skipped);
        if (ls.rate - rate < opts.improvement_tol) {
            step.chosen = power;
            step.leader_rate = rate;
            step.follower_rates = achievable_rates(inst, base.profile);
            step.residual = ce_residual(interference, step.belief, power).cwiseAbs().maxCoeff();
            trace.stop_reason = "no_improvement";
            trace.steps.push_back(std::move(step));
            break;
        }

        power = ls.power;
        base.profile = std::move(ls.profile);
        rate = ls.rate;
        step.v = ls.v;
        step.chosen = power;
        step.leader_rate = rate;
        step.follower_rates = achievable_rates(inst, base.profile);
        step.residual =
            ce_residual(stationary_interference(inst, base.profile, leader), step.belief, power).cwiseAbs().maxCoeff();
        trace.steps.push_back(std::move(step));
    }

    trace.final_allocation = power;
    trace.final_profile = base.profile;
    trace.final_rates = achievable_rates(inst, base.profile);
    return trace;
}

}  // namespace wfgame
