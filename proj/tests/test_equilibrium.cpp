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

#include "test_support.hpp"
#include "wfgame/equilibrium.hpp"

#include <doctest.h>

#include <random>

using namespace wfgame;

namespace {

// Simultaneous (Jacobi) best responses written directly against the
// water-filling primitive; independent of the Gauss-Seidel solver.
PowerProfile jacobi_fixed_point(const GameInstance& inst, PowerProfile p, int sweeps)
{
    for (int s = 0; s < sweeps; ++s) {
        PowerProfile next = p;
        for (Index k = 0; k < inst.num_users; ++k) {
            Eigen::VectorXd eff = inst.noise.row(k).transpose();
            for (Index j = 0; j < inst.num_users; ++j)
                if (j != k)
                    eff += inst.gain(j, k).transpose().cwiseProduct(p.row(j).transpose());
            next.row(k) = waterfill_best_response(eff, inst.budget(k)).power.transpose();
        }
        p = next;
    }
    return p;
}

PowerProfile random_profile(std::mt19937_64& rng, const GameInstance& inst)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    PowerProfile p(inst.num_users, inst.num_bins);
    for (Index k = 0; k < inst.num_users; ++k) {
        for (Index n = 0; n < inst.num_bins; ++n)
            p(k, n) = u(rng);
        p.row(k) *= inst.budget(k) / p.row(k).sum();
    }
    return p;
}

}  // namespace

TEST_CASE("single bin: everybody transmits the full budget")
{
    GameInstance inst = testing::flat_instance(2, 1, 0.7, 0.3, 1.0);
    inst.budget << 3, 5;
    const NashOutcome ne = iterate_waterfilling(inst);
    CHECK(ne.converged);
    CHECK(ne.iterations <= 2);
    CHECK(ne.profile(0, 0) == doctest::Approx(3.0));
    CHECK(ne.profile(1, 0) == doctest::Approx(5.0));
}

TEST_CASE("a single follower converges in one sweep")
{
    std::mt19937_64 rng(3);
    const GameInstance inst = testing::random_flagged_instance(rng, 2, 16);
    const Eigen::VectorXd p1 = Eigen::VectorXd::Constant(16, inst.budget(0) / 16);
    NashOptions opts;
    opts.fixed = PowerAllocation{p1, 0};
    const NashOutcome ne = iterate_waterfilling(inst, opts);
    CHECK(ne.converged);
    CHECK(ne.iterations == 1);
    CHECK(ne.profile.row(0).transpose() == p1);
    const Eigen::VectorXd eff = inst.noise.row(1).transpose() + inst.gain(0, 1).transpose().cwiseProduct(p1);
    CHECK(ne.profile.row(1).transpose().isApprox(waterfill_best_response(eff, inst.budget(1)).power, 1e-14));
    CHECK(ne.water_levels(0) == 0.0);
}

TEST_CASE("infeasible fixed allocation is rejected")
{
    const GameInstance inst = testing::flat_instance(2, 2, 0.5, 1.0, 1.0);
    NashOptions opts;
    opts.fixed = PowerAllocation{Eigen::Vector2d(1, 1), 0};
    CHECK_THROWS_AS(iterate_waterfilling(inst, opts), std::invalid_argument);
    // the follower solver deliberately skips this check
    CHECK(follower_equilibrium(inst, 0, Eigen::Vector2d(1, 1)).converged);
}

TEST_CASE("N = 2 flagged instances match a multi-start Jacobi oracle")
{
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 10; ++trial) {
        const GameInstance inst = testing::random_flagged_instance(rng, 2, 2);
        REQUIRE(check_uniqueness_condition(inst).holds);
        const NashOutcome ne = iterate_waterfilling(inst);
        REQUIRE(ne.converged);
        const PowerProfile ref = jacobi_fixed_point(inst, random_profile(rng, inst), 3000);
        for (int start = 0; start < 100; ++start) {
            const PowerProfile other = jacobi_fixed_point(inst, random_profile(rng, inst), 3000);
            CHECK((other - ref).cwiseAbs().maxCoeff() <= 1e-6);
        }
        CHECK((ne.profile - ref).cwiseAbs().maxCoeff() <= 1e-6);
    }
}

TEST_CASE("converged profiles are mutual best responses")
{
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 40; ++trial) {
        const Index K = 2 + trial % 2;
        const GameInstance inst = testing::random_flagged_instance(rng, K, 8 + 8 * (trial % 3));
        const NashOutcome ne = iterate_waterfilling(inst);
        REQUIRE(ne.converged);
        CHECK(best_response_gap(inst, ne.profile) <= 1e-7);
        for (Index k = 0; k < K; ++k)
            CHECK(ne.profile.row(k).sum() == doctest::Approx(inst.budget(k)).epsilon(1e-9));
        CHECK(ne.residual <= 1e-8);
    }
}

TEST_CASE("reversed sweep order reaches the same equilibrium")
{
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 40; ++trial) {
        const GameInstance inst = testing::random_flagged_instance(rng, 3, 12);
        NashOptions rev;
        rev.reverse_order = true;
        const NashOutcome a = iterate_waterfilling(inst);
        const NashOutcome b = iterate_waterfilling(inst, rev);
        if (!a.converged || !b.converged)
            continue;
        CHECK((a.profile - b.profile).cwiseAbs().maxCoeff() <= 1e-6);
    }
}

TEST_CASE("followers reach the same point from random starts")
{
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 10; ++trial) {
        const GameInstance inst = testing::random_flagged_instance(rng, 3, 10);
        const Eigen::VectorXd p1 = random_profile(rng, inst).row(0).transpose();
        const NashOutcome ref = follower_equilibrium(inst, 0, p1);
        REQUIRE(ref.converged);
        for (int start = 0; start < 20; ++start) {
            const PowerProfile init = random_profile(rng, inst);
            const NashOutcome ne = follower_equilibrium(inst, 0, p1, &init);
            REQUIRE(ne.converged);
            CHECK((ne.profile - ref.profile).cwiseAbs().maxCoeff() <= 1e-6);
        }
        CHECK(best_response_gap(inst, ref.profile, 0) <= 1e-7);
    }
}

TEST_CASE("non-convergence is reported, not thrown")
{
    std::mt19937_64 rng(7);
    const GameInstance inst = testing::random_flagged_instance(rng, 3, 12);
    NashOptions opts;
    opts.max_iter = 1;
    const NashOutcome ne = iterate_waterfilling(inst, opts);
    CHECK_FALSE(ne.converged);
    CHECK(ne.iterations == 1);
}

TEST_CASE("uniqueness screen examples")
{
    {
        const auto r = check_uniqueness_condition(testing::flat_instance(2, 4, 0.5, 1.0, 1.0));
        CHECK(r.holds);
        CHECK(r.worst_norm == doctest::Approx(0.5));
    }
    {
        const auto r = check_uniqueness_condition(testing::flat_instance(3, 4, 0.33, 1.0, 1.0));
        CHECK(r.holds);
        CHECK(r.worst_norm == doctest::Approx(0.66));
    }
    {
        GameInstance inst = testing::flat_instance(2, 4, 0.5, 1.0, 1.0);
        inst.gain(0, 1, 2) = 1.2;
        const auto r = check_uniqueness_condition(inst);
        CHECK_FALSE(r.holds);
        CHECK(r.worst_norm >= 1.2);
        CHECK(r.worst_bin == 2);
    }
}
