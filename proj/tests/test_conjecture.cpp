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
#include "wfgame/conjecture.hpp"
#include "wfgame/equilibrium.hpp"

#include <doctest.h>

#include <random>

using namespace wfgame;

namespace {

double default_eps(const GameInstance& inst)
{
    return 1e-4 * inst.budget(0) / static_cast<double>(inst.num_bins);
}

}  // namespace

TEST_CASE("closed-form derivative examples")
{
    const GameInstance two = testing::flat_instance(2, 3, 0.5, 1.0, 3.0);
    CHECK(closed_form_derivative(two, 1, {1}) == doctest::Approx(-0.25).epsilon(1e-14));
    CHECK(closed_form_derivative(two, 1, {}) == 0.0);

    const double a = 0.33;
    const GameInstance three = testing::flat_instance(3, 3, a, 1.0, 3.0);
    // (I + G) x = g with I + G = [[1, a], [a, 1]], g = [a, a]: x = a / (1 + a)
    const double x = a / (1 + a);
    const double oracle = -(a * x + a * x);
    CHECK(oracle == doctest::Approx(-2 * a * a / (1 + a)).epsilon(1e-14));
    CHECK(closed_form_derivative(three, 0, {1, 2}) == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(closed_form_derivative(three, 0, {1, 2}) == doctest::Approx(-0.16376).epsilon(1e-4));
    CHECK(closed_form_derivative(three, 0, {2}) == doctest::Approx(-a * a).epsilon(1e-14));
}

TEST_CASE("singular coupling is reported with the bin")
{
    const GameInstance inst = testing::flat_instance(3, 4, 1.0, 1.0, 1.0);
    try {
        closed_form_derivative(inst, 2, {1, 2});
        FAIL("expected an exception");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("bin 2") != std::string::npos);
    }
}

TEST_CASE("flat two-user slope approaches -a12 a21")
{
    // FD includes the follower's water-level shift, a relative 1 / |A|
    // correction, so the comparison runs at large N.
    const Index N = 4096;
    const GameInstance inst = testing::flat_instance(2, N, 0.5, 1.0, static_cast<double>(N));
    const Eigen::VectorXd p1 = Eigen::VectorXd::Ones(N);
    const NashOutcome base = follower_equilibrium(inst, 0, p1);
    for (const Index n : {Index{0}, Index{17}, N - 1}) {
        const auto d = estimate_derivative_fd(inst, p1, n, default_eps(inst), {}, &base);
        CHECK_FALSE(d.left.has_value());
        CHECK(std::abs(d.value + 0.25) <= 1e-4);
        // exact finite-N value: -0.25 (1 - 1/N)
        CHECK(d.value == doctest::Approx(-0.25 * (1.0 - 1.0 / N)).epsilon(1e-6));
    }
}

TEST_CASE("uncoupled game has zero slope")
{
    const GameInstance inst = testing::flat_instance(2, 8, 0.0, 1.0, 8.0);
    const Eigen::VectorXd p1 = Eigen::VectorXd::Ones(8);
    const auto d = estimate_derivative_fd(inst, p1, 3, default_eps(inst));
    CHECK(d.value == 0.0);
}

TEST_CASE("idle follower bin has zero slope")
{
    GameInstance inst = testing::flat_instance(2, 8, 0.5, 1.0, 8.0);
    inst.noise(1, 5) = 1e3;  // user 2 stays out of bin 5 with slack
    const Eigen::VectorXd p1 = Eigen::VectorXd::Ones(8);
    const NashOutcome base = follower_equilibrium(inst, 0, p1);
    REQUIRE(base.profile(1, 5) == 0.0);
    const auto d = estimate_derivative_fd(inst, p1, 5, default_eps(inst), {}, &base);
    CHECK(std::abs(d.value) <= 1e-6);
}

TEST_CASE("kink at the follower's water level reports one-sided slopes")
{
    // User 2 sees 1 + 0.5 P1 per bin. With P1 = 1 elsewhere and bin 0 idle
    // the level is 1.5 + B / (N - 1); bin 0 is put exactly there.
    const Index N = 64;
    const double B = 32;
    GameInstance inst = testing::flat_instance(2, N, 0.5, 1.0, B);
    Eigen::VectorXd p1 = Eigen::VectorXd::Ones(N);
    p1(0) = 2.0 * (0.5 + B / static_cast<double>(N - 1));
    const auto d = estimate_derivative_fd(inst, p1, 0, default_eps(inst));
    REQUIRE(d.left.has_value());
    REQUIRE(d.right.has_value());
    CHECK(std::abs(*d.right) <= 1e-6);
    CHECK(*d.left == doctest::Approx(-0.25 * (1.0 - 1.0 / N)).epsilon(1e-4));
}

TEST_CASE("forward difference near zero power")
{
    const Index N = 16;
    const GameInstance inst = testing::flat_instance(2, N, 0.5, 1.0, static_cast<double>(N));
    Eigen::VectorXd p1 = Eigen::VectorXd::Ones(N);
    p1(4) = 0;
    const auto d = estimate_derivative_fd(inst, p1, 4, default_eps(inst));
    CHECK(d.value == doctest::Approx(-0.25 * (1.0 - 1.0 / N)).epsilon(1e-6));
}

TEST_CASE("batch mode absorbs the follower's water-level shift")
{
    // Raising every leader bin by eps lifts the follower's level by 0.5 eps,
    // so its per-bin power and the leader's interference do not move.
    GameInstance inst = testing::flat_instance(2, 8, 0.5, 1.0, 8.0);
    const Eigen::VectorXd p1 = Eigen::VectorXd::Ones(8);
    FdOptions per_bin;
    FdOptions batch;
    batch.mode = FdMode::batch;
    const auto a = slopes(estimate_derivatives(inst, p1, per_bin));
    const auto b = slopes(estimate_derivatives(inst, p1, batch));
    CHECK(a.isApprox(Eigen::VectorXd::Constant(8, -0.25 * 7.0 / 8.0), 1e-8));
    CHECK(b.cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("closed form and finite differences agree away from kinks")
{
    std::mt19937_64 rng(12);
    int compared = 0;
    for (int trial = 0; trial < 4; ++trial) {
        const Index K = 2 + trial % 2;
        const Index N = 4096;
        const GameInstance inst = testing::random_flagged_instance(rng, K, N);
        const NashOutcome ne = iterate_waterfilling(inst);
        REQUIRE(ne.converged);
        const Eigen::VectorXd p1 = ne.profile.row(0).transpose();
        const NashOutcome base = follower_equilibrium(inst, 0, p1, &ne.profile);
        std::uniform_int_distribution<Index> pick(0, N - 1);
        for (int i = 0; i < 25; ++i) {
            const Index n = pick(rng);
            const auto d = estimate_derivative_fd(inst, p1, n, default_eps(inst), {}, &base);
            if (d.left)
                continue;
            const double cf = closed_form_derivative(inst, n, active_followers(base.profile, n));
            CHECK(std::abs(d.value - cf) <= std::max(1e-4, 1e-3 * std::abs(cf)));
            ++compared;
        }
    }
    CHECK(compared >= 80);
}

TEST_CASE("cross-bin slopes nearly vanish")
{
    std::mt19937_64 rng(13);
    const Index N = 2048;
    for (int trial = 0; trial < 2; ++trial) {
        const GameInstance inst = testing::random_flagged_instance(rng, 2 + trial, N);
        const NashOutcome ne = iterate_waterfilling(inst);
        REQUIRE(ne.converged);
        const Eigen::VectorXd p1 = ne.profile.row(0).transpose();
        const NashOutcome base = follower_equilibrium(inst, 0, p1, &ne.profile);
        const double eps = default_eps(inst);
        const Eigen::VectorXd i0 = stationary_interference(inst, base.profile, 0);
        std::uniform_int_distribution<Index> pick(0, N - 1);
        for (int i = 0; i < 10; ++i) {
            const Index m = pick(rng);
            Eigen::VectorXd up = p1;
            up(m) += eps;
            const NashOutcome moved = follower_equilibrium(inst, 0, up, &base.profile, 1e-11);
            const Eigen::VectorXd di = (stationary_interference(inst, moved.profile, 0) - i0) / eps;
            const double same = std::abs(di(m));
            const double tol = 10.0 * std::max(1e-4, 1e-3 * same);
            for (Index n = 0; n < N; ++n)
                if (n != m)
                    CHECK(std::abs(di(n)) <= tol);
        }
    }
}

TEST_CASE("belief update examples")
{
    {
        const Belief b = update_belief(Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Constant(1, 2.0),
                                       Eigen::VectorXd::Constant(1, -0.25));
        CHECK(b.beta(0) == doctest::Approx(1.5));
        CHECK(b.gamma(0) == doctest::Approx(0.25));
        CHECK(b.interference(Eigen::VectorXd::Constant(1, 2.0))(0) == doctest::Approx(1.0));
    }
    {
        const Belief b = update_belief(Eigen::VectorXd::Constant(1, 0.7), Eigen::VectorXd::Constant(1, 3.0),
                                       Eigen::VectorXd::Zero(1));
        CHECK(b.beta(0) == 0.7);
        CHECK(b.gamma(0) == 0.0);
    }
    {
        const Belief b = update_belief(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1),
                                       Eigen::VectorXd::Constant(1, -0.25));
        CHECK(b.beta(0) == 0.0);
        CHECK(b.gamma(0) == 0.25);
    }
    {
        std::size_t clamped = 0;
        const Belief b = update_belief(Eigen::Vector2d(0.1, 1.0), Eigen::Vector2d(1.0, 1.0),
                                       Eigen::Vector2d(0.5, 0.0), &clamped);
        CHECK(b.beta(0) == 0.0);
        CHECK(clamped == 1);
    }
}

TEST_CASE("belief domain")
{
    Belief b;
    b.beta = Eigen::Vector3d(1.0, 1.0, 0.0);
    b.gamma = Eigen::Vector3d(0.5, -1.0, 0.2);
    CHECK(b.domain_upper(0) == doctest::Approx(2.0));
    CHECK(std::isinf(b.domain_upper(1)));
    CHECK(b.domain_upper(2) == 0.0);
}

TEST_CASE("SC1 examples and monotonicity")
{
    const Eigen::VectorXd sigma = Eigen::VectorXd::Ones(1);
    Belief b;
    b.beta = Eigen::VectorXd::Constant(1, 0.5);
    b.gamma = Eigen::VectorXd::Constant(1, -1.0);
    auto r = check_sc1(sigma, b);
    CHECK(r.holds);
    CHECK(r.margin(0) == doctest::Approx(-1.25));

    b.gamma(0) = 0.3;
    r = check_sc1(sigma, b);
    CHECK_FALSE(r.holds);
    CHECK(r.margin(0) == doctest::Approx(0.05));

    b.beta(0) = 0;
    b.gamma(0) = -1;
    CHECK_FALSE(check_sc1(sigma, b).holds);

    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        Belief c;
        c.beta = Eigen::VectorXd::Constant(1, 0.01 + u(rng));
        c.gamma = Eigen::VectorXd::Constant(1, -1 + 2 * u(rng));
        const Eigen::VectorXd s = Eigen::VectorXd::Constant(1, 0.01 + u(rng));
        if (!check_sc1(s, c).holds)
            continue;
        c.gamma(0) -= u(rng);
        CHECK(check_sc1(s, c).holds);
    }
}

TEST_CASE("CE residual examples")
{
    const Index N = 32;
    std::mt19937_64 rng(9);
    const GameInstance inst = testing::random_flagged_instance(rng, 2, N);
    const NashOutcome ne = iterate_waterfilling(inst);
    REQUIRE(ne.converged);
    const Eigen::VectorXd p1 = ne.profile.row(0).transpose();
    const Eigen::VectorXd i_ne = stationary_interference(inst, ne.profile, 0);

    // NE as the trivial conjectural equilibrium
    Belief trivial{i_ne, Eigen::VectorXd::Zero(N)};
    CHECK(ce_residual(inst, trivial, p1).cwiseAbs().maxCoeff() <= 1e-8);

    // tangent belief built at the same point
    const NashOutcome base = follower_equilibrium(inst, 0, p1, &ne.profile, 1e-11);
    const auto d = slopes(estimate_derivatives(inst, p1, {}, &base));
    const Belief tangent = update_belief(stationary_interference(inst, base.profile, 0), p1, d);
    const double fd_noise = 2 * default_eps(inst) * d.cwiseAbs().maxCoeff();
    CHECK(ce_residual(inst, tangent, p1).cwiseAbs().maxCoeff() <= fd_noise + 1e-9);

    // shifting beta by 0.1 in one bin
    Belief shifted = trivial;
    shifted.beta(7) += 0.1;
    Eigen::VectorXd r = ce_residual(inst, shifted, p1);
    CHECK(r(7) == doctest::Approx(-0.1).epsilon(1e-8));
    r(7) = 0;
    CHECK(r.cwiseAbs().maxCoeff() <= 1e-8);
}
