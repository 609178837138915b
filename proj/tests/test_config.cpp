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

#include "wfgame/config.hpp"

#include <doctest.h>

#include <sstream>

using namespace wfgame;

TEST_CASE("defaults")
{
    const SimulationConfig c;
    CHECK(c.channel.num_bins == 200);
    CHECK(c.channel.cross_power == 0.5);
    CHECK_FALSE(c.crm.trust_radius.has_value());
    CHECK(c.crm.line_search_points == 101);
    CHECK(c.users == 2);
}

TEST_CASE("key = value parsing with comments")
{
    std::istringstream is(R"(# three-user run
users = 3
cross_power=0.33   # normalized
trust_radius = 1
fd_mode = batch

compute_se = false
seed = 18446744073709551615
)");
    SimulationConfig c;
    apply_config(is, c);
    CHECK(c.users == 3);
    CHECK(c.channel.cross_power == 0.33);
    REQUIRE(c.crm.trust_radius.has_value());
    CHECK(*c.crm.trust_radius == 1.0);
    CHECK(c.crm.fd_mode == FdMode::batch);
    CHECK_FALSE(c.harness.compute_se);
    CHECK(c.seed == 18446744073709551615ULL);

    std::istringstream reset("trust_radius = none\n");
    apply_config(reset, c);
    CHECK_FALSE(c.crm.trust_radius.has_value());
}

TEST_CASE("bad config lines report the line number")
{
    SimulationConfig c;
    std::istringstream unknown("users = 2\nbogus = 1\n");
    try {
        apply_config(unknown, c, "cfg");
        FAIL("expected an exception");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("cfg:2") != std::string::npos);
        CHECK(std::string(e.what()).find("bogus") != std::string::npos);
    }
    std::istringstream badnum("num_bins = 12x\n");
    CHECK_THROWS_AS(apply_config(badnum, c), std::runtime_error);
    std::istringstream noeq("num_bins 12\n");
    CHECK_THROWS_AS(apply_config(noeq, c), std::runtime_error);
    std::istringstream badmode("fd_mode = sideways\n");
    CHECK_THROWS_AS(apply_config(badmode, c), std::runtime_error);
    CHECK_THROWS(apply_config_file("/nonexistent/config.cfg", c));
}

TEST_CASE("every documented key is accepted")
{
    SimulationConfig c;
    for (const char* key : {"num_bins", "num_rays", "line_search_points", "max_outer_iter", "ne_max_iter",
                            "se_resolution", "threads", "users", "trials", "seed"})
        CHECK(set_config_value(c, key, "3"));
    for (const char* key : {"band_hz", "rms_delay_s", "direct_power", "cross_power", "noise_psd", "budget_per_user",
                            "trust_radius", "improvement_tol", "eta_bisect_tol", "fd_eps", "ne_tol", "follower_tol"})
        CHECK(set_config_value(c, key, "0.5"));
    CHECK(set_config_value(c, "require_uniqueness", "yes"));
    CHECK_FALSE(set_config_value(c, "missing", "1"));
}
