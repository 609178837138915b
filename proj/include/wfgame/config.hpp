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

#ifndef WFGAME_CONFIG_HPP
#define WFGAME_CONFIG_HPP

#include "wfgame/crm.hpp"
#include "wfgame/harness.hpp"
#include "wfgame/instance.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>

namespace wfgame {

/// Everything a CLI run can be configured with.
struct SimulationConfig
{
    ChannelModelParams channel;
    CrmOptions crm;
    HarnessOptions harness;
    Index users = 2;
    Index trials = 1000;
    std::uint64_t seed = 1;
};

// Config files hold one `key = value` per line; '#' starts a comment.
// Keys are the field names of ChannelModelParams (num_bins, band_hz,
// num_rays, rms_delay_s, direct_power, cross_power, noise_psd,
// budget_per_user), CrmOptions (trust_radius, line_search_points,
// improvement_tol, max_outer_iter, eta_bisect_tol, fd_mode = per_bin|batch,
// fd_eps, ne_tol, ne_max_iter, follower_tol), HarnessOptions
// (require_uniqueness, compute_se, se_resolution, threads) and users, trials,
// seed. An unknown key or malformed value throws std::runtime_error with the
// line number.
void apply_config(std::istream& is, SimulationConfig& cfg, const std::string& source = "config");
void apply_config_file(const std::string& path, SimulationConfig& cfg);

/// Sets one key; returns false if the key is unknown.
bool set_config_value(SimulationConfig& cfg, const std::string& key, const std::string& value);

}  // namespace wfgame

#endif  // WFGAME_CONFIG_HPP
