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

#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <stdexcept>

namespace wfgame {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& v)
{
    T out{};
    const char* first = v.data();
    const char* last = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc{} || ptr != last)
        throw std::invalid_argument("bad number '" + v + "'");
    return out;
}

bool parse_bool(const std::string& v)
{
    if (v == "1" || v == "true" || v == "yes" || v == "on")
        return true;
    if (v == "0" || v == "false" || v == "no" || v == "off")
        return false;
    throw std::invalid_argument("bad boolean '" + v + "'");
}

using Setter = std::function<void(SimulationConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters()
{
    static const std::map<std::string, Setter> table = {
        {"num_bins", [](auto& c, const auto& v) { c.channel.num_bins = parse_number<Index>(v); }},
        {"band_hz", [](auto& c, const auto& v) { c.channel.band_hz = parse_number<double>(v); }},
        {"num_rays", [](auto& c, const auto& v) { c.channel.num_rays = parse_number<Index>(v); }},
        {"rms_delay_s", [](auto& c, const auto& v) { c.channel.rms_delay_s = parse_number<double>(v); }},
        {"direct_power", [](auto& c, const auto& v) { c.channel.direct_power = parse_number<double>(v); }},
        {"cross_power", [](auto& c, const auto& v) { c.channel.cross_power = parse_number<double>(v); }},
        {"noise_psd", [](auto& c, const auto& v) { c.channel.noise_psd = parse_number<double>(v); }},
        {"budget_per_user", [](auto& c, const auto& v) { c.channel.budget_per_user = parse_number<double>(v); }},
        {"trust_radius",
         [](auto& c, const auto& v) {
             if (v == "none" || v.empty())
                 c.crm.trust_radius.reset();
             else
                 c.crm.trust_radius = parse_number<double>(v);
         }},
        {"line_search_points", [](auto& c, const auto& v) { c.crm.line_search_points = parse_number<Index>(v); }},
        {"improvement_tol", [](auto& c, const auto& v) { c.crm.improvement_tol = parse_number<double>(v); }},
        {"max_outer_iter", [](auto& c, const auto& v) { c.crm.max_outer_iter = parse_number<Index>(v); }},
        {"eta_bisect_tol", [](auto& c, const auto& v) { c.crm.eta_bisect_tol = parse_number<double>(v); }},
        {"fd_mode",
         [](auto& c, const auto& v) {
             if (v == "per_bin" || v == "per-bin")
                 c.crm.fd_mode = FdMode::per_bin;
             else if (v == "batch")
                 c.crm.fd_mode = FdMode::batch;
             else
                 throw std::invalid_argument("fd_mode must be per_bin or batch");
         }},
        {"fd_eps", [](auto& c, const auto& v) { c.crm.fd_eps = parse_number<double>(v); }},
        {"ne_tol", [](auto& c, const auto& v) { c.crm.ne_tol = parse_number<double>(v); }},
        {"ne_max_iter", [](auto& c, const auto& v) { c.crm.ne_max_iter = parse_number<Index>(v); }},
        {"follower_tol", [](auto& c, const auto& v) { c.crm.follower_tol = parse_number<double>(v); }},
        {"require_uniqueness", [](auto& c, const auto& v) { c.harness.require_uniqueness = parse_bool(v); }},
        {"compute_se", [](auto& c, const auto& v) { c.harness.compute_se = parse_bool(v); }},
        {"se_resolution", [](auto& c, const auto& v) { c.harness.se_resolution = parse_number<Index>(v); }},
        {"threads", [](auto& c, const auto& v) { c.harness.threads = parse_number<unsigned>(v); }},
        {"users", [](auto& c, const auto& v) { c.users = parse_number<Index>(v); }},
        {"trials", [](auto& c, const auto& v) { c.trials = parse_number<Index>(v); }},
        {"seed", [](auto& c, const auto& v) { c.seed = parse_number<std::uint64_t>(v); }},
    };
    return table;
}

}  // namespace

bool set_config_value(SimulationConfig& cfg, const std::string& key, const std::string& value)
{
    const auto it = setters().find(key);
    if (it == setters().end())
        return false;
    it->second(cfg, value);
    return true;
}

void apply_config(std::istream& is, SimulationConfig& cfg, const std::string& source)
{
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        const std::string where = source + ":" + std::to_string(lineno);
        if (eq == std::string::npos)
            throw std::runtime_error(where + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            if (!set_config_value(cfg, key, value))
                throw std::runtime_error("unknown key '" + key + "'");
        } catch (const std::exception& e) {
            throw std::runtime_error(where + ": " + e.what());
        }
    }
}

void apply_config_file(const std::string& path, SimulationConfig& cfg)
{
    std::ifstream is(path);
    if (!is)
        throw std::runtime_error("cannot open config '" + path + "'");
    apply_config(is, cfg, path);
}

}  // namespace wfgame
