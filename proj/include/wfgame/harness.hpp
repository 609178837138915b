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

#ifndef WFGAME_HARNESS_HPP
#define WFGAME_HARNESS_HPP

#include "wfgame/crm.hpp"
#include "wfgame/instance.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace wfgame {

struct HarnessOptions
{
    /// Reject trials failing the max_n ||G_n||_inf < 1 screen. Off by default:
    /// at N = 200 Rayleigh draws essentially never pass it.
    bool require_uniqueness = false;
    /// Run the Stackelberg grid oracle on trials within its desk-scale guard.
    bool compute_se = true;
    Index se_resolution = 200;
    /// Worker threads for ensembles; 0 uses std::thread::hardware_concurrency.
    unsigned threads = 0;
};

struct TrialReport
{
    std::uint64_t seed = 0;
    Index num_users = 0;
    bool accepted = false;
    std::string reject_reason;
    bool uniqueness = false;
    double worst_norm = 0;

    Eigen::VectorXd rates_ne;   ///< bits
    Eigen::VectorXd rates_crm;  ///< bits
    std::optional<Eigen::VectorXd> rates_se;

    Index iterations = 0;
    std::string stop_reason;
    bool converged_to_ce = false;
    bool identical_to_ne = false;  ///< CRM kept the IW allocation (max-norm <= 1e-6)
    std::size_t warnings = 0;
};

struct EnsembleStats
{
    Index trials = 0;
    Index accepted = 0;
    Index rejected = 0;
    Eigen::VectorXd mean_improvement;     ///< per user, mean of R / R_ne - 1
    Eigen::VectorXd fraction_below_one;   ///< per user, share of R / R_ne < 1 - 1e-9
    double fraction_identical = 0;
    double mean_iterations = 0;
    std::vector<std::vector<double>> ratio_cdf;     ///< per user, sorted R / R_ne
    std::vector<std::vector<double>> se_ratio_cdf;  ///< per user, sorted R / R_se (may be empty)
    std::map<Index, Index> iteration_histogram;
};

struct EnsembleResult
{
    EnsembleStats stats;
    std::vector<TrialReport> trials;  ///< ordered by seed
};

/// One seeded experiment: draw, screen, IW, CRM and (when small enough) the
/// Stackelberg grid oracle. Rejections are reported, never thrown.
TrialReport run_trial(const ChannelModelParams& params, Index num_users, const CrmOptions& opts, std::uint64_t seed,
                      const HarnessOptions& harness = {});

/// Seeds base_seed .. base_seed + trials - 1, run across worker threads.
/// Output does not depend on the thread count.
EnsembleResult run_ensemble(const ChannelModelParams& params, Index num_users, const CrmOptions& opts,
                            std::uint64_t base_seed, Index trials, const HarnessOptions& harness = {});

EnsembleStats summarize(const std::vector<TrialReport>& reports, Index num_users);

// CSV output. Reals carry 9 significant digits; rates are per-bin sums in
// bits without the bin-width factor.
void write_trial_csv(std::ostream& os, const std::vector<TrialReport>& reports, Index num_users);
void write_stats_csv(std::ostream& os, const EnsembleStats& stats);
/// Two columns, ratio and empirical cumulative probability i / n.
void write_cdf_csv(std::ostream& os, const std::vector<double>& sorted_samples);

void write_trial_csv(const std::string& path, const std::vector<TrialReport>& reports, Index num_users);
void write_stats_csv(const std::string& path, const EnsembleStats& stats);
void write_cdf_csv(const std::string& path, const std::vector<double>& sorted_samples);

}  // namespace wfgame

#endif  // WFGAME_HARNESS_HPP
