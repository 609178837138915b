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

#include "wfgame/harness.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace wfgame {

namespace {

constexpr double identical_tol = 1e-6;

template <typename Writer>
void write_file(const std::string& path, Writer&& writer)
{
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    writer(os);
    os.flush();
    if (!os)
        throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace

TrialReport run_trial(const ChannelModelParams& params, Index num_users, const CrmOptions& opts, std::uint64_t seed,
                      const HarnessOptions& harness)
{
    TrialReport rep;
    rep.seed = seed;
    rep.num_users = num_users;

    const GameInstance inst = generate_instance(params, num_users, seed);
    const UniquenessReport uniq = check_uniqueness_condition(inst);
    rep.uniqueness = uniq.holds;
    rep.worst_norm = uniq.worst_norm;
    if (harness.require_uniqueness && !uniq.holds) {
        rep.reject_reason = "uniqueness";
        return rep;
    }

    NashOptions ne_opts;
    ne_opts.tol = opts.ne_tol;
    ne_opts.max_iter = opts.ne_max_iter;
    if (!iterate_waterfilling(inst, ne_opts).converged) {
        rep.reject_reason = "iw_not_converged";
        return rep;
    }

    CrmTrace trace;
    try {
        trace = crm(inst, opts);
    } catch (const ConvergenceError&) {
        rep.reject_reason = "followers_not_converged";
        return rep;
    }

    rep.accepted = true;
    rep.rates_ne = trace.initial_rates;
    rep.rates_crm = trace.final_rates;
    rep.iterations = trace.iterations();
    rep.stop_reason = trace.stop_reason;
    rep.converged_to_ce = trace.converged_to_ce;
    rep.warnings = trace.warnings;
    rep.identical_to_ne = (trace.final_allocation - trace.initial_allocation).cwiseAbs().maxCoeff() <= identical_tol;

    if (harness.compute_se && inst.num_bins <= 4 && inst.num_users <= 3 && uniq.holds) {
        try {
            rep.rates_se = grid_search_se(inst, harness.se_resolution).rates;
        } catch (const ConvergenceError&) {
            ++rep.warnings;
        }
    }
    return rep;
}

EnsembleResult run_ensemble(const ChannelModelParams& params, Index num_users, const CrmOptions& opts,
                            std::uint64_t base_seed, Index trials, const HarnessOptions& harness)
{
    if (trials < 1)
        throw std::invalid_argument("run_ensemble: trials must be at least 1");
    validate(opts);

    EnsembleResult result;
    result.trials.resize(static_cast<std::size_t>(trials));
    unsigned workers = harness.threads ? harness.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(trials));

    std::atomic<Index> next{0};
    auto work = [&]() {
        for (Index i = next++; i < trials; i = next++)
            result.trials[static_cast<std::size_t>(i)] =
                run_trial(params, num_users, opts, base_seed + static_cast<std::uint64_t>(i), harness);
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back(work);
        for (auto& t : pool)
            t.join();
    }
    result.stats = summarize(result.trials, num_users);
    return result;
}

EnsembleStats summarize(const std::vector<TrialReport>& reports, Index num_users)
{
    EnsembleStats s;
    s.trials = static_cast<Index>(reports.size());
    s.mean_improvement = Eigen::VectorXd::Zero(num_users);
    s.fraction_below_one = Eigen::VectorXd::Zero(num_users);
    s.ratio_cdf.assign(static_cast<std::size_t>(num_users), {});
    s.se_ratio_cdf.assign(static_cast<std::size_t>(num_users), {});

    Index identical = 0;
    double iterations = 0;
    for (const auto& r : reports) {
        if (!r.accepted) {
            ++s.rejected;
            continue;
        }
        ++s.accepted;
        identical += r.identical_to_ne ? 1 : 0;
        iterations += static_cast<double>(r.iterations);
        ++s.iteration_histogram[r.iterations];
        for (Index k = 0; k < num_users; ++k) {
            const double ratio = r.rates_crm(k) / r.rates_ne(k);
            s.ratio_cdf[static_cast<std::size_t>(k)].push_back(ratio);
            s.mean_improvement(k) += ratio - 1.0;
            if (ratio < 1.0 - 1e-9)
                s.fraction_below_one(k) += 1.0;
            if (r.rates_se)
                s.se_ratio_cdf[static_cast<std::size_t>(k)].push_back(r.rates_crm(k) / (*r.rates_se)(k));
        }
    }
    if (s.accepted > 0) {
        const double n = static_cast<double>(s.accepted);
        s.mean_improvement /= n;
        s.fraction_below_one /= n;
        s.fraction_identical = static_cast<double>(identical) / n;
        s.mean_iterations = iterations / n;
    }
    for (auto& v : s.ratio_cdf)
        std::sort(v.begin(), v.end());
    for (auto& v : s.se_ratio_cdf)
        std::sort(v.begin(), v.end());
    return s;
}

void write_trial_csv(std::ostream& os, const std::vector<TrialReport>& reports, Index num_users)
{
    const auto old_precision = os.precision(9);
    os << "seed,accepted,iters,stop_reason,ce";
    for (Index k = 1; k <= num_users; ++k)
        os << ",R" << k << "_ne,R" << k << "_crm,R" << k << "_se";
    os << '\n';
    for (const auto& r : reports) {
        os << r.seed << ',' << (r.accepted ? 1 : 0) << ',';
        if (!r.accepted) {
            os << ',' << r.reject_reason << ',';
            for (Index k = 0; k < num_users; ++k)
                os << ",,,";
            os << '\n';
            continue;
        }
        os << r.iterations << ',' << r.stop_reason << ',' << (r.converged_to_ce ? 1 : 0);
        for (Index k = 0; k < num_users; ++k) {
            os << ',' << r.rates_ne(k) << ',' << r.rates_crm(k) << ',';
            if (r.rates_se)
                os << (*r.rates_se)(k);
        }
        os << '\n';
    }
    os.precision(old_precision);
}

void write_stats_csv(std::ostream& os, const EnsembleStats& s)
{
    const auto old_precision = os.precision(9);
    os << "metric,value\n";
    os << "trials," << s.trials << '\n';
    os << "accepted," << s.accepted << '\n';
    os << "rejected," << s.rejected << '\n';
    os << "fraction_identical," << s.fraction_identical << '\n';
    os << "mean_iterations," << s.mean_iterations << '\n';
    for (Index k = 0; k < s.mean_improvement.size(); ++k)
        os << "mean_improvement_user" << k + 1 << ',' << s.mean_improvement(k) << '\n';
    for (Index k = 0; k < s.fraction_below_one.size(); ++k)
        os << "fraction_below_one_user" << k + 1 << ',' << s.fraction_below_one(k) << '\n';
    for (const auto& [iters, count] : s.iteration_histogram)
        os << "iterations_" << iters << ',' << count << '\n';
    os.precision(old_precision);
}

void write_cdf_csv(std::ostream& os, const std::vector<double>& sorted_samples)
{
    const auto old_precision = os.precision(9);
    os << "ratio,cumulative_probability\n";
    const double n = static_cast<double>(sorted_samples.size());
    for (std::size_t i = 0; i < sorted_samples.size(); ++i)
        os << sorted_samples[i] << ',' << static_cast<double>(i + 1) / n << '\n';
    os.precision(old_precision);
}

void write_trial_csv(const std::string& path, const std::vector<TrialReport>& reports, Index num_users)
{
    write_file(path, [&](std::ostream& os) { write_trial_csv(os, reports, num_users); });
}

void write_stats_csv(const std::string& path, const EnsembleStats& stats)
{
    write_file(path, [&](std::ostream& os) { write_stats_csv(os, stats); });
}

void write_cdf_csv(const std::string& path, const std::vector<double>& sorted_samples)
{
    write_file(path, [&](std::ostream& os) { write_cdf_csv(os, sorted_samples); });
}

}  // namespace wfgame
