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

// Command-line front end. Settings resolve as flags > config file > defaults.

#include "wfgame/config.hpp"
#include "wfgame/crm.hpp"
#include "wfgame/equilibrium.hpp"
#include "wfgame/harness.hpp"
#include "wfgame/instance.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace wfgame;

struct Flags
{
    std::string config;
    std::string instance;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<Index> users;
    std::optional<Index> bins;
    std::optional<Index> trials;
    std::optional<double> trust_radius;
    std::optional<Index> line_search_points;
    std::optional<double> improvement_tol;
    std::optional<Index> max_outer_iter;
    std::optional<std::string> fd_mode;
    std::optional<Index> resolution;
    std::optional<unsigned> threads;
    std::vector<std::string> overrides;
};

SimulationConfig resolve(const Flags& f)
{
    SimulationConfig cfg;
    if (!f.config.empty())
        apply_config_file(f.config, cfg);
    for (const auto& kv : f.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("--set expects key=value, got '" + kv + "'");
        if (!set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1)))
            throw std::runtime_error("--set: unknown key '" + kv.substr(0, eq) + "'");
    }
    if (f.seed)
        cfg.seed = *f.seed;
    if (f.users)
        cfg.users = *f.users;
    if (f.bins)
        cfg.channel.num_bins = *f.bins;
    if (f.trials)
        cfg.trials = *f.trials;
    if (f.trust_radius)
        cfg.crm.trust_radius = *f.trust_radius;
    if (f.line_search_points)
        cfg.crm.line_search_points = *f.line_search_points;
    if (f.improvement_tol)
        cfg.crm.improvement_tol = *f.improvement_tol;
    if (f.max_outer_iter)
        cfg.crm.max_outer_iter = *f.max_outer_iter;
    if (f.fd_mode)
        set_config_value(cfg, "fd_mode", *f.fd_mode);
    if (f.resolution)
        cfg.harness.se_resolution = *f.resolution;
    if (f.threads)
        cfg.harness.threads = *f.threads;
    validate(cfg.crm);
    return cfg;
}

GameInstance obtain_instance(const Flags& f, const SimulationConfig& cfg)
{
    if (!f.instance.empty())
        return load_instance(f.instance);
    return generate_instance(cfg.channel, cfg.users, cfg.seed);
}

// Writes to --out, or stdout when it is empty or "-".
void emit(const std::string& out, const std::function<void(std::ostream&)>& writer)
{
    if (out.empty() || out == "-") {
        writer(std::cout);
        return;
    }
    std::ofstream os(out);
    if (!os)
        throw std::runtime_error("cannot open '" + out + "' for writing");
    writer(os);
    os.flush();
    if (!os)
        throw std::runtime_error("write to '" + out + "' failed");
}

void write_profile_csv(std::ostream& os, const PowerProfile& profile, const Eigen::VectorXd& rates)
{
    os.precision(9);
    os << "user,rate_bits";
    for (Index n = 0; n < profile.cols(); ++n)
        os << ",P" << n + 1;
    os << '\n';
    for (Index k = 0; k < profile.rows(); ++k) {
        os << k + 1 << ',' << rates(k);
        for (Index n = 0; n < profile.cols(); ++n)
            os << ',' << profile(k, n);
        os << '\n';
    }
}

int cmd_gen(const Flags& f)
{
    const SimulationConfig cfg = resolve(f);
    const GameInstance inst = generate_instance(cfg.channel, cfg.users, cfg.seed);
    emit(f.out, [&](std::ostream& os) { write_instance(os, inst); });
    return 0;
}

int cmd_solve_ne(const Flags& f)
{
    const SimulationConfig cfg = resolve(f);
    const GameInstance inst = obtain_instance(f, cfg);
    NashOptions opts;
    opts.tol = cfg.crm.ne_tol;
    opts.max_iter = cfg.crm.ne_max_iter;
    const NashOutcome ne = iterate_waterfilling(inst, opts);
    const UniquenessReport uniq = check_uniqueness_condition(inst);
    std::cerr << "iterations " << ne.iterations << ", residual " << ne.residual << ", uniqueness screen "
              << (uniq.holds ? "holds" : "fails") << " (worst norm " << uniq.worst_norm << ")\n";
    if (!ne.converged) {
        std::cerr << "error: iterative water-filling did not converge\n";
        return 3;
    }
    emit(f.out, [&](std::ostream& os) { write_profile_csv(os, ne.profile, achievable_rates(inst, ne.profile)); });
    return 0;
}

int cmd_crm(const Flags& f)
{
    const SimulationConfig cfg = resolve(f);
    const GameInstance inst = obtain_instance(f, cfg);
    const CrmTrace trace = crm(inst, cfg.crm);
    emit(f.out, [&](std::ostream& os) {
        os.precision(9);
        os << "t,v,sc1,residual,duality_gap";
        for (Index k = 1; k <= inst.num_users; ++k)
            os << ",R" << k;
        os << '\n';
        os << 0 << ",,,,";
        for (Index k = 0; k < inst.num_users; ++k)
            os << ',' << trace.initial_rates(k);
        os << '\n';
        for (std::size_t t = 0; t < trace.steps.size(); ++t) {
            const CrmStep& s = trace.steps[t];
            os << t + 1 << ',' << s.v << ',' << (s.sc1 ? 1 : 0) << ',' << s.residual << ',' << s.duality_gap;
            for (Index k = 0; k < inst.num_users; ++k)
                os << ',' << s.follower_rates(k);
            os << '\n';
        }
    });
    std::cerr << "stop " << trace.stop_reason << ", iterations " << trace.iterations() << ", ce "
              << (trace.converged_to_ce ? "yes" : "no") << ", R1 " << trace.initial_rates(0) << " -> "
              << trace.final_rates(0) << '\n';
    return 0;
}

int cmd_se_grid(const Flags& f)
{
    SimulationConfig cfg = resolve(f);
    if (!f.bins && f.instance.empty())
        cfg.channel.num_bins = std::min<Index>(cfg.channel.num_bins, 2);
    const GameInstance inst = obtain_instance(f, cfg);
    const StackelbergResult se = grid_search_se(inst, cfg.harness.se_resolution);
    emit(f.out, [&](std::ostream& os) {
        os.precision(9);
        os << "metric,value\n";
        os << "leader_rate," << se.leader_rate << '\n';
        os << "grid_error," << se.grid_error << '\n';
        os << "evaluated," << se.evaluated << '\n';
        for (Index k = 0; k < se.rates.size(); ++k)
            os << "R" << k + 1 << ',' << se.rates(k) << '\n';
        for (Index n = 0; n < se.leader_power.size(); ++n)
            os << "P1_bin" << n + 1 << ',' << se.leader_power(n) << '\n';
    });
    return 0;
}

int cmd_ensemble(const Flags& f)
{
    const SimulationConfig cfg = resolve(f);
    const EnsembleResult res = run_ensemble(cfg.channel, cfg.users, cfg.crm, cfg.seed, cfg.trials, cfg.harness);
    const EnsembleStats& s = res.stats;
    if (!f.out.empty() && f.out != "-") {
        namespace fs = std::filesystem;
        const fs::path dir(f.out);
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec)
            throw std::runtime_error("cannot create directory '" + f.out + "': " + ec.message());
        write_trial_csv((dir / "trials.csv").string(), res.trials, cfg.users);
        write_stats_csv((dir / "stats.csv").string(), s);
        for (Index k = 0; k < cfg.users; ++k) {
            const auto u = std::to_string(k + 1);
            write_cdf_csv((dir / ("cdf_ratio_ne_user" + u + ".csv")).string(), s.ratio_cdf[static_cast<std::size_t>(k)]);
            if (!s.se_ratio_cdf[static_cast<std::size_t>(k)].empty())
                write_cdf_csv((dir / ("cdf_ratio_se_user" + u + ".csv")).string(),
                              s.se_ratio_cdf[static_cast<std::size_t>(k)]);
        }
    } else {
        write_stats_csv(std::cout, s);
    }
    std::cerr << "accepted " << s.accepted << " of " << s.trials << ", fraction identical " << s.fraction_identical
              << ", mean iterations " << s.mean_iterations << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Power-allocation games on frequency-selective interference channels"};
    app.require_subcommand(1);
    Flags flags;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", flags.config, "key=value config file")->check(CLI::ExistingFile);
        sub->add_option("--seed", flags.seed, "RNG seed (ensembles: first seed)");
        sub->add_option("--users", flags.users, "number of users K");
        sub->add_option("--bins", flags.bins, "number of frequency bins N");
        sub->add_option("--trials", flags.trials, "ensemble size");
        sub->add_option("--trust-radius", flags.trust_radius, "per-bin trust radius (modified CRM)");
        sub->add_option("--line-search-points", flags.line_search_points);
        sub->add_option("--improvement-tol", flags.improvement_tol, "bits");
        sub->add_option("--max-outer-iter", flags.max_outer_iter);
        sub->add_option("--fd-mode", flags.fd_mode, "per_bin or batch")->check(CLI::IsMember({"per_bin", "batch"}));
        sub->add_option("--resolution", flags.resolution, "Stackelberg grid resolution");
        sub->add_option("--threads", flags.threads, "ensemble worker threads (0 = all cores)");
        sub->add_option("--set", flags.overrides, "extra config key=value, applied after --config");
        sub->add_option("--out", flags.out, "output path (ensemble: directory); stdout if omitted");
    };
    auto add_instance = [&](CLI::App* sub) {
        sub->add_option("--instance", flags.instance, "instance file written by `gen`")->check(CLI::ExistingFile);
    };

    std::vector<std::pair<CLI::App*, std::function<int(const Flags&)>>> commands;
    auto* gen = app.add_subcommand("gen", "draw a channel instance and write it");
    add_common(gen);
    commands.emplace_back(gen, cmd_gen);
    auto* ne = app.add_subcommand("solve-ne", "Nash equilibrium by iterative water-filling");
    add_common(ne);
    add_instance(ne);
    commands.emplace_back(ne, cmd_solve_ne);
    auto* cr = app.add_subcommand("crm", "conjecture-based rate maximization for user 1");
    add_common(cr);
    add_instance(cr);
    commands.emplace_back(cr, cmd_crm);
    auto* se = app.add_subcommand("se-grid", "Stackelberg grid search (N <= 4, K <= 3)");
    add_common(se);
    add_instance(se);
    commands.emplace_back(se, cmd_se_grid);
    auto* en = app.add_subcommand("ensemble", "seeded Monte Carlo comparison of CRM and IW");
    add_common(en);
    commands.emplace_back(en, cmd_ensemble);

    CLI11_PARSE(app, argc, argv);

    try {
        for (auto& [sub, run] : commands)
            if (sub->parsed())
                return run(flags);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
