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

#include "wfgame/instance.hpp"

#include <cmath>
#include <complex>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace wfgame {

namespace {

constexpr double min_direct_power = 1e-12;
// Seed stride between redraws; odd 64-bit golden-ratio constant.
constexpr std::uint64_t redraw_stride = 0x9E3779B97F4A7C15ULL;

void check_params(const ChannelModelParams& p)
{
    if (p.num_bins <= 0 || p.num_rays <= 0)
        throw std::invalid_argument("channel model: num_bins and num_rays must be positive");
    if (!(p.band_hz > 0) || !(p.rms_delay_s > 0) || !(p.direct_power > 0) || !(p.noise_psd > 0) ||
        !(p.budget_per_user > 0))
        throw std::invalid_argument("channel model: band, delay spread, direct power, noise and budget must be positive");
    // zero cross power is accepted: it yields a decoupled game
    if (!(p.cross_power >= 0))
        throw std::invalid_argument("channel model: cross_power must be non-negative");
}

}  // namespace

GameInstance::GameInstance(Index users, Index bins)
    : num_users(users),
      num_bins(bins),
      noise(Eigen::MatrixXd::Ones(users, bins)),
      cross_gain(Eigen::MatrixXd::Zero(users * users, bins)),
      budget(Eigen::VectorXd::Ones(users))
{
    if (users <= 0 || bins <= 0)
        throw std::invalid_argument("GameInstance: users and bins must be positive");
}

Eigen::MatrixXd GameInstance::coupling_matrix(Index bin) const
{
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(num_users, num_users);
    for (Index i = 0; i < num_users; ++i)
        for (Index j = 0; j < num_users; ++j)
            if (i != j)
                m(i, j) = gain(j, i, bin);
    return m;
}

DelayProfile exponential_delay_profile(const ChannelModelParams& params)
{
    const Index taps = params.num_rays;
    DelayProfile profile;
    profile.weight.resize(taps);
    for (Index l = 0; l < taps; ++l)
        profile.weight(l) = std::exp(-static_cast<double>(l));
    profile.weight /= profile.weight.sum();

    const Eigen::VectorXd index = Eigen::VectorXd::LinSpaced(taps, 0.0, static_cast<double>(taps - 1));
    const double mean = profile.weight.dot(index);
    const double var = profile.weight.dot(index.cwiseProduct(index)) - mean * mean;
    // a single tap has no spread; any spacing works
    const double spacing = var > 0 ? params.rms_delay_s / std::sqrt(var) : params.rms_delay_s;
    profile.delay_s = index * spacing;
    return profile;
}

Eigen::VectorXd channel_power_response(const Eigen::VectorXcd& taps, const DelayProfile& profile,
                                       const ChannelModelParams& params)
{
    const Index n_bins = params.num_bins;
    Eigen::VectorXd out(n_bins);
    const double bin_width = params.band_hz / static_cast<double>(n_bins);
    for (Index n = 0; n < n_bins; ++n) {
        const double f = (static_cast<double>(n) + 0.5) * bin_width;
        std::complex<double> h{0.0, 0.0};
        for (Index l = 0; l < taps.size(); ++l)
            h += taps(l) * std::polar(1.0, -2.0 * std::numbers::pi * f * profile.delay_s(l));
        out(n) = std::norm(h);
    }
    return out;
}

GameInstance generate_instance(const ChannelModelParams& params, Index num_users, std::uint64_t seed)
{
    check_params(params);
    if (num_users < 2)
        throw std::invalid_argument("generate_instance: need at least two users");

    const DelayProfile profile = exponential_delay_profile(params);
    const Index K = num_users;
    const Index N = params.num_bins;
    const Index L = params.num_rays;

    for (std::uint64_t attempt = 0;; ++attempt) {
        std::mt19937_64 rng(seed + attempt * redraw_stride);
        std::normal_distribution<double> normal(0.0, 1.0);

        // power[j*K + k] = |H_jk(f_n)|^2
        Eigen::MatrixXd power(K * K, N);
        Eigen::VectorXcd taps(L);
        for (Index j = 0; j < K; ++j) {
            for (Index k = 0; k < K; ++k) {
                const double total = (j == k) ? params.direct_power : params.cross_power;
                for (Index l = 0; l < L; ++l) {
                    const double scale = std::sqrt(total * profile.weight(l) / 2.0);
                    const double re = normal(rng);
                    const double im = normal(rng);
                    taps(l) = {scale * re, scale * im};
                }
                power.row(j * K + k) = channel_power_response(taps, profile, params).transpose();
            }
        }

        bool degenerate = false;
        for (Index k = 0; k < K; ++k)
            degenerate = degenerate || power.row(k * K + k).minCoeff() < min_direct_power;
        if (degenerate)
            continue;

        GameInstance inst(K, N);
        inst.seed = seed;
        inst.redraws = attempt;
        inst.budget.setConstant(params.budget_per_user);
        for (Index k = 0; k < K; ++k) {
            const auto direct = power.row(k * K + k).array();
            inst.noise.row(k) = params.noise_psd / direct;
            for (Index j = 0; j < K; ++j)
                if (j != k)
                    inst.gain(j, k) = power.row(j * K + k).array() / direct;
        }
        return inst;
    }
}

std::vector<std::string> validate_instance(const GameInstance& inst)
{
    std::vector<std::string> issues;
    const Index K = inst.num_users;
    const Index N = inst.num_bins;
    if (K <= 0 || N <= 0) {
        issues.push_back("num_users and num_bins must be positive");
        return issues;
    }
    if (inst.noise.rows() != K || inst.noise.cols() != N)
        issues.push_back("noise must be K x N");
    if (inst.cross_gain.rows() != K * K || inst.cross_gain.cols() != N)
        issues.push_back("cross_gain must be (K*K) x N");
    if (inst.budget.size() != K)
        issues.push_back("budget must have K entries");
    if (!issues.empty())
        return issues;

    for (Index k = 0; k < K; ++k)
        for (Index n = 0; n < N; ++n)
            if (!(inst.noise(k, n) > 0) || !std::isfinite(inst.noise(k, n)))
                issues.push_back("noise of user " + std::to_string(k) + " in bin " + std::to_string(n) +
                                 " must be positive and finite");
    for (Index j = 0; j < K; ++j) {
        for (Index k = 0; k < K; ++k) {
            for (Index n = 0; n < N; ++n) {
                const double a = inst.gain(j, k, n);
                if (j == k) {
                    if (a != 0.0)
                        issues.push_back("diagonal cross gain (" + std::to_string(j) + "," + std::to_string(k) +
                                         ") in bin " + std::to_string(n) + " must be zero");
                } else if (!(a >= 0) || !std::isfinite(a)) {
                    issues.push_back("cross gain (" + std::to_string(j) + "," + std::to_string(k) + ") in bin " +
                                     std::to_string(n) + " must be non-negative and finite");
                }
            }
        }
    }
    for (Index k = 0; k < K; ++k)
        if (!(inst.budget(k) > 0) || !std::isfinite(inst.budget(k)))
            issues.push_back("budget of user " + std::to_string(k) + " must be positive and finite");
    return issues;
}

void require_valid(const GameInstance& inst)
{
    const auto issues = validate_instance(inst);
    if (issues.empty())
        return;
    std::string msg = "invalid game instance:";
    for (const auto& s : issues)
        msg += "\n  " + s;
    throw std::invalid_argument(msg);
}

void write_instance(std::ostream& os, const GameInstance& inst)
{
    const auto old_precision = os.precision(std::numeric_limits<double>::max_digits10);
    auto write_block = [&os](const Eigen::MatrixXd& m) {
        for (Index r = 0; r < m.rows(); ++r) {
            for (Index c = 0; c < m.cols(); ++c)
                os << (c ? " " : "") << m(r, c);
            os << '\n';
        }
    };
    os << inst.num_users << ' ' << inst.num_bins << '\n';
    write_block(inst.noise);
    write_block(inst.cross_gain);
    write_block(inst.budget.transpose());
    os.precision(old_precision);
}

GameInstance read_instance(std::istream& is)
{
    Index K = 0;
    Index N = 0;
    if (!(is >> K >> N) || K <= 0 || N <= 0)
        throw std::runtime_error("instance file: bad header, expected 'K N'");
    GameInstance inst(K, N);
    auto read_block = [&is](Eigen::Ref<Eigen::MatrixXd> m, const char* what) {
        for (Index r = 0; r < m.rows(); ++r)
            for (Index c = 0; c < m.cols(); ++c)
                if (!(is >> m(r, c)))
                    throw std::runtime_error(std::string("instance file: truncated ") + what + " block");
    };
    read_block(inst.noise, "noise");
    read_block(inst.cross_gain, "cross gain");
    read_block(inst.budget, "budget");
    return inst;
}

void save_instance(const std::string& path, const GameInstance& inst)
{
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    write_instance(os, inst);
    if (!os)
        throw std::runtime_error("write to '" + path + "' failed");
}

GameInstance load_instance(const std::string& path)
{
    std::ifstream is(path);
    if (!is)
        throw std::runtime_error("cannot open '" + path + "' for reading");
    try {
        return read_instance(is);
    } catch (const std::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

}  // namespace wfgame
