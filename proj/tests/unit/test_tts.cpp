// Copyright 2026 The qaoalab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <limits>
#include <random>

#include <catch_amalgamated.hpp>

#include "qaoalab/error.hpp"
#include "qaoalab/tts.hpp"

using namespace qaoalab;
using Catch::Approx;

TEST_CASE("tts formula and edges") {
    CHECK(tts(10.0, 0.5) == Approx(66.43856189774724).epsilon(1e-12));
    CHECK(tts(7.0, 0.99) == Approx(7.0).epsilon(1e-12));
    CHECK(tts(3.0, 1.0) == 3.0);
    CHECK(tts(3.0, 1.0 - 1e-13) == 3.0);
    CHECK(std::isinf(tts(3.0, 0.0)));
    CHECK_THROWS_AS(tts(3.0, 1.5), ParameterError);
    CHECK_THROWS_AS(tts(0.0, 0.5), ParameterError);
    double prev = std::numeric_limits<double>::infinity();
    for (double p = 0.01; p < 1.0; p += 0.01) {
        const double v = tts(5.0, p);
        CHECK(v < prev);
        prev = v;
        CHECK(tts(10.0, p) == Approx(2.0 * v).epsilon(1e-14));
    }
}

TEST_CASE("records and optimal tts") {
    LevelResult level;
    level.p = 2;
    level.best_params = {{0.5, -0.25}, {0.25, 0.125}};
    level.p_gs = 0.3;
    auto r = qaoa_record(level);
    CHECK(r.run_time == Approx(1.125));
    CHECK(r.run_time == qaoa_run_time(level.best_params));
    CHECK(r.control == 2.0);

    std::vector<TtsRecord> recs{qa_record(2.0, 0.1), qa_record(4.0, 0.0), qa_record(8.0, 0.6)};
    auto one = optimal_tts(std::span(recs).first(1));
    CHECK(one.tts == recs[0].tts);
    auto all = optimal_tts(recs);
    CHECK(all.tts <= one.tts);
    CHECK(all.censored == 1);
    CHECK(all.control == (recs[0].tts < recs[2].tts ? 2.0 : 8.0));
    std::vector<TtsRecord> censored{qa_record(4.0, 0.0)};
    CHECK_FALSE(optimal_tts(censored).found);
}

TEST_CASE("QA scan uses the annealer") {
    const Graph g = generate_random_regular(6, 3, 3);
    const auto cut = brute_force_maxcut(g);
    const DiagonalCost cost = parity_reduce(build_diagonal_cost(g));
    const auto grid = log_spaced(2.0, 200.0, 5);
    CHECK(grid.front() == 2.0);
    CHECK(grid.back() == 200.0);
    CHECK(grid[2] == Approx(20.0));
    auto recs = qa_tts_scan(cost, cut, grid);
    REQUIRE(recs.size() == 5);
    for (std::size_t k = 0; k < recs.size(); ++k) {
        CHECK(recs[k].p_gs == Approx(ground_state_population(evolve(cost, linear_ramp(grid[k])), cut)));
        CHECK(recs[k].run_time == grid[k]);
    }
}

TEST_CASE("scaling fits") {
    std::vector<std::pair<double, double>> exp_pts, str_pts;
    for (int p = 1; p <= 12; ++p) {
        exp_pts.emplace_back(p, 0.3 * std::exp(-p / 2.5));
        str_pts.emplace_back(p, 0.4 * std::exp(-std::sqrt(p / 0.7)));
    }
    auto e = fit_scaling(exp_pts, ScalingModel::Exponential);
    CHECK(e.p0 == Approx(2.5).epsilon(1e-9));
    CHECK(e.prefactor == Approx(0.3).epsilon(1e-9));
    CHECK(e.residual < 1e-10);
    auto s = fit_scaling(str_pts, ScalingModel::Stretched);
    CHECK(s.p0 == Approx(0.7).epsilon(1e-9));
    CHECK(fit_scaling(str_pts, ScalingModel::Exponential).residual > s.residual + 1e-3);
    CHECK(fit_scaling(exp_pts, ScalingModel::Stretched).residual > e.residual + 1e-3);

    auto shuffled = exp_pts;
    std::shuffle(shuffled.begin(), shuffled.end(), std::mt19937_64(4));
    auto e2 = fit_scaling(shuffled, ScalingModel::Exponential);
    CHECK(e2.p0 == e.p0);
    CHECK(e2.residual == e.residual);

    exp_pts.emplace_back(13, 0.0);
    exp_pts.emplace_back(14, 1e-13);
    auto dropped = fit_scaling(exp_pts, ScalingModel::Exponential);
    CHECK(dropped.n_dropped == 2);
    CHECK(dropped.n_used == 12);
    std::vector<std::pair<double, double>> single{{1, 0.2}};
    CHECK_THROWS_AS(fit_scaling(single, ScalingModel::Exponential), ParameterError);
}

TEST_CASE("log correlation") {
    std::vector<double> xs, ys, noise;
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.1, 100.0);
    for (int k = 0; k < 2000; ++k) {
        xs.push_back(u(rng));
        ys.push_back(2.0 * xs.back());
        noise.push_back(u(rng));
    }
    CHECK(log_correlation(xs, ys) == Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(log_correlation(xs, noise)) < 0.1);
    xs.push_back(std::numeric_limits<double>::infinity());
    ys.push_back(5.0);
    CHECK(log_correlation(xs, ys) == Approx(1.0).epsilon(1e-12));
}
