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
#include <filesystem>
#include <numbers>
#include <random>

#include <Eigen/Dense>
#include <catch_amalgamated.hpp>

#include "qaoalab/error.hpp"
#include "qaoalab/graph.hpp"
#include "qaoalab/statevector.hpp"

using namespace qaoalab;
using Catch::Approx;
using std::numbers::pi;

namespace {

QaoaParams random_params(int p, std::mt19937_64& rng, double scale = 1.0) {
    std::uniform_real_distribution<double> unit(-scale, scale);
    QaoaParams params;
    for (int k = 0; k < p; ++k) {
        params.gammas.push_back(unit(rng));
        params.betas.push_back(unit(rng));
    }
    return params;
}

Graph random_weighted_regular(int n, std::uint64_t seed) {
    return assign_random_weights(generate_random_regular(n, 3, seed), seed + 1);
}

double state_distance(const StateVector& a, const StateVector& b) {
    double d = 0.0;
    for (std::size_t z = 0; z < a.dimension(); ++z) d = std::max(d, std::abs(a[z] - b[z]));
    return d;
}

double objective(const DiagonalCost& cost, const QaoaParams& params) {
    return expectation(qaoa_state(cost, params), cost).mean;
}

// Central differences, step h.
std::vector<double> finite_difference_gradient(const DiagonalCost& cost, const QaoaParams& params, double h) {
    auto x = params.flat();
    std::vector<double> grad(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
        auto xp = x, xm = x;
        xp[k] += h;
        xm[k] -= h;
        grad[k] = (objective(cost, QaoaParams::from_flat(xp)) - objective(cost, QaoaParams::from_flat(xm))) / (2 * h);
    }
    return grad;
}

double max_relative_error(const std::vector<double>& a, const std::vector<double>& b) {
    double scale = 0.0, err = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        scale = std::max(scale, std::abs(b[k]));
        err = std::max(err, std::abs(a[k] - b[k]));
    }
    return err / std::max(scale, 1e-3);
}

}  // namespace

TEST_CASE("build_diagonal_cost", "[statevector]") {
    SECTION("single unit edge") {
        auto cost = build_diagonal_cost(Graph(2, {{0, 1, 1.0}}));
        REQUIRE(cost.values().size() == 4);
        CHECK(cost[0] == 0.0);
        CHECK(cost[1] == 1.0);
        CHECK(cost[2] == 1.0);
        CHECK(cost[3] == 0.0);
    }
    SECTION("matches cut_value and flip symmetry") {
        Graph g = random_weighted_regular(10, 3);
        auto cost = build_diagonal_cost(g);
        std::mt19937_64 rng(5);
        std::uniform_int_distribution<Bitstring> pick(0, 1023);
        for (int k = 0; k < 100; ++k) {
            const Bitstring z = pick(rng);
            REQUIRE(cost[z] == Approx(cut_value(g, z)).margin(1e-12));
        }
        Graph g8 = random_weighted_regular(8, 9);
        auto c8 = build_diagonal_cost(g8);
        for (Bitstring z = 0; z < 256; ++z) REQUIRE(c8[z] == Approx(c8[flip(z, 8)]).margin(1e-12));
    }
    SECTION("cap") { CHECK_THROWS_AS(build_diagonal_cost(generate_random_regular(26, 3, 1)), CapacityError); }
}

TEST_CASE("plus state", "[statevector]") {
    auto s1 = init_plus_state(1);
    CHECK(s1[0].real() == Approx(1 / std::sqrt(2.0)));
    CHECK(s1[1].real() == Approx(1 / std::sqrt(2.0)));
    Graph g = random_weighted_regular(8, 2);
    auto cost = build_diagonal_cost(g);
    auto s = init_plus_state(8);
    CHECK(s.norm() == Approx(1.0).margin(1e-14));
    CHECK(expectation(s, cost).mean == Approx(g.total_weight() / 2).margin(1e-12));
}

TEST_CASE("phase separator", "[statevector]") {
    Graph g = generate_random_regular(8, 3, 4);
    auto cost = build_diagonal_cost(g);
    std::mt19937_64 rng(1);
    auto params = random_params(3, rng);
    auto s = qaoa_state(cost, params);

    auto t = s;
    apply_phase_separator(t, cost, 0.0);
    CHECK(state_distance(s, t) == 0.0);

    apply_phase_separator(t, cost, 0.77);
    apply_phase_separator(t, cost, -0.77);
    CHECK(state_distance(s, t) < 1e-12);

    // integer spectrum: gamma and gamma + 2 pi coincide
    auto u = s, v = s;
    apply_phase_separator(u, cost, 0.3);
    apply_phase_separator(v, cost, 0.3 + 2 * pi);
    CHECK(state_distance(u, v) < 1e-12);
}

TEST_CASE("mixer", "[statevector]") {
    std::mt19937_64 rng(8);
    Graph g = random_weighted_regular(4, 6);
    auto cost = build_diagonal_cost(g);
    auto s = qaoa_state(cost, random_params(2, rng));

    SECTION("beta = 0 is the identity") {
        auto t = s;
        apply_mixer(t, 0.0);
        CHECK(state_distance(s, t) == 0.0);
    }
    SECTION("beta = pi/2 flips every bit with phase (-i)^N") {
        auto t = s;
        apply_mixer(t, pi / 2);
        const Complex phase = std::pow(Complex(0, -1), 4);
        for (Bitstring z = 0; z < 16; ++z) REQUIRE(std::abs(t[flip(z, 4)] - phase * s[z]) < 1e-12);
    }
    SECTION("agrees with dense matrix exponential") {
        // H_B assembled densely, exponentiated through its eigendecomposition
        Eigen::MatrixXd hb = Eigen::MatrixXd::Zero(16, 16);
        for (int z = 0; z < 16; ++z)
            for (int j = 0; j < 4; ++j) hb(z ^ (1 << j), z) += 1.0;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hb);
        const double beta = 0.613;
        Eigen::VectorXcd phases = (eig.eigenvalues().cast<Complex>() * Complex(0, -beta)).array().exp();
        Eigen::MatrixXcd u = eig.eigenvectors().cast<Complex>() * phases.asDiagonal() *
                             eig.eigenvectors().transpose().cast<Complex>();
        Eigen::VectorXcd in(16);
        for (int z = 0; z < 16; ++z) in(z) = s[z];
        Eigen::VectorXcd expected = u * in;
        auto t = s;
        apply_mixer(t, beta);
        for (int z = 0; z < 16; ++z) REQUIRE(std::abs(t[z] - expected(z)) < 1e-10);
    }
}

TEST_CASE("qaoa_state", "[statevector]") {
    SECTION("zero angles give |+>") {
        Graph g = generate_random_regular(6, 3, 2);
        auto s = qaoa_state(g, {{0.0}, {0.0}});
        CHECK(state_distance(s, init_plus_state(6)) < 1e-15);
    }
    SECTION("time reversal conjugates the state") {
        std::mt19937_64 rng(4);
        Graph g = random_weighted_regular(8, 5);
        auto params = random_params(3, rng);
        QaoaParams reversed{{}, {}};
        for (double x : params.gammas) reversed.gammas.push_back(-x);
        for (double x : params.betas) reversed.betas.push_back(-x);
        auto a = qaoa_state(g, params), b = qaoa_state(g, reversed);
        for (std::size_t z = 0; z < a.dimension(); ++z) REQUIRE(std::abs(std::conj(a[z]) - b[z]) < 1e-12);
    }
    SECTION("4-ring at the p=1 optimum gives F = 3") {
        auto cost = build_diagonal_cost(make_ring(4));
        // Per-edge value on a triangle-free 2-regular graph is 1/2 + sin(4 beta) sin(2 gamma) / 4
        // up to the sign convention of beta; one of the two branches hits 3/4 per edge.
        const double f_plus = objective(cost, {{pi / 4}, {pi / 8}});
        const double f_minus = objective(cost, {{pi / 4}, {-pi / 8}});
        CHECK(std::max(f_plus, f_minus) == Approx(3.0).margin(1e-12));
        CHECK(std::min(f_plus, f_minus) == Approx(1.0).margin(1e-12));
    }
    SECTION("invalid params") {
        Graph g = make_ring(4);
        CHECK_THROWS_AS(qaoa_state(g, {{}, {}}), ParameterError);
        CHECK_THROWS_AS(qaoa_state(g, {{0.1}, {0.1, 0.2}}), ParameterError);
        CHECK_THROWS_AS(qaoa_state(g, {{NAN}, {0.1}}), ParameterError);
    }
}

TEST_CASE("expectation", "[statevector]") {
    Graph g = random_weighted_regular(6, 1);
    auto cost = build_diagonal_cost(g);
    for (Bitstring z : {Bitstring{0}, Bitstring{5}, Bitstring{42}}) {
        auto m = expectation(basis_state(6, z), cost);
        CHECK(m.mean == cost[z]);
        CHECK(m.variance == Approx(0.0).margin(1e-12));
    }

    // sample mean of cut values within 3 standard errors
    std::mt19937_64 rng(12);
    auto s = qaoa_state(cost, random_params(2, rng));
    auto m = expectation(s, cost);
    const std::size_t shots = 20000;
    auto samples = sample_measurements(s, shots, 99);
    double mean = 0.0;
    for (Bitstring z : samples) mean += cut_value(g, z);
    mean /= double(shots);
    CHECK(std::abs(mean - m.mean) < 3.0 * std::sqrt(m.variance / double(shots)));
}

TEST_CASE("analytic gradient", "[statevector][gradient]") {
    SECTION("zero angles: gamma components vanish") {
        Graph g = random_weighted_regular(8, 21);
        auto cost = build_diagonal_cost(g);
        QaoaParams zero{{0, 0, 0}, {0, 0, 0}};
        auto grad = gradient(g, zero);
        auto fd = finite_difference_gradient(cost, zero, 1e-6);
        for (int k = 0; k < 3; ++k) CHECK(std::abs(grad[k]) < 1e-12);
        for (std::size_t k = 0; k < grad.size(); ++k) CHECK(grad[k] == Approx(fd[k]).margin(1e-8));
    }
    SECTION("random params, N=10, p=5") {
        std::mt19937_64 rng(77);
        for (int trial = 0; trial < 5; ++trial) {
            Graph g = random_weighted_regular(10, 100 + trial);
            auto cost = build_diagonal_cost(g);
            auto params = random_params(5, rng, 1.5);
            auto grad = gradient(g, params);
            auto fd = finite_difference_gradient(cost, params, 1e-6);
            REQUIRE(max_relative_error(grad, fd) < 1e-5);
            auto reduced = gradient(g, params, Basis::ParityPositive);
            REQUIRE(max_relative_error(reduced, grad) < 1e-10);
        }
    }
    SECTION("buffer length checked") {
        QaoaSimulator sim(build_diagonal_cost(make_ring(4)));
        std::vector<double> wrong(3);
        CHECK_THROWS_AS(sim.value_and_gradient({{0.1, 0.2}, {0.1, 0.2}}, wrong), ParameterError);
    }
}

TEST_CASE("ground state population", "[statevector]") {
    Graph ring = make_ring(4);
    auto cr = brute_force_maxcut(ring);
    CHECK(ground_state_population(init_plus_state(4), cr) == Approx(0.125));
    CHECK(ground_state_population(basis_state(4, parse_bitstring("0101")), cr) == Approx(1.0));
    CHECK(ground_state_population(basis_state(4, parse_bitstring("0011")), cr) == 0.0);
}

TEST_CASE("sample_measurements", "[statevector]") {
    auto samples = sample_measurements(basis_state(5, 13), 1000, 3);
    for (Bitstring z : samples) REQUIRE(z == 13);

    auto coin = sample_measurements(init_plus_state(1), 100000, 4);
    double ones = 0.0;
    for (Bitstring z : coin) ones += double(z);
    CHECK(ones / 100000.0 == Approx(0.5).margin(0.01));

    CHECK(sample_measurements(init_plus_state(6), 50, 8) == sample_measurements(init_plus_state(6), 50, 8));
}

TEST_CASE("parity-reduced simulation", "[statevector][parity]") {
    std::mt19937_64 rng(31);
    Graph g = random_weighted_regular(10, 41);
    auto full = build_diagonal_cost(g);
    auto reduced = parity_reduce(full);
    REQUIRE(reduced.dimension() == 512);
    CHECK_THROWS_AS(parity_reduce(reduced), BasisMismatch);

    auto params = random_params(4, rng, 2.0);
    auto s_full = qaoa_state(full, params);
    auto s_red = qaoa_state(reduced, params);
    CHECK(std::abs(expectation(s_full, full).mean - expectation(s_red, reduced).mean) < 1e-10);
    auto cr = brute_force_maxcut(g);
    CHECK(std::abs(ground_state_population(s_full, cr) - ground_state_population(s_red, cr)) < 1e-10);
    CHECK(state_distance(lift(s_red), s_full) < 1e-12);
    CHECK(state_distance(parity_reduce(s_full), s_red) < 1e-12);

    auto mismatched = init_plus_state(10, Basis::Full);
    CHECK_THROWS_AS(apply_phase_separator(mismatched, reduced, 0.1), BasisMismatch);
    CHECK_THROWS_AS(lift(s_full), BasisMismatch);
}

TEST_CASE("norm preserved over many layers", "[statevector]") {
    std::mt19937_64 rng(2);
    Graph g = random_weighted_regular(8, 3);
    auto cost = build_diagonal_cost(g);
    auto s = init_plus_state(8);
    std::uniform_real_distribution<double> angle(-3.0, 3.0);
    for (int k = 0; k < 1000; ++k) {
        apply_phase_separator(s, cost, angle(rng));
        apply_mixer(s, angle(rng));
    }
    CHECK(std::abs(s.norm() - 1.0) < 1e-10);
}

TEST_CASE("state dump round trip", "[statevector][io]") {
    std::mt19937_64 rng(6);
    auto cost = parity_reduce(build_diagonal_cost(random_weighted_regular(6, 2)));
    auto s = qaoa_state(cost, random_params(2, rng));
    const auto path = std::filesystem::temp_directory_path() / "qaoalab_state_test.bin";
    write_state(path.string(), s);
    REQUIRE(std::filesystem::file_size(path) == 16 + 32 * 16);
    auto back = read_state(path.string());
    CHECK(back.basis() == Basis::ParityPositive);
    CHECK(state_distance(back, s) == 0.0);
    std::filesystem::remove(path);
}
