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
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Dense>
#include <catch_amalgamated.hpp>

#include "qaoalab/annealer.hpp"
#include "qaoalab/error.hpp"
#include "qaoalab/graph.hpp"

using namespace qaoalab;
using Catch::Approx;

namespace {

// Dense full-basis pieces built from the graph directly (bit i of the index = vertex i).
Eigen::VectorXd dense_cost(const Graph& g) {
    const int n = g.n_vertices();
    Eigen::VectorXd c = Eigen::VectorXd::Zero(1 << n);
    for (int z = 0; z < (1 << n); ++z)
        for (const auto& e : g.edges())
            if (((z >> e.i) ^ (z >> e.j)) & 1) c[z] += e.w;
    return c;
}

Eigen::MatrixXd dense_mixer(int n) {
    const int dim = 1 << n;
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(dim, dim);
    for (int z = 0; z < dim; ++z)
        for (int j = 0; j < n; ++j) b(z ^ (1 << j), z) += 1.0;
    return b;
}

Eigen::MatrixXd dense_h(const Graph& g, double f) {
    return -(f * Eigen::MatrixXd(dense_cost(g).asDiagonal()) + (1 - f) * dense_mixer(g.n_vertices()));
}

// Orthonormal basis of the flip-symmetric subspace, one column per representative with the top bit clear.
Eigen::MatrixXd even_projector(int n) {
    const int dim = 1 << n, half = dim / 2;
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(dim, half);
    for (int z = 0; z < half; ++z) {
        q(z, z) = 1 / std::sqrt(2.0);
        q((dim - 1) ^ z, z) = 1 / std::sqrt(2.0);
    }
    return q;
}

Graph w3r(int n, std::uint64_t seed) { return assign_random_weights(generate_random_regular(n, 3, seed), seed + 5); }

// classical RK4 on i d/dt psi = H(t) psi with a linear ramp
Eigen::VectorXcd rk4_linear_ramp(const Graph& g, double total, double dt) {
    const int dim = 1 << g.n_vertices();
    Eigen::VectorXcd psi = Eigen::VectorXcd::Constant(dim, 1.0 / std::sqrt(double(dim)));
    const Eigen::MatrixXd c = dense_cost(g).asDiagonal(), b = dense_mixer(g.n_vertices());
    auto rhs = [&](double t, const Eigen::VectorXcd& v) -> Eigen::VectorXcd {
        const double f = t / total;
        Eigen::MatrixXd h = -(f * c + (1 - f) * b);
        return std::complex<double>(0, -1) * (h.cast<std::complex<double>>() * v);
    };
    const long steps = std::lround(total / dt);
    for (long k = 0; k < steps; ++k) {
        const double t = k * dt;
        auto k1 = rhs(t, psi);
        auto k2 = rhs(t + dt / 2, psi + dt / 2 * k1);
        auto k3 = rhs(t + dt / 2, psi + dt / 2 * k2);
        auto k4 = rhs(t + dt, psi + dt * k3);
        psi += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    return psi;
}

}  // namespace

TEST_CASE("schedules") {
    auto ramp = linear_ramp(8.0);
    CHECK(ramp.f(4.0) == Approx(0.5));
    for (double t = 0; t < 8; t += 0.5) CHECK(ramp.f(t + 0.5) >= ramp.f(t));

    auto one = qaoa_to_schedule({{0.6}, {0.2}});
    CHECK(one.total_time == Approx(0.8));
    REQUIRE(one.knots.size() == 3);
    CHECK(one.knots[1].first == Approx(0.4));
    CHECK(one.knots[1].second == Approx(0.75));
    CHECK_FALSE(one.clamped);

    auto flat = qaoa_to_schedule({{0.3, 0.3, 0.3}, {0.3, 0.3, 0.3}});
    for (std::size_t k = 1; k + 1 < flat.knots.size(); ++k) CHECK(flat.knots[k].second == Approx(0.5));
    CHECK(flat.total_time == Approx(1.8));

    auto negative = qaoa_to_schedule({{-0.2, 0.5}, {0.3, 0.1}});
    CHECK(negative.clamped);
    CHECK(negative.knots[1].second == 0.0);
    CHECK(qaoa_run_time({{-0.2, 0.5}, {0.3, 0.1}}) == Approx(1.1));
    CHECK_THROWS_AS(qaoa_to_schedule({{0.0}, {0.0}}), ParameterError);

    std::stringstream io;
    write_schedule(io, flat);
    auto back = read_schedule(io);
    CHECK(back.knots == flat.knots);
    std::stringstream bad("0 0\n1 0.5\n0.5 1\n");
    CHECK_THROWS_AS(read_schedule(bad), FormatError);
}

TEST_CASE("single edge ramp matches a dense RK4 integration") {
    const Graph g(2, {{0, 1, 1.0}});
    const DiagonalCost cost = build_diagonal_cost(g);
    const auto psi = evolve(cost, linear_ramp(10.0));
    const auto ref = rk4_linear_ramp(g, 10.0, 1e-4);
    const auto cut = brute_force_maxcut(g);
    double p_ref = 0.0;
    for (auto z : cut.optimal_strings) p_ref += std::norm(ref[z]);
    CHECK(std::abs(ground_state_population(psi, cut) - p_ref) < 1e-6);
    CHECK(std::abs(psi.norm() - 1.0) < 1e-8);

    // the reduced sector carries the same dynamics
    const auto reduced = evolve(parity_reduce(cost), linear_ramp(10.0));
    CHECK(std::abs(ground_state_population(reduced, cut) - p_ref) < 1e-6);
}

TEST_CASE("frozen f = 0 keeps |+> up to a phase") {
    const DiagonalCost cost = build_diagonal_cost(w3r(6, 1));
    StateVector s = init_plus_state(6);
    propagate(s, cost, 0.0, 3.7);
    Complex overlap{};
    const auto plus = init_plus_state(6);
    for (std::size_t z = 0; z < s.dimension(); ++z) overlap += std::conj(plus[z]) * s[z];
    CHECK(std::abs(overlap) == Approx(1.0).margin(1e-12));
    CHECK(std::arg(overlap) == Approx(std::remainder(6 * 3.7, 2 * std::numbers::pi)).margin(1e-9));
}

TEST_CASE("full-basis evolution does not leak into the odd sector") {
    const DiagonalCost cost = build_diagonal_cost(w3r(8, 3));
    const auto psi = evolve(cost, linear_ramp(5.0));
    double odd = 0.0;
    for (std::size_t z = 0; z < psi.dimension(); ++z) odd += std::norm(psi[z] - psi[psi.dimension() - 1 - z]) / 4;
    CHECK(odd < 1e-20);
    const auto reduced = evolve(parity_reduce(cost), linear_ramp(5.0));
    const auto cut = brute_force_maxcut(w3r(8, 3));
    CHECK(std::abs(ground_state_population(psi, cut) - ground_state_population(reduced, cut)) < 1e-10);
}

TEST_CASE("halving the step barely moves p_gs") {
    const Graph g = w3r(8, 9);
    const DiagonalCost cost = parity_reduce(build_diagonal_cost(g));
    const auto cut = brute_force_maxcut(g);
    const double a = ground_state_population(evolve(cost, linear_ramp(20.0)), cut);
    const double b = ground_state_population(evolve(cost, linear_ramp(20.0), {0.005}), cut);
    CHECK(std::abs(a - b) < 1e-6);
}

TEST_CASE("spectrum at the endpoints") {
    const Graph g = w3r(8, 2);
    const DiagonalCost full = build_diagonal_cost(g), reduced = parity_reduce(full);
    auto s0 = spectrum(reduced, 0.0, 3);
    CHECK(s0.eigenvalues[0] == Approx(-8.0).margin(1e-10));
    CHECK(s0.eigenvalues[1] - s0.eigenvalues[0] == Approx(4.0).margin(1e-10));
    auto s0full = spectrum(full, 0.0, 2);
    CHECK(s0full.eigenvalues[1] - s0full.eigenvalues[0] == Approx(2.0).margin(1e-10));

    const Graph u = generate_random_regular(8, 3, 4);
    const auto cut = brute_force_maxcut(u);
    const int degeneracy = static_cast<int>(cut.optimal_strings.size()) / 2;
    auto s1 = spectrum(parity_reduce(build_diagonal_cost(u)), 1.0, degeneracy + 1);
    for (int i = 0; i < degeneracy; ++i) CHECK(s1.eigenvalues[i] == Approx(-cut.c_max).margin(1e-10));
    CHECK(s1.eigenvalues[degeneracy] > -cut.c_max + 0.5);
}

TEST_CASE("reduced spectrum equals the even block of the full Hamiltonian") {
    for (int n : {8, 10}) {
        const Graph g = w3r(n, 11 + n);
        const Eigen::MatrixXd q = even_projector(n);
        for (double f : {0.2, 0.55, 0.9}) {
            Eigen::MatrixXd block = q.transpose() * dense_h(g, f) * q;
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> oracle(block);
            const int k = 4;
            auto slice = spectrum(parity_reduce(build_diagonal_cost(g)), f, k, true);
            for (int i = 0; i < k; ++i) CHECK(std::abs(slice.eigenvalues[i] - oracle.eigenvalues()[i]) < 1e-9);
            // ground vectors agree up to sign
            Eigen::Map<const Eigen::VectorXd> v(slice.eigenvectors[0].data(), q.cols());
            CHECK(std::abs(v.dot(oracle.eigenvectors().col(0))) == Approx(1.0).margin(1e-8));
        }
    }
}

TEST_CASE("min_gap of a single edge") {
    const Graph g(2, {{0, 1, 1.0}});
    // even sector: H = -[f diag(0, 1) + 2 (1 - f) sigma_x], gap sqrt(f^2 + 16 (1 - f)^2), minimal at f = 16/17
    auto gap = min_gap(parity_reduce(build_diagonal_cost(g)), 0.01);
    CHECK(gap.delta_min == Approx(std::sqrt(272.0) / 17).epsilon(1e-9));
    CHECK(gap.s_star == Approx(16.0 / 17).margin(1e-6));
    CHECK(gap.endpoint_gap == Approx(1.0).margin(1e-12));
}

TEST_CASE("min_gap refinement never exceeds the coarse grid") {
    const Graph g = w3r(8, 6);
    const DiagonalCost cost = parity_reduce(build_diagonal_cost(g));
    auto gap = min_gap(cost, 0.02);
    double coarse = 1e9;
    for (int i = 0; i * 0.02 <= 0.98 + 1e-12; ++i) {
        auto sl = spectrum(cost, i * 0.02, 2);
        coarse = std::min(coarse, sl.eigenvalues[1] - sl.eigenvalues[0]);
    }
    CHECK(gap.delta_min <= coarse);
    auto at = spectrum(cost, gap.s_star, 2);
    CHECK(at.eigenvalues[1] - at.eigenvalues[0] == Approx(gap.delta_min).margin(1e-9));
    auto fine = min_gap(cost, 0.01);
    CHECK(std::abs(fine.delta_min - gap.delta_min) <= 0.01 * gap.delta_min);
}

TEST_CASE("slow ramp on a large-gap instance stays adiabatic") {
    // first 8-vertex u3R instance with a comfortable gap
    Graph g;
    GapResult gap;
    for (std::uint64_t seed = 1;; ++seed) {
        g = generate_random_regular(8, 3, seed);
        gap = min_gap(parity_reduce(build_diagonal_cost(g)), 0.01);
        if (gap.delta_min >= 0.2 && brute_force_maxcut(g).optimal_strings.size() == 2) break;
        REQUIRE(seed < 200);
    }
    // dense oracle for the gap at the reported location
    const Eigen::MatrixXd q = even_projector(8);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> oracle(Eigen::MatrixXd(q.transpose() * dense_h(g, gap.s_star) * q));
    CHECK(oracle.eigenvalues()[1] - oracle.eigenvalues()[0] == Approx(gap.delta_min).margin(1e-9));

    const DiagonalCost cost = parity_reduce(build_diagonal_cost(g));
    const auto cut = brute_force_maxcut(g);
    CHECK(ground_state_population(evolve(cost, linear_ramp(1000.0)), cut) >= 0.99);

    std::vector<double> times;
    for (int i = 0; i <= 10; ++i) times.push_back(20.0 * i);
    auto pops = instantaneous_populations(cost, linear_ramp(200.0), times, 2);
    REQUIRE(pops.size() == times.size());
    CHECK(pops[0][0] == Approx(1.0).margin(1e-12));
    for (const auto& row : pops) CHECK(row[0] > 0.99);
}

TEST_CASE("populations over all levels sum to one") {
    const DiagonalCost cost = parity_reduce(build_diagonal_cost(w3r(6, 8)));
    std::vector<double> times{0.0, 0.7, 1.9, 3.0};
    auto pops = instantaneous_populations(cost, linear_ramp(3.0), times, static_cast<int>(cost.dimension()));
    for (const auto& row : pops) {
        double total = 0.0;
        for (double x : row) {
            CHECK(x >= 0.0);
            CHECK(x <= 1.0 + 1e-12);
            total += x;
        }
        CHECK(total == Approx(1.0).margin(1e-8));
    }
}

TEST_CASE("adiabaticity measure") {
    const DiagonalCost reduced = parity_reduce(build_diagonal_cost(w3r(8, 12)));
    auto a = adiabaticity_measure(reduced, 0.6, 3, 10.0);
    auto b = adiabaticity_measure(reduced, 0.6, 3, 1000.0);
    for (int i = 0; i < 3; ++i) CHECK(a[i] == Approx(100.0 * b[i]).epsilon(1e-12));

    // full basis: odd-sector levels decouple from the even ground state
    const DiagonalCost full = build_diagonal_cost(w3r(6, 13));
    const int k = 12;
    auto measure = adiabaticity_measure(full, 0.5, k, 1.0);
    auto slice = spectrum(full, 0.5, k + 1, true);
    const std::size_t dim = full.dimension();
    int odd_levels = 0;
    for (int i = 1; i <= k; ++i) {
        double parity = 0.0;
        for (std::size_t z = 0; z < dim; ++z) parity += slice.eigenvectors[i][z] * slice.eigenvectors[i][dim - 1 - z];
        if (parity < -0.5) {
            ++odd_levels;
            CHECK(measure[i - 1] < 1e-10);
        }
    }
    CHECK(odd_levels > 0);
}

TEST_CASE("Landau-Zener fit") {
    std::vector<std::pair<double, double>> samples;
    for (double t : {5.0, 10.0, 20.0, 40.0, 80.0}) samples.emplace_back(t, lz_prediction(2.0, t, 0.3));
    auto fit = lz_fit(samples, 0.3);
    CHECK(fit.c == Approx(2.0).epsilon(1e-6));
    CHECK(fit.residual < 1e-9);
    CHECK(fit.n_used == 5);
    auto window = lz_fit(samples, 0.3, 15.0);
    CHECK(window.n_used == 3);
    samples.emplace_back(2.0, 0.9);
    CHECK(lz_fit(samples, 0.3).residual > 1e-3);
}

TEST_CASE("subdivided QAOA approaches its converted schedule") {
    const Graph g = w3r(6, 21);
    const DiagonalCost cost = build_diagonal_cost(g);
    const QaoaParams base{{0.3, 0.5}, {0.4, 0.2}};
    const int m = 40;
    QaoaParams fine;
    for (int i = 0; i < base.p(); ++i)
        for (int r = 0; r < m; ++r) {
            fine.gammas.push_back(base.gammas[i] / m);
            fine.betas.push_back(base.betas[i] / m);
        }
    // H_QA carries the opposite sign, so the annealed state is the conjugate of the circuit state
    const auto circuit = qaoa_state(cost, fine);
    const auto annealed = evolve(cost, qaoa_to_schedule(fine));
    Complex overlap{};
    for (std::size_t z = 0; z < circuit.dimension(); ++z) overlap += circuit[z] * annealed[z];
    CHECK(std::norm(overlap) > 0.999);
}

TEST_CASE("capacity and argument checks") {
    const DiagonalCost cost = build_diagonal_cost(generate_random_regular(18, 3, 1));
    CHECK_THROWS_AS(spectrum(cost, 0.5, 2), CapacityError);
    const DiagonalCost small = build_diagonal_cost(make_ring(4));
    CHECK_THROWS_AS(spectrum(small, 1.5, 2), ParameterError);
    CHECK_THROWS_AS(spectrum(small, 0.5, 0), ParameterError);
    std::vector<double> bad{2.0, 1.0};
    CHECK_THROWS_AS(evolve(small, linear_ramp(3.0), {}, bad), ParameterError);
}
