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

#include "qaoalab/statevector.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>

#include "qaoalab/error.hpp"

namespace qaoalab {

static_assert(std::endian::native == std::endian::little, "state dump assumes a little-endian host");

std::string to_string(Basis basis) { return basis == Basis::Full ? "full" : "parity_positive"; }

void QaoaParams::validate() const {
    if (gammas.empty()) throw ParameterError("QAOA level p must be >= 1");
    if (gammas.size() != betas.size()) throw ParameterError("gammas and betas differ in length");
    auto finite = [](double x) { return std::isfinite(x); };
    if (!std::all_of(gammas.begin(), gammas.end(), finite) || !std::all_of(betas.begin(), betas.end(), finite))
        throw ParameterError("QAOA angles must be finite");
}

std::vector<double> QaoaParams::flat() const {
    std::vector<double> x(gammas);
    x.insert(x.end(), betas.begin(), betas.end());
    return x;
}

QaoaParams QaoaParams::from_flat(std::span<const double> x) {
    if (x.size() % 2 != 0) throw ParameterError("flat parameter vector must have even length");
    const std::size_t p = x.size() / 2;
    return {{x.begin(), x.begin() + p}, {x.begin() + p, x.end()}};
}

std::size_t basis_dimension(int n_qubits, Basis basis) {
    if (n_qubits < 1 || n_qubits > 62) throw ParameterError("qubit count out of range");
    return std::size_t{1} << (basis == Basis::Full ? n_qubits : n_qubits - 1);
}

DiagonalCost::DiagonalCost(int n_qubits, Basis basis, std::vector<double> values)
    : n_qubits_(n_qubits), basis_(basis), values_(std::move(values)) {
    if (values_.size() != basis_dimension(n_qubits_, basis_)) throw ParameterError("cost vector has wrong length");
}

DiagonalCost build_diagonal_cost(const Graph& g, int cap) {
    const int n = g.n_vertices();
    if (n > cap) throw CapacityError("statevector limited to " + std::to_string(cap) + " qubits");

    // lower[v] = sum of weights to neighbours u < v, upper[v] likewise for u > v
    std::vector<std::vector<std::pair<int, double>>> lower(n);
    std::vector<double> upper(n, 0.0);
    for (const auto& e : g.edges()) {
        lower[e.j].push_back({e.i, e.w});
        upper[e.i] += e.w;
    }

    // Grow the table one vertex at a time: strings below 2^v have vertices >= v at 0,
    // so setting vertex v cuts every edge to a higher vertex and toggles edges to lower ones.
    std::vector<double> values(std::size_t{1} << n, 0.0);
    for (int v = 0; v < n; ++v) {
        const std::size_t half = std::size_t{1} << v;
        for (std::size_t z = 0; z < half; ++z) {
            double delta = upper[v];
            for (const auto& [u, w] : lower[v]) delta += ((z >> u) & 1U) ? -w : w;
            values[z | half] = values[z] + delta;
        }
    }
    return DiagonalCost(n, Basis::Full, std::move(values));
}

DiagonalCost parity_reduce(const DiagonalCost& cost) {
    if (cost.basis() != Basis::Full) throw BasisMismatch("cost is already parity-reduced");
    const std::size_t dim = basis_dimension(cost.n_qubits(), Basis::ParityPositive);
    std::vector<double> values(cost.values().begin(), cost.values().begin() + dim);
    return DiagonalCost(cost.n_qubits(), Basis::ParityPositive, std::move(values));
}

StateVector::StateVector(int n_qubits, Basis basis, std::vector<Complex> amplitudes)
    : n_qubits_(n_qubits), basis_(basis), amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() != basis_dimension(n_qubits_, basis_))
        throw ParameterError("amplitude vector has wrong length");
}

double StateVector::norm() const {
    double total = 0.0;
    for (const auto& a : amplitudes_) total += std::norm(a);
    return std::sqrt(total);
}

std::vector<std::uint64_t> mixer_flip_masks(int n_qubits, Basis basis) {
    std::vector<std::uint64_t> masks;
    const int free_bits = basis == Basis::Full ? n_qubits : n_qubits - 1;
    for (int j = 0; j < free_bits; ++j) masks.push_back(std::uint64_t{1} << j);
    // X on the last qubit equals the product of the others inside the P = +1 sector
    if (basis == Basis::ParityPositive) masks.push_back((std::uint64_t{1} << free_bits) - 1);
    return masks;
}

StateVector init_plus_state(int n_qubits, Basis basis) {
    const std::size_t dim = basis_dimension(n_qubits, basis);
    return StateVector(n_qubits, basis, std::vector<Complex>(dim, Complex(1.0 / std::sqrt(double(dim)), 0.0)));
}

StateVector basis_state(int n_qubits, Bitstring z, Basis basis) {
    const std::size_t dim = basis_dimension(n_qubits, basis);
    std::vector<Complex> amps(dim);
    if (basis == Basis::Full) {
        if (z >= dim) throw ParameterError("basis index out of range");
        amps[z] = 1.0;
    } else {
        // only the symmetric combination exists in the reduced sector
        const Bitstring rep = (z >> (n_qubits - 1)) & 1U ? flip(z, n_qubits) : z;
        amps[rep] = 1.0;
    }
    return StateVector(n_qubits, basis, std::move(amps));
}

void apply_phase_separator(StateVector& s, const DiagonalCost& cost, double gamma) {
    if (s.basis() != cost.basis() || s.n_qubits() != cost.n_qubits())
        throw BasisMismatch("state and cost live in different bases");
    auto amps = s.amplitudes();
    const auto values = cost.values();
    for (std::size_t z = 0; z < amps.size(); ++z) {
        const double angle = -gamma * values[z];
        amps[z] *= Complex(std::cos(angle), std::sin(angle));
    }
}

namespace {

inline void rotate_pair(Complex& a, Complex& b, double c, double s) {
    const Complex a0 = a;
    a = Complex(c * a0.real() + s * b.imag(), c * a0.imag() - s * b.real());
    b = Complex(c * b.real() + s * a0.imag(), c * b.imag() - s * a0.real());
}

}  // namespace

void apply_mixer(StateVector& s, double beta) {
    const double c = std::cos(beta), sn = std::sin(beta);
    auto amps = s.amplitudes();
    const std::size_t dim = amps.size();
    for (std::size_t mask = 1; mask < dim; mask <<= 1) {
        for (std::size_t base = 0; base < dim; base += 2 * mask)
            for (std::size_t i = base; i < base + mask; ++i) rotate_pair(amps[i], amps[i + mask], c, sn);
    }
    if (s.basis() == Basis::ParityPositive) {
        // last qubit: flip of all remaining bits, pairing i with its mirror image
        if (dim == 1)
            amps[0] *= Complex(c, -sn);
        else
            for (std::size_t i = 0; i < dim / 2; ++i) rotate_pair(amps[i], amps[dim - 1 - i], c, sn);
    }
}

void apply_cost_hamiltonian(std::span<const Complex> in, std::span<Complex> out, const DiagonalCost& cost) {
    const auto values = cost.values();
    for (std::size_t z = 0; z < in.size(); ++z) out[z] = values[z] * in[z];
}

void apply_mixer_hamiltonian(std::span<const Complex> in, std::span<Complex> out, int n_qubits, Basis basis) {
    std::fill(out.begin(), out.end(), Complex{});
    for (std::uint64_t mask : mixer_flip_masks(n_qubits, basis))
        for (std::size_t z = 0; z < in.size(); ++z) out[z] += in[z ^ mask];
}

StateVector qaoa_state(const DiagonalCost& cost, const QaoaParams& params) {
    params.validate();
    StateVector s = init_plus_state(cost.n_qubits(), cost.basis());
    for (int k = 0; k < params.p(); ++k) {
        apply_phase_separator(s, cost, params.gammas[k]);
        apply_mixer(s, params.betas[k]);
    }
    return s;
}

StateVector qaoa_state(const Graph& g, const QaoaParams& params, Basis basis) {
    DiagonalCost cost = build_diagonal_cost(g);
    return qaoa_state(basis == Basis::Full ? cost : parity_reduce(cost), params);
}

Moments expectation(const StateVector& s, const DiagonalCost& cost) {
    if (s.basis() != cost.basis() || s.n_qubits() != cost.n_qubits())
        throw BasisMismatch("state and cost live in different bases");
    double mean = 0.0, second = 0.0;
    const auto amps = s.amplitudes();
    const auto values = cost.values();
    for (std::size_t z = 0; z < amps.size(); ++z) {
        const double prob = std::norm(amps[z]);
        mean += prob * values[z];
        second += prob * values[z] * values[z];
    }
    return {mean, std::max(0.0, second - mean * mean)};
}

QaoaSimulator::QaoaSimulator(DiagonalCost cost)
    : cost_(std::move(cost)),
      psi_(init_plus_state(cost_.n_qubits(), cost_.basis())),
      costate_(init_plus_state(cost_.n_qubits(), cost_.basis())),
      work_(init_plus_state(cost_.n_qubits(), cost_.basis())) {}

void QaoaSimulator::prepare(const QaoaParams& params) {
    params.validate();
    const double amp = 1.0 / std::sqrt(double(psi_.dimension()));
    std::fill(psi_.amplitudes().begin(), psi_.amplitudes().end(), Complex(amp, 0.0));
    for (int k = 0; k < params.p(); ++k) {
        apply_phase_separator(psi_, cost_, params.gammas[k]);
        apply_mixer(psi_, params.betas[k]);
    }
}

double QaoaSimulator::value(const QaoaParams& params) {
    prepare(params);
    return expectation(psi_, cost_).mean;
}

double QaoaSimulator::value_and_gradient(const QaoaParams& params, std::span<double> grad) {
    const int p = params.p();
    if (grad.size() != static_cast<std::size_t>(2 * p)) throw ParameterError("gradient buffer must have length 2p");
    prepare(params);
    const double f = expectation(psi_, cost_).mean;

    // Backward sweep. phi walks the state back through the circuit, lambda the
    // co-state U_{>k}^dagger H_C |psi>; dF/dtheta = 2 Im <lambda| G |phi> for generator G.
    work_ = psi_;
    StateVector& phi = work_;
    auto lam = costate_.amplitudes();
    apply_cost_hamiltonian(psi_.amplitudes(), lam, cost_);
    const auto masks = mixer_flip_masks(cost_.n_qubits(), cost_.basis());
    const auto values = cost_.values();
    const std::size_t dim = phi.dimension();

    for (int k = p - 1; k >= 0; --k) {
        Complex mixer_term{};
        for (std::uint64_t mask : masks)
            for (std::size_t z = 0; z < dim; ++z) mixer_term += std::conj(lam[z]) * phi[z ^ mask];
        grad[p + k] = 2.0 * mixer_term.imag();
        apply_mixer(phi, -params.betas[k]);
        apply_mixer(costate_, -params.betas[k]);

        Complex cost_term{};
        for (std::size_t z = 0; z < dim; ++z) cost_term += std::conj(lam[z]) * values[z] * phi[z];
        grad[k] = 2.0 * cost_term.imag();
        if (k > 0) {
            apply_phase_separator(phi, cost_, -params.gammas[k]);
            apply_phase_separator(costate_, cost_, -params.gammas[k]);
        }
    }
    return f;
}

std::vector<double> gradient(const Graph& g, const QaoaParams& params, Basis basis) {
    DiagonalCost cost = build_diagonal_cost(g);
    QaoaSimulator sim(basis == Basis::Full ? std::move(cost) : parity_reduce(cost));
    std::vector<double> grad(2 * params.p());
    sim.value_and_gradient(params, grad);
    return grad;
}

double ground_state_population(const StateVector& s, const CutResult& cr) {
    double total = 0.0;
    const auto amps = s.amplitudes();
    for (Bitstring z : cr.optimal_strings) {
        // reduced basis: count each flip pair once, through its representative
        if (s.basis() == Basis::ParityPositive && ((z >> (s.n_qubits() - 1)) & 1U)) continue;
        if (z < amps.size()) total += std::norm(amps[z]);
    }
    return std::clamp(total, 0.0, 1.0);
}

MeasurementSampler::MeasurementSampler(const StateVector& s)
    : n_qubits_(s.n_qubits()), basis_(s.basis()), cdf_(s.dimension()) {
    double running = 0.0;
    const auto amps = s.amplitudes();
    for (std::size_t z = 0; z < amps.size(); ++z) {
        running += std::norm(amps[z]);
        cdf_[z] = running;
    }
}

Bitstring MeasurementSampler::draw(std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> unit(0.0, cdf_.back());
    const double u = unit(rng);
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) it = std::lower_bound(cdf_.begin(), cdf_.end(), cdf_.back());
    Bitstring z = static_cast<Bitstring>(it - cdf_.begin());
    if (basis_ == Basis::ParityPositive) {
        std::bernoulli_distribution coin(0.5);
        if (coin(rng)) z = flip(z, n_qubits_);
    }
    return z;
}

std::vector<Bitstring> sample_measurements(const StateVector& s, std::size_t count, std::uint64_t seed) {
    MeasurementSampler sampler(s);
    std::mt19937_64 rng(seed);
    std::vector<Bitstring> out(count);
    for (auto& z : out) z = sampler.draw(rng);
    return out;
}

StateVector parity_reduce(const StateVector& full) {
    if (full.basis() != Basis::Full) throw BasisMismatch("state is already parity-reduced");
    const int n = full.n_qubits();
    const std::size_t dim = basis_dimension(n, Basis::ParityPositive);
    std::vector<Complex> amps(dim);
    for (std::size_t z = 0; z < dim; ++z) amps[z] = (full[z] + full[flip(z, n)]) / std::numbers::sqrt2;
    return StateVector(n, Basis::ParityPositive, std::move(amps));
}

StateVector lift(const StateVector& reduced) {
    if (reduced.basis() != Basis::ParityPositive) throw BasisMismatch("lift expects a parity-reduced state");
    const int n = reduced.n_qubits();
    std::vector<Complex> amps(basis_dimension(n, Basis::Full));
    for (std::size_t z = 0; z < reduced.dimension(); ++z) {
        amps[z] = reduced[z] / std::numbers::sqrt2;
        amps[flip(z, n)] = amps[z];
    }
    return StateVector(n, Basis::Full, std::move(amps));
}

namespace {
constexpr char kStateMagic[4] = {'Q', 'S', 'V', '1'};
}

void write_state(const std::string& path, const StateVector& s) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    const std::uint32_t header[3] = {static_cast<std::uint32_t>(s.n_qubits()),
                                     s.basis() == Basis::Full ? 0U : 1U, 0U};
    out.write(kStateMagic, 4);
    out.write(reinterpret_cast<const char*>(header), sizeof header);
    out.write(reinterpret_cast<const char*>(s.amplitudes().data()),
              static_cast<std::streamsize>(s.dimension() * sizeof(Complex)));
}

StateVector read_state(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    char magic[4];
    std::uint32_t header[3];
    in.read(magic, 4);
    in.read(reinterpret_cast<char*>(header), sizeof header);
    if (!in || std::memcmp(magic, kStateMagic, 4) != 0 || header[1] > 1)
        throw FormatError(path + ": not a state dump");
    const Basis basis = header[1] == 0 ? Basis::Full : Basis::ParityPositive;
    std::vector<Complex> amps(basis_dimension(static_cast<int>(header[0]), basis));
    in.read(reinterpret_cast<char*>(amps.data()), static_cast<std::streamsize>(amps.size() * sizeof(Complex)));
    if (!in) throw FormatError(path + ": truncated amplitude block");
    return StateVector(static_cast<int>(header[0]), basis, std::move(amps));
}

}  // namespace qaoalab
