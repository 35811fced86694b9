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

#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "qaoalab/graph.hpp"

namespace qaoalab {

using Complex = std::complex<double>;

inline constexpr int kStatevectorCap = 24;

/// Full computational basis (2^N) or the +1 eigensector of the global
/// flip P = X^{(x)N} (2^{N-1}). In the reduced basis index z (bit N-1 clear)
/// stands for (|z> + |flip z>)/sqrt(2).
enum class Basis { Full, ParityPositive };

std::string to_string(Basis basis);

/// Level-p variational angles. Layer k applies exp(-i gammas[k] H_C) then
/// exp(-i betas[k] H_B).
struct QaoaParams {
    std::vector<double> gammas;
    std::vector<double> betas;

    int p() const { return static_cast<int>(gammas.size()); }
    /// Throws ParameterError unless p >= 1, lengths agree and entries are finite.
    void validate() const;
    /// Flattened (gammas..., betas...).
    std::vector<double> flat() const;
    static QaoaParams from_flat(std::span<const double> x);

    friend bool operator==(const QaoaParams&, const QaoaParams&) = default;
};

/// C(z) for every basis index.
class DiagonalCost {
public:
    DiagonalCost(int n_qubits, Basis basis, std::vector<double> values);

    int n_qubits() const { return n_qubits_; }
    Basis basis() const { return basis_; }
    std::size_t dimension() const { return values_.size(); }
    std::span<const double> values() const { return values_; }
    double operator[](std::size_t z) const { return values_[z]; }

private:
    int n_qubits_;
    Basis basis_;
    std::vector<double> values_;
};

DiagonalCost build_diagonal_cost(const Graph& g, int cap = kStatevectorCap);
/// Restrict a full-basis cost to the parity-positive sector.
DiagonalCost parity_reduce(const DiagonalCost& cost);

class StateVector {
public:
    StateVector(int n_qubits, Basis basis, std::vector<Complex> amplitudes);

    int n_qubits() const { return n_qubits_; }
    Basis basis() const { return basis_; }
    std::size_t dimension() const { return amplitudes_.size(); }

    std::span<Complex> amplitudes() { return amplitudes_; }
    std::span<const Complex> amplitudes() const { return amplitudes_; }
    Complex& operator[](std::size_t z) { return amplitudes_[z]; }
    const Complex& operator[](std::size_t z) const { return amplitudes_[z]; }

    double norm() const;

private:
    int n_qubits_;
    Basis basis_;
    std::vector<Complex> amplitudes_;
};

std::size_t basis_dimension(int n_qubits, Basis basis);

/// Index masks m such that the mixer term X_j acts as z -> z ^ m in `basis`.
std::vector<std::uint64_t> mixer_flip_masks(int n_qubits, Basis basis);

StateVector init_plus_state(int n_qubits, Basis basis = Basis::Full);
StateVector basis_state(int n_qubits, Bitstring z, Basis basis = Basis::Full);

/// amplitude[z] *= exp(-i gamma C(z)).
void apply_phase_separator(StateVector& s, const DiagonalCost& cost, double gamma);
/// exp(-i beta H_B) as N single-qubit rotations, in place.
void apply_mixer(StateVector& s, double beta);

/// out = H_C in, out = H_B in; matrix-free, `out` must not alias `in`.
void apply_cost_hamiltonian(std::span<const Complex> in, std::span<Complex> out, const DiagonalCost& cost);
void apply_mixer_hamiltonian(std::span<const Complex> in, std::span<Complex> out, int n_qubits, Basis basis);

StateVector qaoa_state(const DiagonalCost& cost, const QaoaParams& params);
StateVector qaoa_state(const Graph& g, const QaoaParams& params, Basis basis = Basis::Full);

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
};

/// <H_C> and Var(H_C) in state s.
Moments expectation(const StateVector& s, const DiagonalCost& cost);

/// Repeated F_p / gradient evaluation over one instance with reusable buffers.
///
/// Gradients use a forward sweep followed by one backward sweep carrying the
/// state and the co-state H_C|psi>, so the cost is O(p) layer applications.
class QaoaSimulator {
public:
    explicit QaoaSimulator(DiagonalCost cost);

    const DiagonalCost& cost() const { return cost_; }
    int n_qubits() const { return cost_.n_qubits(); }

    /// Prepares |psi_p(params)> into the internal buffer and returns F_p.
    double value(const QaoaParams& params);
    /// F_p and dF/d(gammas..., betas...) written to `grad` (length 2p).
    double value_and_gradient(const QaoaParams& params, std::span<double> grad);
    /// State prepared by the most recent value call.
    const StateVector& state() const { return psi_; }

private:
    void prepare(const QaoaParams& params);

    DiagonalCost cost_;
    StateVector psi_;
    StateVector costate_;
    StateVector work_;
};

std::vector<double> gradient(const Graph& g, const QaoaParams& params, Basis basis = Basis::Full);

double ground_state_population(const StateVector& s, const CutResult& cr);

/// Inverse-CDF sampler over |amplitude|^2. Draws return full-basis strings;
/// in the reduced basis each pair {z, flip z} is split with a fair coin.
class MeasurementSampler {
public:
    explicit MeasurementSampler(const StateVector& s);

    Bitstring draw(std::mt19937_64& rng) const;
    int n_qubits() const { return n_qubits_; }

private:
    int n_qubits_;
    Basis basis_;
    std::vector<double> cdf_;
};

std::vector<Bitstring> sample_measurements(const StateVector& s, std::size_t count, std::uint64_t seed);

/// Symmetric projection of a full-basis state onto the parity-positive sector.
StateVector parity_reduce(const StateVector& full);
/// Full-basis state represented by a reduced one.
StateVector lift(const StateVector& reduced);

/// Binary dump: 16-byte header ("QSV1", uint32 N, uint32 basis tag, uint32 0)
/// followed by little-endian (re, im) doubles.
void write_state(const std::string& path, const StateVector& s);
StateVector read_state(const std::string& path);

}  // namespace qaoalab
