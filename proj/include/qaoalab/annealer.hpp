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

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <utility>
#include <vector>

#include "qaoalab/statevector.hpp"

namespace qaoalab {

/// Piecewise-linear interpolation f(t) through ordered knots, f(0) = 0 and f(T) = 1.
struct AnnealSchedule {
    double total_time = 0.0;
    std::vector<std::pair<double, double>> knots;  // (t, f)
    bool clamped = false;                          // some f value was clipped into [0, 1]

    /// Throws ParameterError unless the boundary knots, ordering and ranges hold.
    void validate() const;
    double f(double t) const;
};

AnnealSchedule linear_ramp(double total_time);
/// Piecewise-linear path implied by optimized QAOA angles. Throws ParameterError for all-zero angles.
AnnealSchedule qaoa_to_schedule(const QaoaParams& params);
/// sum_i (|gamma_i| + |beta_i|)
double qaoa_run_time(const QaoaParams& params);

/// Text form: one "t f" pair per line, '#' comments allowed.
void write_schedule(std::ostream& os, const AnnealSchedule& schedule);
AnnealSchedule read_schedule(std::istream& is);
AnnealSchedule load_schedule(const std::filesystem::path& path);

struct StepControl {
    double tau = 0.0;            // <= 0 picks min(0.01, T/1000)
    double norm_tolerance = 1e-8;
    double tau_floor = 1e-7;
};

/// H(f) = -[f H_C + (1 - f) H_B] in the basis of `cost`, out = H in.
void apply_anneal_hamiltonian(std::span<const Complex> in, std::span<Complex> out, const DiagonalCost& cost,
                              double f);

/// exp(-i H(f) duration) applied in place, in steps of at most tau.
void propagate(StateVector& s, const DiagonalCost& cost, double f, double duration, double tau = 0.01);

/// Schrodinger evolution from |+>^N. `observe(t, state)` is called at every requested sample time
/// (sorted, within [0, T]). Throws NumericalError when the norm cannot be held even at tau_floor.
StateVector evolve(const DiagonalCost& cost, const AnnealSchedule& schedule, const StepControl& control = {},
                   std::span<const double> sample_times = {},
                   const std::function<void(double, const StateVector&)>& observe = {});

struct SpectrumSlice {
    double s = 0.0;
    std::vector<double> eigenvalues;                // ascending
    std::vector<std::vector<double>> eigenvectors;  // only when requested; real, unit norm
    Basis basis = Basis::Full;
};

/// Dimensions up to this use a dense solver; larger ones use Lanczos.
inline constexpr std::size_t kDenseSpectrumLimit = 256;
/// Largest N accepted by `spectrum` per basis.
inline constexpr int kSpectrumCapFull = 16;
inline constexpr int kSpectrumCapParity = 17;

/// Lowest k eigenpairs of H(f) in the basis of `cost`. Above kDenseSpectrumLimit, degenerate
/// levels beyond the ground state may be reported once.
SpectrumSlice spectrum(const DiagonalCost& cost, double f, int k, bool with_vectors = false);

struct GapResult {
    double delta_min = 0.0;
    double s_star = 0.0;
    double endpoint_gap = 0.0;  // gap at s = 1, reported separately
};

/// min over s in [0, 1 - resolution] of e1 - e0 in the basis of `cost` (pass a parity-reduced cost
/// to exclude the odd sector): coarse grid, then golden-section refinement.
GapResult min_gap(const DiagonalCost& cost, double resolution = 0.01);

/// Populations |<e_l(t)|psi(t)>|^2 of the lowest k instantaneous levels, one row per sample time.
std::vector<std::vector<double>> instantaneous_populations(const DiagonalCost& cost, const AnnealSchedule& schedule,
                                                           std::span<const double> sample_times, int k,
                                                           const StepControl& control = {});

/// |<e0|(H_B - H_C)|e_i>| / (gap_i^2 T) for i = 1..k.
std::vector<double> adiabaticity_measure(const DiagonalCost& cost, double f, int k, double total_time);

struct LzFit {
    double c = 0.0;
    double residual = 0.0;  // rms of ln(1 - p_gs) residuals
    int n_used = 0;
};

/// Fit ln(1 - p_gs) = -c T delta^2 through the origin over samples with T >= t_min.
LzFit lz_fit(std::span<const std::pair<double, double>> samples, double delta_min, double t_min = 0.0);
double lz_prediction(double c, double total_time, double delta_min);

}  // namespace qaoalab
