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

#include "qaoalab/annealer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "qaoalab/error.hpp"

namespace qaoalab {

void AnnealSchedule::validate() const {
    if (!(total_time > 0.0) || !std::isfinite(total_time)) throw ParameterError("schedule total time must be positive");
    if (knots.size() < 2) throw ParameterError("schedule needs at least the two boundary knots");
    if (knots.front() != std::pair{0.0, 0.0}) throw ParameterError("schedule must start at (0, 0)");
    if (std::abs(knots.back().first - total_time) > 1e-12 * total_time || knots.back().second != 1.0)
        throw ParameterError("schedule must end at (T, 1)");
    for (std::size_t k = 0; k < knots.size(); ++k) {
        const auto [t, f] = knots[k];
        if (!(f >= 0.0 && f <= 1.0)) throw ParameterError("schedule values must lie in [0, 1]");
        if (k > 0 && !(t > knots[k - 1].first)) throw ParameterError("schedule times must be strictly increasing");
    }
}

double AnnealSchedule::f(double t) const {
    if (t <= knots.front().first) return knots.front().second;
    if (t >= knots.back().first) return knots.back().second;
    auto it = std::upper_bound(knots.begin(), knots.end(), t,
                               [](double value, const std::pair<double, double>& k) { return value < k.first; });
    const auto& [t1, f1] = *it;
    const auto& [t0, f0] = *(it - 1);
    return f0 + (f1 - f0) * (t - t0) / (t1 - t0);
}

AnnealSchedule linear_ramp(double total_time) {
    AnnealSchedule s{total_time, {{0.0, 0.0}, {total_time, 1.0}}, false};
    s.validate();
    return s;
}

double qaoa_run_time(const QaoaParams& params) {
    params.validate();
    double total = 0.0;
    for (int i = 0; i < params.p(); ++i) total += std::abs(params.gammas[i]) + std::abs(params.betas[i]);
    return total;
}

AnnealSchedule qaoa_to_schedule(const QaoaParams& params) {
    const double total = qaoa_run_time(params);
    if (!(total > 0.0)) throw ParameterError("all-zero angles give a degenerate schedule");
    AnnealSchedule s;
    s.total_time = total;
    s.knots.emplace_back(0.0, 0.0);
    double elapsed = 0.0;
    for (int i = 0; i < params.p(); ++i) {
        const double width = std::abs(params.gammas[i]) + std::abs(params.betas[i]);
        elapsed += width;
        if (width == 0.0) continue;
        const double raw = params.gammas[i] / width;
        const double f = std::clamp(raw, 0.0, 1.0);
        if (f != raw) s.clamped = true;
        const double t = elapsed - 0.5 * width;
        if (t > s.knots.back().first && t < total) s.knots.emplace_back(t, f);
    }
    s.knots.emplace_back(total, 1.0);
    s.validate();
    return s;
}

void write_schedule(std::ostream& os, const AnnealSchedule& schedule) {
    os.precision(17);
    for (const auto& [t, f] : schedule.knots) os << t << ' ' << f << '\n';
}

AnnealSchedule read_schedule(std::istream& is) {
    AnnealSchedule s;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        double t, f;
        if (!(fields >> t)) continue;
        std::string extra;
        if (!(fields >> f) || (fields >> extra)) throw FormatError("schedule line " + std::to_string(line_no) + ": expected 't f'");
        s.knots.emplace_back(t, f);
    }
    if (s.knots.empty()) throw FormatError("schedule file has no knots");
    s.total_time = s.knots.back().first;
    try {
        s.validate();
    } catch (const ParameterError& e) {
        throw FormatError(std::string("invalid schedule: ") + e.what());
    }
    return s;
}

AnnealSchedule load_schedule(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open schedule file " + path.string());
    return read_schedule(in);
}

namespace {

// -[f H_C + (1 - f) H_B] on either complex or real vectors.
class AnnealHamiltonian {
public:
    explicit AnnealHamiltonian(const DiagonalCost& cost)
        : cost_(cost), masks_(mixer_flip_masks(cost.n_qubits(), cost.basis())) {
        max_cost_ = 0.0;
        for (double c : cost.values()) max_cost_ = std::max(max_cost_, std::abs(c));
    }

    template <class T>
    void apply(const T* in, T* out, double f) const {
        const auto values = cost_.values();
        const std::size_t dim = values.size();
        for (std::size_t z = 0; z < dim; ++z) out[z] = -f * values[z] * in[z];
        const double g = -(1.0 - f);
        if (g == 0.0) return;
        for (std::uint64_t mask : masks_)
            for (std::size_t z = 0; z < dim; ++z) out[z] += g * in[z ^ mask];
    }

    // (H_B - H_C) x
    template <class T>
    void apply_derivative(const T* in, T* out) const {
        const auto values = cost_.values();
        const std::size_t dim = values.size();
        for (std::size_t z = 0; z < dim; ++z) out[z] = -values[z] * in[z];
        for (std::uint64_t mask : masks_)
            for (std::size_t z = 0; z < dim; ++z) out[z] += in[z ^ mask];
    }

    double norm_bound(double f) const { return f * max_cost_ + (1.0 - f) * double(masks_.size()); }
    std::size_t dimension() const { return cost_.dimension(); }

private:
    const DiagonalCost& cost_;
    std::vector<std::uint64_t> masks_;
    double max_cost_;
};

// psi <- exp(-i H tau) psi by truncated Taylor series on `substeps` equal pieces.
void taylor_step(const AnnealHamiltonian& h, double f, double tau, std::vector<Complex>& psi,
                 std::vector<Complex>& term, std::vector<Complex>& next) {
    const double scaled = h.norm_bound(f) * std::abs(tau);
    const int substeps = std::max(1, static_cast<int>(std::ceil(scaled / 0.5)));
    const double dt = tau / substeps;
    const std::size_t dim = psi.size();
    for (int s = 0; s < substeps; ++s) {
        term = psi;
        for (int k = 1; k <= 40; ++k) {
            h.apply(term.data(), next.data(), f);
            const Complex factor(0.0, -dt / k);
            double largest = 0.0;
            for (std::size_t z = 0; z < dim; ++z) {
                term[z] = factor * next[z];
                psi[z] += term[z];
                largest = std::max(largest, std::norm(term[z]));
            }
            if (largest < 1e-34) break;
        }
    }
}

const double kGaussOffset = std::sqrt(3.0) / 6.0;
const double kMagnusLight = (3.0 - 2.0 * std::sqrt(3.0)) / 12.0;
const double kMagnusHeavy = (3.0 + 2.0 * std::sqrt(3.0)) / 12.0;

double vector_norm(const std::vector<Complex>& v) {
    double s = 0.0;
    for (const Complex& a : v) s += std::norm(a);
    return std::sqrt(s);
}

}  // namespace

void apply_anneal_hamiltonian(std::span<const Complex> in, std::span<Complex> out, const DiagonalCost& cost,
                              double f) {
    if (in.size() != cost.dimension() || out.size() != cost.dimension())
        throw ParameterError("vector length does not match the cost dimension");
    AnnealHamiltonian(cost).apply(in.data(), out.data(), f);
}

void propagate(StateVector& s, const DiagonalCost& cost, double f, double duration, double tau) {
    if (s.basis() != cost.basis() || s.n_qubits() != cost.n_qubits())
        throw BasisMismatch("state and cost live in different bases");
    if (!(duration >= 0.0) || !(tau > 0.0)) throw ParameterError("duration must be >= 0 and tau > 0");
    const AnnealHamiltonian h(cost);
    std::vector<Complex> psi(s.amplitudes().begin(), s.amplitudes().end()), term(psi.size()), next(psi.size());
    const long steps = std::max(1L, static_cast<long>(std::ceil(duration / tau)));
    for (long k = 0; k < steps; ++k) taylor_step(h, f, duration / steps, psi, term, next);
    std::copy(psi.begin(), psi.end(), s.amplitudes().begin());
}

StateVector evolve(const DiagonalCost& cost, const AnnealSchedule& schedule, const StepControl& control,
                   std::span<const double> sample_times,
                   const std::function<void(double, const StateVector&)>& observe) {
    schedule.validate();
    const double total = schedule.total_time;
    for (std::size_t k = 0; k < sample_times.size(); ++k) {
        if (!(sample_times[k] >= 0.0 && sample_times[k] <= total)) throw ParameterError("sample time outside [0, T]");
        if (k > 0 && sample_times[k] < sample_times[k - 1]) throw ParameterError("sample times must be sorted");
    }
    const AnnealHamiltonian h(cost);
    double tau = control.tau > 0.0 ? control.tau : std::min(0.01, total / 1000.0);
    const StateVector initial = init_plus_state(cost.n_qubits(), cost.basis());

    while (true) {
        std::vector<Complex> psi(initial.amplitudes().begin(), initial.amplitudes().end());
        std::vector<Complex> term(psi.size()), next(psi.size());
        std::vector<std::pair<double, StateVector>> observed;

        // step boundaries: the uniform grid plus knots and sample times
        std::vector<double> marks;
        const long steps = static_cast<long>(std::ceil(total / tau - 1e-9));
        marks.reserve(steps + schedule.knots.size() + sample_times.size() + 1);
        for (long k = 0; k < steps; ++k) marks.push_back(k * tau);
        marks.push_back(total);
        for (const auto& knot : schedule.knots) marks.push_back(knot.first);
        marks.insert(marks.end(), sample_times.begin(), sample_times.end());
        std::sort(marks.begin(), marks.end());
        marks.erase(std::unique(marks.begin(), marks.end(),
                                [](double a, double b) { return std::abs(a - b) <= 1e-13 * std::max(1.0, b); }),
                    marks.end());

        std::size_t next_sample = 0;
        auto emit = [&](double t) {
            while (next_sample < sample_times.size() && sample_times[next_sample] <= t + 1e-13 * std::max(1.0, t)) {
                if (observe) observe(sample_times[next_sample], StateVector(cost.n_qubits(), cost.basis(), psi));
                ++next_sample;
            }
        };
        emit(0.0);
        for (std::size_t k = 1; k < marks.size(); ++k) {
            const double t0 = marks[k - 1], t1 = marks[k];
            // fourth-order commutator-free Magnus step; H is affine in f, so each factor is H at an
            // effective f scaled by 1/2
            const double dt = t1 - t0;
            const double fa = schedule.f(t0 + (0.5 - kGaussOffset) * dt);
            const double fb = schedule.f(t0 + (0.5 + kGaussOffset) * dt);
            taylor_step(h, 2.0 * (kMagnusHeavy * fa + kMagnusLight * fb), 0.5 * dt, psi, term, next);
            taylor_step(h, 2.0 * (kMagnusLight * fa + kMagnusHeavy * fb), 0.5 * dt, psi, term, next);
            emit(t1);
        }

        const double drift = std::abs(vector_norm(psi) - 1.0);
        if (std::isfinite(drift) && drift <= control.norm_tolerance)
            return StateVector(cost.n_qubits(), cost.basis(), std::move(psi));
        if (tau / 2 < control.tau_floor)
            throw NumericalError("norm drift " + std::to_string(drift) + " persists at the step floor");
        tau /= 2;
        // observers will see the retried run from the start; they are expected to be idempotent per sample time
    }
}

namespace {

struct EigenPairs {
    std::vector<double> values;
    std::vector<std::vector<double>> vectors;
};

EigenPairs dense_eigenpairs(const AnnealHamiltonian& h, double f, int k, bool with_vectors) {
    const std::size_t dim = h.dimension();
    Eigen::MatrixXd m(dim, dim);
    std::vector<double> unit(dim, 0.0), column(dim);
    for (std::size_t c = 0; c < dim; ++c) {
        unit[c] = 1.0;
        h.apply(unit.data(), column.data(), f);
        unit[c] = 0.0;
        for (std::size_t r = 0; r < dim; ++r) m(r, c) = column[r];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, with_vectors ? Eigen::ComputeEigenvectors
                                                                          : Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NumericalError("dense eigensolver failed");
    EigenPairs out;
    for (int i = 0; i < k; ++i) {
        out.values.push_back(solver.eigenvalues()[i]);
        if (with_vectors) {
            const auto v = solver.eigenvectors().col(i);
            out.vectors.emplace_back(v.data(), v.data() + dim);
        }
    }
    return out;
}

// Lanczos with full reorthogonalization; restarts with a fresh random direction on breakdown so that
// the Krylov space can leave an invariant subspace.
EigenPairs lanczos_eigenpairs(const AnnealHamiltonian& h, double f, int k, bool with_vectors) {
    const std::size_t dim = h.dimension();
    const int max_basis = static_cast<int>(std::min<std::size_t>(dim, 300));
    std::mt19937_64 rng(0x5eed);
    std::normal_distribution<double> normal;

    std::vector<std::vector<double>> basis;
    std::vector<double> alpha, beta;  // beta[j] couples j and j+1
    std::vector<double> w(dim);

    auto orthonormalize = [&](std::vector<double>& v) {
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& b : basis) {
                const double c = std::inner_product(v.begin(), v.end(), b.begin(), 0.0);
                for (std::size_t z = 0; z < dim; ++z) v[z] -= c * b[z];
            }
        return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
    };
    auto random_direction = [&] {
        std::vector<double> v(dim);
        for (double& x : v) x = normal(rng);
        const double n = orthonormalize(v);
        for (double& x : v) x /= n;
        return v;
    };

    basis.push_back(random_direction());
    Eigen::VectorXd ritz_values;
    Eigen::MatrixXd ritz_vectors;
    while (true) {
        const int j = static_cast<int>(basis.size()) - 1;
        h.apply(basis[j].data(), w.data(), f);
        alpha.push_back(std::inner_product(w.begin(), w.end(), basis[j].begin(), 0.0));
        const double b = orthonormalize(w);
        const int m = j + 1;

        const bool full = m == max_basis;
        const bool check = full || static_cast<std::size_t>(m) == dim || (m >= k && m % 10 == 0);
        bool converged = false;
        if (check && m >= k) {
            Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), m);
            Eigen::VectorXd off = Eigen::Map<Eigen::VectorXd>(beta.data(), m - 1);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
            solver.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
            if (solver.info() != Eigen::Success) throw NumericalError("tridiagonal eigensolver failed");
            ritz_values = solver.eigenvalues();
            ritz_vectors = solver.eigenvectors();
            converged = true;
            for (int i = 0; i < k; ++i) {
                const double residual = std::abs(b * ritz_vectors(m - 1, i));
                if (residual > 1e-10 * std::max(1.0, std::abs(ritz_values[i]))) converged = false;
            }
        }
        if (converged || full || static_cast<std::size_t>(m) == dim) break;

        std::vector<double> next(dim);
        if (b > 1e-10) {
            for (std::size_t z = 0; z < dim; ++z) next[z] = w[z] / b;
            beta.push_back(b);
        } else {
            next = random_direction();
            beta.push_back(0.0);
        }
        basis.push_back(std::move(next));
    }
    const int m = static_cast<int>(basis.size());
    if (m < k) throw NumericalError("Lanczos space smaller than the requested level count");

    EigenPairs out;
    for (int i = 0; i < k; ++i) {
        out.values.push_back(ritz_values[i]);
        if (with_vectors) {
            std::vector<double> v(dim, 0.0);
            for (int c = 0; c < m; ++c)
                for (std::size_t z = 0; z < dim; ++z) v[z] += ritz_vectors(c, i) * basis[c][z];
            const double n = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
            for (double& x : v) x /= n;
            out.vectors.push_back(std::move(v));
        }
    }
    return out;
}

EigenPairs eigenpairs(const AnnealHamiltonian& h, double f, int k, bool with_vectors) {
    if (h.dimension() <= kDenseSpectrumLimit || static_cast<std::size_t>(k) * 4 > h.dimension())
        return dense_eigenpairs(h, f, k, with_vectors);
    return lanczos_eigenpairs(h, f, k, with_vectors);
}

void check_spectrum_request(const DiagonalCost& cost, double f, int k) {
    const int cap = cost.basis() == Basis::Full ? kSpectrumCapFull : kSpectrumCapParity;
    if (cost.n_qubits() > cap)
        throw CapacityError("spectrum supports N <= " + std::to_string(cap) + " in the " + to_string(cost.basis()) +
                            " basis");
    if (!(f >= 0.0 && f <= 1.0)) throw ParameterError("f must lie in [0, 1]");
    if (k < 1 || static_cast<std::size_t>(k) > cost.dimension())
        throw ParameterError("level count must be in [1, dimension]");
}

}  // namespace

SpectrumSlice spectrum(const DiagonalCost& cost, double f, int k, bool with_vectors) {
    check_spectrum_request(cost, f, k);
    const AnnealHamiltonian h(cost);
    EigenPairs pairs = eigenpairs(h, f, k, with_vectors);
    return {f, std::move(pairs.values), std::move(pairs.vectors), cost.basis()};
}

GapResult min_gap(const DiagonalCost& cost, double resolution) {
    if (!(resolution > 0.0 && resolution < 0.5)) throw ParameterError("resolution must be in (0, 0.5)");
    check_spectrum_request(cost, 0.0, 2);
    const AnnealHamiltonian h(cost);
    auto gap = [&](double s) {
        const auto pairs = eigenpairs(h, s, 2, false);
        return pairs.values[1] - pairs.values[0];
    };

    const double upper = 1.0 - resolution;
    const int points = static_cast<int>(std::floor(upper / resolution + 1e-9)) + 1;
    std::vector<double> grid(points);
    int best = 0;
    for (int i = 0; i < points; ++i) {
        grid[i] = gap(std::min(i * resolution, upper));
        if (grid[i] < grid[best]) best = i;
    }

    GapResult out{grid[best], std::min(best * resolution, upper), gap(1.0)};
    double a = std::max(0.0, (best - 1) * resolution), b = std::min(upper, (best + 1) * resolution);
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - ratio * (b - a), x2 = a + ratio * (b - a);
    double g1 = gap(x1), g2 = gap(x2);
    while (b - a > 1e-9) {
        if (g1 < g2) {
            b = x2;
            x2 = x1;
            g2 = g1;
            x1 = b - ratio * (b - a);
            g1 = gap(x1);
        } else {
            a = x1;
            x1 = x2;
            g1 = g2;
            x2 = a + ratio * (b - a);
            g2 = gap(x2);
        }
    }
    const double refined_s = g1 < g2 ? x1 : x2;
    const double refined = std::min(g1, g2);
    if (refined < out.delta_min) out = {refined, refined_s, out.endpoint_gap};
    return out;
}

std::vector<std::vector<double>> instantaneous_populations(const DiagonalCost& cost, const AnnealSchedule& schedule,
                                                           std::span<const double> sample_times, int k,
                                                           const StepControl& control) {
    check_spectrum_request(cost, 0.0, k);
    const AnnealHamiltonian h(cost);
    std::vector<std::vector<double>> rows(sample_times.size());
    std::size_t row = 0;
    evolve(cost, schedule, control, sample_times, [&](double t, const StateVector& psi) {
        // a retried run restarts the sample sequence
        if (t == sample_times.front()) row = 0;
        const EigenPairs pairs = eigenpairs(h, schedule.f(t), k, true);
        std::vector<double> pops(k);
        for (int l = 0; l < k; ++l) {
            Complex overlap{};
            for (std::size_t z = 0; z < psi.dimension(); ++z) overlap += pairs.vectors[l][z] * psi[z];
            pops[l] = std::norm(overlap);
        }
        rows[row++] = std::move(pops);
    });
    return rows;
}

std::vector<double> adiabaticity_measure(const DiagonalCost& cost, double f, int k, double total_time) {
    if (!(total_time > 0.0)) throw ParameterError("total time must be positive");
    check_spectrum_request(cost, f, k + 1);
    const AnnealHamiltonian h(cost);
    const EigenPairs pairs = eigenpairs(h, f, k + 1, true);
    const std::size_t dim = cost.dimension();
    std::vector<double> derivative(dim);
    h.apply_derivative(pairs.vectors[0].data(), derivative.data());
    std::vector<double> out;
    for (int i = 1; i <= k; ++i) {
        const double element =
            std::inner_product(derivative.begin(), derivative.end(), pairs.vectors[i].begin(), 0.0);
        const double gap = pairs.values[i] - pairs.values[0];
        out.push_back(std::abs(element) / (gap * gap * total_time));
    }
    return out;
}

LzFit lz_fit(std::span<const std::pair<double, double>> samples, double delta_min, double t_min) {
    if (!(delta_min > 0.0)) throw ParameterError("delta_min must be positive");
    double sxy = 0.0, sxx = 0.0;
    std::vector<std::pair<double, double>> used;
    for (const auto& [t, p] : samples) {
        if (t < t_min || !(p < 1.0 - 1e-15) || !(p >= 0.0)) continue;
        const double x = t * delta_min * delta_min, y = std::log1p(-p);
        sxy += x * y;
        sxx += x * x;
        used.emplace_back(x, y);
    }
    if (used.empty() || sxx == 0.0) throw ParameterError("no usable samples in the fit window");
    LzFit fit;
    fit.c = -sxy / sxx;
    fit.n_used = static_cast<int>(used.size());
    double ss = 0.0;
    for (const auto& [x, y] : used) ss += (y + fit.c * x) * (y + fit.c * x);
    fit.residual = std::sqrt(ss / used.size());
    return fit;
}

double lz_prediction(double c, double total_time, double delta_min) {
    return 1.0 - std::exp(-c * total_time * delta_min * delta_min);
}

}  // namespace qaoalab
