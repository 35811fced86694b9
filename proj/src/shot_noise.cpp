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

#include "qaoalab/shot_noise.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "qaoalab/annealer.hpp"
#include "qaoalab/error.hpp"

namespace qaoalab {

void NoiseConfig::validate() const {
    if (!(epsilon > 0.0 && xi > 0.0 && delta > 0.0)) throw ParameterError("epsilon, xi and delta must be positive");
    if (min_samples < 2) throw ParameterError("at least two samples are needed for a standard error");
    if (max_samples_per_estimate < min_samples) throw ParameterError("sample cap below the minimum sample count");
    if (max_iterations < 1) throw ParameterError("max_iterations must be >= 1");
}

void MeasurementLedger::record(double cut) {
    const double best = entries_.empty() ? cut : std::max(cut, entries_.back().best_cut);
    entries_.push_back({size() + 1, cut, best});
}

long MeasurementLedger::first_hit(double target, double tol) const {
    for (const auto& e : entries_)
        if (e.cut >= target - tol) return e.index;
    return 0;
}

bool MeasurementLedger::consistent() const {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < entries_.size(); ++k) {
        const auto& e = entries_[k];
        best = std::max(best, e.cut);
        if (e.index != static_cast<long>(k) + 1 || e.best_cut != best) return false;
    }
    return true;
}

void MeasurementLedger::write_csv(std::ostream& os) const {
    os.precision(17);
    os << "i,cut,best_cut\n";
    for (const auto& e : entries_) os << e.index << ',' << e.cut << ',' << e.best_cut << '\n';
}

MeasurementLedger MeasurementLedger::read_csv(std::istream& is) {
    MeasurementLedger ledger;
    std::string line;
    if (!std::getline(is, line) || line != "i,cut,best_cut") throw FormatError("ledger CSV must start with 'i,cut,best_cut'");
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream fields(line);
        LedgerEntry e;
        char c1 = 0, c2 = 0;
        if (!(fields >> e.index >> c1 >> e.cut >> c2 >> e.best_cut) || c1 != ',' || c2 != ',')
            throw FormatError("malformed ledger line '" + line + "'");
        ledger.entries_.push_back(e);
    }
    return ledger;
}

namespace {

double sampled_cost(const DiagonalCost& cost, Bitstring z) {
    const int n = cost.n_qubits();
    if (cost.basis() == Basis::ParityPositive && n > 0 && ((z >> (n - 1)) & 1)) z = flip(z, n);
    return cost[z];
}

}  // namespace

NoisyEstimate estimate_objective(const StateVector& s, const DiagonalCost& cost, const NoiseConfig& config,
                                 std::mt19937_64& rng, MeasurementLedger& ledger) {
    config.validate();
    if (s.basis() != cost.basis() || s.n_qubits() != cost.n_qubits())
        throw BasisMismatch("state and cost live in different bases");
    const MeasurementSampler sampler(s);
    // Welford running mean and sum of squared deviations
    long m = 0;
    double mean = 0.0, m2 = 0.0, sem = 0.0;
    while (m < config.max_samples_per_estimate) {
        const double c = sampled_cost(cost, sampler.draw(rng));
        ledger.record(c);
        ++m;
        const double d = c - mean;
        mean += d / m;
        m2 += d * (c - mean);
        if (m >= config.min_samples) {
            sem = std::sqrt(m2 / (double(m) * double(m - 1)));
            if (sem <= config.xi) break;
        }
    }
    return {mean, m, sem};
}

NoisyLevel noisy_local_optimize(QaoaProblem& problem, const FourierParams& start, const NoiseConfig& config,
                                std::mt19937_64& rng, MeasurementLedger& ledger) {
    config.validate();
    const long before = ledger.size();
    const int p = start.p;
    double last_estimate = 0.0;
    Objective objective;
    objective.value = [&](std::span<const double> x) {
        const QaoaParams params = fourier_to_direct(FourierParams::from_flat(x, p));
        last_estimate = estimate_objective(problem.state(params), problem.cost(), config, rng, ledger).f_bar;
        return last_estimate;
    };

    LocalOptions options;
    options.method = LocalMethod::Bfgs;
    options.f_tol = config.epsilon;
    options.x_tol = config.delta;
    options.g_tol = 0.0;
    options.fd_step = config.delta;
    options.flat_steps_to_stop = 1;
    options.max_iterations = config.max_iterations;
    const LocalResult local = local_optimize(objective, start.flat(), options);

    NoisyLevel out;
    const FourierParams fp = FourierParams::from_flat(local.x, p);
    const QaoaParams params = fourier_to_direct(fp);
    out.level.p = p;
    out.level.f_value = problem.value(params);
    out.level.r = out.level.f_value / problem.c_max();
    out.level.p_gs = problem.ground_state_population(params);
    out.level.best_params = params;
    out.level.best_fourier = fp;
    out.level.n_evals = local.n_evals;
    out.level.converged = local.converged;
    out.level.grad_norm = local.grad_norm;
    out.f_bar = local.f;
    out.measurements = ledger.size() - before;
    out.stop_reason = local.stop_reason;
    return out;
}

FourierParams educated_start(int level) {
    if (level == 1) return {{1.4849}, {0.5409}, 1};
    if (level == 5)
        return {{1.9212, 0.2891, 0.1601, 0.0564, 0.0292}, {0.6055, -0.0178, 0.0431, -0.0061, 0.0141}, 5};
    throw ParameterError("educated starts exist for levels 1 and 5 only");
}

std::string to_string(NoisyInit init) { return init == NoisyInit::Educated ? "educated" : "random"; }

NoisyInit noisy_init_from_string(const std::string& text) {
    if (text == "educated") return NoisyInit::Educated;
    if (text == "random") return NoisyInit::Random;
    throw ParameterError("unknown init '" + text + "'");
}

NoisyExperiment run_noisy_experiment(QaoaProblem& problem, int start_level, NoisyInit init, const NoiseConfig& config,
                                     int p_max) {
    config.validate();
    if (start_level != 1 && start_level != 5) throw ParameterError("start level must be 1 or 5");
    if (init == NoisyInit::Random && start_level != 1) throw ParameterError("random starts are defined at level 1 only");
    if (p_max < start_level) throw ParameterError("p_max below the start level");

    std::mt19937_64 rng(derive_seed(config.seed, 0));
    FourierParams start =
        init == NoisyInit::Educated
            ? educated_start(start_level)
            : direct_to_fourier(random_init(1, problem.graph().kind(), derive_seed(config.seed, 1)));

    NoisyExperiment out;
    for (int p = start_level; p <= p_max; ++p) {
        out.levels.push_back(noisy_local_optimize(problem, start, config, rng, out.ledger));
        start = *out.levels.back().level.best_fourier;
        start.p = p + 1;
        start.u.push_back(0.0);
        start.v.push_back(0.0);
    }
    return out;
}

std::vector<MeasurementLedger> qa_baseline_ledgers(const Graph& g, std::span<const double> t_list, long shots,
                                                   std::uint64_t seed) {
    if (shots < 1) throw ParameterError("shots must be >= 1");
    const DiagonalCost cost = parity_reduce(build_diagonal_cost(g));
    std::vector<MeasurementLedger> out;
    for (std::size_t k = 0; k < t_list.size(); ++k) {
        const StateVector psi = evolve(cost, linear_ramp(t_list[k]));
        const MeasurementSampler sampler(psi);
        std::mt19937_64 rng(derive_seed(seed, k));
        MeasurementLedger ledger;
        for (long i = 0; i < shots; ++i) ledger.record(sampled_cost(cost, sampler.draw(rng)));
        out.push_back(std::move(ledger));
    }
    return out;
}

}  // namespace qaoalab
