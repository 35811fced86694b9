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

#include "qaoalab/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "qaoalab/error.hpp"

namespace qaoalab {

using std::numbers::pi;

std::vector<double> FourierParams::flat() const {
    std::vector<double> x(u);
    x.insert(x.end(), v.begin(), v.end());
    return x;
}

FourierParams FourierParams::from_flat(std::span<const double> x, int p) {
    if (x.size() % 2 != 0) throw ParameterError("flat Fourier vector must have even length");
    const std::size_t q = x.size() / 2;
    return {{x.begin(), x.begin() + q}, {x.begin() + q, x.end()}, p};
}

namespace {

double sine_entry(int i, int k, int p) { return std::sin((k + 0.5) * (i + 0.5) * pi / p); }
double cosine_entry(int i, int k, int p) { return std::cos((k + 0.5) * (i + 0.5) * pi / p); }

bool is_weighted(const Graph& g) {
    if (g.kind().weighted()) return true;
    return std::any_of(g.edges().begin(), g.edges().end(), [](const Edge& e) { return e.w != 1.0; });
}

}  // namespace

QaoaProblem::QaoaProblem(Graph g, Basis basis)
    : graph_(std::move(g)), maxcut_(brute_force_maxcut(graph_)), simulator_([&] {
          DiagonalCost cost = build_diagonal_cost(graph_);
          return basis == Basis::Full ? cost : parity_reduce(cost);
      }()) {}

StateVector QaoaProblem::state(const QaoaParams& params) {
    simulator_.value(params);
    return simulator_.state();
}

double QaoaProblem::ground_state_population(const QaoaParams& params) {
    simulator_.value(params);
    return qaoalab::ground_state_population(simulator_.state(), maxcut_);
}

Objective QaoaProblem::direct_objective() {
    Objective obj;
    obj.value = [this](std::span<const double> x) { return simulator_.value(QaoaParams::from_flat(x)); };
    obj.value_and_gradient = [this](std::span<const double> x, std::span<double> grad) {
        return simulator_.value_and_gradient(QaoaParams::from_flat(x), grad);
    };
    return obj;
}

Objective QaoaProblem::fourier_objective(int p) {
    Objective obj;
    obj.value = [this, p](std::span<const double> x) {
        return simulator_.value(fourier_to_direct(FourierParams::from_flat(x, p)));
    };
    obj.value_and_gradient = [this, p](std::span<const double> x, std::span<double> grad) {
        const FourierParams fp = FourierParams::from_flat(x, p);
        std::vector<double> direct(2 * p);
        const double f = simulator_.value_and_gradient(fourier_to_direct(fp), direct);
        const auto chained = fourier_gradient(direct, fp);
        std::copy(chained.begin(), chained.end(), grad.begin());
        return f;
    };
    return obj;
}

std::string to_string(Strategy s) {
    switch (s) {
    case Strategy::RandomInit: return "ri";
    case Strategy::Interp: return "interp";
    case Strategy::Fourier: return "fourier";
    }
    return "?";
}

Strategy strategy_from_string(const std::string& text) {
    if (text == "ri" || text == "RI") return Strategy::RandomInit;
    if (text == "interp" || text == "INTERP") return Strategy::Interp;
    if (text == "fourier" || text == "FOURIER") return Strategy::Fourier;
    throw ParameterError("unknown strategy '" + text + "'");
}

std::string to_string(ChainTag c) { return c == ChainTag::L ? "L" : "B"; }

void StrategyConfig::validate() const {
    if (q < 0) throw ParameterError("q must be positive or 0 (unbounded)");
    if (R < 0) throw ParameterError("R must be non-negative");
    if (R > 0 && !(alpha > 0.0)) throw ParameterError("alpha must be positive when R > 0");
    if (p_max < 1) throw ParameterError("p_max must be >= 1");
    if (ri_seeds < 1) throw ParameterError("ri_seeds must be >= 1");
}

QaoaParams fourier_to_direct(const FourierParams& fp) {
    if (fp.p < 1 || fp.u.size() != fp.v.size() || fp.u.empty())
        throw ParameterError("Fourier parameters need p >= 1 and equal, non-empty u and v");
    QaoaParams out{std::vector<double>(fp.p, 0.0), std::vector<double>(fp.p, 0.0)};
    for (int i = 0; i < fp.p; ++i)
        for (int k = 0; k < fp.q(); ++k) {
            out.gammas[i] += fp.u[k] * sine_entry(i, k, fp.p);
            out.betas[i] += fp.v[k] * cosine_entry(i, k, fp.p);
        }
    return out;
}

FourierParams direct_to_fourier(const QaoaParams& params) {
    params.validate();
    const int p = params.p();
    // both transforms are orthogonal up to the factor p/2
    FourierParams fp{std::vector<double>(p, 0.0), std::vector<double>(p, 0.0), p};
    for (int k = 0; k < p; ++k)
        for (int i = 0; i < p; ++i) {
            fp.u[k] += 2.0 / p * sine_entry(i, k, p) * params.gammas[i];
            fp.v[k] += 2.0 / p * cosine_entry(i, k, p) * params.betas[i];
        }
    return fp;
}

std::vector<double> fourier_gradient(std::span<const double> direct_gradient, const FourierParams& fp) {
    const int p = fp.p, q = fp.q();
    if (direct_gradient.size() != static_cast<std::size_t>(2 * p))
        throw ParameterError("direct gradient must have length 2p");
    std::vector<double> grad(2 * q, 0.0);
    for (int k = 0; k < q; ++k)
        for (int i = 0; i < p; ++i) {
            grad[k] += sine_entry(i, k, p) * direct_gradient[i];
            grad[q + k] += cosine_entry(i, k, p) * direct_gradient[p + i];
        }
    return grad;
}

std::vector<double> fourier_gradient(const Graph& g, const FourierParams& fp) {
    return fourier_gradient(gradient(g, fourier_to_direct(fp)), fp);
}

QaoaParams interp_step(const QaoaParams& optimum) {
    optimum.validate();
    const int p = optimum.p();
    auto extend = [p](const std::vector<double>& x) {
        std::vector<double> out(p + 1);
        // 1-based: out_i = (i-1)/p x_{i-1} + (p-i+1)/p x_i, with x_0 = x_{p+1} = 0
        for (int i = 1; i <= p + 1; ++i) {
            const double left = i - 1 >= 1 ? x[i - 2] : 0.0;
            const double right = i <= p ? x[i - 1] : 0.0;
            out[i - 1] = double(i - 1) / p * left + double(p - i + 1) / p * right;
        }
        return out;
    };
    return {extend(optimum.gammas), extend(optimum.betas)};
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    // splitmix64 finalizer
    std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

QaoaParams random_init(int p, const KindTag& kind, std::uint64_t seed) {
    if (p < 1) throw ParameterError("p must be >= 1");
    std::mt19937_64 rng(seed);
    const double gamma_half = kind.weighted() ? 2.0 * pi : pi / 2.0;
    std::uniform_real_distribution<double> gamma(-gamma_half, gamma_half);
    std::uniform_real_distribution<double> beta(-pi / 4.0, pi / 4.0);
    QaoaParams params;
    for (int k = 0; k < p; ++k) {
        params.gammas.push_back(gamma(rng));
        params.betas.push_back(beta(rng));
    }
    return params;
}

namespace {

KindTag effective_kind(const Graph& g) {
    KindTag kind = g.kind();
    if (kind.kind == GraphKind::Arbitrary && is_weighted(g)) kind.kind = GraphKind::WeightedComplete;
    return kind;
}

LevelResult score(QaoaProblem& problem, QaoaParams params, std::optional<FourierParams> fourier, ChainTag chain) {
    LevelResult out;
    out.p = params.p();
    out.f_value = problem.value(params);
    out.p_gs = ground_state_population(problem.state(params), problem.maxcut());
    out.r = out.f_value / problem.c_max();
    out.best_params = std::move(params);
    out.best_fourier = std::move(fourier);
    out.chain = chain;
    return out;
}

bool degenerate_start(QaoaProblem& problem, const QaoaParams& start, const LocalOptions& options) {
    std::vector<double> grad(2 * start.p());
    problem.value_and_gradient(start, grad);
    double gmax = 0.0;
    for (double gk : grad) gmax = std::max(gmax, std::abs(gk));
    return gmax <= std::max(options.g_tol, 1e-12);
}

QaoaParams level_one_start(QaoaProblem& problem, const LocalOptions& options, std::uint64_t seed) {
    QaoaParams start{{kLevelOneStart}, {kLevelOneStart}};
    if (degenerate_start(problem, start, options)) start = random_init(1, effective_kind(problem.graph()), seed);
    return start;
}

}  // namespace

LevelResult optimize_direct(QaoaProblem& problem, const QaoaParams& start, const LocalOptions& options,
                            ChainTag chain) {
    start.validate();
    LocalResult local = local_optimize(problem.direct_objective(), start.flat(), options);
    LevelResult out = score(problem, QaoaParams::from_flat(local.x), std::nullopt, chain);
    out.n_evals = local.n_evals;
    out.converged = local.converged;
    out.grad_norm = local.grad_norm;
    return out;
}

LevelResult optimize_fourier(QaoaProblem& problem, const FourierParams& start, const LocalOptions& options,
                             ChainTag chain) {
    LocalResult local = local_optimize(problem.fourier_objective(start.p), start.flat(), options);
    FourierParams fp = FourierParams::from_flat(local.x, start.p);
    LevelResult out = score(problem, fourier_to_direct(fp), fp, chain);
    out.n_evals = local.n_evals;
    out.converged = local.converged;
    out.grad_norm = local.grad_norm;
    return out;
}

RiOutcome run_ri_strategy(QaoaProblem& problem, int p, int n_seeds, const LocalOptions& options,
                          std::uint64_t seed) {
    if (n_seeds < 1) throw ParameterError("RI needs at least one seed");
    RiOutcome outcome;
    const KindTag kind = effective_kind(problem.graph());
    for (int s = 0; s < n_seeds; ++s) {
        outcome.runs.push_back(optimize_direct(problem, random_init(p, kind, derive_seed(seed, s)), options));
        if (s == 0 || outcome.runs.back().f_value > outcome.best.f_value) outcome.best = outcome.runs.back();
    }
    return outcome;
}

std::vector<LevelResult> run_interp_strategy(QaoaProblem& problem, int p_max, const LocalOptions& options,
                                             std::uint64_t seed) {
    if (p_max < 1) throw ParameterError("p_max must be >= 1");
    std::vector<LevelResult> levels;
    QaoaParams start = level_one_start(problem, options, seed);
    for (int p = 1; p <= p_max; ++p) {
        LevelResult level;
        try {
            level = optimize_direct(problem, start, options, ChainTag::L);
        } catch (const NumericalError&) {
            level = score(problem, start, std::nullopt, ChainTag::L);
            level.converged = false;
        }
        levels.push_back(level);
        if (p < p_max) start = interp_step(level.best_params);
    }
    return levels;
}

std::vector<LevelResult> run_fourier_strategy(QaoaProblem& problem, const StrategyConfig& config) {
    config.validate();
    const LocalOptions& options = config.local;
    auto components_at = [&](int p) { return config.q == 0 ? p : std::min(p, config.q); };
    auto extend = [&](const FourierParams& fp, int p) {
        FourierParams next = fp;
        next.p = p;
        if (next.q() < components_at(p)) {
            next.u.push_back(0.0);
            next.v.push_back(0.0);
        }
        return next;
    };
    auto attempt = [&](const FourierParams& start, ChainTag chain) {
        try {
            return optimize_fourier(problem, start, options, chain);
        } catch (const NumericalError&) {
            // failed optimization: carry the start point forward, flagged
            LevelResult carried = score(problem, fourier_to_direct(start), start, chain);
            carried.converged = false;
            return carried;
        }
    };

    std::vector<LevelResult> levels;
    const FourierParams first = direct_to_fourier(level_one_start(problem, options, config.seed));
    LevelResult chain_l = attempt(first, ChainTag::L);
    LevelResult chain_b = chain_l;
    chain_b.chain = ChainTag::B;
    levels.push_back(chain_l);
    levels.push_back(chain_b);

    for (int p = 2; p <= config.p_max; ++p) {
        LevelResult next_l = attempt(extend(*chain_l.best_fourier, p), ChainTag::L);
        LevelResult next_b = next_l;
        next_b.chain = ChainTag::B;
        long total_evals = next_l.n_evals;

        if (config.R > 0) {
            auto consider = [&](LevelResult candidate) {
                total_evals += candidate.n_evals;
                if (candidate.f_value > next_b.f_value) next_b = std::move(candidate);
            };
            const FourierParams& base = *chain_b.best_fourier;
            // the unperturbed B start coincides with the L start while the chains agree
            if (!(base == *chain_l.best_fourier)) consider(attempt(extend(base, p), ChainTag::B));

            std::mt19937_64 rng(derive_seed(config.seed, static_cast<std::uint64_t>(p)));
            std::normal_distribution<double> normal(0.0, 1.0);
            for (int r = 1; r <= config.R; ++r) {
                FourierParams perturbed = base;
                for (double& uk : perturbed.u) uk += config.alpha * std::abs(uk) * normal(rng);
                for (double& vk : perturbed.v) vk += config.alpha * std::abs(vk) * normal(rng);
                consider(attempt(extend(perturbed, p), ChainTag::B));
            }
            next_b.chain = ChainTag::B;
        }
        next_b.n_evals = total_evals;

        levels.push_back(next_l);
        levels.push_back(next_b);
        chain_l = std::move(next_l);
        chain_b = std::move(next_b);
    }
    return levels;
}

std::vector<LevelResult> run_strategy(QaoaProblem& problem, const StrategyConfig& config) {
    config.validate();
    switch (config.strategy) {
    case Strategy::Interp: return run_interp_strategy(problem, config.p_max, config.local, config.seed);
    case Strategy::Fourier: return run_fourier_strategy(problem, config);
    case Strategy::RandomInit: {
        std::vector<LevelResult> levels;
        for (int p = 1; p <= config.p_max; ++p)
            levels.push_back(
                run_ri_strategy(problem, p, config.ri_seeds, config.local, derive_seed(config.seed, 1000 + p)).best);
        return levels;
    }
    }
    return {};
}

RunsToMatch runs_to_match(QaoaProblem& problem, int p, double heuristic_value, double tol,
                          const LocalOptions& options, std::uint64_t seed, long cap) {
    if (cap < 1) throw ParameterError("runs_to_match cap must be >= 1");
    const KindTag kind = effective_kind(problem.graph());
    for (long k = 0; k < cap; ++k) {
        const LevelResult run = optimize_direct(problem, random_init(p, kind, derive_seed(seed, k)), options);
        if (run.f_value >= heuristic_value - tol) return {k + 1, false};
    }
    return {cap, true};
}

}  // namespace qaoalab
