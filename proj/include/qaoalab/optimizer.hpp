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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qaoalab/graph.hpp"
#include "qaoalab/local_optimizer.hpp"
#include "qaoalab/statevector.hpp"

namespace qaoalab {

/// Amplitudes of the sine (u) and cosine (v) components of a level-p schedule:
///   gamma_i = sum_k u_k sin[(k - 1/2)(i - 1/2) pi / p]
///   beta_i  = sum_k v_k cos[(k - 1/2)(i - 1/2) pi / p]
struct FourierParams {
    std::vector<double> u;
    std::vector<double> v;
    int p = 1;

    int q() const { return static_cast<int>(u.size()); }
    std::vector<double> flat() const;
    static FourierParams from_flat(std::span<const double> x, int p);

    friend bool operator==(const FourierParams&, const FourierParams&) = default;
};

/// Graph plus everything derived from it that the optimizers reuse:
/// the exact MaxCut oracle and a simulator in the chosen basis.
class QaoaProblem {
public:
    explicit QaoaProblem(Graph g, Basis basis = Basis::Full);

    const Graph& graph() const { return graph_; }
    const CutResult& maxcut() const { return maxcut_; }
    double c_max() const { return maxcut_.c_max; }
    Basis basis() const { return simulator_.cost().basis(); }
    const DiagonalCost& cost() const { return simulator_.cost(); }

    double value(const QaoaParams& params) { return simulator_.value(params); }
    double value_and_gradient(const QaoaParams& params, std::span<double> grad) {
        return simulator_.value_and_gradient(params, grad);
    }
    StateVector state(const QaoaParams& params);
    double ground_state_population(const QaoaParams& params);

    /// F_p over flat (gammas..., betas...).
    Objective direct_objective();
    /// F_p over flat (u..., v...) at level p.
    Objective fourier_objective(int p);

private:
    Graph graph_;
    CutResult maxcut_;
    QaoaSimulator simulator_;
};

enum class Strategy { RandomInit, Interp, Fourier };
enum class ChainTag { L, B };

std::string to_string(Strategy s);
Strategy strategy_from_string(const std::string& text);
std::string to_string(ChainTag c);

struct StrategyConfig {
    Strategy strategy = Strategy::Fourier;
    int q = 0;  // 0 = unbounded (q = p)
    int R = 0;
    double alpha = 0.6;
    int p_max = 10;
    std::uint64_t seed = 0;
    int ri_seeds = 1;
    LocalOptions local;

    /// Throws ParameterError on inconsistent settings.
    void validate() const;
};

struct LevelResult {
    int p = 0;
    QaoaParams best_params;
    std::optional<FourierParams> best_fourier;
    double f_value = 0.0;
    double r = 0.0;
    double p_gs = 0.0;
    long n_evals = 0;
    ChainTag chain = ChainTag::L;
    bool converged = false;
    double grad_norm = 0.0;
};

/// Level-1 starting point shared by the INTERP and FOURIER chains.
inline constexpr double kLevelOneStart = 0.01;

QaoaParams fourier_to_direct(const FourierParams& fp);
/// Inverse of fourier_to_direct for q = p.
FourierParams direct_to_fourier(const QaoaParams& params);
/// Chain rule through the sine/cosine transform: (dF/du..., dF/dv...).
std::vector<double> fourier_gradient(std::span<const double> direct_gradient, const FourierParams& fp);
std::vector<double> fourier_gradient(const Graph& g, const FourierParams& fp);

QaoaParams interp_step(const QaoaParams& optimum);

/// beta ~ U[-pi/4, pi/4); gamma ~ U[-pi/2, pi/2) for unweighted kinds, U[-2 pi, 2 pi) for weighted.
QaoaParams random_init(int p, const KindTag& kind, std::uint64_t seed);

/// Seed of the k-th independent run derived from a base seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

/// Optimize and score one start point in direct parameters.
LevelResult optimize_direct(QaoaProblem& problem, const QaoaParams& start, const LocalOptions& options,
                            ChainTag chain = ChainTag::L);
/// Optimize and score one start point in (u, v) parameters at level fp.p.
LevelResult optimize_fourier(QaoaProblem& problem, const FourierParams& start, const LocalOptions& options,
                             ChainTag chain = ChainTag::L);

struct RiOutcome {
    LevelResult best;
    std::vector<LevelResult> runs;
};

RiOutcome run_ri_strategy(QaoaProblem& problem, int p, int n_seeds, const LocalOptions& options,
                          std::uint64_t seed);

std::vector<LevelResult> run_interp_strategy(QaoaProblem& problem, int p_max, const LocalOptions& options,
                                             std::uint64_t seed = 0);

/// FOURIER[q, R]. Returns, for every level, the L-chain result followed by the B-chain result.
std::vector<LevelResult> run_fourier_strategy(QaoaProblem& problem, const StrategyConfig& config);

/// Dispatches on config.strategy (RI runs config.ri_seeds seeds at every level).
std::vector<LevelResult> run_strategy(QaoaProblem& problem, const StrategyConfig& config);

struct RunsToMatch {
    long runs = 0;
    bool censored = false;
};

inline constexpr long kRunsToMatchCap = 100000;

/// Random-init runs needed until one reaches heuristic_value - tol.
RunsToMatch runs_to_match(QaoaProblem& problem, int p, double heuristic_value, double tol, const LocalOptions& options,
                          std::uint64_t seed, long cap = kRunsToMatchCap);

}  // namespace qaoalab
