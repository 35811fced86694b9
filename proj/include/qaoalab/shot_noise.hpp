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
#include <filesystem>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "qaoalab/optimizer.hpp"

namespace qaoalab {

struct NoiseConfig {
    double epsilon = 0.1;  // objective tolerance
    double xi = 0.05;      // target standard error per estimate
    double delta = 0.01;   // step tolerance and finite-difference step
    std::uint64_t seed = 0;
    long min_samples = 10;
    long max_samples_per_estimate = 10'000'000;
    int max_iterations = 200;  // per level

    void validate() const;
};

struct LedgerEntry {
    long index = 0;  // 1-based
    double cut = 0.0;
    double best_cut = 0.0;
};

/// Every measurement taken in one experiment, in order, with the best cut seen so far.
class MeasurementLedger {
public:
    void record(double cut);
    const std::vector<LedgerEntry>& entries() const { return entries_; }
    long size() const { return static_cast<long>(entries_.size()); }
    double best_cut() const { return entries_.empty() ? 0.0 : entries_.back().best_cut; }
    /// First index whose cut reaches target - tol, or 0 when none does.
    long first_hit(double target, double tol = 1e-9) const;
    /// Invariants: contiguous indices from 1, best cut non-decreasing and equal to the running max.
    bool consistent() const;

    void write_csv(std::ostream& os) const;
    static MeasurementLedger read_csv(std::istream& is);

private:
    std::vector<LedgerEntry> entries_;
};

struct NoisyEstimate {
    double f_bar = 0.0;
    long m = 0;
    double sem = 0.0;
};

/// Sample the state until m >= min_samples and the standard error of the mean is <= xi.
/// `cost` may be in either basis; samples are appended to `ledger`.
NoisyEstimate estimate_objective(const StateVector& s, const DiagonalCost& cost, const NoiseConfig& config,
                                 std::mt19937_64& rng, MeasurementLedger& ledger);

struct NoisyLevel {
    LevelResult level;  // f_value, r and p_gs are noiseless diagnostics at the final parameters
    double f_bar = 0.0; // last noisy estimate at the final parameters
    long measurements = 0;
    std::string stop_reason;
};

/// Forward-difference BFGS in (u, v) space where every objective value is a fresh noisy estimate.
NoisyLevel noisy_local_optimize(QaoaProblem& problem, const FourierParams& start, const NoiseConfig& config,
                                std::mt19937_64& rng, MeasurementLedger& ledger);

/// Educated (u, v) starts at level 1 and level 5.
FourierParams educated_start(int level);

enum class NoisyInit { Educated, Random };
std::string to_string(NoisyInit init);
NoisyInit noisy_init_from_string(const std::string& text);

struct NoisyExperiment {
    MeasurementLedger ledger;
    std::vector<NoisyLevel> levels;
};

/// FOURIER[inf, 0] under noisy estimation from start_level (1 or 5) up to p_max.
/// Random initialization is only defined at level 1.
NoisyExperiment run_noisy_experiment(QaoaProblem& problem, int start_level, NoisyInit init, const NoiseConfig& config,
                                     int p_max);

/// Linear-ramp QA once per T, then `shots` measurements of the final state.
std::vector<MeasurementLedger> qa_baseline_ledgers(const Graph& g, std::span<const double> t_list, long shots,
                                                   std::uint64_t seed);

}  // namespace qaoalab
