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
#include <functional>
#include <string>
#include <vector>

#include "qaoalab/serialize.hpp"

namespace qaoalab {

inline constexpr int kRecordSchemaVersion = 1;

struct EnsembleSpec {
    std::vector<int> n{10};
    std::vector<std::string> kinds{"u3R"};  // u3R, w3R or ring
    int count = 0;
    std::uint64_t seed = 1;
};

struct TimeGrid {
    double lo = 2.0;
    double hi = 200.0;
    int points = 12;
};

struct NoiseMode {
    int start_level = 1;
    NoisyInit init = NoisyInit::Educated;
};

struct NoisePlan {
    NoiseConfig config;
    std::vector<NoiseMode> modes{{1, NoisyInit::Educated}, {5, NoisyInit::Educated}, {1, NoisyInit::Random}};
    int seeds = 20;
    int p_max = 6;
    std::vector<double> qa_times{10.0, 100.0};
    long qa_shots = 2000;
};

struct PopulationPlan {
    double total_time = 40.0;
    int samples = 41;
    int k = 4;
};

/// A named recipe plus everything it needs. Recipes: fig2, fig3b, fig4, fig5, fig6, fig7, fig8a.
struct ExperimentPlan {
    std::string recipe;
    EnsembleSpec ensemble;
    StrategyConfig strategy;
    TimeGrid t_grid;
    double gap_resolution = 0.01;
    long rtm_cap = 10000;
    double rtm_tol = 1e-6;
    NoisePlan noise;
    PopulationPlan populations;

    /// Throws ParameterError (or CapacityError for N beyond the simulator cap).
    void validate() const;
};

std::vector<std::string> recipe_names();
/// Desk-scale defaults for a recipe.
ExperimentPlan default_plan(const std::string& recipe);
/// Recipe defaults overridden by the fields present in j.
ExperimentPlan plan_from_json(const Json& j);
Json plan_to_json(const ExperimentPlan& plan);
ExperimentPlan load_plan(const std::filesystem::path& path);

struct RunOptions {
    int workers = 1;
    std::function<void(const std::string&)> log;
};

struct PlanSummary {
    int computed = 0;
    int reused = 0;
    std::vector<std::string> failures;
    std::vector<std::string> outputs;  // summary CSVs, relative to the plan directory
};

/// Layout under dir: plan.json, graphs/<sha>.txt, records/<id>.json, ledgers/<id>.csv,
/// summary/*.csv, manifest.json. Records are content addressed by (module, graph hash, config),
/// so a rerun only computes what is missing.
PlanSummary run_plan(const ExperimentPlan& plan, const std::filesystem::path& dir, const RunOptions& options = {});

struct VerifyReport {
    int records = 0;
    std::vector<std::string> issues;
    bool clean() const { return issues.empty(); }
};

/// Re-check stored records: graph hashes, record ids, r and p_gs ranges, ledger integrity.
VerifyReport verify_records(const std::filesystem::path& dir);

/// $QAOALAB_CACHE_DIR, else ./qaoalab-runs.
std::filesystem::path default_output_dir();

/// Write-temp-then-rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

/// Instance j of size n and the given kind for an ensemble seed.
Graph make_instance(const std::string& kind, int n, int index, std::uint64_t seed);

}  // namespace qaoalab
