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

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qaoalab/annealer.hpp"
#include "qaoalab/optimizer.hpp"

namespace qaoalab {

inline constexpr double kTargetProbability = 0.99;
/// p_gs at or above 1 - kCertainTolerance counts as certain success in one run.
inline constexpr double kCertainTolerance = 1e-12;

enum class TtsKind { QA, QAOA };
std::string to_string(TtsKind kind);
TtsKind tts_kind_from_string(const std::string& text);

/// run_time * ln(1 - p_d) / ln(1 - p_gs). Returns +inf for p_gs = 0 and run_time when p_gs is
/// numerically 1. Throws ParameterError for p_gs outside [0, 1] or non-positive run_time.
double tts(double run_time, double p_gs, double p_d = kTargetProbability);

struct TtsRecord {
    TtsKind kind = TtsKind::QA;
    double control = 0.0;   // T for QA, p for QAOA
    double run_time = 0.0;  // T, or sum_i (|gamma_i| + |beta_i|)
    double p_gs = 0.0;
    double tts = 0.0;       // +inf when censored

    bool censored() const { return !std::isfinite(tts); }
};

TtsRecord qa_record(double total_time, double p_gs, double p_d = kTargetProbability);
TtsRecord qaoa_record(const LevelResult& level, double p_d = kTargetProbability);

/// Linear-ramp QA over a grid of total times; `cost` may be full or parity-reduced.
std::vector<TtsRecord> qa_tts_scan(const DiagonalCost& cost, const CutResult& maxcut, std::span<const double> t_grid,
                                   const StepControl& control = {}, double p_d = kTargetProbability);

/// n points from lo to hi, equally spaced in log.
std::vector<double> log_spaced(double lo, double hi, int n);

struct OptimalTts {
    double tts = 0.0;
    double control = 0.0;
    int considered = 0;
    int censored = 0;
    bool found = false;
};

/// Minimum over the non-censored records.
OptimalTts optimal_tts(std::span<const TtsRecord> records);

enum class ScalingModel { Exponential, Stretched };
std::string to_string(ScalingModel model);
ScalingModel scaling_model_from_string(const std::string& text);

/// ln(1 - r) = ln(prefactor) - p / p0            (exponential)
/// ln(1 - r) = ln(prefactor) - sqrt(p / p0)      (stretched)
/// p0 is +inf when the fitted slope is not negative.
struct ScalingFit {
    ScalingModel model = ScalingModel::Exponential;
    double p0 = 0.0;
    double prefactor = 0.0;
    double residual = 0.0;  // rms of ln(1 - r) residuals
    int n_used = 0;
    int n_dropped = 0;      // points with 1 - r <= 1e-12
};

/// points are (p, 1 - r); needs two usable points.
ScalingFit fit_scaling(std::span<const std::pair<double, double>> points, ScalingModel model);

/// Pearson correlation of (ln x, ln y) over pairs where both are finite and positive.
double log_correlation(std::span<const double> xs, std::span<const double> ys);

}  // namespace qaoalab
