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

#include "qaoalab/tts.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qaoalab/error.hpp"

namespace qaoalab {

std::string to_string(TtsKind kind) { return kind == TtsKind::QA ? "qa" : "qaoa"; }

TtsKind tts_kind_from_string(const std::string& text) {
    if (text == "qa" || text == "QA") return TtsKind::QA;
    if (text == "qaoa" || text == "QAOA") return TtsKind::QAOA;
    throw ParameterError("unknown TTS kind '" + text + "'");
}

double tts(double run_time, double p_gs, double p_d) {
    if (!(run_time > 0.0) || !std::isfinite(run_time)) throw ParameterError("run time must be positive");
    if (!(p_d > 0.0 && p_d < 1.0)) throw ParameterError("target probability must lie in (0, 1)");
    if (!(p_gs >= -1e-12 && p_gs <= 1.0 + 1e-9)) throw ParameterError("ground-state population outside [0, 1]");
    if (p_gs <= 0.0) return std::numeric_limits<double>::infinity();
    if (p_gs >= 1.0 - kCertainTolerance) return run_time;
    return run_time * std::log1p(-p_d) / std::log1p(-p_gs);
}

TtsRecord qa_record(double total_time, double p_gs, double p_d) {
    return {TtsKind::QA, total_time, total_time, p_gs, tts(total_time, p_gs, p_d)};
}

TtsRecord qaoa_record(const LevelResult& level, double p_d) {
    const double run_time = qaoa_run_time(level.best_params);
    return {TtsKind::QAOA, double(level.p), run_time, level.p_gs, tts(run_time, level.p_gs, p_d)};
}

std::vector<TtsRecord> qa_tts_scan(const DiagonalCost& cost, const CutResult& maxcut, std::span<const double> t_grid,
                                   const StepControl& control, double p_d) {
    std::vector<TtsRecord> out;
    out.reserve(t_grid.size());
    for (double t : t_grid)
        out.push_back(qa_record(t, ground_state_population(evolve(cost, linear_ramp(t), control), maxcut), p_d));
    return out;
}

std::vector<double> log_spaced(double lo, double hi, int n) {
    if (!(lo > 0.0 && hi >= lo) || n < 1) throw ParameterError("log grid needs 0 < lo <= hi and n >= 1");
    if (n == 1) return {lo};
    std::vector<double> grid(n);
    const double step = std::log(hi / lo) / (n - 1);
    for (int i = 0; i < n; ++i) grid[i] = lo * std::exp(step * i);
    grid.back() = hi;
    return grid;
}

OptimalTts optimal_tts(std::span<const TtsRecord> records) {
    OptimalTts best;
    for (const auto& r : records) {
        ++best.considered;
        if (r.censored()) {
            ++best.censored;
            continue;
        }
        if (!best.found || r.tts < best.tts) {
            best.tts = r.tts;
            best.control = r.control;
            best.found = true;
        }
    }
    return best;
}

std::string to_string(ScalingModel model) { return model == ScalingModel::Exponential ? "exp" : "stretched"; }

ScalingModel scaling_model_from_string(const std::string& text) {
    if (text == "exp" || text == "exponential") return ScalingModel::Exponential;
    if (text == "stretched") return ScalingModel::Stretched;
    throw ParameterError("unknown scaling model '" + text + "'");
}

ScalingFit fit_scaling(std::span<const std::pair<double, double>> points, ScalingModel model) {
    // sort a copy so the floating-point sums do not depend on input order
    std::vector<std::pair<double, double>> sorted(points.begin(), points.end());
    std::sort(sorted.begin(), sorted.end());
    ScalingFit fit;
    fit.model = model;
    std::vector<std::pair<double, double>> xy;
    for (const auto& [p, err] : sorted) {
        if (!(err > 1e-12) || !std::isfinite(err)) {
            ++fit.n_dropped;
            continue;
        }
        if (!(p >= 0.0)) throw ParameterError("level must be non-negative");
        xy.emplace_back(model == ScalingModel::Exponential ? p : std::sqrt(p), std::log(err));
    }
    fit.n_used = static_cast<int>(xy.size());
    if (fit.n_used < 2) throw ParameterError("scaling fit needs at least two points with 1 - r > 1e-12");

    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : xy) {
        mx += x;
        my += y;
    }
    mx /= xy.size();
    my /= xy.size();
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [x, y] : xy) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if (sxx == 0.0) throw ParameterError("scaling fit needs at least two distinct levels");
    const double slope = sxy / sxx, intercept = my - slope * mx;
    fit.prefactor = std::exp(intercept);
    if (slope < 0.0)
        fit.p0 = model == ScalingModel::Exponential ? -1.0 / slope : 1.0 / (slope * slope);
    else
        fit.p0 = std::numeric_limits<double>::infinity();
    double ss = 0.0;
    for (const auto& [x, y] : xy) ss += (y - intercept - slope * x) * (y - intercept - slope * x);
    fit.residual = std::sqrt(ss / xy.size());
    return fit;
}

double log_correlation(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw ParameterError("correlation needs equal-length inputs");
    std::vector<std::pair<double, double>> logs;
    for (std::size_t k = 0; k < xs.size(); ++k)
        if (xs[k] > 0.0 && ys[k] > 0.0 && std::isfinite(xs[k]) && std::isfinite(ys[k]))
            logs.emplace_back(std::log(xs[k]), std::log(ys[k]));
    if (logs.size() < 2) throw ParameterError("correlation needs at least two usable pairs");
    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : logs) {
        mx += x;
        my += y;
    }
    mx /= logs.size();
    my /= logs.size();
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (const auto& [x, y] : logs) {
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
        sxy += (x - mx) * (y - my);
    }
    if (sxx == 0.0 || syy == 0.0) throw ParameterError("correlation undefined for constant inputs");
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace qaoalab
