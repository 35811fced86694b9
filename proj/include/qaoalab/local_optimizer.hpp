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

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace qaoalab {

/// Objective to be maximized. `value_and_gradient` is optional; without it
/// the optimizer falls back to forward differences with LocalOptions::fd_step.
struct Objective {
    std::function<double(std::span<const double>)> value;
    std::function<double(std::span<const double>, std::span<double>)> value_and_gradient;
};

enum class LocalMethod { Bfgs, NelderMead };

std::string to_string(LocalMethod method);
LocalMethod local_method_from_string(const std::string& text);

/// Termination: stop when any of the enabled criteria holds.
///   |f' - f| <= f_tol, ||x' - x||_2 <= x_tol, ||grad||_inf <= g_tol (BFGS only).
/// A tolerance <= 0 disables that criterion.
struct LocalOptions {
    LocalMethod method = LocalMethod::Bfgs;
    double f_tol = 1e-8;
    double x_tol = 1e-8;
    double g_tol = 1e-6;
    int max_iterations = 2000;
    long max_evaluations = 200000;
    double fd_step = 1e-7;
    // consecutive steps with |f' - f| <= f_tol before stopping; a single flat step can
    // happen far from a stationary point
    int flat_steps_to_stop = 2;
};

struct LocalResult {
    std::vector<double> x;
    double f = 0.0;
    long n_evals = 0;
    int iterations = 0;
    bool converged = false;
    double grad_norm = 0.0;  // inf-norm at x; NaN for Nelder-Mead
    std::string stop_reason;
};

/// Local ascent from x0. Throws NumericalError on a non-finite objective value.
LocalResult local_optimize(const Objective& objective, std::vector<double> x0, const LocalOptions& options = {});

}  // namespace qaoalab
