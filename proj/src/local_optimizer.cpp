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

#include "qaoalab/local_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "qaoalab/error.hpp"

namespace qaoalab {

std::string to_string(LocalMethod method) { return method == LocalMethod::Bfgs ? "bfgs" : "nelder-mead"; }

LocalMethod local_method_from_string(const std::string& text) {
    if (text == "bfgs") return LocalMethod::Bfgs;
    if (text == "nelder-mead" || text == "nm") return LocalMethod::NelderMead;
    throw ParameterError("unknown local optimizer '" + text + "'");
}

namespace {

using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b) { return std::inner_product(a.begin(), a.end(), b.begin(), 0.0); }

double norm_inf(const Vec& a) {
    double m = 0.0;
    for (double x : a) m = std::max(m, std::abs(x));
    return m;
}

// Minimization view of the (maximized) objective with evaluation bookkeeping.
class Minimand {
public:
    Minimand(const Objective& objective, const LocalOptions& options) : objective_(objective), options_(options) {}

    double value(const Vec& x) {
        ++evals_;
        return checked(-objective_.value(x));
    }

    double value_and_gradient(const Vec& x, Vec& grad) {
        if (objective_.value_and_gradient) {
            ++evals_;
            const double f = objective_.value_and_gradient(x, grad);
            for (double& gk : grad) gk = -gk;
            return checked(-f);
        }
        // forward differences
        const double phi = value(x);
        Vec shifted = x;
        for (std::size_t k = 0; k < x.size(); ++k) {
            shifted[k] = x[k] + options_.fd_step;
            grad[k] = (value(shifted) - phi) / options_.fd_step;
            shifted[k] = x[k];
        }
        return phi;
    }

    long evals() const { return evals_; }
    bool budget_exhausted() const { return evals_ >= options_.max_evaluations; }

private:
    static double checked(double v) {
        if (!std::isfinite(v)) throw NumericalError("objective returned a non-finite value");
        return v;
    }

    const Objective& objective_;
    const LocalOptions& options_;
    long evals_ = 0;
};

struct Probe {
    double alpha = 0.0;
    double phi = 0.0;
    double slope = 0.0;
    Vec x;
    Vec grad;
};

struct LineSearchResult {
    Probe point;
    bool wolfe = false;
};

// Strong-Wolfe line search (bracketing + zoom with safeguarded quadratic interpolation).
LineSearchResult line_search(Minimand& fn, const Probe& start, const Vec& dir, double alpha0) {
    constexpr double c1 = 1e-4, c2 = 0.9;
    constexpr int kMaxProbes = 30;
    const double phi0 = start.phi, slope0 = start.slope;

    auto probe_at = [&](double alpha) {
        Probe p;
        p.alpha = alpha;
        p.x = start.x;
        for (std::size_t k = 0; k < dir.size(); ++k) p.x[k] += alpha * dir[k];
        p.grad.resize(dir.size());
        p.phi = fn.value_and_gradient(p.x, p.grad);
        p.slope = dot(p.grad, dir);
        return p;
    };

    auto zoom = [&](Probe lo, Probe hi, int budget) -> LineSearchResult {
        for (int j = 0; j < budget && !fn.budget_exhausted(); ++j) {
            const double a = lo.alpha, b = hi.alpha;
            const double width = b - a;
            // minimizer of the quadratic through (a, phi_lo, slope_lo) and (b, phi_hi)
            const double denom = 2.0 * (hi.phi - lo.phi - lo.slope * width);
            double alpha = denom > 0.0 ? a - lo.slope * width * width / denom : 0.5 * (a + b);
            const double lo_edge = std::min(a, b) + 0.1 * std::abs(width);
            const double hi_edge = std::max(a, b) - 0.1 * std::abs(width);
            if (!(alpha >= lo_edge && alpha <= hi_edge)) alpha = 0.5 * (a + b);
            if (std::abs(width) < 1e-16) break;

            Probe p = probe_at(alpha);
            if (p.phi > phi0 + c1 * alpha * slope0 || p.phi >= lo.phi) {
                hi = std::move(p);
            } else {
                if (std::abs(p.slope) <= -c2 * slope0) return {std::move(p), true};
                if (p.slope * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
                lo = std::move(p);
            }
        }
        return {std::move(lo), false};
    };

    Probe prev = start;
    prev.alpha = 0.0;
    double alpha = alpha0;
    for (int i = 0; i < kMaxProbes && !fn.budget_exhausted(); ++i) {
        Probe p = probe_at(alpha);
        if (p.phi > phi0 + c1 * alpha * slope0 || (i > 0 && p.phi >= prev.phi))
            return zoom(std::move(prev), std::move(p), kMaxProbes - i);
        if (std::abs(p.slope) <= -c2 * slope0) return {std::move(p), true};
        if (p.slope >= 0.0) return zoom(std::move(p), std::move(prev), kMaxProbes - i);
        prev = std::move(p);
        alpha *= 2.0;
    }
    return {std::move(prev), false};
}

LocalResult run_bfgs(Minimand& fn, Vec x0, const LocalOptions& opt) {
    const std::size_t n = x0.size();
    LocalResult result;

    Probe current;
    current.x = std::move(x0);
    current.grad.resize(n);
    current.phi = fn.value_and_gradient(current.x, current.grad);

    // inverse Hessian approximation, row-major
    Vec inv_hess(n * n, 0.0);
    auto reset = [&](double scale) {
        std::fill(inv_hess.begin(), inv_hess.end(), 0.0);
        for (std::size_t k = 0; k < n; ++k) inv_hess[k * n + k] = scale;
    };
    reset(1.0);
    bool fresh = true;

    Vec dir(n), hy(n);
    int flat_steps = 0;
    for (result.iterations = 0; result.iterations < opt.max_iterations; ++result.iterations) {
        if (opt.g_tol > 0.0 && norm_inf(current.grad) <= opt.g_tol) {
            result.converged = true;
            result.stop_reason = "gradient tolerance";
            break;
        }
        if (fn.budget_exhausted()) {
            result.stop_reason = "evaluation budget";
            break;
        }
        for (std::size_t r = 0; r < n; ++r) {
            double s = 0.0;
            for (std::size_t c = 0; c < n; ++c) s -= inv_hess[r * n + c] * current.grad[c];
            dir[r] = s;
        }
        current.slope = dot(dir, current.grad);
        if (!(current.slope < 0.0)) {
            reset(1.0);
            fresh = true;
            for (std::size_t k = 0; k < n; ++k) dir[k] = -current.grad[k];
            current.slope = dot(dir, current.grad);
        }
        const double alpha0 = fresh ? std::min(1.0, 1.0 / std::max(norm_inf(current.grad), 1e-300)) : 1.0;
        auto [next, wolfe] = line_search(fn, current, dir, alpha0);
        if (next.alpha <= 0.0 || !(next.phi <= current.phi)) {
            if (!fresh) {
                reset(1.0);
                fresh = true;
                continue;
            }
            result.stop_reason = "line search made no progress";
            result.converged = opt.g_tol <= 0.0 || norm_inf(current.grad) <= std::sqrt(opt.g_tol);
            break;
        }

        Vec s(n), y(n);
        for (std::size_t k = 0; k < n; ++k) {
            s[k] = next.x[k] - current.x[k];
            y[k] = next.grad[k] - current.grad[k];
        }
        const double df = std::abs(next.phi - current.phi);
        const double step = std::sqrt(dot(s, s));
        const double sy = dot(s, y);
        if (sy > 1e-12 * std::sqrt(dot(s, s) * dot(y, y))) {
            if (fresh) reset(sy / dot(y, y));
            // H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T
            const double rho = 1.0 / sy;
            for (std::size_t r = 0; r < n; ++r) {
                double acc = 0.0;
                for (std::size_t c = 0; c < n; ++c) acc += inv_hess[r * n + c] * y[c];
                hy[r] = acc;
            }
            const double yhy = dot(y, hy);
            for (std::size_t r = 0; r < n; ++r)
                for (std::size_t c = 0; c < n; ++c)
                    inv_hess[r * n + c] +=
                        -rho * (hy[r] * s[c] + s[r] * hy[c]) + (rho * rho * yhy + rho) * s[r] * s[c];
            fresh = false;
        }
        current = std::move(next);
        (void)wolfe;

        flat_steps = df <= opt.f_tol ? flat_steps + 1 : 0;
        if (opt.f_tol > 0.0 && flat_steps >= std::max(1, opt.flat_steps_to_stop)) {
            result.converged = true;
            result.stop_reason = "objective tolerance";
            ++result.iterations;
            break;
        }
        if (opt.x_tol > 0.0 && step <= opt.x_tol) {
            result.converged = true;
            result.stop_reason = "step tolerance";
            ++result.iterations;
            break;
        }
    }
    if (result.stop_reason.empty()) result.stop_reason = "iteration limit";

    result.x = std::move(current.x);
    result.f = -current.phi;
    result.grad_norm = norm_inf(current.grad);
    return result;
}

LocalResult run_nelder_mead(Minimand& fn, Vec x0, const LocalOptions& opt) {
    const std::size_t n = x0.size();
    std::vector<Vec> simplex(n + 1, x0);
    Vec values(n + 1);
    for (std::size_t k = 0; k < n; ++k) simplex[k + 1][k] = x0[k] != 0.0 ? 1.05 * x0[k] : 0.00025;
    for (std::size_t k = 0; k <= n; ++k) values[k] = fn.value(simplex[k]);

    LocalResult result;
    std::vector<std::size_t> order(n + 1);
    Vec centroid(n), trial(n), trial2(n);
    for (result.iterations = 0; result.iterations < opt.max_iterations; ++result.iterations) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];

        double fspread = 0.0, xspread = 0.0;
        for (std::size_t k = 0; k <= n; ++k) {
            fspread = std::max(fspread, std::abs(values[k] - values[best]));
            for (std::size_t c = 0; c < n; ++c) xspread = std::max(xspread, std::abs(simplex[k][c] - simplex[best][c]));
        }
        if (fspread <= std::max(opt.f_tol, 0.0) && xspread <= std::max(opt.x_tol, 0.0)) {
            result.converged = true;
            result.stop_reason = "simplex tolerance";
            break;
        }
        if (fn.budget_exhausted()) {
            result.stop_reason = "evaluation budget";
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t k = 0; k <= n; ++k)
            if (k != worst)
                for (std::size_t c = 0; c < n; ++c) centroid[c] += simplex[k][c] / double(n);

        for (std::size_t c = 0; c < n; ++c) trial[c] = centroid[c] + (centroid[c] - simplex[worst][c]);
        const double f_reflect = fn.value(trial);
        if (f_reflect < values[best]) {
            for (std::size_t c = 0; c < n; ++c) trial2[c] = centroid[c] + 2.0 * (centroid[c] - simplex[worst][c]);
            const double f_expand = fn.value(trial2);
            if (f_expand < f_reflect) {
                simplex[worst] = trial2;
                values[worst] = f_expand;
            } else {
                simplex[worst] = trial;
                values[worst] = f_reflect;
            }
            continue;
        }
        if (f_reflect < values[second]) {
            simplex[worst] = trial;
            values[worst] = f_reflect;
            continue;
        }
        const bool outside = f_reflect < values[worst];
        for (std::size_t c = 0; c < n; ++c)
            trial2[c] = outside ? centroid[c] + 0.5 * (trial[c] - centroid[c])
                                : centroid[c] + 0.5 * (simplex[worst][c] - centroid[c]);
        const double f_contract = fn.value(trial2);
        if (f_contract < std::min(f_reflect, values[worst])) {
            simplex[worst] = trial2;
            values[worst] = f_contract;
            continue;
        }
        for (std::size_t k = 0; k <= n; ++k) {
            if (k == best) continue;
            for (std::size_t c = 0; c < n; ++c) simplex[k][c] = simplex[best][c] + 0.5 * (simplex[k][c] - simplex[best][c]);
            values[k] = fn.value(simplex[k]);
        }
    }
    if (result.stop_reason.empty()) result.stop_reason = "iteration limit";

    const std::size_t best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
    result.x = simplex[best];
    result.f = -values[best];
    result.grad_norm = std::numeric_limits<double>::quiet_NaN();
    return result;
}

}  // namespace

LocalResult local_optimize(const Objective& objective, std::vector<double> x0, const LocalOptions& options) {
    if (x0.empty()) throw ParameterError("local_optimize needs a non-empty start point");
    for (double v : x0)
        if (!std::isfinite(v)) throw ParameterError("start point must be finite");
    if (!objective.value) throw ParameterError("objective has no value function");

    Minimand fn(objective, options);
    LocalResult result = options.method == LocalMethod::Bfgs ? run_bfgs(fn, std::move(x0), options)
                                                             : run_nelder_mead(fn, std::move(x0), options);
    result.n_evals = fn.evals();
    return result;
}

}  // namespace qaoalab
