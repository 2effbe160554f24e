#pragma once

#include <cmath>
#include <cstddef>
#include <deque>
#include <functional>
#include <vector>

#include "copra/error.hpp"

namespace copra {

struct OptimResult {
    std::vector<double> x;
    double value = 0.0;
    double grad_norm = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

// Limited-memory BFGS with two-loop recursion and Armijo backtracking.
// `objective(x, grad)` returns the function value and fills the gradient.
// Fully sequential, so repeated runs are bit-identical.
inline OptimResult lbfgs_minimize(
    const std::function<double(const std::vector<double>&, std::vector<double>&)>& objective,
    std::vector<double> x, std::size_t max_iterations = 1000, double tolerance = 1e-6,
    std::size_t memory = 10) {
    const std::size_t n = x.size();
    auto dot = [n](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
        return s;
    };
    auto norm = [&](const std::vector<double>& a) { return std::sqrt(dot(a, a)); };

    std::vector<double> grad(n, 0.0);
    double value = objective(x, grad);

    std::deque<std::vector<double>> s_hist, y_hist;
    std::deque<double> rho_hist;

    OptimResult result;
    for (std::size_t iter = 0; iter < max_iterations; ++iter) {
        const double gnorm = norm(grad);
        if (gnorm < tolerance) {
            result.converged = true;
            result.iterations = iter;
            break;
        }
        result.iterations = iter + 1;

        // two-loop recursion for the search direction
        std::vector<double> q = grad;
        std::vector<double> alpha(s_hist.size());
        for (std::size_t h = s_hist.size(); h-- > 0;) {
            alpha[h] = rho_hist[h] * dot(s_hist[h], q);
            for (std::size_t i = 0; i < n; ++i) q[i] -= alpha[h] * y_hist[h][i];
        }
        if (!s_hist.empty()) {
            const double gamma =
                dot(s_hist.back(), y_hist.back()) / dot(y_hist.back(), y_hist.back());
            for (double& qi : q) qi *= gamma;
        }
        for (std::size_t h = 0; h < s_hist.size(); ++h) {
            const double beta = rho_hist[h] * dot(y_hist[h], q);
            for (std::size_t i = 0; i < n; ++i) q[i] += (alpha[h] - beta) * s_hist[h][i];
        }
        std::vector<double> direction(n);
        for (std::size_t i = 0; i < n; ++i) direction[i] = -q[i];

        double descent = dot(grad, direction);
        if (descent >= 0.0) {  // fall back to steepest descent
            for (std::size_t i = 0; i < n; ++i) direction[i] = -grad[i];
            descent = -gnorm * gnorm;
        }

        double step = s_hist.empty() ? std::min(1.0, 1.0 / gnorm) : 1.0;
        std::vector<double> x_new(n), grad_new(n, 0.0);
        double value_new = value;
        bool accepted = false;
        for (int back = 0; back < 60; ++back) {
            for (std::size_t i = 0; i < n; ++i) x_new[i] = x[i] + step * direction[i];
            value_new = objective(x_new, grad_new);
            if (value_new <= value + 1e-4 * step * descent) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;  // line-search failure: stationary within FP noise

        std::vector<double> s(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = x_new[i] - x[i];
            y[i] = grad_new[i] - grad[i];
        }
        const double sy = dot(s, y);
        if (sy > 1e-12) {
            s_hist.push_back(std::move(s));
            y_hist.push_back(std::move(y));
            rho_hist.push_back(1.0 / sy);
            if (s_hist.size() > memory) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }
        x.swap(x_new);
        grad.swap(grad_new);
        value = value_new;
    }

    result.x = std::move(x);
    result.value = value;
    result.grad_norm = norm(grad);
    if (result.grad_norm < tolerance) result.converged = true;
    return result;
}

}  // namespace copra
