#pragma once
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>

namespace gssl {

/**
 * Similarity kernel h mapping normalized squared distance t = ||x_i-x_j||^2/p
 * to an edge weight.  h must be non-negative and non-increasing on the
 * observed distance range.  First and second derivatives are needed by the
 * performance predictors; analytic ones are used when provided, otherwise
 * central finite differences with step 1e-5.
 */
struct KernelFunction {
    std::string name;
    std::function<double(double)> eval;
    std::function<double(double)> d1;  // optional analytic h'
    std::function<double(double)> d2;  // optional analytic h''

    double h(double t) const { return eval(t); }

    double hp(double t) const {
        if (d1) return d1(t);
        const double s = 1e-5;
        return (eval(t + s) - eval(t - s)) / (2.0 * s);
    }

    double hpp(double t) const {
        if (d2) return d2(t);
        const double s = 1e-5;
        return (eval(t + s) - 2.0 * eval(t) + eval(t - s)) / (s * s);
    }

    /// w_ij = exp(-||x_i-x_j||^2/p), the kernel used by the benchmark presets.
    static KernelFunction gaussian() {
        KernelFunction k;
        k.name = "gaussian";
        k.eval = [](double t) { return std::exp(-t); };
        k.d1 = [](double t) { return -std::exp(-t); };
        k.d2 = [](double t) { return std::exp(-t); };
        return k;
    }

    /// h(t) = max(2 - t/2, 0): h' = -1/2, h'' = 0 near typical t, so the
    /// lifted statistics reduce to the raw (mu, C) parameterization exactly.
    /// Useful for cross-checking the two forms of the predictors.
    static KernelFunction linear() {
        KernelFunction k;
        k.name = "linear";
        k.eval = [](double t) { return t < 4.0 ? 2.0 - 0.5 * t : 0.0; };
        k.d1 = [](double t) { return t < 4.0 ? -0.5 : 0.0; };
        k.d2 = [](double) { return 0.0; };
        return k;
    }

    static KernelFunction by_name(const std::string& name) {
        if (name == "gaussian") return gaussian();
        if (name == "linear") return linear();
        throw std::invalid_argument("unknown kernel '" + name + "' (available: gaussian, linear)");
    }
};

}  // namespace gssl
