#pragma once

#include <cstdint>
#include <vector>

namespace semev::pipeline {

// One fitted 1-D Gaussian mixture.
struct Gmm1D {
    std::vector<double> weights;
    std::vector<double> means;
    std::vector<double> variances;
    double log_likelihood = 0.0;
    bool converged = false;

    double density(double x) const;
    double bic(std::size_t n_samples) const;  // -2 logL + (3k - 1) ln n
};

// EM with quantile-spread initial means and deterministic jittered restarts.
// A collapsing run (any variance below the floor) is rerun with the floor clamped on;
// if every restart collapses the fit fails.
struct GmmFitOptions {
    int restarts = 8;
    std::uint64_t seed = 0;
    double rel_tol_per_sample = 1e-8;  // stop when logL gain < tol * n
    int max_iterations = 500;
    double variance_floor = 1e-6;
};

Gmm1D fit_gmm_1d(const std::vector<double>& x, int k, const GmmFitOptions& opts);

}  // namespace semev::pipeline
