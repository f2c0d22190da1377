#pragma once

#include <optional>
#include <vector>

namespace semev::pipeline {

struct KdeResult {
    std::vector<double> grid;     // evaluation abscissae, uniform over the data range
    std::vector<double> density;
    double bandwidth;             // Silverman's rule
};

// Gaussian KDE on already-transformed values.
KdeResult gaussian_kde(const std::vector<double>& values, int grid_points);

// First local minimum strictly after the first local maximum, kept only if the drop
// from the flanking peaks is at least min_depth_frac of the global density maximum.
// Returns the grid abscissa of the valley.
std::optional<double> first_prominent_valley(const KdeResult& kde, double min_depth_frac);

}  // namespace semev::pipeline
