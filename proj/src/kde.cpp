#include "semev/kde.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace semev::pipeline {

namespace {

double silverman_bandwidth(std::vector<double> v) {
    const double n = static_cast<double>(v.size());
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / (n - 1.0));

    std::sort(v.begin(), v.end());
    auto quantile = [&](double q) {
        const double pos = q * (n - 1.0);
        const auto i = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(i);
        return i + 1 < v.size() ? v[i] * (1.0 - frac) + v[i + 1] * frac : v[i];
    };
    const double iqr = quantile(0.75) - quantile(0.25);

    double spread = sd;
    if (iqr > 0.0) spread = std::min(spread, iqr / 1.34);
    return 0.9 * spread * std::pow(n, -0.2);
}

}  // namespace

KdeResult gaussian_kde(const std::vector<double>& values, int grid_points) {
    if (values.size() < 2) throw std::invalid_argument("kde: need at least 2 values");
    if (grid_points < 8) throw std::invalid_argument("kde: need at least 8 grid points");

    const auto [mn_it, mx_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *mn_it, hi = *mx_it;
    if (!(hi > lo)) throw std::invalid_argument("kde: degenerate data range");

    KdeResult out;
    out.bandwidth = silverman_bandwidth(values);
    if (out.bandwidth <= 0.0) throw std::invalid_argument("kde: zero bandwidth");

    out.grid.resize(static_cast<std::size_t>(grid_points));
    out.density.assign(static_cast<std::size_t>(grid_points), 0.0);
    const double inv_h = 1.0 / out.bandwidth;
    const double norm = 1.0 / (std::sqrt(2.0 * M_PI) * out.bandwidth * static_cast<double>(values.size()));
    for (int g = 0; g < grid_points; ++g) {
        const double x = lo + (hi - lo) * static_cast<double>(g) / static_cast<double>(grid_points - 1);
        out.grid[static_cast<std::size_t>(g)] = x;
        double acc = 0.0;
        for (double v : values) {
            const double z = (x - v) * inv_h;
            acc += std::exp(-0.5 * z * z);
        }
        out.density[static_cast<std::size_t>(g)] = acc * norm;
    }
    return out;
}

std::optional<double> first_prominent_valley(const KdeResult& kde, double min_depth_frac) {
    const auto& d = kde.density;
    const std::size_t n = d.size();
    if (n < 3) return std::nullopt;

    const double dmax = *std::max_element(d.begin(), d.end());
    const double min_depth = min_depth_frac * dmax;

    auto is_local_max = [&](std::size_t i) {
        const double left = i > 0 ? d[i - 1] : -1.0;
        const double right = i + 1 < n ? d[i + 1] : -1.0;
        return d[i] > left && d[i] >= right;
    };
    auto is_local_min = [&](std::size_t i) {
        return i > 0 && i + 1 < n && d[i] < d[i - 1] && d[i] <= d[i + 1];
    };

    std::size_t first_peak = n;
    for (std::size_t i = 0; i < n; ++i)
        if (is_local_max(i)) {
            first_peak = i;
            break;
        }
    if (first_peak == n) return std::nullopt;

    for (std::size_t i = first_peak + 1; i + 1 < n; ++i) {
        if (!is_local_min(i)) continue;
        // depth to the tallest peak on each side of the candidate valley
        const double left_peak = *std::max_element(d.begin(), d.begin() + static_cast<long>(i));
        const double right_peak = *std::max_element(d.begin() + static_cast<long>(i) + 1, d.end());
        if (left_peak - d[i] >= min_depth && right_peak - d[i] >= min_depth)
            return kde.grid[i];
    }
    return std::nullopt;
}

}  // namespace semev::pipeline
