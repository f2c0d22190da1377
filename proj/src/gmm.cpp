#include "semev/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "semev/rng.hpp"

namespace semev::pipeline {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

struct EmRun {
    Gmm1D model;
    bool collapsed = false;
    bool usable = false;
};

double log_component(double x, double w, double m, double var) {
    const double d = x - m;
    return std::log(w) - 0.5 * (kLog2Pi + std::log(var)) - d * d / (2.0 * var);
}

EmRun run_em(const std::vector<double>& x, int k, std::vector<double> means, double init_var,
             const GmmFitOptions& opts, bool floor_active) {
    const std::size_t n = x.size();
    const auto ku = static_cast<std::size_t>(k);
    EmRun run;
    auto& g = run.model;
    g.weights.assign(ku, 1.0 / k);
    g.means = std::move(means);
    g.variances.assign(ku, init_var);

    std::vector<double> resp(ku);
    std::vector<double> lw(ku), inv2v(ku);
    std::vector<double> nk(ku), sum_x(ku), sum_xx(ku);
    double prev_ll = -std::numeric_limits<double>::infinity();

    for (int it = 0; it < opts.max_iterations; ++it) {
        for (std::size_t c = 0; c < ku; ++c) {
            lw[c] = std::log(g.weights[c]) - 0.5 * (kLog2Pi + std::log(g.variances[c]));
            inv2v[c] = 0.5 / g.variances[c];
        }
        std::fill(nk.begin(), nk.end(), 0.0);
        std::fill(sum_x.begin(), sum_x.end(), 0.0);
        std::fill(sum_xx.begin(), sum_xx.end(), 0.0);
        double ll = 0.0;

        for (double xi : x) {
            double mx = -std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < ku; ++c) {
                const double d = xi - g.means[c];
                resp[c] = lw[c] - d * d * inv2v[c];
                mx = std::max(mx, resp[c]);
            }
            double z = 0.0;
            for (std::size_t c = 0; c < ku; ++c) {
                resp[c] = std::exp(resp[c] - mx);
                z += resp[c];
            }
            ll += mx + std::log(z);
            for (std::size_t c = 0; c < ku; ++c) {
                const double r = resp[c] / z;
                nk[c] += r;
                sum_x[c] += r * xi;
                sum_xx[c] += r * xi * xi;
            }
        }
        if (!std::isfinite(ll)) return run;  // degenerate; caller decides what to do

        for (std::size_t c = 0; c < ku; ++c) {
            if (nk[c] <= 1e-12) {
                run.collapsed = true;
                if (!floor_active) return run;
                nk[c] = 1e-12;
            }
            g.weights[c] = nk[c] / static_cast<double>(n);
            g.means[c] = sum_x[c] / nk[c];
            double var = sum_xx[c] / nk[c] - g.means[c] * g.means[c];
            if (var < opts.variance_floor) {
                run.collapsed = true;
                if (!floor_active) return run;
                var = opts.variance_floor;
            }
            g.variances[c] = var;
        }

        g.log_likelihood = ll;
        if (ll - prev_ll < opts.rel_tol_per_sample * static_cast<double>(n) && it > 0) {
            g.converged = true;
            break;
        }
        prev_ll = ll;
    }

    run.usable = std::isfinite(g.log_likelihood);
    return run;
}

}  // namespace

double Gmm1D::density(double x) const {
    double acc = 0.0;
    for (std::size_t c = 0; c < weights.size(); ++c)
        acc += std::exp(log_component(x, weights[c], means[c], variances[c]));
    return acc;
}

double Gmm1D::bic(std::size_t n_samples) const {
    const double k = static_cast<double>(weights.size());
    return -2.0 * log_likelihood + (3.0 * k - 1.0) * std::log(static_cast<double>(n_samples));
}

Gmm1D fit_gmm_1d(const std::vector<double>& x, int k, const GmmFitOptions& opts) {
    if (k < 1) throw std::invalid_argument("gmm: k must be >= 1");
    if (x.size() < static_cast<std::size_t>(2 * k))
        throw std::invalid_argument("gmm: too few samples for k components");
    if (opts.restarts < 1) throw std::invalid_argument("gmm: restarts must be >= 1");

    std::vector<double> sorted = x;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();

    double mean = 0.0;
    for (double v : sorted) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : sorted) var += (v - mean) * (v - mean);
    var = std::max(var / static_cast<double>(n), opts.variance_floor);

    auto quantile_means = [&](SplitMix64* jitter) {
        std::vector<double> m(static_cast<std::size_t>(k));
        const double sd = std::sqrt(var);
        for (int c = 0; c < k; ++c) {
            const double q = (c + 0.5) / static_cast<double>(k);
            const auto idx = std::min(n - 1, static_cast<std::size_t>(q * static_cast<double>(n)));
            m[static_cast<std::size_t>(c)] = sorted[idx] + (jitter ? 0.25 * sd * jitter->gaussian() : 0.0);
        }
        return m;
    };

    Gmm1D best;
    bool have_best = false;
    for (int rs = 0; rs < opts.restarts; ++rs) {
        auto jitter = SplitMix64::substream(opts.seed, static_cast<std::uint64_t>(rs));
        auto means = quantile_means(rs == 0 ? nullptr : &jitter);

        EmRun run = run_em(x, k, means, var, opts, false);
        if (run.collapsed || !run.usable)
            run = run_em(x, k, std::move(means), var, opts, true);  // retry with the floor on
        if (!run.usable) continue;
        if (!have_best || run.model.log_likelihood > best.log_likelihood) {
            best = run.model;
            have_best = true;
        }
    }
    if (!have_best) throw std::runtime_error("gmm: all restarts collapsed");
    return best;
}

}  // namespace semev::pipeline
