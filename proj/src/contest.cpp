#include "semev/contest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace semev::contest {

namespace {

bool finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }

}  // namespace

void ContestParams::validate() const {
    if (!std::isfinite(v) || v <= 0.0) throw std::invalid_argument("contest: v must be positive");
    if (!std::isfinite(psi) || psi <= 0.0) throw std::invalid_argument("contest: psi must be positive");
    if (!std::isfinite(r) || r < 1.0) throw std::invalid_argument("contest: r must be >= 1");
    if (!finite_nonneg(c_i)) throw std::invalid_argument("contest: c_i must be >= 0");
    if (!finite_nonneg(c_b)) throw std::invalid_argument("contest: c_b must be >= 0");
}

void ContestParams::validate_solvable() const {
    validate();
    if (prize_ratio() < kMinPrizeRatio)
        throw std::invalid_argument("contest: prize ratio below 2 (strong-penalty assumption)");
}

void BidGrid::validate() const {
    if (!std::isfinite(lo) || lo < 0.0) throw std::invalid_argument("grid: lo must be >= 0");
    if (!std::isfinite(hi) || hi <= lo) throw std::invalid_argument("grid: hi must exceed lo");
    if (steps < 2) throw std::invalid_argument("grid: need at least 2 steps");
}

WinProbabilities success_fn(double b_i, double b_b, double r) {
    if (!finite_nonneg(b_i) || !finite_nonneg(b_b))
        throw std::invalid_argument("success_fn: bids must be >= 0");
    if (!std::isfinite(r) || r < 1.0) throw std::invalid_argument("success_fn: r must be >= 1");

    if (b_i == 0.0 && b_b == 0.0) return {0.0, 0.0, true};
    if (b_i == 0.0) return {0.0, 1.0, false};
    if (b_b == 0.0) return {1.0, 0.0, false};

    // 1 / (1 + (b_b/b_i)^r) stays finite where b_i^r alone would overflow
    const double ratio_pow = std::pow(b_b / b_i, r);
    const double p_i = 1.0 / (1.0 + ratio_pow);
    return {p_i, 1.0 - p_i, false};
}

double phi(double s, double r) {
    if (!std::isfinite(s) || s <= 0.0) throw std::invalid_argument("phi: s must be positive");
    if (!std::isfinite(r) || r < 1.0) throw std::invalid_argument("phi: r must be >= 1");
    const double x = std::pow(s, r);
    if (std::isinf(x)) return x;  // phi ~ s x / (1+r) is already past double range
    // factored so the (1+x)^2 term cannot overflow before the division
    return s * (1.0 + x) * ((1.0 + x) / (1.0 + (1.0 + r) * x));
}

double phi_derivative(double s, double r) {
    const double x = std::pow(s, r);
    const double g = 1.0 + 2.0 * r * x / (1.0 + x) - r * (1.0 + r) * x / (1.0 + (1.0 + r) * x);
    return phi(s, r) / s * g;
}

double solve_intensity_ratio(double prize_ratio, double r) {
    if (!std::isfinite(r) || r < 1.0)
        throw std::invalid_argument("solve_intensity_ratio: r must be >= 1");
    if (!std::isfinite(prize_ratio) || prize_ratio < kMinPrizeRatio)
        throw std::invalid_argument("solve_intensity_ratio: prize ratio below 2");

    // Phi(1) = 4/(r+2) < 2 <= prize_ratio, so the root lies in (1, inf);
    // double the upper end until it brackets.
    double lo = 1.0;
    double hi = 2.0;
    while (phi(hi, r) < prize_ratio) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) throw std::runtime_error("solve_intensity_ratio: bracket expansion failed");
    }

    double s = 0.5 * (lo + hi);
    for (int it = 0; it < kMaxSolverIterations; ++it) {
        const double f = phi(s, r) - prize_ratio;
        if (std::abs(f) <= kPhiRelTol * prize_ratio) {
            // polish toward machine precision so identities built on s* stay tight
            for (int p = 0; p < 2; ++p) {
                const double g = phi(s, r) - prize_ratio;
                const double cand = s - g / phi_derivative(s, r);
                if (cand > lo && cand < hi) s = cand;
            }
            return s;
        }
        if (f > 0.0)
            hi = s;
        else
            lo = s;
        const double d = phi_derivative(s, r);
        const double cand = s - f / d;
        s = (cand > lo && cand < hi) ? cand : 0.5 * (lo + hi);
    }
    throw std::runtime_error("solve_intensity_ratio: no convergence within iteration cap");
}

Equilibrium equilibrium(const ContestParams& params) {
    params.validate_solvable();
    const double s = solve_intensity_ratio(params.prize_ratio(), params.r);
    const double x = std::pow(s, params.r);
    const double p_i = x / (1.0 + x);
    const double p_b = 1.0 / (1.0 + x);

    Equilibrium eq;
    eq.s_star = s;
    eq.p_i = p_i;
    eq.p_b = p_b;
    eq.b_i = params.psi * params.r * p_i * p_b;
    eq.b_b = params.r * p_i * params.v / (1.0 + params.r * p_i);
    eq.t_star = eq.b_i + p_b * eq.b_b;
    eq.u_i = p_i * params.psi - eq.b_i - params.c_i;
    eq.u_b = p_b * (params.v - eq.b_b) - params.c_b;
    return eq;
}

double issuer_payoff(const ContestParams& params, double b_i, double b_b) {
    const auto w = success_fn(b_i, b_b, params.r);
    return w.p_i * params.psi - b_i - params.c_i;
}

double evader_payoff(const ContestParams& params, double b_i, double b_b) {
    const auto w = success_fn(b_i, b_b, params.r);
    return w.p_b * (params.v - b_b) - params.c_b;
}

NashAudit verify_nash(const Equilibrium& eq, const ContestParams& params, const BidGrid& grid) {
    params.validate();
    grid.validate();

    const double r = params.r;
    const double base_i = eq.p_i * params.psi - eq.b_i - params.c_i;
    const double base_b = eq.p_b * (params.v - eq.b_b) - params.c_b;
    const double opp_i = std::pow(eq.b_b, r);  // fixed opponent bid for the issuer scan
    const double opp_b = std::pow(eq.b_i, r);

    double max_gain_i = -std::numeric_limits<double>::infinity();
    double max_gain_b = -std::numeric_limits<double>::infinity();
    for (std::int64_t k = 0; k <= grid.steps; ++k) {
        const double b = grid.point(k);
        const double bp = std::pow(b, r);

        double p_i = (bp + opp_i > 0.0) ? bp / (bp + opp_i) : 0.0;
        const double u_i = p_i * params.psi - b - params.c_i;
        max_gain_i = std::max(max_gain_i, u_i - base_i);

        double p_b = (bp + opp_b > 0.0) ? bp / (bp + opp_b) : 0.0;
        const double u_b = p_b * (params.v - b) - params.c_b;
        max_gain_b = std::max(max_gain_b, u_b - base_b);
    }

    NashAudit audit;
    audit.grid_points = grid.steps + 1;
    audit.max_gain_i = max_gain_i;
    audit.max_gain_b = max_gain_b;
    audit.tol = 1e-6 * std::max(params.v, params.psi);
    audit.passed = max_gain_i <= audit.tol && max_gain_b <= audit.tol;
    return audit;
}

LemmaLargePsiCheck check_lemma_large_psi(double n, double r) {
    if (!std::isfinite(n) || n <= 1.0)
        throw std::invalid_argument("check_lemma_large_psi: N must exceed 1");
    if (!std::isfinite(r) || r < 1.0)
        throw std::invalid_argument("check_lemma_large_psi: r must be >= 1");

    const double threshold = n * std::pow(n - 1.0, 1.0 / r);
    if (threshold < kMinPrizeRatio)
        throw std::invalid_argument("check_lemma_large_psi: threshold below the solver domain");

    const double bound = 1.0 - 1.0 / n;
    auto p_i_at = [&](double ratio) {
        const double s = solve_intensity_ratio(ratio, r);
        const double x = std::pow(s, r);
        return x / (1.0 + x);
    };

    LemmaLargePsiCheck out;
    out.threshold = threshold;
    out.p_i_at_threshold = p_i_at(threshold);
    out.holds = out.p_i_at_threshold >= bound;
    for (int k = 1; k <= 10 && out.holds; ++k) {
        const double ratio = threshold * std::pow(10.0, 0.3 * k);
        out.holds = p_i_at(ratio) >= bound;
    }
    return out;
}

PositiveUtilityCheck check_positive_utility(const ContestParams& params) {
    const Equilibrium eq = equilibrium(params);
    const double x = std::pow(eq.s_star, params.r);
    PositiveUtilityCheck out;
    out.x = x;
    out.passes = (x > params.r - 1.0) && (eq.u_i + params.c_i > 0.0);
    return out;
}

}  // namespace semev::contest
