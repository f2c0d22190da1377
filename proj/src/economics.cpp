#include "semev/economics.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace semev::econ {

using contest::ContestParams;
using contest::Equilibrium;

MevTaxPoint mev_tax(const ContestParams& params) {
    const Equilibrium eq = contest::equilibrium(params);
    MevTaxPoint pt;
    pt.prize_ratio = params.prize_ratio();
    pt.r = params.r;
    pt.s_star = eq.s_star;
    pt.tax_over_v = eq.t_star / params.v;
    pt.asymptote_gap = pt.tax_over_v - (params.r / (1.0 + params.r)) * eq.s_star;
    return pt;
}

double enforcement_cost(double alpha, const ContestParams& params) {
    if (!std::isfinite(alpha) || alpha < 0.0 || alpha > 1.0)
        throw std::invalid_argument("enforcement_cost: alpha must lie in [0, 1]");
    const Equilibrium eq = contest::equilibrium(params);
    return params.c_i + (1.0 - alpha) * (eq.b_i + eq.p_b * params.psi);
}

EnforcementCostCurve enforcement_cost_curve(const ContestParams& params, int alpha_steps) {
    if (alpha_steps < 2) throw std::invalid_argument("enforcement_cost_curve: need >= 2 steps");
    const Equilibrium eq = contest::equilibrium(params);
    const double exposure = eq.b_i + eq.p_b * params.psi;

    EnforcementCostCurve curve;
    curve.slope = -exposure;
    curve.alpha_grid.reserve(static_cast<std::size_t>(alpha_steps));
    curve.cost.reserve(static_cast<std::size_t>(alpha_steps));
    for (int k = 0; k < alpha_steps; ++k) {
        const double a = static_cast<double>(k) / static_cast<double>(alpha_steps - 1);
        curve.alpha_grid.push_back(a);
        curve.cost.push_back(params.c_i + (1.0 - a) * exposure);
    }

    // b_i* >= 2 p_b* b_b* under psi/v >= 2, so the slope magnitude covers 2/3 of T*
    if (exposure < (2.0 / 3.0) * eq.t_star)
        throw std::logic_error("enforcement_cost_curve: slope bound violated");
    return curve;
}

double solo_payoff(double v_i, double prize_ratio, double r, double c_b) {
    if (!std::isfinite(v_i) || v_i <= 0.0) throw std::invalid_argument("solo_payoff: v_i must be positive");
    if (!std::isfinite(c_b) || c_b < 0.0) throw std::invalid_argument("solo_payoff: c_b must be >= 0");
    const double s = contest::solve_intensity_ratio(prize_ratio, r);
    const double x = std::pow(s, r);
    return v_i / (1.0 + (1.0 + r) * x) - c_b;
}

double DelegationScenario::total_v() const {
    return std::accumulate(v_i.begin(), v_i.end(), 0.0);
}

void DelegationScenario::validate() const {
    if (n <= 0 || static_cast<std::size_t>(n) != v_i.size())
        throw std::invalid_argument("delegation: n must match the balance list");
    for (double v : v_i)
        if (!std::isfinite(v) || v <= 0.0)
            throw std::invalid_argument("delegation: every v_i must be positive");
    if (!std::isfinite(prize_ratio) || prize_ratio < contest::kMinPrizeRatio)
        throw std::invalid_argument("delegation: prize ratio below 2");
    if (!std::isfinite(r) || r < 1.0) throw std::invalid_argument("delegation: r must be >= 1");
    if (!std::isfinite(c_b) || c_b < 0.0) throw std::invalid_argument("delegation: c_b must be >= 0");
    if (!std::isfinite(f) || f <= 0.0 || f >= 1.0)
        throw std::invalid_argument("delegation: f must lie in (0, 1)");
}

DelegationAnalysis delegation_analysis(const DelegationScenario& scn) {
    scn.validate();
    const double v = scn.total_v();

    ContestParams aggregate{v, scn.prize_ratio * v, scn.r, 0.0, scn.c_b};
    const Equilibrium eq = contest::equilibrium(aggregate);
    const double bot_gross = eq.p_b * (v - eq.b_b);

    DelegationAnalysis out;
    out.bot_gross = bot_gross;
    out.evaders.reserve(scn.v_i.size());
    for (double vi : scn.v_i) {
        EvaderDecision d;
        d.solo = solo_payoff(vi, scn.prize_ratio, scn.r, scn.c_b);
        d.delegate_payoff = (1.0 - scn.f) * (vi / v) * (bot_gross - scn.c_b);
        d.prefers_delegate = d.delegate_payoff > d.solo;
        out.evaders.push_back(d);
    }
    return out;
}

double solo_breakeven(double prize_ratio, double r, double c_b) {
    if (!std::isfinite(c_b) || c_b <= 0.0)
        throw std::invalid_argument("solo_breakeven: c_b must be positive");
    const double s = contest::solve_intensity_ratio(prize_ratio, r);
    const double x = std::pow(s, r);
    return c_b * (1.0 + (1.0 + r) * x);
}

}  // namespace semev::econ
