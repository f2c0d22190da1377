#pragma once

#include <vector>

#include "semev/contest.hpp"

namespace semev::econ {

// One point of the MEV-tax curve T*/V together with its large-ratio asymptote
// (r/(1+r)) * s*.
struct MevTaxPoint {
    double prize_ratio;
    double r;
    double s_star;
    double tax_over_v;     // T* / V
    double asymptote_gap;  // tax_over_v - (r/(1+r)) * s_star
};

// Issuer per-contest enforcement-cost component as a function of proposer share alpha.
// Affine: cost(alpha) = c_i + (1 - alpha) * (b_i* + p_b* * psi).
struct EnforcementCostCurve {
    std::vector<double> alpha_grid;
    std::vector<double> cost;
    double slope;  // -(b_i* + p_b* * psi), constant and negative
};

// n evaders with balances v_i sharing a common penalty ratio psi_i/v_i; each either
// contests solo or delegates to one bot that aggregates the whole pool.
struct DelegationScenario {
    int n = 0;
    std::vector<double> v_i;
    double prize_ratio;  // common psi_i / v_i, >= 2
    double r;
    double c_b;
    double f;  // bot commission in (0, 1)

    double total_v() const;
    void validate() const;
};

struct EvaderDecision {
    double solo;
    double delegate_payoff;
    bool prefers_delegate;
};

struct DelegationAnalysis {
    std::vector<EvaderDecision> evaders;
    double bot_gross;  // U_S_gross = p_b*(psi, v) * (v - b_b*(psi, v)) on the aggregate contest
};

MevTaxPoint mev_tax(const contest::ContestParams& params);

// C_I^total(alpha) = c_i + (1 - alpha) * (b_i* + p_b* * psi), alpha in [0, 1].
double enforcement_cost(double alpha, const contest::ContestParams& params);

EnforcementCostCurve enforcement_cost_curve(const contest::ContestParams& params, int alpha_steps);

// Solo evader payoff v_i / (1 + (1+r) (s*)^r) - c_b at the common ratio.
double solo_payoff(double v_i, double prize_ratio, double r, double c_b);

DelegationAnalysis delegation_analysis(const DelegationScenario& scn);

// Balance at which solo participation breaks even: c_b * (1 + (1+r) (s*)^r).
double solo_breakeven(double prize_ratio, double r, double c_b);

}  // namespace semev::econ
