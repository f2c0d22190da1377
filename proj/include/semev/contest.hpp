#pragma once

#include <cstdint>

namespace semev::contest {

inline constexpr double kMinPrizeRatio = 2.0;   // strong-penalty regime; solving below is rejected
inline constexpr double kPhiRelTol = 1e-10;     // relative residual on the fixed-point equation
inline constexpr int kMaxSolverIterations = 200;

// One-shot issuer-vs-evader Tullock(r) ordering contest over prize pair (psi, v).
struct ContestParams {
    double v;           // evader prize, USD
    double psi;         // issuer regulatory-loss prize, USD
    double r;           // contest sharpness, >= 1
    double c_i = 0.0;   // issuer fixed participation cost, USD
    double c_b = 0.0;   // evader fixed participation cost, USD

    double prize_ratio() const { return psi / v; }
    void validate() const;            // throws std::invalid_argument on a bad field
    void validate_solvable() const;   // additionally requires psi/v >= kMinPrizeRatio
};

struct WinProbabilities {
    double p_i;
    double p_b;
    bool no_contest;  // both bids zero; probabilities carry the degenerate (0, 0) convention
};

struct Equilibrium {
    double s_star;  // intensity ratio b_i / b_b, > 1
    double p_i;     // freeze win probability
    double p_b;     // evade win probability
    double b_i;     // issuer bid, paid unconditionally
    double b_b;     // evader bid, paid only upon winning
    double t_star;  // expected total contest expenditure b_i + p_b * b_b
    double u_i;     // issuer expected payoff, net of c_i
    double u_b;     // evader expected payoff, net of c_b
};

struct BidGrid {
    double lo = 0.0;
    double hi = 0.0;
    std::int64_t steps = 0;  // number of intervals; grid has steps + 1 points

    void validate() const;
    double point(std::int64_t i) const {
        return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps);
    }
};

struct NashAudit {
    std::int64_t grid_points;
    double max_gain_i;  // best unilateral payoff improvement found for the issuer
    double max_gain_b;  // same for the evader
    double tol;
    bool passed;
};

struct LemmaLargePsiCheck {
    double threshold;  // N * (N-1)^(1/r)
    double p_i_at_threshold;
    bool holds;
};

struct PositiveUtilityCheck {
    double x;  // (s*)^r
    bool passes;
};

// Tullock(r) contest success function. Degenerate (0, 0) input is flagged, not split 50/50.
WinProbabilities success_fn(double b_i, double b_b, double r);

// Phi(s) = s (1 + s^r)^2 / (1 + (1+r) s^r); the equilibrium intensity ratio solves
// Phi(s*) = psi / v. Strictly increasing on [1, inf) with Phi(1) = 4 / (r + 2).
double phi(double s, double r);

// d/ds Phi(s), used for Newton refinement of the root.
double phi_derivative(double s, double r);

// Unique s* > 1 with Phi(s*) = prize_ratio, for prize_ratio >= 2. Bracketed bisection
// with guarded Newton steps; relative residual <= kPhiRelTol on exit.
double solve_intensity_ratio(double prize_ratio, double r);

Equilibrium equilibrium(const ContestParams& params);

// Expected payoffs at arbitrary bid pairs (the objects the equilibrium maximizes).
double issuer_payoff(const ContestParams& params, double b_i, double b_b);
double evader_payoff(const ContestParams& params, double b_i, double b_b);

// Brute-force grid audit: no unilateral deviation on the grid may improve either payoff
// by more than tol = 1e-6 * max(v, psi).
NashAudit verify_nash(const Equilibrium& eq, const ContestParams& params, const BidGrid& grid);

// P_I* >= 1 - 1/N whenever psi/v >= N (N-1)^(1/r); sampled at the threshold and at
// ten log-spaced ratios above it.
LemmaLargePsiCheck check_lemma_large_psi(double n, double r);

// (s*)^r > r - 1 and U_I + C_I > 0; the two conditions are equivalent and must agree.
PositiveUtilityCheck check_positive_utility(const ContestParams& params);

}  // namespace semev::contest
