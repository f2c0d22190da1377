#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <initializer_list>

#include "semev/contest.hpp"
#include "semev/rng.hpp"

using namespace semev;
using namespace semev::contest;

namespace {

// Independent oracle for the unit contest (ratio 2, r = 1): the fixed point solves
// s (1+s)^2 = 2 (1 + 2s), i.e. the cubic s^3 + 2s^2 - 3s - 2 = 0, bisected directly.
double unit_contest_root_oracle() {
    auto f = [](double s) { return s * s * s + 2.0 * s * s - 3.0 * s - 2.0; };
    double lo = 1.0, hi = 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) > 0.0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

constexpr double kSStar = 1.3429230827771702;
constexpr double kPI = 0.5731827445164543;
constexpr double kBI = 0.4892885718100788;
constexpr double kBB = 0.3643459391570127;
constexpr double kTStar = 0.6447977056076499;
constexpr double kUI = 0.6570769172228298;
constexpr double kUB = 0.2713081216859746;

}  // namespace

TEST_SUITE("contest") {

TEST_CASE("success function on the canonical points") {
    auto w = success_fn(3.7, 3.7, 2.5);
    CHECK(w.p_i == doctest::Approx(0.5));
    CHECK(w.p_b == doctest::Approx(0.5));
    CHECK_FALSE(w.no_contest);

    w = success_fn(1.0, 0.0, 2.0);
    CHECK(w.p_i == 1.0);
    CHECK(w.p_b == 0.0);

    w = success_fn(2.0, 1.0, 1.0);
    CHECK(w.p_i == doctest::Approx(2.0 / 3.0));
    CHECK(w.p_b == doctest::Approx(1.0 / 3.0));

    w = success_fn(0.0, 0.0, 1.0);
    CHECK(w.no_contest);
    CHECK(w.p_i == 0.0);
    CHECK(w.p_b == 0.0);

    CHECK_THROWS_AS(success_fn(-1.0, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(success_fn(1.0, 1.0, 0.5), std::invalid_argument);
}

TEST_CASE("success function is stable under extreme bid ratios") {
    const auto w = success_fn(1e200, 1e-200, 6.0);
    CHECK(w.p_i == 1.0);
    const auto v = success_fn(1e-200, 1e200, 6.0);
    CHECK(v.p_i == 0.0);
}

TEST_CASE("phi identities") {
    CHECK(phi(1.0, 2.0) == doctest::Approx(1.0));           // 4/(r+2), r=2
    CHECK(phi(1.0, 1.0) == doctest::Approx(4.0 / 3.0));     // same identity, r=1
    CHECK(phi(2.0, 1.0) == doctest::Approx(3.6));           // 2*9/5
    for (double r : {1.0, 1.5, 2.0, 4.0, 8.0})
        CHECK(phi(1.0, r) == doctest::Approx(4.0 / (r + 2.0)).epsilon(1e-14));
    CHECK_THROWS_AS(phi(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(phi(-1.0, 1.0), std::invalid_argument);
}

TEST_CASE("phi overflows to infinity, never NaN") {
    const double huge = phi(1e40, 8.0);  // s^r far past double range
    CHECK(std::isinf(huge));
    CHECK(huge > 0.0);
    CHECK(std::isfinite(phi(1e6, 8.0)));
}

TEST_CASE("phi is strictly increasing on [1, inf)") {
    auto rng = SplitMix64(20240901);
    for (int i = 0; i < 1000; ++i) {
        const double r = rng.uniform(1.0, 8.0);
        double s1 = std::pow(10.0, rng.uniform(0.0, 6.0));
        double s2 = std::pow(10.0, rng.uniform(0.0, 6.0));
        if (s1 == s2) continue;
        if (s1 > s2) std::swap(s1, s2);
        CHECK(phi(s1, r) < phi(s2, r));
    }
}

TEST_CASE("intensity ratio solver matches the cubic oracle") {
    const double oracle = unit_contest_root_oracle();
    const double solved = solve_intensity_ratio(2.0, 1.0);
    CHECK(solved == doctest::Approx(oracle).epsilon(1e-10));
    CHECK(solved == doctest::Approx(kSStar).epsilon(1e-10));
    CHECK(std::abs(phi(solved, 1.0) - 2.0) / 2.0 <= kPhiRelTol);
}

TEST_CASE("solver rejects the excluded domain") {
    CHECK_THROWS_AS(solve_intensity_ratio(1.999, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(solve_intensity_ratio(0.5, 1.0), std::invalid_argument);
    // Phi(1) = 4/(r+2) < 2 for every r >= 1, so the boundary value sits below the gate
    for (double r : {1.0, 2.0, 5.0}) CHECK(phi(1.0, r) < 2.0);
}

TEST_CASE("solver agrees with an independent fine-grid scan at ratio 10") {
    const double solved = solve_intensity_ratio(10.0, 1.0);
    CHECK(std::abs(phi(solved, 1.0) - 10.0) / 10.0 <= 1e-10);
    double bracket_lo = 0.0, bracket_hi = 0.0;
    for (double s = 1.0; s < 8.0; s += 1e-5) {
        if (phi(s, 1.0) < 10.0 && phi(s + 1e-5, 1.0) >= 10.0) {
            bracket_lo = s;
            bracket_hi = s + 1e-5;
            break;
        }
    }
    REQUIRE(bracket_lo > 0.0);
    CHECK(solved >= bracket_lo);
    CHECK(solved <= bracket_hi);
}

TEST_CASE("unit contest equilibrium reproduces the derived values") {
    const ContestParams params{1.0, 2.0, 1.0, 0.0, 0.0};
    const Equilibrium eq = equilibrium(params);
    CHECK(eq.s_star == doctest::Approx(kSStar).epsilon(1e-10));
    CHECK(eq.p_i == doctest::Approx(kPI).epsilon(1e-10));
    CHECK(eq.p_b == doctest::Approx(1.0 - kPI).epsilon(1e-10));
    CHECK(eq.b_i == doctest::Approx(kBI).epsilon(1e-10));
    CHECK(eq.b_b == doctest::Approx(kBB).epsilon(1e-10));
    CHECK(eq.t_star == doctest::Approx(kTStar).epsilon(1e-10));
    CHECK(eq.u_i == doctest::Approx(kUI).epsilon(1e-10));
    CHECK(eq.u_b == doctest::Approx(kUB).epsilon(1e-10));
}

TEST_CASE("equilibrium is homogeneous of degree one in the prizes") {
    const Equilibrium unit = equilibrium({1.0, 2.0, 1.0, 0.0, 0.0});
    const Equilibrium big = equilibrium({1000.0, 2000.0, 1.0, 0.0, 0.0});
    CHECK(big.s_star == doctest::Approx(unit.s_star).epsilon(1e-12));
    CHECK(big.p_i == doctest::Approx(unit.p_i).epsilon(1e-12));
    CHECK(big.b_i == doctest::Approx(1000.0 * unit.b_i).epsilon(1e-12));
    CHECK(big.b_b == doctest::Approx(1000.0 * unit.b_b).epsilon(1e-12));
    CHECK(big.t_star == doctest::Approx(1000.0 * unit.t_star).epsilon(1e-12));
    CHECK(big.u_i == doctest::Approx(1000.0 * unit.u_i).epsilon(1e-12));
    CHECK(big.u_b == doctest::Approx(1000.0 * unit.u_b).epsilon(1e-12));
}

TEST_CASE("participation costs shift payoffs additively and nothing else") {
    const Equilibrium base = equilibrium({1.0, 2.0, 1.0, 0.0, 0.0});
    const Equilibrium costed = equilibrium({1.0, 2.0, 1.0, 0.1, 0.1});
    CHECK(costed.b_i == base.b_i);
    CHECK(costed.b_b == base.b_b);
    CHECK(costed.p_i == base.p_i);
    CHECK(costed.s_star == base.s_star);
    CHECK(costed.t_star == base.t_star);
    CHECK(costed.u_i == doctest::Approx(base.u_i - 0.1).epsilon(1e-14));
    CHECK(costed.u_b == doctest::Approx(base.u_b - 0.1).epsilon(1e-14));
}

TEST_CASE("equilibrium rejects weak penalties and bad shapes") {
    CHECK_THROWS_AS(equilibrium({1.0, 1.5, 1.0, 0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(equilibrium({1.0, 2.0, 0.5, 0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(equilibrium({-1.0, 2.0, 1.0, 0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("grid audit certifies the unit equilibrium") {
    const ContestParams params{1.0, 2.0, 1.0, 0.0, 0.0};
    const Equilibrium eq = equilibrium(params);
    const BidGrid grid{0.0, 2.0 * std::max(eq.b_i, eq.b_b), 100000};
    const NashAudit audit = verify_nash(eq, params, grid);
    CHECK(audit.passed);
    CHECK(audit.grid_points == 100001);
    CHECK(audit.max_gain_i <= audit.tol);
    CHECK(audit.max_gain_b <= audit.tol);
}

TEST_CASE("grid audit flags a perturbed point") {
    const ContestParams params{1.0, 2.0, 1.0, 0.0, 0.0};
    Equilibrium eq = equilibrium(params);
    eq.b_i *= 2.0;  // issuer overbids; deviating back must look profitable
    eq.p_i = success_fn(eq.b_i, eq.b_b, params.r).p_i;
    eq.p_b = 1.0 - eq.p_i;
    const NashAudit audit = verify_nash(eq, params, {0.0, 2.0, 100000});
    CHECK_FALSE(audit.passed);
    CHECK(audit.max_gain_i > 0.0);
}

TEST_CASE("grid audit rejects a degenerate grid") {
    const ContestParams params{1.0, 2.0, 1.0, 0.0, 0.0};
    const Equilibrium eq = equilibrium(params);
    CHECK_THROWS_AS(verify_nash(eq, params, {0.0, 2.0, 1}), std::invalid_argument);
}

TEST_CASE("best response location matches the solved bids") {
    const ContestParams params{1.0, 2.0, 1.0, 0.0, 0.0};
    const Equilibrium eq = equilibrium(params);
    const std::int64_t steps = 20000;
    double best_u = -1e30, best_bi = 0.0;
    for (std::int64_t k = 0; k <= steps; ++k) {
        const double b = 2.0 * static_cast<double>(k) / static_cast<double>(steps);
        const double u = issuer_payoff(params, b, eq.b_b);
        if (u > best_u) {
            best_u = u;
            best_bi = b;
        }
    }
    CHECK(std::abs(best_bi - eq.b_i) <= 2e-4);
    best_u = -1e30;
    double best_bb = 0.0;
    for (std::int64_t k = 0; k <= steps; ++k) {
        const double b = 2.0 * static_cast<double>(k) / static_cast<double>(steps);
        const double u = evader_payoff(params, eq.b_i, b);
        if (u > best_u) {
            best_u = u;
            best_bb = b;
        }
    }
    CHECK(std::abs(best_bb - eq.b_b) <= 2e-4);
}

TEST_CASE("random sweep: residuals, consistency, bounds, audit") {
    auto rng = SplitMix64(777);
    for (int i = 0; i < 25; ++i) {
        const double ratio = std::pow(10.0, rng.uniform(std::log10(2.0), 4.0));
        const double r = rng.uniform(1.0, 6.0);
        const ContestParams params{1.0, ratio, r, 0.0, 0.0};
        const Equilibrium eq = equilibrium(params);

        CHECK(std::abs(phi(eq.s_star, r) - ratio) / ratio <= 1e-10);
        CHECK(eq.b_i / eq.b_b == doctest::Approx(eq.s_star).epsilon(1e-9));
        const double x = std::pow(eq.s_star, r);
        CHECK(eq.p_i == doctest::Approx(x / (1.0 + x)).epsilon(1e-9));
        CHECK(eq.t_star == doctest::Approx(eq.b_i + eq.p_b * eq.b_b).epsilon(1e-12));
        CHECK(eq.p_i > 0.5);
        CHECK(eq.t_star > r / (r + 2.0) * params.v);

        const BidGrid grid{0.0, 2.0 * std::max(eq.b_i, eq.b_b), 20000};
        CHECK(verify_nash(eq, params, grid).passed);
    }
}

TEST_CASE("large-psi guarantee across its parameter corners") {
    auto c = check_lemma_large_psi(2.0, 1.0);
    CHECK(c.threshold == doctest::Approx(2.0));
    CHECK(c.p_i_at_threshold == doctest::Approx(kPI).epsilon(1e-9));
    CHECK(c.holds);

    c = check_lemma_large_psi(2.0, 3.0);
    CHECK(c.threshold == doctest::Approx(2.0));
    CHECK(c.p_i_at_threshold >= 0.5);
    CHECK(c.holds);

    c = check_lemma_large_psi(10.0, 1.0);
    CHECK(c.threshold == doctest::Approx(90.0));
    CHECK(c.p_i_at_threshold >= 0.9);
    CHECK(c.holds);

    CHECK_THROWS_AS(check_lemma_large_psi(1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(check_lemma_large_psi(0.5, 1.0), std::invalid_argument);
    // N = 1.5, r = 1 puts the threshold at 0.75, outside the solver domain
    CHECK_THROWS_AS(check_lemma_large_psi(1.5, 1.0), std::invalid_argument);
}

TEST_CASE("positive-utility guarantee") {
    auto c = check_positive_utility({1.0, 2.0, 1.0, 0.0, 0.0});
    CHECK(c.x == doctest::Approx(kSStar).epsilon(1e-9));  // x = (s*)^r with r = 1
    CHECK(c.passes);

    c = check_positive_utility({1.0, 2.0, 3.0, 0.0, 0.0});
    CHECK(c.x > 2.0);  // (s*)^r > r - 1
    CHECK(c.passes);

    c = check_positive_utility({1.0, 100.0, 1.0, 0.0, 0.0});
    CHECK(c.passes);
    const Equilibrium rich = equilibrium({1.0, 100.0, 1.0, 0.5, 0.0});
    CHECK(rich.u_i + 0.5 == doctest::Approx(86.59650253316913).epsilon(1e-9));
}

}  // TEST_SUITE
