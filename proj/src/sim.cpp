#include "semev/sim.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "semev/economics.hpp"

namespace semev::sim {

using contest::BidGrid;
using contest::ContestParams;

void ChannelRegime::validate() const {
    if (variant == RegimeVariant::Mixed && !which_private)
        throw std::invalid_argument("regime: Mixed requires which_private");
    if (variant != RegimeVariant::Mixed && which_private)
        throw std::invalid_argument("regime: which_private is only valid for Mixed");
}

Strategy Strategy::fixed_bid(double amount) {
    if (!std::isfinite(amount) || amount < 0.0)
        throw std::invalid_argument("strategy: fixed bid must be >= 0");
    return {Kind::FixedBid, amount, {}};
}

Strategy Strategy::grid_best_response(const BidGrid& grid) {
    grid.validate();
    return {Kind::GridBestResponse, 0.0, grid};
}

void RepeatedConfig::validate() const {
    if (!std::isfinite(alpha) || alpha < 0.0 || alpha > 1.0)
        throw std::invalid_argument("repeated: alpha must lie in [0, 1]");
    if (contests < 1) throw std::invalid_argument("repeated: contests must be >= 1");
    params.validate_solvable();
}

namespace {

double best_response_issuer(const ContestParams& params, const BidGrid& grid, double b_b) {
    double best_u = -std::numeric_limits<double>::infinity();
    double best_b = grid.lo;
    const double opp = std::pow(b_b, params.r);
    for (std::int64_t k = 0; k <= grid.steps; ++k) {
        const double b = grid.point(k);
        const double bp = std::pow(b, params.r);
        const double p_i = (bp + opp > 0.0) ? bp / (bp + opp) : 0.0;
        const double u = p_i * params.psi - b;
        if (u > best_u) {  // strict: first (lowest) maximizer wins ties
            best_u = u;
            best_b = b;
        }
    }
    return best_b;
}

double best_response_evader(const ContestParams& params, const BidGrid& grid, double b_i) {
    double best_u = -std::numeric_limits<double>::infinity();
    double best_b = grid.lo;
    const double opp = std::pow(b_i, params.r);
    for (std::int64_t k = 0; k <= grid.steps; ++k) {
        const double b = grid.point(k);
        const double bp = std::pow(b, params.r);
        const double p_b = (bp + opp > 0.0) ? bp / (bp + opp) : 0.0;
        const double u = p_b * (params.v - b);
        if (u > best_u) {
            best_u = u;
            best_b = b;
        }
    }
    return best_b;
}

}  // namespace

std::pair<double, double> resolve_bids(const ContestParams& params, const Strategy& strat_i,
                                       const Strategy& strat_b) {
    if (strat_i.kind == Strategy::Kind::GridBestResponse &&
        strat_b.kind == Strategy::Kind::GridBestResponse)
        throw std::invalid_argument("resolve_bids: two grid best responses are unresolvable");

    auto fixed_part = [&](const Strategy& s, bool issuer) -> std::optional<double> {
        switch (s.kind) {
            case Strategy::Kind::FixedBid:
                return s.amount;
            case Strategy::Kind::EquilibriumBid: {
                const auto eq = contest::equilibrium(params);
                return issuer ? eq.b_i : eq.b_b;
            }
            default:
                return std::nullopt;
        }
    };

    const auto bi = fixed_part(strat_i, true);
    const auto bb = fixed_part(strat_b, false);
    if (bi && bb) return {*bi, *bb};
    if (!bi) return {best_response_issuer(params, strat_i.grid, *bb), *bb};
    return {*bi, best_response_evader(params, strat_b.grid, *bi)};
}

ContestOutcome run_contest(const ContestParams& params, const Strategy& strat_i,
                           const Strategy& strat_b, const ChannelRegime& regime, SplitMix64& rng) {
    params.validate();
    regime.validate();
    const auto [b_i, b_b] = resolve_bids(params, strat_i, strat_b);
    const auto w = contest::success_fn(b_i, b_b, params.r);

    ContestOutcome out{};
    if (w.no_contest) {
        out.winner = Winner::NoContest;
        return out;
    }

    const bool freeze = rng.uniform01() < w.p_i;
    out.winner = freeze ? Winner::Freeze : Winner::Evade;
    out.issuer_paid = b_i;
    out.evader_paid = freeze ? 0.0 : b_b;
    out.proposer_revenue = out.issuer_paid + out.evader_paid;
    out.direct_proposer_payment =
        (regime.variant == RegimeVariant::PrivatePrivate) ? out.evader_paid : 0.0;
    return out;
}

SimReport run_monte_carlo(const ContestParams& params, const Strategy& strat_i,
                          const Strategy& strat_b, const ChannelRegime& regime,
                          std::int64_t trials, std::uint64_t seed) {
    return run_monte_carlo_traced(params, strat_i, strat_b, regime, trials, seed, nullptr);
}

SimReport run_monte_carlo_traced(const ContestParams& params, const Strategy& strat_i,
                                 const Strategy& strat_b, const ChannelRegime& regime,
                                 std::int64_t trials, std::uint64_t seed,
                                 std::vector<TrialRow>* trace) {
    if (trials < 1) throw std::invalid_argument("run_monte_carlo: trials must be >= 1");
    params.validate();
    regime.validate();

    // Strategies are static across trials; resolve once.
    const auto [b_i, b_b] = resolve_bids(params, strat_i, strat_b);
    const auto w = contest::success_fn(b_i, b_b, params.r);

    std::int64_t freezes = 0;
    double sum_rev = 0.0, sum_rev_sq = 0.0;
    double sum_cost = 0.0, sum_payoff = 0.0;
    if (trace) trace->reserve(static_cast<std::size_t>(trials));

    for (std::int64_t t = 0; t < trials; ++t) {
        auto rng = SplitMix64::substream(seed, static_cast<std::uint64_t>(t));
        Winner winner = Winner::NoContest;
        double evader_paid = 0.0;
        if (!w.no_contest) {
            const bool freeze = rng.uniform01() < w.p_i;
            winner = freeze ? Winner::Freeze : Winner::Evade;
            if (freeze)
                ++freezes;
            else
                evader_paid = b_b;
        }
        const double issuer_paid = w.no_contest ? 0.0 : b_i;
        const double revenue = issuer_paid + evader_paid;
        sum_rev += revenue;
        sum_rev_sq += revenue * revenue;
        sum_cost += params.c_i + issuer_paid + (winner == Winner::Evade ? params.psi : 0.0);
        sum_payoff +=
            (winner == Winner::Evade ? params.v - b_b : 0.0) - params.c_b;
        if (trace)
            trace->push_back({t, winner, b_i, b_b, issuer_paid, evader_paid, revenue});
    }

    const double n = static_cast<double>(trials);
    SimReport rep{};
    rep.trials = trials;
    rep.empirical_p_i = static_cast<double>(freezes) / n;
    rep.mean_proposer_revenue = sum_rev / n;
    rep.mean_issuer_cost = sum_cost / n;
    rep.mean_evader_payoff = sum_payoff / n;
    rep.ci_radius_p_i = 3.0 * std::sqrt(rep.empirical_p_i * (1.0 - rep.empirical_p_i) / n);
    const double var_rev =
        trials > 1 ? std::max(0.0, (sum_rev_sq - sum_rev * sum_rev / n) / (n - 1.0)) : 0.0;
    rep.stderr_proposer_revenue = std::sqrt(var_rev / n);
    rep.seed = seed;
    return rep;
}

RepeatedResult run_repeated(const RepeatedConfig& cfg, const Strategy& strat_b) {
    cfg.validate();
    const auto [b_i, b_b] = resolve_bids(cfg.params, Strategy::equilibrium_bid(), strat_b);
    const auto w = contest::success_fn(b_i, b_b, cfg.params.r);

    std::int64_t freezes = 0;
    double sum_loss = 0.0, sum_loss_sq = 0.0;
    for (std::int64_t t = 0; t < cfg.contests; ++t) {
        auto rng = SplitMix64::substream(cfg.seed, static_cast<std::uint64_t>(t));
        double loss;
        if (rng.uniform01() < cfg.alpha) {
            // issuer-controlled proposer: freeze is certain, no contest expenditure
            ++freezes;
            loss = cfg.params.c_i;
        } else {
            const bool freeze = !w.no_contest && rng.uniform01() < w.p_i;
            if (freeze) ++freezes;
            loss = cfg.params.c_i + b_i + (freeze ? 0.0 : cfg.params.psi);
        }
        sum_loss += loss;
        sum_loss_sq += loss * loss;
    }

    const double n = static_cast<double>(cfg.contests);
    RepeatedResult out;
    out.empirical_cost = sum_loss / n;
    out.analytic_cost = econ::enforcement_cost(cfg.alpha, cfg.params);
    out.freeze_rate = static_cast<double>(freezes) / n;
    const double var =
        cfg.contests > 1 ? std::max(0.0, (sum_loss_sq - sum_loss * sum_loss / n) / (n - 1.0)) : 0.0;
    out.cost_stderr = std::sqrt(var / n);
    return out;
}

AdaptiveTrajectory run_adaptive(const ContestParams& params, const BidGrid& grid, int rounds,
                                std::uint64_t /*seed*/, double initial_b_i, double initial_b_b) {
    if (rounds < 1) throw std::invalid_argument("run_adaptive: rounds must be >= 1");
    params.validate_solvable();
    grid.validate();

    AdaptiveTrajectory traj;
    traj.bids.reserve(static_cast<std::size_t>(rounds));
    double b_i = initial_b_i;
    double b_b = initial_b_b;
    for (int t = 0; t < rounds; ++t) {
        const double next_i = best_response_issuer(params, grid, b_b);
        const double next_b = best_response_evader(params, grid, b_i);
        b_i = next_i;
        b_b = next_b;
        traj.bids.emplace_back(b_i, b_b);
    }
    traj.final_b_i = b_i;
    traj.final_b_b = b_b;
    const auto eq = contest::equilibrium(params);
    traj.distance_to_equilibrium =
        std::max(std::abs(b_i - eq.b_i), std::abs(b_b - eq.b_b));
    return traj;
}

double micro_win_probability(double b_i, double b_b, double noise_scale, std::int64_t trials,
                             SplitMix64 rng) {
    if (trials < 1) throw std::invalid_argument("micro: trials must be >= 1");
    std::int64_t wins = 0;
    for (std::int64_t t = 0; t < trials; ++t) {
        const double pri_i =
            noise_scale > 0.0 ? b_i * std::exp(noise_scale * rng.gaussian()) : b_i;
        const double pri_b =
            noise_scale > 0.0 ? b_b * std::exp(noise_scale * rng.gaussian()) : b_b;
        if (pri_i > pri_b)
            ++wins;
        else if (pri_i == pri_b && rng.uniform01() < 0.5)
            ++wins;
    }
    return static_cast<double>(wins) / static_cast<double>(trials);
}

MicroFit run_gas_auction_micro(const ContestParams& params, double noise_scale,
                               std::int64_t trials, std::uint64_t seed) {
    if (!std::isfinite(noise_scale) || noise_scale < 0.0)
        throw std::invalid_argument("micro: noise scale must be >= 0");
    const auto eq = contest::equilibrium(params);

    MicroFit fit{};
    fit.empirical_p_i = micro_win_probability(eq.b_i, eq.b_b, noise_scale, trials,
                                              SplitMix64::substream(seed, 0));

    // 10-point bid-ratio grid, log-spaced over [1/4, 4]; logit slope through the origin
    double sxx = 0.0, sxy = 0.0;
    std::vector<std::pair<double, double>> pts;
    for (int k = 0; k < 10; ++k) {
        const double log10_ratio = -0.60206 + (1.20412 * k) / 9.0;
        const double ratio = std::pow(10.0, log10_ratio);
        const double p = micro_win_probability(ratio * eq.b_b, eq.b_b, noise_scale, trials,
                                               SplitMix64::substream(seed, 1 + k));
        if (p <= 0.0 || p >= 1.0) continue;  // infinite logit carries no slope information
        const double x = std::log(ratio);
        const double y = std::log(p / (1.0 - p));
        sxx += x * x;
        sxy += x * y;
        pts.emplace_back(x, y);
    }
    fit.points_used = static_cast<int>(pts.size());
    if (sxx > 0.0) {
        fit.fitted_r = sxy / sxx;
        double ss = 0.0;
        for (const auto& [x, y] : pts) {
            const double e = y - fit.fitted_r * x;
            ss += e * e;
        }
        fit.residual_rms = std::sqrt(ss / static_cast<double>(pts.size()));
    } else {
        fit.fitted_r = std::numeric_limits<double>::infinity();
        fit.residual_rms = std::numeric_limits<double>::quiet_NaN();
    }
    return fit;
}

}  // namespace semev::sim
