#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "semev/contest.hpp"
#include "semev/rng.hpp"

namespace semev::sim {

// Channel visibility regimes. The success function already abstracts the channel,
// so the regime changes payment routing metadata only, never the win probability.
enum class RegimeVariant { PublicPublic, Mixed, PrivatePrivate };
enum class PrivateSide { Issuer, Evader };

struct ChannelRegime {
    RegimeVariant variant = RegimeVariant::PublicPublic;
    std::optional<PrivateSide> which_private;

    void validate() const;
    static ChannelRegime public_public() { return {RegimeVariant::PublicPublic, std::nullopt}; }
    static ChannelRegime mixed(PrivateSide side) { return {RegimeVariant::Mixed, side}; }
    static ChannelRegime private_private() { return {RegimeVariant::PrivatePrivate, std::nullopt}; }
};

struct Strategy {
    enum class Kind { EquilibriumBid, FixedBid, GridBestResponse };

    Kind kind = Kind::EquilibriumBid;
    double amount = 0.0;        // FixedBid only
    contest::BidGrid grid;      // GridBestResponse only

    static Strategy equilibrium_bid() { return {Kind::EquilibriumBid, 0.0, {}}; }
    static Strategy fixed_bid(double amount);
    static Strategy grid_best_response(const contest::BidGrid& grid);
};

enum class Winner { Freeze, Evade, NoContest };

struct ContestOutcome {
    Winner winner;
    double issuer_paid;              // issuer bid, paid regardless of outcome (all-pay)
    double evader_paid;              // evader bid, paid only on winner == Evade
    double proposer_revenue;         // issuer_paid + evader_paid; fixed costs excluded
    double direct_proposer_payment;  // evader payment routed outside fees (PrivatePrivate)
};

struct SimReport {
    std::int64_t trials;
    double empirical_p_i;
    double mean_proposer_revenue;
    double mean_issuer_cost;    // mean of c_i + issuer bid + psi * 1[evade]
    double mean_evader_payoff;  // mean of 1[evade] * (v - evader bid) - c_b
    double ci_radius_p_i;       // binomial 3 sigma
    double stderr_proposer_revenue;
    std::uint64_t seed;
};

struct RepeatedConfig {
    double alpha;  // issuer proposer share in [0, 1]
    std::int64_t contests;
    contest::ContestParams params;
    std::uint64_t seed;

    void validate() const;
};

struct RepeatedResult {
    double empirical_cost;
    double analytic_cost;
    double freeze_rate;
    double cost_stderr;
};

struct AdaptiveTrajectory {
    std::vector<std::pair<double, double>> bids;  // (b_i, b_b) after each round
    double final_b_i;
    double final_b_b;
    double distance_to_equilibrium;  // max coordinate distance to (b_i*, b_b*)
};

struct MicroFit {
    double empirical_p_i;  // micro-mechanism win rate at the equilibrium bid pair
    double fitted_r;       // least-squares slope of log(P_I/P_B) on log(b_I/b_B)
    double residual_rms;
    int points_used;
};

// Resolves both strategies to a bid pair. A grid best response resolves against the
// other side's resolved bid; two grid strategies are mutually unresolvable.
std::pair<double, double> resolve_bids(const contest::ContestParams& params,
                                       const Strategy& strat_i, const Strategy& strat_b);

ContestOutcome run_contest(const contest::ContestParams& params, const Strategy& strat_i,
                           const Strategy& strat_b, const ChannelRegime& regime, SplitMix64& rng);

SimReport run_monte_carlo(const contest::ContestParams& params, const Strategy& strat_i,
                          const Strategy& strat_b, const ChannelRegime& regime,
                          std::int64_t trials, std::uint64_t seed);

// Per-trial rows for the optional CSV sink.
struct TrialRow {
    std::int64_t trial;
    Winner winner;
    double b_i;
    double b_b;
    double issuer_paid;
    double evader_paid;
    double proposer_revenue;
};

SimReport run_monte_carlo_traced(const contest::ContestParams& params, const Strategy& strat_i,
                                 const Strategy& strat_b, const ChannelRegime& regime,
                                 std::int64_t trials, std::uint64_t seed,
                                 std::vector<TrialRow>* trace);

// Repeated setting: with probability alpha the proposer is issuer-controlled and the
// freeze lands at cost c_i alone; otherwise the block resolves via the contest with
// the issuer on its equilibrium bid.
RepeatedResult run_repeated(const RepeatedConfig& cfg, const Strategy& strat_b);

// Simultaneous-move grid best-response dynamics; ties break toward the lower bid.
// Convergence is observed, not guaranteed. The seed is accepted for interface
// uniformity; the dynamics are deterministic.
AdaptiveTrajectory run_adaptive(const contest::ContestParams& params, const contest::BidGrid& grid,
                                int rounds, std::uint64_t seed, double initial_b_i,
                                double initial_b_b);

// Micro-mechanism resolution: effective priority bid * exp(noise_scale * g), higher wins.
double micro_win_probability(double b_i, double b_b, double noise_scale, std::int64_t trials,
                             SplitMix64 rng);

// Exploratory calibration of the effective r implied by the lognormal-noise auction.
MicroFit run_gas_auction_micro(const contest::ContestParams& params, double noise_scale,
                               std::int64_t trials, std::uint64_t seed);

}  // namespace semev::sim
