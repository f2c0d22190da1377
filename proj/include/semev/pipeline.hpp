#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "semev/decimal.hpp"
#include "semev/events.hpp"
#include "semev/gmm.hpp"
#include "semev/kde.hpp"

namespace semev::pipeline {

using AddressKey = std::pair<std::string, std::string>;  // (address, token)

// One transfer as seen from the keyed address.
struct LedgerRow {
    std::string tx_id;
    std::int64_t block_time;
    bool inflow;
    UsdMicros amount;
    bool reverted;
    UsdMicros balance_after;  // running balance; reverted rows leave it unchanged
};

struct AddressHistory {
    std::string address;
    std::string token;
    std::vector<LedgerRow> rows;           // time-ordered
    std::vector<SanctionEvent> sanctions;  // time-ordered by t_exec
    bool quarantined = false;              // running balance went negative
    std::optional<std::int64_t> blacklist_exec;  // first Blacklist effectiveness time
    UsdMicros inflow_before_exec{};        // non-reverted inflow strictly before blacklist_exec
};

struct Ledgers {
    std::map<AddressKey, AddressHistory> histories;
    std::map<std::string, AddressCategory> labels;
};

enum class Regime { Race, TacticalReactive, StrategicMigration, LongTail };
std::string to_string(Regime r);

struct RegimeModel {
    int k = 0;
    std::vector<double> weights;    // over log(delta), components sorted by mean
    std::vector<double> means;
    std::vector<double> variances;
    double bic = 0.0;
    std::vector<double> boundaries;  // mixture-density valleys, in delta seconds
};

struct IntentEpisode {
    std::string address;
    std::string token;
    std::vector<std::string> tx_ids;
    std::int64_t start_time = 0;
    std::int64_t end_time = 0;
    UsdMicros b_start{};     // balance immediately before the episode
    UsdMicros inflow_sum{};
    UsdMicros v_out{};
    UsdMicros l_episode{};   // b_start + inflow_sum, exact
    std::optional<std::int64_t> final_outflow_time;
    std::optional<std::int64_t> delta;  // t_exec - final_outflow_time, pre-enforcement only
    bool is_evasion = false;
    std::optional<Regime> regime;
};

struct PipelineConfig {
    double alpha = 0.10;       // relative materiality threshold
    double beta_usd = 1000.0;  // absolute materiality threshold, USD
    int k_lo = 1;
    int k_hi = 50;
    int kde_grid_points = 512;
    int gmm_restarts = 8;
    std::uint64_t seed = 0;
    std::array<double, 3> default_boundaries{242.0, 95514.0, 7614341.0};
    // Production-data reference threshold; used only when there are too few gaps to fit.
    double default_tau = 107.0;
    std::optional<double> tau_override;
    bool fit_boundaries = false;  // default mode keeps the canonical boundary trio

    void validate() const;
};

struct FilterDecision {
    std::string address;
    std::string token;
    std::string reason;
};

struct FunnelCounts {
    std::int64_t raw = 0;
    std::int64_t quarantined = 0;
    std::int64_t semantic_removed = 0;
    std::int64_t sed = 0;
    std::int64_t adversarial_removed = 0;
    std::int64_t aed = 0;
};

Ledgers ingest_events(const std::vector<TransferEvent>& transfers,
                      const std::vector<SanctionEvent>& sanctions,
                      const std::vector<AddressLabel>& labels);

// Phase I: drop revoked sanctions and the recovery workflow pattern
// (Blacklist -> DestroyFunds -> Reissue in time order, no window cap).
std::vector<AddressKey> semantic_filter(const Ledgers& ledgers,
                                        std::vector<FilterDecision>* decisions = nullptr);

// Phase II: drop infrastructure labels and inert addresses (no inflow before t_exec).
std::vector<AddressKey> adversarial_filter(const Ledgers& ledgers,
                                           const std::vector<AddressKey>& sed,
                                           std::vector<FilterDecision>* decisions = nullptr);

// KDE valley in log10(gap) space; falls back to cfg.default_tau below 100 gaps.
// Throws when the pooled distribution has no prominent interior valley.
double estimate_gap_threshold(const std::vector<std::int64_t>& gaps, const PipelineConfig& cfg);

std::vector<IntentEpisode> segment_episodes(const AddressHistory& history, double tau);

// (v_out >= beta) and (v_out / l_episode >= alpha); zero-liquidity episodes are never evasion.
bool classify_materiality(const IntentEpisode& episode, const PipelineConfig& cfg);

std::optional<std::int64_t> compute_delta(const IntentEpisode& episode,
                                          const SanctionEvent& sanction);

// GMM over log(delta) with BIC selection across k; boundaries are the density valleys.
RegimeModel fit_regime_model(const std::vector<double>& deltas, const PipelineConfig& cfg);

Regime assign_regime(double delta, const std::array<double, 3>& boundaries);
std::vector<Regime> assign_regimes(const std::vector<double>& deltas,
                                   const std::optional<std::array<double, 3>>& boundaries,
                                   const PipelineConfig& cfg);

// Keeps exactly three fitted valleys, each nearest (in log10) to one canonical cut;
// missing valleys fall back to the canonical value.
std::array<double, 3> select_boundary_trio(const std::vector<double>& valleys,
                                           const std::array<double, 3>& defaults);

struct PipelineResult {
    double tau = 0.0;
    bool tau_from_kde = false;
    std::vector<IntentEpisode> episodes;  // all episodes of AED addresses
    std::optional<RegimeModel> model;
    std::array<double, 3> boundaries_used{};
    FunnelCounts funnel;
    std::vector<FilterDecision> decisions;
    std::uint64_t seed = 0;
};

PipelineResult run_pipeline(const std::vector<TransferEvent>& transfers,
                            const std::vector<SanctionEvent>& sanctions,
                            const std::vector<AddressLabel>& labels, const PipelineConfig& cfg);

// Serialized artifacts (episodes.csv columns follow the IntentEpisode field order).
std::string episodes_csv(const std::vector<IntentEpisode>& episodes);
std::string regimes_json(const PipelineResult& result);

}  // namespace semev::pipeline
