#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "semev/pipeline.hpp"

namespace semev::synth {

struct BurstProfile {
    std::int64_t intra_gap_lo = 5;    // seconds between transactions inside an episode
    std::int64_t intra_gap_hi = 149;
};

struct GenConfig {
    int addresses = 100;
    int episodes_lo = 3;
    int episodes_hi = 8;
    BurstProfile burst;
    std::int64_t inter_gap_lo = 601;    // background spacing between episodes, log-uniform
    std::int64_t inter_gap_hi = 45000;
    double planted_tau = 300.0;
    // share of final pre-sanction episodes planted per regime (Race, Tactical, Strategic, LongTail)
    std::array<double, 4> regime_mix{0.25, 0.25, 0.25, 0.25};
    double material_frac = 0.70;
    double dust_frac = 0.15;        // remainder is low-ratio
    double reverted_frac = 0.10;    // chance an episode carries one reverted transfer
    int planted_revoked = 0;        // addresses later unblacklisted
    int planted_recovery = 0;       // blacklist -> destroy -> reissue workflow
    int planted_inert = 0;          // sanctioned, no transfer activity
    int planted_labeled = 0;        // sanctioned infrastructure (mixer etc.)
    std::uint64_t seed = 0;
    std::string token = "USDX";
    double alpha = 0.10;            // thresholds used when recording planted materiality
    double beta_usd = 1000.0;

    void validate() const;
};

struct GroundTruthEpisode {
    std::string address;
    std::string token;
    std::vector<std::string> tx_ids;
    std::int64_t start_time = 0;
    std::int64_t end_time = 0;
    pipeline::UsdMicros b_start{};
    pipeline::UsdMicros inflow_sum{};
    pipeline::UsdMicros v_out{};
    pipeline::UsdMicros l_episode{};
    std::optional<std::int64_t> delta;
    std::optional<pipeline::Regime> regime;
    bool is_evasion = false;
};

struct GroundTruth {
    std::uint64_t seed = 0;
    double planted_tau = 0.0;
    std::vector<GroundTruthEpisode> episodes;  // evader addresses only (post-filter expectation)
    std::vector<std::string> revoked_addresses;
    std::vector<std::string> recovery_addresses;
    std::vector<std::string> inert_addresses;
    std::vector<pipeline::AddressLabel> planted_labels;
};

struct SynthOutput {
    std::vector<pipeline::TransferEvent> transfers;
    std::vector<pipeline::SanctionEvent> sanctions;
    std::vector<pipeline::AddressLabel> labels;
    GroundTruth truth;
};

SynthOutput synth_generate(const GenConfig& cfg);

// transfers.jsonl, sanctions.jsonl, ground_truth.json, labels.csv (only when labels exist).
// Returns the file names written, in that order.
std::vector<std::string> write_synth_files(const SynthOutput& out, const std::string& dir);

std::string ground_truth_json(const GroundTruth& truth);
GroundTruth read_ground_truth(const std::string& path);

struct EvaluationReport {
    double tau_rel_error = 0.0;
    double episode_f1 = 0.0;
    double regime_accuracy = 0.0;      // over matched episodes where both sides assign one
    double materiality_accuracy = 0.0;  // over matched episodes
    std::int64_t matched = 0;
    std::int64_t output_episodes = 0;
    std::int64_t truth_episodes = 0;
};

// Episode matching is exact transaction-membership equality per (address, token).
EvaluationReport evaluate_pipeline(const pipeline::PipelineResult& result,
                                   const GroundTruth& truth);

}  // namespace semev::synth
