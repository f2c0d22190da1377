#include "semev/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>

#include <json.hpp>

#include "semev/manifest.hpp"
#include "semev/rng.hpp"

namespace semev::synth {

using nlohmann::json;
using pipeline::AddressLabel;
using pipeline::IntentEpisode;
using pipeline::Regime;
using pipeline::SanctionEvent;
using pipeline::SanctionKind;
using pipeline::TransferEvent;
using pipeline::UsdMicros;

namespace {

constexpr std::int64_t kBaseTime = 1'600'000'000;

// Planted delta windows per regime, kept ~10% clear of the canonical boundaries
// {242, 95514, 7614341} so a planted episode can never straddle a cut.
constexpr std::array<std::array<std::int64_t, 2>, 4> kDeltaWindows{{
    {25, 217},
    {270, 85900},
    {106000, 6850000},
    {8400000, 300000000},
}};

std::string addr_name(const char* prefix, int i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "0x%s%05d", prefix, i);
    return buf;
}

std::int64_t log_uniform_int(SplitMix64& rng, std::int64_t lo, std::int64_t hi) {
    const double x = rng.uniform(std::log(static_cast<double>(lo)),
                                 std::log(static_cast<double>(hi)));
    const auto v = static_cast<std::int64_t>(std::llround(std::exp(x)));
    return std::clamp(v, lo, hi);
}

// Amounts are drawn in whole cents so every value is exact at token precision.
UsdMicros cents(std::int64_t c) { return UsdMicros{c * 10'000}; }

struct AddressPlan {
    std::string address;
    std::vector<TransferEvent> transfers;
    std::vector<GroundTruthEpisode> episodes;
    std::vector<std::optional<std::int64_t>> episode_fot;  // parallel final outflow times
    std::int64_t last_final_outflow = 0;
};

class Generator {
  public:
    explicit Generator(const GenConfig& cfg) : cfg_(cfg), beta_(UsdMicros::from_usd(cfg.beta_usd)) {}

    SynthOutput run() {
        SynthOutput out;
        out.truth.seed = cfg_.seed;
        out.truth.planted_tau = cfg_.planted_tau;

        for (int i = 0; i < cfg_.addresses; ++i) {
            auto rng = SplitMix64::substream(cfg_.seed, 1000 + static_cast<std::uint64_t>(i));
            AddressPlan plan = build_activity(addr_name("e", i), rng);

            // pick the final episode's regime from the mix, then anchor t_exec
            const int regime_idx = pick_regime(rng);
            const auto [dlo, dhi] = kDeltaWindows[static_cast<std::size_t>(regime_idx)];
            const std::int64_t delta = log_uniform_int(rng, dlo, dhi);
            const std::int64_t t_exec = plan.last_final_outflow + delta;
            std::optional<std::int64_t> t_submit;
            if (rng.uniform01() < 0.5) t_submit = t_exec - rng.uniform_int(60, 3600);
            out.sanctions.push_back({cfg_.token, plan.address, SanctionKind::Blacklist, t_submit, t_exec});

            const SanctionEvent governing{cfg_.token, plan.address, SanctionKind::Blacklist,
                                          std::nullopt, t_exec};
            for (std::size_t j = 0; j < plan.episodes.size(); ++j) {
                auto& ep = plan.episodes[j];
                IntentEpisode shim;
                shim.final_outflow_time = plan.episode_fot[j];
                ep.delta = pipeline::compute_delta(shim, governing);
                if (ep.delta)
                    ep.regime = pipeline::assign_regime(static_cast<double>(*ep.delta),
                                                        {242.0, 95514.0, 7614341.0});
                out.truth.episodes.push_back(std::move(ep));
            }
            append(out.transfers, plan.transfers);
        }

        plant_filtered(out);
        return out;
    }

  private:
    const GenConfig& cfg_;
    UsdMicros beta_;
    int tx_counter_ = 0;
    int sink_counter_ = 0;

    static void append(std::vector<TransferEvent>& dst, const std::vector<TransferEvent>& src) {
        dst.insert(dst.end(), src.begin(), src.end());
    }

    int pick_regime(SplitMix64& rng) const {
        const double u = rng.uniform01();
        double acc = 0.0;
        for (int k = 0; k < 4; ++k) {
            acc += cfg_.regime_mix[static_cast<std::size_t>(k)];
            if (u < acc) return k;
        }
        return 3;
    }

    std::string next_tx_id(const std::string& addr) {
        return addr + "-t" + std::to_string(tx_counter_++);
    }

    std::string next_sink() {
        return addr_name("sink", sink_counter_++ % 7);
    }

    // Emits one address's full activity; GroundTruthEpisode.delta temporarily holds the
    // episode's final outflow time until the sanction anchor is known.
    AddressPlan build_activity(const std::string& addr, SplitMix64& rng) {
        AddressPlan plan;
        plan.address = addr;
        std::int64_t t = kBaseTime + rng.uniform_int(0, 100000);
        UsdMicros balance{};
        const int n_ep = static_cast<int>(rng.uniform_int(cfg_.episodes_lo, cfg_.episodes_hi));

        for (int e = 0; e < n_ep; ++e) {
            // background spacing is heavy-tailed; log-uniform keeps mass near the
            // short end the way real activity lulls do
            if (e > 0) t += log_uniform_int(rng, cfg_.inter_gap_lo, cfg_.inter_gap_hi);

            GroundTruthEpisode ep;
            ep.address = addr;
            ep.token = cfg_.token;
            ep.b_start = balance;

            const double roll = rng.uniform01();
            UsdMicros inflow{}, v_out{};
            if (roll < cfg_.material_frac) {
                // liquidity between 2x and 20x the absolute threshold, then drain most of it
                inflow = cents(rng.uniform_int(2 * beta_.micros / 10'000,
                                               20 * beta_.micros / 10'000));
                const UsdMicros l = balance + inflow;
                v_out = UsdMicros{l.micros / 10 * 9};  // drain 90% of liquidity
            } else if (roll < cfg_.material_frac + cfg_.dust_frac) {
                inflow = cents(rng.uniform_int(0, beta_.micros / 2 / 10'000));
                v_out = UsdMicros{beta_.micros * 3 / 10};
                if (balance + inflow < v_out) inflow += v_out - (balance + inflow);
            } else {
                v_out = UsdMicros{beta_.micros * 2};
                const UsdMicros need{beta_.micros * 41};
                if (balance < need) inflow = need - balance;
            }

            // inflow first, then 1..3 outflows; a reverted attempt may land in between
            std::vector<std::pair<bool, UsdMicros>> flows;  // (inflow?, amount)
            if (inflow.micros > 0) flows.emplace_back(true, inflow);
            const int n_out = static_cast<int>(rng.uniform_int(1, 3));
            UsdMicros remaining = v_out;
            for (int k = 0; k < n_out; ++k) {
                UsdMicros part = (k + 1 == n_out)
                                     ? remaining
                                     : UsdMicros{remaining.micros / (n_out - k)};
                if (part.micros <= 0) continue;
                flows.emplace_back(false, part);
                remaining -= part;
            }
            const bool add_reverted = rng.uniform01() < cfg_.reverted_frac;
            const std::size_t reverted_pos =
                add_reverted ? static_cast<std::size_t>(
                                   rng.uniform_int(0, static_cast<std::int64_t>(flows.size())))
                             : flows.size() + 1;

            bool first_tx = true;
            std::size_t emitted = 0;
            std::optional<std::int64_t> final_outflow;
            auto emit = [&](bool is_inflow, UsdMicros amount, bool reverted) {
                if (!first_tx) t += rng.uniform_int(cfg_.burst.intra_gap_lo, cfg_.burst.intra_gap_hi);
                first_tx = false;
                TransferEvent tr;
                tr.token = cfg_.token;
                tr.tx_id = next_tx_id(addr);
                tr.block_time = t;
                tr.from_addr = is_inflow ? "0xfaucet" : addr;
                tr.to_addr = is_inflow ? addr : next_sink();
                tr.amount = amount;
                tr.reverted = reverted;
                plan.transfers.push_back(tr);
                ep.tx_ids.push_back(tr.tx_id);
                if (ep.tx_ids.size() == 1) ep.start_time = t;
                ep.end_time = t;
                if (!reverted) {
                    if (is_inflow) {
                        ep.inflow_sum += amount;
                        balance += amount;
                    } else {
                        ep.v_out += amount;
                        balance -= amount;
                        if (amount.micros > 0) final_outflow = t;
                    }
                }
            };

            for (const auto& [is_inflow, amount] : flows) {
                if (emitted == reverted_pos)
                    emit(true, cents(rng.uniform_int(100, 100000)), true);
                emit(is_inflow, amount, false);
                ++emitted;
            }
            if (reverted_pos == flows.size()) emit(true, cents(rng.uniform_int(100, 100000)), true);

            ep.l_episode = ep.b_start + ep.inflow_sum;
            {
                IntentEpisode as_episode;
                as_episode.v_out = ep.v_out;
                as_episode.l_episode = ep.l_episode;
                pipeline::PipelineConfig pc;
                pc.alpha = cfg_.alpha;
                pc.beta_usd = cfg_.beta_usd;
                ep.is_evasion = pipeline::classify_materiality(as_episode, pc);
            }
            if (final_outflow) plan.last_final_outflow = *final_outflow;
            plan.episodes.push_back(std::move(ep));
            plan.episode_fot.push_back(final_outflow);
        }
        return plan;
    }

    void plant_filtered(SynthOutput& out) {
        auto small_burst = [&](const std::string& addr, SplitMix64& rng,
                               std::int64_t* last_time) {
            std::int64_t t = kBaseTime + rng.uniform_int(0, 100000);
            const UsdMicros amount = cents(rng.uniform_int(500 * 100, 5000 * 100));
            TransferEvent in{cfg_.token, next_tx_id(addr), t, "0xfaucet", addr, amount, false};
            out.transfers.push_back(in);
            t += rng.uniform_int(cfg_.burst.intra_gap_lo, cfg_.burst.intra_gap_hi);
            TransferEvent outgoing{cfg_.token, next_tx_id(addr), t, addr, next_sink(),
                                   UsdMicros{amount.micros / 2}, false};
            out.transfers.push_back(outgoing);
            *last_time = t;
        };

        for (int i = 0; i < cfg_.planted_revoked; ++i) {
            auto rng = SplitMix64::substream(cfg_.seed, 50000 + static_cast<std::uint64_t>(i));
            const std::string addr = addr_name("rv", i);
            std::int64_t last = 0;
            small_burst(addr, rng, &last);
            out.sanctions.push_back({cfg_.token, addr, SanctionKind::Blacklist, std::nullopt, last + 3600});
            out.sanctions.push_back({cfg_.token, addr, SanctionKind::Unblacklist, std::nullopt, last + 90000});
            out.truth.revoked_addresses.push_back(addr);
        }
        for (int i = 0; i < cfg_.planted_recovery; ++i) {
            auto rng = SplitMix64::substream(cfg_.seed, 60000 + static_cast<std::uint64_t>(i));
            const std::string addr = addr_name("rc", i);
            std::int64_t last = 0;
            small_burst(addr, rng, &last);
            out.sanctions.push_back({cfg_.token, addr, SanctionKind::Blacklist, std::nullopt, last + 3600});
            out.sanctions.push_back({cfg_.token, addr, SanctionKind::DestroyFunds, std::nullopt, last + 7200});
            out.sanctions.push_back({cfg_.token, addr, SanctionKind::Reissue, std::nullopt, last + 10800});
            out.truth.recovery_addresses.push_back(addr);
        }
        for (int i = 0; i < cfg_.planted_inert; ++i) {
            const std::string addr = addr_name("in", i);
            out.sanctions.push_back({cfg_.token, addr, SanctionKind::Blacklist, std::nullopt,
                                     kBaseTime + 500000 + i});
            out.truth.inert_addresses.push_back(addr);
        }
        const std::array<pipeline::AddressCategory, 3> infra{
            pipeline::AddressCategory::MixerCore, pipeline::AddressCategory::Intermediary,
            pipeline::AddressCategory::ExchangeDepositCluster};
        for (int i = 0; i < cfg_.planted_labeled; ++i) {
            auto rng = SplitMix64::substream(cfg_.seed, 70000 + static_cast<std::uint64_t>(i));
            const std::string addr = addr_name("lb", i);
            std::int64_t last = 0;
            small_burst(addr, rng, &last);
            out.sanctions.push_back({cfg_.token, addr, SanctionKind::Blacklist, std::nullopt, last + 3600});
            const AddressLabel label{addr, infra[static_cast<std::size_t>(i) % infra.size()]};
            out.labels.push_back(label);
            out.truth.planted_labels.push_back(label);
        }
    }
};

}  // namespace

void GenConfig::validate() const {
    if (addresses <= 0) throw std::invalid_argument("synth: addresses must be positive");
    if (episodes_lo < 1 || episodes_hi < episodes_lo)
        throw std::invalid_argument("synth: bad episode count range");
    if (burst.intra_gap_lo < 0 || burst.intra_gap_hi < burst.intra_gap_lo)
        throw std::invalid_argument("synth: bad intra gap range");
    if (inter_gap_lo <= 0 || inter_gap_hi < inter_gap_lo)
        throw std::invalid_argument("synth: bad inter gap range");
    if (!(planted_tau > 0.0)) throw std::invalid_argument("synth: planted tau must be positive");
    double mix = 0.0;
    for (double m : regime_mix) {
        if (m < 0.0) throw std::invalid_argument("synth: regime mix must be nonnegative");
        mix += m;
    }
    if (std::abs(mix - 1.0) > 1e-9) throw std::invalid_argument("synth: regime mix must sum to 1");
    if (material_frac < 0 || dust_frac < 0 || material_frac + dust_frac > 1.0)
        throw std::invalid_argument("synth: bad materiality fractions");
    if (reverted_frac < 0 || reverted_frac > 1.0)
        throw std::invalid_argument("synth: bad reverted fraction");
    if (planted_revoked < 0 || planted_recovery < 0 || planted_inert < 0 || planted_labeled < 0)
        throw std::invalid_argument("synth: planted counts must be nonnegative");
}

SynthOutput synth_generate(const GenConfig& cfg) {
    cfg.validate();
    return Generator(cfg).run();
}

std::string ground_truth_json(const GroundTruth& truth) {
    json j;
    j["seed"] = truth.seed;
    j["planted_tau"] = truth.planted_tau;
    json eps = json::array();
    for (const auto& ep : truth.episodes) {
        json e;
        e["address"] = ep.address;
        e["token"] = ep.token;
        e["tx_ids"] = ep.tx_ids;
        e["start_time"] = ep.start_time;
        e["end_time"] = ep.end_time;
        e["b_start"] = ep.b_start.str();
        e["inflow_sum"] = ep.inflow_sum.str();
        e["v_out"] = ep.v_out.str();
        e["l_episode"] = ep.l_episode.str();
        e["delta"] = ep.delta ? json(*ep.delta) : json(nullptr);
        e["regime"] = ep.regime ? json(pipeline::to_string(*ep.regime)) : json(nullptr);
        e["is_evasion"] = ep.is_evasion;
        eps.push_back(std::move(e));
    }
    j["episodes"] = std::move(eps);
    j["revoked_addresses"] = truth.revoked_addresses;
    j["recovery_addresses"] = truth.recovery_addresses;
    j["inert_addresses"] = truth.inert_addresses;
    json labels = json::array();
    for (const auto& l : truth.planted_labels)
        labels.push_back({{"address", l.address}, {"category", pipeline::to_string(l.category)}});
    j["planted_labels"] = std::move(labels);
    return j.dump(2) + "\n";
}

GroundTruth read_ground_truth(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw pipeline::ParseError(path, 0, "cannot open file");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw pipeline::ParseError(path, 0, e.what());
    }
    GroundTruth t;
    t.seed = j.at("seed").get<std::uint64_t>();
    t.planted_tau = j.at("planted_tau").get<double>();
    for (const auto& e : j.at("episodes")) {
        GroundTruthEpisode ep;
        ep.address = e.at("address").get<std::string>();
        ep.token = e.at("token").get<std::string>();
        ep.tx_ids = e.at("tx_ids").get<std::vector<std::string>>();
        ep.start_time = e.at("start_time").get<std::int64_t>();
        ep.end_time = e.at("end_time").get<std::int64_t>();
        auto amount = [&](const char* key) {
            auto v = UsdMicros::parse(e.at(key).get<std::string>());
            if (!v) throw pipeline::ParseError(path, 0, std::string("bad amount in ") + key);
            return *v;
        };
        ep.b_start = amount("b_start");
        ep.inflow_sum = amount("inflow_sum");
        ep.v_out = amount("v_out");
        ep.l_episode = amount("l_episode");
        if (!e.at("delta").is_null()) ep.delta = e.at("delta").get<std::int64_t>();
        if (!e.at("regime").is_null()) {
            const auto s = e.at("regime").get<std::string>();
            if (s == "Race") ep.regime = Regime::Race;
            else if (s == "TacticalReactive") ep.regime = Regime::TacticalReactive;
            else if (s == "StrategicMigration") ep.regime = Regime::StrategicMigration;
            else if (s == "LongTail") ep.regime = Regime::LongTail;
            else throw pipeline::ParseError(path, 0, "unknown regime '" + s + "'");
        }
        ep.is_evasion = e.at("is_evasion").get<bool>();
        t.episodes.push_back(std::move(ep));
    }
    t.revoked_addresses = j.at("revoked_addresses").get<std::vector<std::string>>();
    t.recovery_addresses = j.at("recovery_addresses").get<std::vector<std::string>>();
    t.inert_addresses = j.at("inert_addresses").get<std::vector<std::string>>();
    for (const auto& l : j.at("planted_labels"))
        t.planted_labels.push_back(
            {l.at("address").get<std::string>(),
             pipeline::category_from(l.at("category").get<std::string>(), path, 0)});
    return t;
}

std::vector<std::string> write_synth_files(const SynthOutput& out, const std::string& dir) {
    std::string transfers;
    for (const auto& t : out.transfers) transfers += pipeline::transfer_line(t) + "\n";
    std::string sanctions;
    for (const auto& s : out.sanctions) sanctions += pipeline::sanction_line(s) + "\n";

    std::vector<std::string> written;
    write_file_atomic(dir + "/transfers.jsonl", transfers);
    written.push_back("transfers.jsonl");
    write_file_atomic(dir + "/sanctions.jsonl", sanctions);
    written.push_back("sanctions.jsonl");
    write_file_atomic(dir + "/ground_truth.json", ground_truth_json(out.truth));
    written.push_back("ground_truth.json");
    if (!out.labels.empty()) {
        write_file_atomic(dir + "/labels.csv", pipeline::labels_csv(out.labels));
        written.push_back("labels.csv");
    }
    return written;
}

EvaluationReport evaluate_pipeline(const pipeline::PipelineResult& result,
                                   const GroundTruth& truth) {
    if (result.seed != truth.seed)
        throw std::invalid_argument("evaluate: pipeline output and ground truth seeds differ");

    EvaluationReport rep;
    rep.output_episodes = static_cast<std::int64_t>(result.episodes.size());
    rep.truth_episodes = static_cast<std::int64_t>(truth.episodes.size());
    rep.tau_rel_error = std::abs(result.tau - truth.planted_tau) / truth.planted_tau;

    auto membership_key = [](const std::string& addr, const std::string& token,
                             std::vector<std::string> ids) {
        std::sort(ids.begin(), ids.end());
        std::string key = addr + "\x1f" + token;
        for (const auto& id : ids) key += "\x1f" + id;
        return key;
    };

    std::map<std::string, const GroundTruthEpisode*> truth_by_key;
    for (const auto& ep : truth.episodes)
        truth_by_key[membership_key(ep.address, ep.token, ep.tx_ids)] = &ep;

    std::int64_t regime_total = 0, regime_hits = 0, materiality_hits = 0;
    for (const auto& ep : result.episodes) {
        auto it = truth_by_key.find(membership_key(ep.address, ep.token, ep.tx_ids));
        if (it == truth_by_key.end()) continue;
        ++rep.matched;
        const auto* t = it->second;
        if (ep.is_evasion == t->is_evasion) ++materiality_hits;
        if (ep.regime && t->regime) {
            ++regime_total;
            if (*ep.regime == *t->regime) ++regime_hits;
        }
    }

    const double precision = rep.output_episodes > 0
                                 ? static_cast<double>(rep.matched) / static_cast<double>(rep.output_episodes)
                                 : 0.0;
    const double recall = rep.truth_episodes > 0
                              ? static_cast<double>(rep.matched) / static_cast<double>(rep.truth_episodes)
                              : 0.0;
    rep.episode_f1 = (precision + recall > 0.0) ? 2.0 * precision * recall / (precision + recall) : 0.0;
    rep.regime_accuracy = regime_total > 0
                              ? static_cast<double>(regime_hits) / static_cast<double>(regime_total)
                              : 1.0;
    rep.materiality_accuracy = rep.matched > 0
                                   ? static_cast<double>(materiality_hits) / static_cast<double>(rep.matched)
                                   : 0.0;
    return rep;
}

}  // namespace semev::synth
