#include "semev/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "semev/rng.hpp"

namespace semev::pipeline {

std::string to_string(Regime r) {
    switch (r) {
        case Regime::Race: return "Race";
        case Regime::TacticalReactive: return "TacticalReactive";
        case Regime::StrategicMigration: return "StrategicMigration";
        case Regime::LongTail: return "LongTail";
    }
    return "?";
}

void PipelineConfig::validate() const {
    if (!(alpha > 0.0) || alpha > 1.0) throw std::invalid_argument("pipeline: alpha must lie in (0, 1]");
    if (!(beta_usd > 0.0)) throw std::invalid_argument("pipeline: beta must be positive");
    if (k_lo < 1 || k_hi < k_lo) throw std::invalid_argument("pipeline: empty k range");
    if (kde_grid_points < 8) throw std::invalid_argument("pipeline: kde grid too small");
    if (gmm_restarts < 1) throw std::invalid_argument("pipeline: restarts must be >= 1");
    if (tau_override && !(*tau_override > 0.0))
        throw std::invalid_argument("pipeline: tau override must be positive");
    if (!(default_boundaries[0] < default_boundaries[1] &&
          default_boundaries[1] < default_boundaries[2]))
        throw std::invalid_argument("pipeline: boundaries must be strictly increasing");
}

Ledgers ingest_events(const std::vector<TransferEvent>& transfers,
                      const std::vector<SanctionEvent>& sanctions,
                      const std::vector<AddressLabel>& labels) {
    Ledgers out;
    for (const auto& l : labels) out.labels[l.address] = l.category;

    for (const auto& s : sanctions) {
        auto& h = out.histories[{s.address, s.token}];
        h.address = s.address;
        h.token = s.token;
        h.sanctions.push_back(s);
    }
    for (auto& [key, h] : out.histories) {
        std::stable_sort(h.sanctions.begin(), h.sanctions.end(),
                         [](const SanctionEvent& a, const SanctionEvent& b) {
                             if (a.t_exec != b.t_exec) return a.t_exec < b.t_exec;
                             return static_cast<int>(a.kind) < static_cast<int>(b.kind);
                         });
        for (const auto& s : h.sanctions)
            if (s.kind == SanctionKind::Blacklist) {
                h.blacklist_exec = s.t_exec;
                break;
            }
    }

    std::vector<const TransferEvent*> ordered;
    ordered.reserve(transfers.size());
    for (const auto& t : transfers) ordered.push_back(&t);
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const TransferEvent* a, const TransferEvent* b) {
                         return a->block_time < b->block_time;
                     });

    for (const TransferEvent* t : ordered) {
        if (t->from_addr == t->to_addr) continue;  // self-transfer, no balance effect
        auto record = [&](const std::string& addr, bool inflow) {
            auto it = out.histories.find({addr, t->token});
            if (it == out.histories.end()) return;  // only sanctioned addresses carry histories
            it->second.rows.push_back(
                {t->tx_id, t->block_time, inflow, t->amount, t->reverted, UsdMicros{}});
        };
        record(t->to_addr, true);
        record(t->from_addr, false);
    }

    for (auto& [key, h] : out.histories) {
        UsdMicros balance{};
        for (auto& row : h.rows) {
            if (!row.reverted) {
                if (row.inflow)
                    balance += row.amount;
                else
                    balance -= row.amount;
                if (balance.negative()) h.quarantined = true;
            }
            row.balance_after = balance;
            if (row.inflow && !row.reverted &&
                (!h.blacklist_exec || row.block_time < *h.blacklist_exec))
                h.inflow_before_exec += row.amount;
        }
    }
    return out;
}

namespace {

bool has_unblacklist_after_blacklist(const AddressHistory& h) {
    std::optional<std::int64_t> first_blacklist;
    for (const auto& s : h.sanctions) {
        if (s.kind == SanctionKind::Blacklist && !first_blacklist) first_blacklist = s.t_exec;
        if (s.kind == SanctionKind::Unblacklist && first_blacklist && s.t_exec >= *first_blacklist)
            return true;
    }
    return false;
}

bool has_recovery_workflow(const AddressHistory& h) {
    // Blacklist -> DestroyFunds -> Reissue in t_exec order, any spacing
    int stage = 0;
    for (const auto& s : h.sanctions) {
        if (stage == 0 && s.kind == SanctionKind::Blacklist) stage = 1;
        else if (stage == 1 && s.kind == SanctionKind::DestroyFunds) stage = 2;
        else if (stage == 2 && s.kind == SanctionKind::Reissue) return true;
    }
    return false;
}

}  // namespace

std::vector<AddressKey> semantic_filter(const Ledgers& ledgers,
                                        std::vector<FilterDecision>* decisions) {
    std::vector<AddressKey> retained;
    for (const auto& [key, h] : ledgers.histories) {
        auto drop = [&](const std::string& reason) {
            if (decisions) decisions->push_back({h.address, h.token, reason});
        };
        if (h.quarantined) {
            drop("quarantined: negative running balance");
            continue;
        }
        if (!h.blacklist_exec) {
            drop("no blacklist event");
            continue;
        }
        if (has_unblacklist_after_blacklist(h)) {
            drop("revoked: sanction lifted by unblacklist");
            continue;
        }
        if (has_recovery_workflow(h)) {
            drop("recovery workflow: blacklist/destroy/reissue");
            continue;
        }
        retained.push_back(key);
    }
    return retained;
}

std::vector<AddressKey> adversarial_filter(const Ledgers& ledgers,
                                           const std::vector<AddressKey>& sed,
                                           std::vector<FilterDecision>* decisions) {
    std::vector<AddressKey> retained;
    for (const auto& key : sed) {
        const auto& h = ledgers.histories.at(key);
        auto drop = [&](const std::string& reason) {
            if (decisions) decisions->push_back({h.address, h.token, reason});
        };
        auto lab = ledgers.labels.find(h.address);
        if (lab != ledgers.labels.end() &&
            (lab->second == AddressCategory::Intermediary ||
             lab->second == AddressCategory::ExchangeDepositCluster ||
             lab->second == AddressCategory::MixerCore)) {
            drop("non-strategic intermediary: " + to_string(lab->second));
            continue;
        }
        if (h.inflow_before_exec.zero()) {
            drop("inert: no stablecoin inflow before enforcement");
            continue;
        }
        retained.push_back(key);
    }
    return retained;
}

double estimate_gap_threshold(const std::vector<std::int64_t>& gaps, const PipelineConfig& cfg) {
    cfg.validate();
    if (gaps.size() < 100) return cfg.default_tau;

    std::vector<double> logs;
    logs.reserve(gaps.size());
    for (std::int64_t g : gaps) {
        if (g < 0) throw std::invalid_argument("gap threshold: gaps must be nonnegative");
        logs.push_back(std::log10(static_cast<double>(std::max<std::int64_t>(g, 1))));
    }
    const auto [mn, mx] = std::minmax_element(logs.begin(), logs.end());
    if (!(*mx > *mn))
        throw std::runtime_error("unimodal gap distribution: no valley; supply tau explicitly");

    const KdeResult kde = gaussian_kde(logs, cfg.kde_grid_points);
    const auto valley = first_prominent_valley(kde, 0.01);
    if (!valley)
        throw std::runtime_error("unimodal gap distribution: no valley; supply tau explicitly");
    return std::pow(10.0, *valley);
}

std::vector<IntentEpisode> segment_episodes(const AddressHistory& history, double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("segment: tau must be positive");
    std::vector<IntentEpisode> episodes;
    if (history.rows.empty()) return episodes;

    std::size_t start = 0;
    UsdMicros balance_before{};  // balance immediately before row[start]
    for (std::size_t i = 1; i <= history.rows.size(); ++i) {
        const bool split =
            i == history.rows.size() ||
            static_cast<double>(history.rows[i].block_time - history.rows[i - 1].block_time) >= tau;
        if (!split) continue;

        IntentEpisode ep;
        ep.address = history.address;
        ep.token = history.token;
        ep.start_time = history.rows[start].block_time;
        ep.end_time = history.rows[i - 1].block_time;
        ep.b_start = balance_before;
        std::set<std::string> seen;
        for (std::size_t k = start; k < i; ++k) {
            const auto& row = history.rows[k];
            if (seen.insert(row.tx_id).second) ep.tx_ids.push_back(row.tx_id);
            if (!row.reverted) {
                if (row.inflow)
                    ep.inflow_sum += row.amount;
                else {
                    ep.v_out += row.amount;
                    if (row.amount.micros > 0) ep.final_outflow_time = row.block_time;
                }
            }
        }
        ep.l_episode = ep.b_start + ep.inflow_sum;
        episodes.push_back(std::move(ep));

        balance_before = history.rows[i - 1].balance_after;
        start = i;
    }
    return episodes;
}

bool classify_materiality(const IntentEpisode& episode, const PipelineConfig& cfg) {
    const UsdMicros beta = UsdMicros::from_usd(cfg.beta_usd);
    if (episode.v_out < beta) return false;
    if (episode.l_episode.micros <= 0) return false;
    const double ratio =
        static_cast<double>(episode.v_out.micros) / static_cast<double>(episode.l_episode.micros);
    return ratio >= cfg.alpha;
}

std::optional<std::int64_t> compute_delta(const IntentEpisode& episode,
                                          const SanctionEvent& sanction) {
    if (!episode.final_outflow_time) return std::nullopt;
    // outflow at or after effectiveness is post-enforcement activity, excluded
    if (*episode.final_outflow_time >= sanction.t_exec) return std::nullopt;
    return sanction.t_exec - *episode.final_outflow_time;
}

RegimeModel fit_regime_model(const std::vector<double>& deltas, const PipelineConfig& cfg) {
    cfg.validate();
    const std::size_t n = deltas.size();
    const int k_cap = static_cast<int>(n / 10);  // >= 10 samples per component at the largest k
    const int k_max = std::min(cfg.k_hi, k_cap);
    if (k_max < cfg.k_lo)
        throw std::invalid_argument("fit_regime_model: too few deltas for the requested k range");

    std::vector<double> logs;
    logs.reserve(n);
    for (double d : deltas) {
        if (!(d > 0.0)) throw std::invalid_argument("fit_regime_model: deltas must be positive");
        logs.push_back(std::log(d));
    }

    // BIC scan with early stop: once six successive k fail to improve, larger k
    // only ever distributes mass further and the search is over
    constexpr int kBicPatience = 6;
    Gmm1D best;
    int best_k = 0;
    double best_bic = 0.0;
    int since_best = 0;
    for (int k = cfg.k_lo; k <= k_max; ++k) {
        GmmFitOptions opts;
        opts.restarts = cfg.gmm_restarts;
        opts.seed = SplitMix64::substream(cfg.seed, static_cast<std::uint64_t>(k)).state;
        const Gmm1D g = fit_gmm_1d(logs, k, opts);
        const double bic = g.bic(n);
        if (best_k == 0 || bic < best_bic) {
            best = g;
            best_k = k;
            best_bic = bic;
            since_best = 0;
        } else if (++since_best >= kBicPatience) {
            break;
        }
    }

    // order components by mean for stable reporting
    std::vector<std::size_t> idx(best.means.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return best.means[a] < best.means[b]; });

    RegimeModel model;
    model.k = best_k;
    model.bic = best_bic;
    for (std::size_t i : idx) {
        model.weights.push_back(best.weights[i]);
        model.means.push_back(best.means[i]);
        model.variances.push_back(best.variances[i]);
    }

    // density valleys on a fixed grid over the fitted range, mapped back to seconds
    const auto [mn, mx] = std::minmax_element(logs.begin(), logs.end());
    constexpr int kGrid = 2048;
    std::vector<double> dens(kGrid);
    for (int i = 0; i < kGrid; ++i) {
        const double x = *mn + (*mx - *mn) * static_cast<double>(i) / (kGrid - 1);
        dens[static_cast<std::size_t>(i)] = best.density(x);
    }
    for (int i = 1; i + 1 < kGrid; ++i) {
        const auto u = static_cast<std::size_t>(i);
        if (dens[u] < dens[u - 1] && dens[u] <= dens[u + 1]) {
            const double x = *mn + (*mx - *mn) * static_cast<double>(i) / (kGrid - 1);
            model.boundaries.push_back(std::exp(x));
        }
    }
    return model;
}

Regime assign_regime(double delta, const std::array<double, 3>& boundaries) {
    if (!(boundaries[0] < boundaries[1] && boundaries[1] < boundaries[2]))
        throw std::invalid_argument("assign_regime: boundaries must be strictly increasing");
    if (!(delta > 0.0)) throw std::invalid_argument("assign_regime: delta must be positive");
    if (delta <= boundaries[0]) return Regime::Race;
    if (delta <= boundaries[1]) return Regime::TacticalReactive;
    if (delta <= boundaries[2]) return Regime::StrategicMigration;
    return Regime::LongTail;
}

std::vector<Regime> assign_regimes(const std::vector<double>& deltas,
                                   const std::optional<std::array<double, 3>>& boundaries,
                                   const PipelineConfig& cfg) {
    const auto& b = boundaries ? *boundaries : cfg.default_boundaries;
    std::vector<Regime> out;
    out.reserve(deltas.size());
    for (double d : deltas) out.push_back(assign_regime(d, b));
    return out;
}

std::array<double, 3> select_boundary_trio(const std::vector<double>& valleys,
                                           const std::array<double, 3>& defaults) {
    std::array<double, 3> out{};
    std::vector<bool> used(valleys.size(), false);
    for (std::size_t j = 0; j < 3; ++j) {
        const double target = std::log10(defaults[j]);
        double best_dist = 0.0;
        std::size_t best = valleys.size();
        for (std::size_t i = 0; i < valleys.size(); ++i) {
            if (used[i] || !(valleys[i] > 0.0)) continue;
            const double dist = std::abs(std::log10(valleys[i]) - target);
            if (best == valleys.size() || dist < best_dist) {
                best = i;
                best_dist = dist;
            }
        }
        if (best == valleys.size()) {
            out[j] = defaults[j];
        } else {
            out[j] = valleys[best];
            used[best] = true;
        }
    }
    std::sort(out.begin(), out.end());
    if (!(out[0] < out[1] && out[1] < out[2])) return defaults;  // degenerate trio
    return out;
}

PipelineResult run_pipeline(const std::vector<TransferEvent>& transfers,
                            const std::vector<SanctionEvent>& sanctions,
                            const std::vector<AddressLabel>& labels, const PipelineConfig& cfg) {
    cfg.validate();
    PipelineResult result;
    result.seed = cfg.seed;

    const Ledgers ledgers = ingest_events(transfers, sanctions, labels);
    result.funnel.raw = static_cast<std::int64_t>(ledgers.histories.size());
    for (const auto& [key, h] : ledgers.histories)
        if (h.quarantined) ++result.funnel.quarantined;

    const auto sed = semantic_filter(ledgers, &result.decisions);
    result.funnel.sed = static_cast<std::int64_t>(sed.size());
    result.funnel.semantic_removed = result.funnel.raw - result.funnel.sed;

    const auto aed = adversarial_filter(ledgers, sed, &result.decisions);
    result.funnel.aed = static_cast<std::int64_t>(aed.size());
    result.funnel.adversarial_removed = result.funnel.sed - result.funnel.aed;

    std::vector<std::int64_t> gaps;
    for (const auto& key : aed) {
        const auto& rows = ledgers.histories.at(key).rows;
        for (std::size_t i = 1; i < rows.size(); ++i)
            gaps.push_back(rows[i].block_time - rows[i - 1].block_time);
    }

    if (cfg.tau_override) {
        result.tau = *cfg.tau_override;
        result.tau_from_kde = false;
    } else {
        result.tau = estimate_gap_threshold(gaps, cfg);
        result.tau_from_kde = gaps.size() >= 100;
    }

    std::vector<double> material_deltas;
    for (const auto& key : aed) {
        const auto& h = ledgers.histories.at(key);
        SanctionEvent governing{};
        for (const auto& s : h.sanctions)
            if (s.kind == SanctionKind::Blacklist) {
                governing = s;
                break;
            }
        auto eps = segment_episodes(h, result.tau);
        for (auto& ep : eps) {
            ep.is_evasion = classify_materiality(ep, cfg);
            ep.delta = compute_delta(ep, governing);
            if (ep.final_outflow_time && *ep.final_outflow_time == governing.t_exec)
                result.decisions.push_back({ep.address, ep.token,
                                            "delta tie: final outflow at t_exec, episode excluded "
                                            "from delta statistics"});
            if (ep.delta && ep.inflow_sum > ep.v_out)
                result.decisions.push_back({ep.address, ep.token,
                                            "net-inbound episode at " +
                                                std::to_string(ep.start_time) +
                                                ": inflow exceeds outflow"});
            if (ep.is_evasion && ep.delta)
                material_deltas.push_back(static_cast<double>(*ep.delta));
            result.episodes.push_back(std::move(ep));
        }
    }

    if (static_cast<int>(material_deltas.size()) >= 10 * cfg.k_lo)
        result.model = fit_regime_model(material_deltas, cfg);

    result.boundaries_used = (cfg.fit_boundaries && result.model)
                                 ? select_boundary_trio(result.model->boundaries,
                                                        cfg.default_boundaries)
                                 : cfg.default_boundaries;

    for (auto& ep : result.episodes)
        if (ep.delta)
            ep.regime = assign_regime(static_cast<double>(*ep.delta), result.boundaries_used);

    return result;
}

std::string episodes_csv(const std::vector<IntentEpisode>& episodes) {
    std::ostringstream os;
    os << "address,token,tx_ids,start_time,end_time,b_start,inflow_sum,v_out,l_episode,"
          "final_outflow_time,delta,is_evasion,regime\n";
    for (const auto& ep : episodes) {
        os << ep.address << ',' << ep.token << ',';
        for (std::size_t i = 0; i < ep.tx_ids.size(); ++i) {
            if (i) os << ';';
            os << ep.tx_ids[i];
        }
        os << ',' << ep.start_time << ',' << ep.end_time << ',' << ep.b_start.str() << ','
           << ep.inflow_sum.str() << ',' << ep.v_out.str() << ',' << ep.l_episode.str() << ',';
        if (ep.final_outflow_time) os << *ep.final_outflow_time;
        os << ',';
        if (ep.delta) os << *ep.delta;
        os << ',' << (ep.is_evasion ? "true" : "false") << ',';
        if (ep.regime) os << to_string(*ep.regime);
        os << '\n';
    }
    return os.str();
}

std::string regimes_json(const PipelineResult& result) {
    nlohmann::json j;
    j["tau"] = result.tau;
    j["tau_from_kde"] = result.tau_from_kde;
    j["assignment_boundaries"] = result.boundaries_used;
    if (result.model) {
        j["model"] = {{"k", result.model->k},
                      {"weights", result.model->weights},
                      {"means", result.model->means},
                      {"variances", result.model->variances},
                      {"bic", result.model->bic},
                      {"boundaries", result.model->boundaries}};
    } else {
        j["model"] = nullptr;
    }
    return j.dump(2) + "\n";
}

}  // namespace semev::pipeline
