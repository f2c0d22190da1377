#include <chrono>
#include <functional>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "semev/contest.hpp"
#include "semev/economics.hpp"
#include "semev/manifest.hpp"
#include "semev/pipeline.hpp"
#include "semev/sim.hpp"
#include "semev/synth.hpp"

using nlohmann::json;
using namespace semev;

namespace {

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

LogLevel log_threshold() {
    const char* env = std::getenv("SEMEV_LOG");
    if (!env) return LogLevel::Warn;
    const std::string v = env;
    if (v == "error") return LogLevel::Error;
    if (v == "info") return LogLevel::Info;
    if (v == "debug") return LogLevel::Debug;
    return LogLevel::Warn;
}

void log(LogLevel level, const std::string& msg) {
    static const LogLevel threshold = log_threshold();
    if (level > threshold) return;
    static const char* names[] = {"error", "warn", "info", "debug"};
    std::cerr << "semev[" << names[static_cast<int>(level)] << "] " << msg << "\n";
}

std::int64_t now_epoch() {
    return std::chrono::duration_cast<std::chrono::seconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::invalid_argument("config file " + path + ": " + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("config file must hold a JSON object");
    return j;
}

// Flags override config-file values; the merged object is what gets hashed, so flag
// and file invocations with equal values are indistinguishable downstream.
struct ConfigBuilder {
    json merged = json::object();

    void base(const std::optional<std::string>& config_path) {
        if (config_path) merged = load_config_file(*config_path);
    }
    template <typename T>
    void put(const CLI::App& app, const std::string& flag, const std::string& key, const T& value) {
        if (app.count(flag) > 0) merged[key] = value;
    }
    template <typename T>
    T get(const std::string& key, T fallback) const {
        if (!merged.contains(key)) return fallback;
        try {
            return merged.at(key).get<T>();
        } catch (const json::exception&) {
            throw std::invalid_argument("config key '" + key + "' has the wrong type");
        }
    }
    bool has(const std::string& key) const { return merged.contains(key); }
};

contest::ContestParams params_from(const ConfigBuilder& cfg) {
    contest::ContestParams p{};
    p.v = cfg.get<double>("v", 1.0);
    p.psi = cfg.get<double>("psi", 2.0);
    p.r = cfg.get<double>("r", 1.0);
    p.c_i = cfg.get<double>("c_i", 0.0);
    p.c_b = cfg.get<double>("c_b", 0.0);
    return p;
}

json params_json(const contest::ContestParams& p) {
    return {{"v", p.v}, {"psi", p.psi}, {"r", p.r}, {"c_i", p.c_i}, {"c_b", p.c_b}};
}

json equilibrium_json(const contest::Equilibrium& eq) {
    return {{"s_star", eq.s_star}, {"p_i", eq.p_i},       {"p_b", eq.p_b},
            {"b_i", eq.b_i},       {"b_b", eq.b_b},       {"t_star", eq.t_star},
            {"u_i", eq.u_i},       {"u_b", eq.u_b}};
}

void emit_manifest(const std::string& dir, RunManifest manifest) {
    manifest.finished = now_epoch();
    write_file_atomic(dir + "/manifest.json", manifest.to_json().dump(2) + "\n");
}

// Flat numeric table; renders as CSV or as a JSON array of objects.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::string csv() const {
        std::ostringstream os;
        os.precision(15);
        for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? "," : "") << columns[c];
        os << '\n';
        for (const auto& row : rows) {
            for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << row[c];
            os << '\n';
        }
        return os.str();
    }
    std::string as_json() const {
        json arr = json::array();
        for (const auto& row : rows) {
            json obj;
            for (std::size_t c = 0; c < row.size(); ++c) obj[columns[c]] = row[c];
            arr.push_back(std::move(obj));
        }
        return arr.dump(2) + "\n";
    }
};

// One stdout document per run: JSON by default, flattened CSV on --format csv.
std::string render(const json& doc, const std::string& format) {
    if (format != "csv") return doc.dump(2) + "\n";
    std::vector<std::pair<std::string, json>> cells;
    std::function<void(const std::string&, const json&)> flatten =
        [&](const std::string& prefix, const json& node) {
            if (node.is_object()) {
                for (auto it = node.begin(); it != node.end(); ++it)
                    flatten(prefix.empty() ? it.key() : prefix + "." + it.key(), it.value());
            } else {
                cells.emplace_back(prefix, node);
            }
        };
    flatten("", doc);
    std::ostringstream os;
    os.precision(15);
    for (std::size_t c = 0; c < cells.size(); ++c) os << (c ? "," : "") << cells[c].first;
    os << '\n';
    for (std::size_t c = 0; c < cells.size(); ++c) {
        os << (c ? "," : "");
        const json& v = cells[c].second;
        if (v.is_string())
            os << v.get<std::string>();
        else if (v.is_number_float())
            os << v.get<double>();
        else
            os << v.dump();
    }
    os << '\n';
    return os.str();
}

// ---------------------------------------------------------------- solve

int cmd_solve(const ConfigBuilder& cfg, const std::optional<std::string>& out_dir,
              const std::string& format) {
    const auto params = params_from(cfg);
    const auto started = now_epoch();
    const auto eq = contest::equilibrium(params);
    const double residual =
        std::abs(contest::phi(eq.s_star, params.r) - params.prize_ratio()) / params.prize_ratio();

    json doc;
    doc["command"] = "solve";
    doc["tool_version"] = kToolVersion;
    doc["config_hash"] = config_hash(cfg.merged);
    doc["params"] = params_json(params);
    doc["equilibrium"] = equilibrium_json(eq);
    doc["phi_residual"] = residual;

    if (out_dir) {
        write_file_atomic(*out_dir + "/solve.json", doc.dump(2) + "\n");
        RunManifest m;
        m.command = "solve";
        m.config_hash = config_hash(cfg.merged);
        m.started = started;
        m.artifacts = {"solve.json"};
        emit_manifest(*out_dir, std::move(m));
    }
    std::cout << render(doc, format);
    return 0;
}

// ---------------------------------------------------------------- sweep

int cmd_sweep(const ConfigBuilder& cfg, const std::optional<std::string>& out_dir,
              const std::string& format) {
    const std::string axis = cfg.get<std::string>("axis", "prize_ratio");
    const int steps = cfg.get<int>("steps", 0);
    if (steps < 1) throw std::invalid_argument("sweep: steps must be >= 1");
    if (!cfg.has("from")) throw std::invalid_argument("sweep: missing --from");
    const bool log_spacing = cfg.get<bool>("log", false);
    const double from = cfg.get<double>("from", 0.0);
    const double to = cfg.get<double>("to", from);
    const auto started = now_epoch();

    auto grid_point = [&](int k) {
        if (steps == 1) return from;
        const double t = static_cast<double>(k) / static_cast<double>(steps - 1);
        if (log_spacing) {
            if (!(from > 0.0) || !(to > 0.0))
                throw std::invalid_argument("sweep: log spacing needs positive bounds");
            return std::exp(std::log(from) + t * (std::log(to) - std::log(from)));
        }
        return from + t * (to - from);
    };

    const auto base = params_from(cfg);
    Table table;
    if (axis == "prize_ratio" || axis == "r") {
        table.columns = {"prize_ratio", "r",      "v",   "psi", "s_star",
                         "p_i",         "p_b",    "b_i", "b_b", "t_star",
                         "u_i",         "u_b",    "tax_over_v", "asymptote_gap",
                         "enforcement_cost_alpha0"};
        for (int k = 0; k < steps; ++k) {
            contest::ContestParams p = base;
            if (axis == "prize_ratio")
                p.psi = grid_point(k) * p.v;
            else
                p.r = grid_point(k);
            const auto eq = contest::equilibrium(p);
            const auto tax = econ::mev_tax(p);
            const double cost0 = econ::enforcement_cost(0.0, p);
            table.rows.push_back({p.prize_ratio(), p.r, p.v, p.psi, eq.s_star, eq.p_i, eq.p_b,
                                  eq.b_i, eq.b_b, eq.t_star, eq.u_i, eq.u_b, tax.tax_over_v,
                                  tax.asymptote_gap, cost0});
        }
    } else {  // alpha
        if (from < 0.0 || to > 1.0 || to < from)
            throw std::invalid_argument("sweep: alpha must lie in [0, 1]");
        table.columns = {"alpha", "v", "psi", "r", "enforcement_cost", "slope"};
        const auto curve = econ::enforcement_cost_curve(base, std::max(steps, 2));
        for (int k = 0; k < steps; ++k) {
            const double a = grid_point(k);
            table.rows.push_back(
                {a, base.v, base.psi, base.r, econ::enforcement_cost(a, base), curve.slope});
        }
    }

    if (out_dir) {
        write_file_atomic(*out_dir + "/sweep.csv", table.csv());
        RunManifest m;
        m.command = "sweep";
        m.config_hash = config_hash(cfg.merged);
        m.started = started;
        m.artifacts = {"sweep.csv"};
        emit_manifest(*out_dir, std::move(m));
    }
    std::cout << (format == "json" ? table.as_json() : table.csv());
    return 0;
}

// ---------------------------------------------------------------- simulate

sim::Strategy parse_strategy(const std::string& text) {
    if (text == "eq") return sim::Strategy::equilibrium_bid();
    if (text.rfind("fixed:", 0) == 0) return sim::Strategy::fixed_bid(std::stod(text.substr(6)));
    throw std::invalid_argument("strategy must be 'eq' or 'fixed:<amount>'");
}

sim::ChannelRegime parse_regime(const std::string& text) {
    if (text == "public") return sim::ChannelRegime::public_public();
    if (text == "mixed-issuer") return sim::ChannelRegime::mixed(sim::PrivateSide::Issuer);
    if (text == "mixed-evader") return sim::ChannelRegime::mixed(sim::PrivateSide::Evader);
    if (text == "private") return sim::ChannelRegime::private_private();
    throw std::invalid_argument("regime must be public, mixed-issuer, mixed-evader, or private");
}

int cmd_simulate(const ConfigBuilder& cfg, const std::optional<std::string>& out_dir,
                 const std::string& format) {
    const auto params = params_from(cfg);
    const auto seed = cfg.get<std::uint64_t>("seed", 0);
    const auto started = now_epoch();

    json doc;
    doc["command"] = "simulate";
    doc["tool_version"] = kToolVersion;
    doc["config_hash"] = config_hash(cfg.merged);
    doc["params"] = params_json(params);
    doc["seed"] = seed;

    std::string trials_csv;
    if (cfg.has("alpha")) {
        sim::RepeatedConfig rc;
        rc.alpha = cfg.get<double>("alpha", 0.0);
        rc.contests = cfg.get<std::int64_t>("contests", cfg.get<std::int64_t>("trials", 100000));
        rc.params = params;
        rc.seed = seed;
        const auto res = sim::run_repeated(rc, parse_strategy(cfg.get<std::string>("strat_b", "eq")));
        doc["repeated"] = {{"alpha", rc.alpha},
                           {"contests", rc.contests},
                           {"empirical_cost", res.empirical_cost},
                           {"analytic_cost", res.analytic_cost},
                           {"freeze_rate", res.freeze_rate},
                           {"cost_stderr", res.cost_stderr}};
    } else {
        const auto trials = cfg.get<std::int64_t>("trials", 100000);
        const auto regime = parse_regime(cfg.get<std::string>("regime", "public"));
        const auto strat_i = parse_strategy(cfg.get<std::string>("strat_i", "eq"));
        const auto strat_b = parse_strategy(cfg.get<std::string>("strat_b", "eq"));
        const bool want_trace = cfg.get<bool>("trials_csv", false);
        if (want_trace && !out_dir) throw std::invalid_argument("simulate: --trials-csv needs --out");

        std::vector<sim::TrialRow> trace;
        const auto rep = sim::run_monte_carlo_traced(params, strat_i, strat_b, regime, trials, seed,
                                                     want_trace ? &trace : nullptr);
        doc["report"] = {{"trials", rep.trials},
                         {"empirical_p_i", rep.empirical_p_i},
                         {"mean_proposer_revenue", rep.mean_proposer_revenue},
                         {"mean_issuer_cost", rep.mean_issuer_cost},
                         {"mean_evader_payoff", rep.mean_evader_payoff},
                         {"ci_radius_p_i", rep.ci_radius_p_i},
                         {"stderr_proposer_revenue", rep.stderr_proposer_revenue},
                         {"seed", rep.seed}};
        if (want_trace) {
            std::ostringstream os;
            os.precision(15);
            os << "trial,winner,b_I,b_B,issuer_paid,evader_paid,proposer_revenue\n";
            for (const auto& row : trace) {
                const char* w = row.winner == sim::Winner::Freeze  ? "Freeze"
                                : row.winner == sim::Winner::Evade ? "Evade"
                                                                   : "NoContest";
                os << row.trial << ',' << w << ',' << row.b_i << ',' << row.b_b << ','
                   << row.issuer_paid << ',' << row.evader_paid << ',' << row.proposer_revenue
                   << '\n';
            }
            trials_csv = os.str();
        }
    }

    if (out_dir) {
        write_file_atomic(*out_dir + "/report.json", doc.dump(2) + "\n");
        RunManifest m;
        m.command = "simulate";
        m.config_hash = config_hash(cfg.merged);
        m.seed = seed;
        m.started = started;
        m.artifacts = {"report.json"};
        if (!trials_csv.empty()) {
            write_file_atomic(*out_dir + "/trials.csv", trials_csv);
            m.artifacts.push_back("trials.csv");
        }
        emit_manifest(*out_dir, std::move(m));
    }
    std::cout << render(doc, format);
    return 0;
}

// ---------------------------------------------------------------- pipeline

int cmd_pipeline(const ConfigBuilder& cfg, const std::optional<std::string>& out_dir) {
    if (!out_dir) throw std::invalid_argument("pipeline: --out DIR is required");
    if (!cfg.has("transfers") || !cfg.has("sanctions"))
        throw std::invalid_argument("pipeline: --transfers and --sanctions are required");
    const auto started = now_epoch();

    pipeline::PipelineConfig pc;
    pc.alpha = cfg.get<double>("alpha", pc.alpha);
    pc.beta_usd = cfg.get<double>("beta", pc.beta_usd);
    pc.k_lo = cfg.get<int>("k_min", pc.k_lo);
    pc.k_hi = cfg.get<int>("k_max", pc.k_hi);
    pc.kde_grid_points = cfg.get<int>("kde_grid", pc.kde_grid_points);
    pc.gmm_restarts = cfg.get<int>("restarts", pc.gmm_restarts);
    pc.seed = cfg.get<std::uint64_t>("seed", 0);
    pc.default_tau = cfg.get<double>("default_tau", pc.default_tau);
    if (cfg.has("tau")) pc.tau_override = cfg.get<double>("tau", 0.0);
    pc.fit_boundaries = cfg.get<bool>("fit_boundaries", false);

    const auto transfers = pipeline::read_transfers_jsonl(cfg.get<std::string>("transfers", ""));
    const auto sanctions = pipeline::read_sanctions_jsonl(cfg.get<std::string>("sanctions", ""));
    std::vector<pipeline::AddressLabel> labels;
    if (cfg.has("labels")) labels = pipeline::read_labels_csv(cfg.get<std::string>("labels", ""));
    log(LogLevel::Info, "pipeline: " + std::to_string(transfers.size()) + " transfers, " +
                            std::to_string(sanctions.size()) + " sanction events");

    const auto result = pipeline::run_pipeline(transfers, sanctions, labels, pc);
    for (const auto& d : result.decisions)
        log(LogLevel::Debug, "filtered " + d.address + " (" + d.token + "): " + d.reason);
    log(LogLevel::Info,
        "pipeline: raw=" + std::to_string(result.funnel.raw) + " sed=" +
            std::to_string(result.funnel.sed) + " aed=" + std::to_string(result.funnel.aed) +
            " episodes=" + std::to_string(result.episodes.size()));

    write_file_atomic(*out_dir + "/episodes.csv", pipeline::episodes_csv(result.episodes));
    write_file_atomic(*out_dir + "/regimes.json", pipeline::regimes_json(result));

    RunManifest m;
    m.command = "pipeline";
    m.config_hash = config_hash(cfg.merged);
    m.seed = pc.seed;
    m.started = started;
    m.artifacts = {"episodes.csv", "regimes.json"};
    m.extra = {{"funnel",
                {{"raw", result.funnel.raw},
                 {"quarantined", result.funnel.quarantined},
                 {"semantic_removed", result.funnel.semantic_removed},
                 {"sed", result.funnel.sed},
                 {"adversarial_removed", result.funnel.adversarial_removed},
                 {"aed", result.funnel.aed}}},
               {"tau", result.tau},
               {"tau_from_kde", result.tau_from_kde},
               {"episodes", result.episodes.size()}};
    emit_manifest(*out_dir, std::move(m));
    return 0;
}

// ---------------------------------------------------------------- synth

int cmd_synth(const ConfigBuilder& cfg, const std::optional<std::string>& out_dir) {
    if (!out_dir) throw std::invalid_argument("synth: --out DIR is required");
    const auto started = now_epoch();

    synth::GenConfig gc;
    gc.addresses = cfg.get<int>("addresses", gc.addresses);
    gc.episodes_lo = cfg.get<int>("episodes_lo", gc.episodes_lo);
    gc.episodes_hi = cfg.get<int>("episodes_hi", gc.episodes_hi);
    gc.burst.intra_gap_lo = cfg.get<std::int64_t>("intra_lo", gc.burst.intra_gap_lo);
    gc.burst.intra_gap_hi = cfg.get<std::int64_t>("intra_hi", gc.burst.intra_gap_hi);
    gc.inter_gap_lo = cfg.get<std::int64_t>("inter_lo", gc.inter_gap_lo);
    gc.inter_gap_hi = cfg.get<std::int64_t>("inter_hi", gc.inter_gap_hi);
    gc.planted_tau = cfg.get<double>("planted_tau", gc.planted_tau);
    gc.material_frac = cfg.get<double>("material_frac", gc.material_frac);
    gc.dust_frac = cfg.get<double>("dust_frac", gc.dust_frac);
    gc.reverted_frac = cfg.get<double>("reverted_frac", gc.reverted_frac);
    gc.planted_revoked = cfg.get<int>("plant_revoked", 0);
    gc.planted_recovery = cfg.get<int>("plant_recovery", 0);
    gc.planted_inert = cfg.get<int>("plant_inert", 0);
    gc.planted_labeled = cfg.get<int>("plant_labeled", 0);
    gc.seed = cfg.get<std::uint64_t>("seed", 0);
    gc.token = cfg.get<std::string>("token", gc.token);
    gc.alpha = cfg.get<double>("alpha", gc.alpha);
    gc.beta_usd = cfg.get<double>("beta", gc.beta_usd);
    if (cfg.has("regime_mix")) {
        const auto mix = cfg.merged.at("regime_mix").get<std::vector<double>>();
        if (mix.size() != 4) throw std::invalid_argument("synth: regime_mix needs 4 entries");
        std::copy(mix.begin(), mix.end(), gc.regime_mix.begin());
    }

    const auto out = synth::synth_generate(gc);
    const auto files = synth::write_synth_files(out, *out_dir);
    log(LogLevel::Info, "synth: " + std::to_string(out.transfers.size()) + " transfers for " +
                            std::to_string(gc.addresses) + " addresses");

    RunManifest m;
    m.command = "synth";
    m.config_hash = config_hash(cfg.merged);
    m.seed = gc.seed;
    m.started = started;
    m.artifacts = files;
    emit_manifest(*out_dir, std::move(m));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SE-MEV laboratory: contest solver, race simulator, episode pipeline"};
    app.require_subcommand(1);

    std::optional<std::string> config_path;
    std::optional<std::string> out_dir;
    std::uint64_t seed = 0;
    std::string format;  // empty: per-command default (json for solve/simulate, csv for sweep)
    app.add_option("--config", config_path, "JSON config file; flags override its values");
    app.add_option("--out", out_dir, "output directory (required by pipeline and synth)");
    app.add_option("--seed", seed, "global seed");
    app.add_option("--format", format, "output format hint: json or csv")
        ->check(CLI::IsMember({"json", "csv"}));

    auto* solve = app.add_subcommand("solve", "solve one contest instance");
    double v = 1.0, psi = 2.0, r = 1.0, c_i = 0.0, c_b = 0.0;
    solve->add_option("--v", v, "evader prize");
    solve->add_option("--psi", psi, "issuer regulatory-loss prize");
    solve->add_option("--r", r, "contest sharpness (>= 1)");
    solve->add_option("--ci", c_i, "issuer fixed participation cost");
    solve->add_option("--cb", c_b, "evader fixed participation cost");

    auto* sweep = app.add_subcommand("sweep", "tabulate equilibrium quantities along an axis");
    std::string axis = "prize_ratio";
    double from = 0.0, to = 0.0;
    int steps = 0;
    bool log_spacing = false;
    sweep->add_option("--axis", axis)->check(CLI::IsMember({"prize_ratio", "r", "alpha"}));
    sweep->add_option("--from", from);
    sweep->add_option("--to", to);
    sweep->add_option("--steps", steps);
    sweep->add_flag("--log", log_spacing, "log-spaced grid");
    sweep->add_option("--v", v);
    sweep->add_option("--psi", psi);
    sweep->add_option("--r", r);
    sweep->add_option("--ci", c_i);
    sweep->add_option("--cb", c_b);

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo race simulation");
    std::int64_t trials = 100000, contests = 0;
    std::string regime = "public", strat_i = "eq", strat_b = "eq";
    double alpha = 0.0;
    bool trials_csv = false;
    simulate->add_option("--v", v);
    simulate->add_option("--psi", psi);
    simulate->add_option("--r", r);
    simulate->add_option("--ci", c_i);
    simulate->add_option("--cb", c_b);
    simulate->add_option("--trials", trials);
    simulate->add_option("--regime", regime)
        ->check(CLI::IsMember({"public", "mixed-issuer", "mixed-evader", "private"}));
    simulate->add_option("--strat-i", strat_i, "issuer strategy: eq or fixed:<amount>");
    simulate->add_option("--strat-b", strat_b, "evader strategy: eq or fixed:<amount>");
    simulate->add_option("--alpha", alpha, "run the repeated setting at this proposer share");
    simulate->add_option("--contests", contests, "contest count for the repeated setting");
    simulate->add_flag("--trials-csv", trials_csv, "write per-trial rows (needs --out)");

    auto* pipe = app.add_subcommand("pipeline", "episode segmentation over event logs");
    std::string transfers_path, sanctions_path, labels_path;
    double p_alpha = 0.10, p_beta = 1000.0, p_tau = 0.0, p_default_tau = 107.0;
    int k_min = 1, k_max = 50, kde_grid = 512, restarts = 8;
    bool fit_boundaries = false;
    pipe->add_option("--transfers", transfers_path, "TransferEvent JSONL");
    pipe->add_option("--sanctions", sanctions_path, "SanctionEvent JSONL");
    pipe->add_option("--labels", labels_path, "address,category CSV");
    pipe->add_option("--alpha", p_alpha, "relative materiality threshold");
    pipe->add_option("--beta", p_beta, "absolute materiality threshold, USD");
    pipe->add_option("--tau", p_tau, "skip KDE and use this gap threshold (seconds)");
    pipe->add_option("--default-tau", p_default_tau, "fallback threshold below 100 gaps");
    pipe->add_option("--k-min", k_min);
    pipe->add_option("--k-max", k_max);
    pipe->add_option("--kde-grid", kde_grid);
    pipe->add_option("--restarts", restarts);
    pipe->add_flag("--fit-boundaries", fit_boundaries,
                   "use fitted GMM valleys instead of the canonical boundary trio");

    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic event corpus");
    int addresses = 100, episodes_lo = 3, episodes_hi = 8;
    int plant_revoked = 0, plant_recovery = 0, plant_inert = 0, plant_labeled = 0;
    std::int64_t intra_lo = 5, intra_hi = 149, inter_lo = 900, inter_hi = 45000;
    double planted_tau = 300.0, material_frac = 0.70, dust_frac = 0.15, reverted_frac = 0.10;
    std::string token = "USDX", regime_mix;
    synth_cmd->add_option("--addresses", addresses);
    synth_cmd->add_option("--episodes-lo", episodes_lo);
    synth_cmd->add_option("--episodes-hi", episodes_hi);
    synth_cmd->add_option("--intra-lo", intra_lo);
    synth_cmd->add_option("--intra-hi", intra_hi);
    synth_cmd->add_option("--inter-lo", inter_lo);
    synth_cmd->add_option("--inter-hi", inter_hi);
    synth_cmd->add_option("--planted-tau", planted_tau);
    synth_cmd->add_option("--material-frac", material_frac);
    synth_cmd->add_option("--dust-frac", dust_frac);
    synth_cmd->add_option("--reverted-frac", reverted_frac);
    synth_cmd->add_option("--plant-revoked", plant_revoked);
    synth_cmd->add_option("--plant-recovery", plant_recovery);
    synth_cmd->add_option("--plant-inert", plant_inert);
    synth_cmd->add_option("--plant-labeled", plant_labeled);
    synth_cmd->add_option("--token", token);
    synth_cmd->add_option("--regime-mix", regime_mix, "four comma-separated shares");
    synth_cmd->add_option("--alpha", p_alpha, "materiality alpha recorded in the ground truth");
    synth_cmd->add_option("--beta", p_beta, "materiality beta recorded in the ground truth");

    for (auto* sc : {solve, sweep, simulate, pipe, synth_cmd}) sc->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
        app.exit(e);
        return 2;
    }

    try {
        if (out_dir) std::filesystem::create_directories(*out_dir);

        ConfigBuilder cfg;
        cfg.base(config_path);
        if (app.count("--seed")) cfg.merged["seed"] = seed;

        if (solve->parsed()) {
            cfg.put(*solve, "--v", "v", v);
            cfg.put(*solve, "--psi", "psi", psi);
            cfg.put(*solve, "--r", "r", r);
            cfg.put(*solve, "--ci", "c_i", c_i);
            cfg.put(*solve, "--cb", "c_b", c_b);
            return cmd_solve(cfg, out_dir, format);
        }
        if (sweep->parsed()) {
            cfg.put(*sweep, "--axis", "axis", axis);
            cfg.put(*sweep, "--from", "from", from);
            cfg.put(*sweep, "--to", "to", to);
            cfg.put(*sweep, "--steps", "steps", steps);
            if (log_spacing) cfg.merged["log"] = true;
            cfg.put(*sweep, "--v", "v", v);
            cfg.put(*sweep, "--psi", "psi", psi);
            cfg.put(*sweep, "--r", "r", r);
            cfg.put(*sweep, "--ci", "c_i", c_i);
            cfg.put(*sweep, "--cb", "c_b", c_b);
            return cmd_sweep(cfg, out_dir, format);
        }
        if (simulate->parsed()) {
            cfg.put(*simulate, "--v", "v", v);
            cfg.put(*simulate, "--psi", "psi", psi);
            cfg.put(*simulate, "--r", "r", r);
            cfg.put(*simulate, "--ci", "c_i", c_i);
            cfg.put(*simulate, "--cb", "c_b", c_b);
            cfg.put(*simulate, "--trials", "trials", trials);
            cfg.put(*simulate, "--regime", "regime", regime);
            cfg.put(*simulate, "--strat-i", "strat_i", strat_i);
            cfg.put(*simulate, "--strat-b", "strat_b", strat_b);
            cfg.put(*simulate, "--alpha", "alpha", alpha);
            cfg.put(*simulate, "--contests", "contests", contests);
            if (trials_csv) cfg.merged["trials_csv"] = true;
            return cmd_simulate(cfg, out_dir, format);
        }
        if (pipe->parsed()) {
            cfg.put(*pipe, "--transfers", "transfers", transfers_path);
            cfg.put(*pipe, "--sanctions", "sanctions", sanctions_path);
            cfg.put(*pipe, "--labels", "labels", labels_path);
            cfg.put(*pipe, "--alpha", "alpha", p_alpha);
            cfg.put(*pipe, "--beta", "beta", p_beta);
            cfg.put(*pipe, "--tau", "tau", p_tau);
            cfg.put(*pipe, "--default-tau", "default_tau", p_default_tau);
            cfg.put(*pipe, "--k-min", "k_min", k_min);
            cfg.put(*pipe, "--k-max", "k_max", k_max);
            cfg.put(*pipe, "--kde-grid", "kde_grid", kde_grid);
            cfg.put(*pipe, "--restarts", "restarts", restarts);
            if (fit_boundaries) cfg.merged["fit_boundaries"] = true;
            return cmd_pipeline(cfg, out_dir);
        }
        if (synth_cmd->parsed()) {
            cfg.put(*synth_cmd, "--addresses", "addresses", addresses);
            cfg.put(*synth_cmd, "--episodes-lo", "episodes_lo", episodes_lo);
            cfg.put(*synth_cmd, "--episodes-hi", "episodes_hi", episodes_hi);
            cfg.put(*synth_cmd, "--intra-lo", "intra_lo", intra_lo);
            cfg.put(*synth_cmd, "--intra-hi", "intra_hi", intra_hi);
            cfg.put(*synth_cmd, "--inter-lo", "inter_lo", inter_lo);
            cfg.put(*synth_cmd, "--inter-hi", "inter_hi", inter_hi);
            cfg.put(*synth_cmd, "--planted-tau", "planted_tau", planted_tau);
            cfg.put(*synth_cmd, "--material-frac", "material_frac", material_frac);
            cfg.put(*synth_cmd, "--dust-frac", "dust_frac", dust_frac);
            cfg.put(*synth_cmd, "--reverted-frac", "reverted_frac", reverted_frac);
            cfg.put(*synth_cmd, "--plant-revoked", "plant_revoked", plant_revoked);
            cfg.put(*synth_cmd, "--plant-recovery", "plant_recovery", plant_recovery);
            cfg.put(*synth_cmd, "--plant-inert", "plant_inert", plant_inert);
            cfg.put(*synth_cmd, "--plant-labeled", "plant_labeled", plant_labeled);
            cfg.put(*synth_cmd, "--token", "token", token);
            cfg.put(*synth_cmd, "--alpha", "alpha", p_alpha);
            cfg.put(*synth_cmd, "--beta", "beta", p_beta);
            if (synth_cmd->count("--regime-mix")) {
                std::vector<double> mix;
                std::stringstream ss(regime_mix);
                std::string part;
                while (std::getline(ss, part, ',')) mix.push_back(std::stod(part));
                cfg.merged["regime_mix"] = mix;
            }
            return cmd_synth(cfg, out_dir);
        }
        return 2;
    } catch (const pipeline::ParseError& e) {
        std::cerr << "semev: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "semev: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "semev: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "semev: internal error: " << e.what() << "\n";
        return 1;
    }
}
