// Acceptance suite: runs every gate criterion at its stated tolerance and prints
// one PASS/FAIL line per criterion. Exits nonzero if any criterion fails.
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "semev/contest.hpp"
#include "semev/economics.hpp"
#include "semev/manifest.hpp"
#include "semev/pipeline.hpp"
#include "semev/rng.hpp"
#include "semev/sim.hpp"
#include "semev/synth.hpp"

namespace fs = std::filesystem;
using namespace semev;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int criterion, bool ok, const std::string& what) {
    if (!ok) ++failures;
    std::printf("[%s] criterion %2d: %s\n", ok ? "PASS" : "FAIL", criterion, what.c_str());
    std::fflush(stdout);
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct SweepInstance {
    contest::ContestParams params;
    contest::Equilibrium eq;
};

// Fixed-seed 200-instance sweep shared by criteria 1, 2, 3 and 5.
std::vector<SweepInstance> make_sweep() {
    std::vector<SweepInstance> out;
    auto rng = SplitMix64(20250831);
    out.reserve(200);
    for (int i = 0; i < 200; ++i) {
        const double ratio = std::pow(10.0, rng.uniform(std::log10(2.0), 4.0));
        const double r = rng.uniform(1.0, 6.0);
        contest::ContestParams p{1.0, ratio, r, 0.0, 0.0};
        out.push_back({p, contest::equilibrium(p)});
    }
    return out;
}

std::string run_and_capture(const std::string& args) {
    const std::string cmd = std::string(SEMEV_CLI_PATH) + " " + args + " 2>/dev/null";
    std::array<char, 4096> buf{};
    std::string out;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return "";
    while (std::size_t n = fread(buf.data(), 1, buf.size(), p)) out.append(buf.data(), n);
    pclose(p);
    return out;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string digest(const std::string& bytes) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes.data(), bytes.size())));
    return buf;
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

int main() {
    const auto sweep = make_sweep();

    // 1 — equilibrium correctness: residual and full-resolution Nash audit
    {
        const auto t0 = Clock::now();
        bool ok = true;
        std::string detail;
        for (const auto& inst : sweep) {
            const double ratio = inst.params.prize_ratio();
            const double residual =
                std::abs(contest::phi(inst.eq.s_star, inst.params.r) - ratio) / ratio;
            if (residual > 1e-10) {
                ok = false;
                detail = "phi residual " + std::to_string(residual);
                break;
            }
            const contest::BidGrid grid{0.0, 2.0 * std::max(inst.eq.b_i, inst.eq.b_b), 100000};
            const auto audit = contest::verify_nash(inst.eq, inst.params, grid);
            if (!audit.passed) {
                ok = false;
                detail = "nash audit gain " + std::to_string(std::max(audit.max_gain_i, audit.max_gain_b));
                break;
            }
        }
        const double dt = seconds_since(t0);
        if (dt > 60.0) {
            ok = false;
            detail = "runtime " + std::to_string(dt) + " s";
        }
        char msg[160];
        std::snprintf(msg, sizeof msg,
                      "equilibrium correctness: 200 instances, residual <= 1e-10, 1e5-point "
                      "audit clean (%.1f s)%s%s",
                      dt, detail.empty() ? "" : " — ", detail.c_str());
        report(1, ok, msg);
    }

    // 2 — equilibrium bounds
    {
        int violations = 0;
        for (const auto& inst : sweep) {
            if (!(inst.eq.p_i > 0.5)) ++violations;
            if (!(inst.eq.t_star > inst.params.r / (inst.params.r + 2.0) * inst.params.v))
                ++violations;
        }
        report(2, violations == 0,
               "equilibrium bounds: P_I > 1/2 and T* > r/(r+2)*V with " +
                   std::to_string(violations) + " violations");
    }

    // 3 — analytic bound checks
    {
        bool ok = true;
        for (double n : {2.0, 3.0, 5.0, 10.0})
            for (double r : {1.0, 2.0, 4.0}) {
                const auto c = contest::check_lemma_large_psi(n, r);
                if (!c.holds) ok = false;
            }
        for (const auto& inst : sweep) {
            const auto c = contest::check_positive_utility(inst.params);
            if (!c.passes) ok = false;
            if (!(c.x > inst.params.r - 1.0)) ok = false;
            if (!(inst.eq.u_i + inst.params.c_i > 0.0)) ok = false;
        }
        auto rng = SplitMix64(31415);
        for (double r : {1.0, 2.0, 4.0})
            for (int i = 0; i < 1000; ++i) {
                double s1 = std::pow(10.0, rng.uniform(0.0, 6.0));
                double s2 = std::pow(10.0, rng.uniform(0.0, 6.0));
                if (s1 == s2) continue;
                if (s1 > s2) std::swap(s1, s2);
                if (!(contest::phi(s1, r) < contest::phi(s2, r))) ok = false;
            }
        report(3, ok,
               "bound checks: large-psi grid, positive utility on the sweep, phi monotonicity");
    }

    // 4 — tax divergence and asymptote
    {
        bool ok = true;
        for (double r : {1.0, 2.0, 4.0}) {
            double prev = -1.0;
            for (int k = 0; k < 50; ++k) {
                const double ratio =
                    std::exp(std::log(2.0) + (std::log(1e6) - std::log(2.0)) * k / 49.0);
                const auto pt = econ::mev_tax({1.0, ratio, r, 0.0, 0.0});
                if (!(pt.tax_over_v > prev)) ok = false;
                prev = pt.tax_over_v;
            }
            const auto pt = econ::mev_tax({1.0, 1e4, r, 0.0, 0.0});
            const double asymptote = (r / (1.0 + r)) * pt.s_star;
            if (std::abs(pt.tax_over_v / asymptote - 1.0) > 0.01) ok = false;
        }
        report(4, ok,
               "tax divergence: strictly increasing over 50-point log grids, within 1% of the "
               "asymptote at ratio 1e4 (r in {1,2,4})");
    }

    // 5 — enforcement-cost curve and repeated-game agreement
    {
        bool ok = true;
        auto rng = SplitMix64(2718);
        for (const auto& inst : sweep) {
            const auto curve = econ::enforcement_cost_curve(inst.params, 3);
            if (!(-curve.slope >= (2.0 / 3.0) * inst.eq.t_star)) ok = false;
            const double a1 = rng.uniform01(), a2 = rng.uniform01(), a3 = rng.uniform01();
            const double c1 = econ::enforcement_cost(a1, inst.params);
            const double c2 = econ::enforcement_cost(a2, inst.params);
            const double c3 = econ::enforcement_cost(a3, inst.params);
            const double cross = (c2 - c1) * (a3 - a1) - (c3 - c1) * (a2 - a1);
            const double scale = std::max({std::abs(c1), std::abs(c2), std::abs(c3), 1.0});
            if (std::abs(cross) > 1e-12 * scale) ok = false;
        }
        const contest::ContestParams unit{1.0, 2.0, 1.0, 0.0, 0.0};
        for (double alpha : {0.0, 0.5, 1.0}) {
            sim::RepeatedConfig rc{alpha, 1000000, unit, 97};
            const auto res = sim::run_repeated(rc, sim::Strategy::equilibrium_bid());
            const double tol = alpha == 1.0 ? 0.0 : 3.0 * res.cost_stderr;
            if (std::abs(res.empirical_cost - res.analytic_cost) > tol) ok = false;
        }
        report(5, ok,
               "enforcement cost: affine to 1e-12, slope >= (2/3)T* on the sweep, 1e6-contest "
               "repeated runs match at alpha in {0, 0.5, 1}");
    }

    // 6 — Monte Carlo agreement at the unit contest
    {
        const auto t0 = Clock::now();
        const contest::ContestParams unit{1.0, 2.0, 1.0, 0.0, 0.0};
        const auto rep =
            sim::run_monte_carlo(unit, sim::Strategy::equilibrium_bid(),
                                 sim::Strategy::equilibrium_bid(),
                                 sim::ChannelRegime::public_public(), 1000000, 20251001);
        const double dt = seconds_since(t0);
        const bool p_ok = std::abs(rep.empirical_p_i - 0.5731827445164543) <= 0.0015;
        const bool rev_ok = std::abs(rep.mean_proposer_revenue - 0.6447977056076499) <=
                            3.0 * rep.stderr_proposer_revenue;
        const bool time_ok = dt <= 30.0;
        char msg[200];
        std::snprintf(msg, sizeof msg,
                      "Monte Carlo 1e6 trials: |p_hat - 0.5732| = %.5f <= 0.0015, revenue within "
                      "3 se (%.1f s)",
                      std::abs(rep.empirical_p_i - 0.5731827445164543), dt);
        report(6, p_ok && rev_ok && time_ok, msg);
    }

    // 7 — delegation economics
    {
        econ::DelegationScenario scn;
        scn.n = 10;
        scn.v_i.assign(10, 1.0);
        scn.prize_ratio = 2.0;
        scn.r = 1.0;
        scn.c_b = 0.5;
        scn.f = 0.1;
        const auto out = econ::delegation_analysis(scn);
        bool ok = out.evaders.size() == 10;
        for (const auto& d : out.evaders)
            ok = ok && d.solo < 0.0 && d.delegate_payoff > 0.0 && d.prefers_delegate;
        report(7, ok,
               "delegation: 10 equal evaders at ratio 2 have solo < 0 < delegate, all prefer "
               "the bot");
    }

    // 8 — pipeline recovery on the canonical synthetic scenario
    {
        const auto t0 = Clock::now();
        synth::GenConfig gc;
        gc.addresses = 100;
        gc.planted_tau = 300.0;
        gc.seed = 8088;
        const auto corpus = synth::synth_generate(gc);

        pipeline::PipelineConfig pc;
        pc.seed = gc.seed;
        const auto result = pipeline::run_pipeline(corpus.transfers, corpus.sanctions,
                                                   corpus.labels, pc);
        const auto eval = synth::evaluate_pipeline(result, corpus.truth);
        const double dt = seconds_since(t0);

        const bool tau_ok = result.tau >= 150.0 && result.tau <= 600.0;
        const bool f1_ok = eval.episode_f1 >= 0.95;
        const bool regime_ok = eval.regime_accuracy >= 0.95;
        const bool mat_ok = eval.materiality_accuracy == 1.0;
        const bool time_ok = dt <= 60.0;
        char msg[240];
        std::snprintf(msg, sizeof msg,
                      "pipeline recovery: tau=%.1f in [150,600], F1=%.3f, regime acc=%.3f, "
                      "materiality acc=%.3f (%.1f s)",
                      result.tau, eval.episode_f1, eval.regime_accuracy,
                      eval.materiality_accuracy, dt);
        report(8, tau_ok && f1_ok && regime_ok && mat_ok && time_ok, msg);
    }

    // 9 — determinism of every command, checked by digest
    {
        bool ok = true;
        std::string detail;

        const auto solve_a = run_and_capture("solve --v 1 --psi 2 --r 1");
        const auto solve_b = run_and_capture("solve --v 1 --psi 2 --r 1");
        if (digest(solve_a) != digest(solve_b) || solve_a.empty()) {
            ok = false;
            detail += " solve";
        }

        const auto sweep_a = run_and_capture("sweep --axis prize_ratio --from 2 --to 100 --steps 20 --log");
        const auto sweep_b = run_and_capture("sweep --axis prize_ratio --from 2 --to 100 --steps 20 --log");
        if (digest(sweep_a) != digest(sweep_b) || sweep_a.empty()) {
            ok = false;
            detail += " sweep";
        }

        const auto sim_a = run_and_capture("--seed 5 simulate --v 1 --psi 2 --r 1 --trials 50000");
        const auto sim_b = run_and_capture("--seed 5 simulate --v 1 --psi 2 --r 1 --trials 50000");
        if (digest(sim_a) != digest(sim_b) || sim_a.empty()) {
            ok = false;
            detail += " simulate";
        }

        const auto s1 = fresh_dir("semev_acc_synth1");
        const auto s2 = fresh_dir("semev_acc_synth2");
        run_and_capture("--seed 13 --out " + s1.string() + " synth --addresses 40");
        run_and_capture("--seed 13 --out " + s2.string() + " synth --addresses 40");
        for (const char* f : {"transfers.jsonl", "sanctions.jsonl", "ground_truth.json"}) {
            const auto a = slurp(s1 / f), b = slurp(s2 / f);
            if (a.empty() || digest(a) != digest(b)) {
                ok = false;
                detail += std::string(" synth:") + f;
            }
        }

        const auto p1 = fresh_dir("semev_acc_pipe1");
        const auto p2 = fresh_dir("semev_acc_pipe2");
        const std::string pipe_args = " pipeline --transfers " + (s1 / "transfers.jsonl").string() +
                                      " --sanctions " + (s1 / "sanctions.jsonl").string();
        run_and_capture("--seed 13 --out " + p1.string() + pipe_args);
        run_and_capture("--seed 13 --out " + p2.string() + pipe_args);
        for (const char* f : {"episodes.csv", "regimes.json"}) {
            const auto a = slurp(p1 / f), b = slurp(p2 / f);
            if (a.empty() || digest(a) != digest(b)) {
                ok = false;
                detail += std::string(" pipeline:") + f;
            }
        }
        report(9, ok, "determinism: rerun digests identical for every command" + detail);
    }

    // 10 — canonical-constant conformance of the regime bucketing
    {
        using pipeline::Regime;
        pipeline::PipelineConfig pc;
        const auto& b = pc.default_boundaries;
        bool ok = true;
        ok = ok && pipeline::assign_regime(24.0, b) == Regime::Race;
        ok = ok && pipeline::assign_regime(39852.0, b) == Regime::TacticalReactive;
        ok = ok && pipeline::assign_regime(242.0, b) == Regime::Race;
        ok = ok && pipeline::assign_regime(243.0, b) == Regime::TacticalReactive;
        ok = ok && pipeline::assign_regime(95514.0, b) == Regime::TacticalReactive;
        ok = ok && pipeline::assign_regime(95515.0, b) == Regime::StrategicMigration;
        ok = ok && pipeline::assign_regime(7614341.0, b) == Regime::StrategicMigration;
        ok = ok && pipeline::assign_regime(7614342.0, b) == Regime::LongTail;
        report(10, ok,
               "canonical constants: 24 s -> Race, 39852 s -> TacticalReactive, boundary edges at "
               "242 / 95514 / 7614341 s");
    }

    std::printf("%s\n", failures == 0 ? "acceptance: all criteria passed"
                                      : "acceptance: FAILURES present");
    return failures == 0 ? 0 : 1;
}
