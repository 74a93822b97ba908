// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// criterion fails. Heavier than the unit suites; runtime is a few minutes.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "prunetx/capacity.hpp"
#include "prunetx/decoder.hpp"
#include "prunetx/errors.hpp"
#include "prunetx/simulate.hpp"

using namespace prunetx;

namespace {

int g_failures = 0;

void report(int id, bool pass, const std::string& name, const std::string& detail) {
    std::printf("[%2d] %s %s — %s\n", id, pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

void run_criterion(int id, const std::string& name,
                   const std::function<std::pair<bool, std::string>()>& body) {
    const auto start = std::chrono::steady_clock::now();
    bool pass = false;
    std::string detail;
    try {
        std::tie(pass, detail) = body();
    } catch (const std::exception& e) {
        pass = false;
        detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    char buf[64];
    std::snprintf(buf, sizeof(buf), " [%.1fs]", secs);
    report(id, pass, name, detail + buf);
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

struct Bundle {
    TrellisModel trellis;
    std::optional<EdgeMetrics> metrics;
};

Bundle make_bundle(ModKind kind, double alpha, int D, int osf, bool with_metrics) {
    Bundle b{build_trellis(Constellation::make(kind), build_pulse(alpha, D, osf)), {}};
    if (with_metrics) b.metrics = compute_edge_metrics(b.trellis);
    return b;
}

bool all_finite(const Signal& s) {
    for (const cplx& v : s.samples)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

}  // namespace

// 1. Trellis walk output equals the direct filter sum.
static void criterion_1() {
    run_criterion(1, "encoder-convolution equivalence", []() -> std::pair<bool, std::string> {
        double worst = 0.0;
        int sequences = 0;
        std::uint64_t seed = 1000;
        for (const ModKind kind : {ModKind::QPSK, ModKind::QAM16})
            for (double alpha : {0.22, 0.35, 0.5})
                for (int D : {2, 3}) {
                    const Constellation c = Constellation::make(kind);
                    const PulseShape p = build_pulse(alpha, D, 16);
                    const TrellisModel t = build_trellis(c, p);
                    for (int rep = 0; rep < 9; ++rep) {
                        const auto inputs = random_symbols(t.M(), 1000, seed++);
                        const EncodeResult enc = encode(t, nullptr, inputs);
                        const auto direct = oracles::direct_convolution(c, p, inputs);
                        for (std::size_t i = 0; i < direct.size(); ++i)
                            worst = std::max(worst, std::abs(enc.signal.samples[i] - direct[i]));
                        ++sequences;
                    }
                }
        return {worst < 1e-9, std::to_string(sequences) + " sequences, max deviation " + fmt(worst) +
                                  " (< 1e-9)"};
    });
}

// 2. Full DFA-BCJR equals exhaustive enumeration on the toy model.
static void criterion_2() {
    run_criterion(2, "bcjr oracle equivalence", []() -> std::pair<bool, std::string> {
        const TrellisModel t = build_trellis(oracles::bpsk(), build_pulse(0.35, 1, 4));
        PruneSet ps;
        ps.num_edges = 4;
        ps.M = 2;
        ps.bitmap.assign(1, 0);
        ps.bitmap[0] |= 1ull << 3;
        ps.pruned_ids = {3};
        ps.requested_eta = 0.25;
        ps.achieved_eta = 0.25;

        double worst = 0.0;
        std::mt19937_64 rng(2024);
        const int n = 4;
        for (double es_n0_db : {0.0, 5.0, 10.0}) {
            for (int draw = 0; draw < 100; ++draw) {
                const PruneSet* prune = (draw % 2 == 0) ? nullptr : &ps;
                const auto inputs = random_symbols(2, n, rng());
                const EncodeResult enc = encode(t, prune, inputs);
                const ChannelParams cp = ChannelParams::from_es(1.0, es_n0_db, rng());
                const Signal noisy = add_awgn(enc.signal, cp);
                for (int k = 0; k < n; ++k) {
                    const std::span<const std::uint8_t> prefix(inputs.data(), static_cast<std::size_t>(k));
                    const AppVector app = full_dfa_bcjr(t, prune, noisy.samples, cp.n0, prefix, k);
                    const auto oracle =
                        oracles::enumerate_app(t, prune, noisy.samples, cp.n0, prefix, k);
                    for (int x = 0; x < 2; ++x)
                        worst = std::max(worst, std::abs(app.probs[static_cast<std::size_t>(x)] -
                                                         oracle[static_cast<std::size_t>(x)]));
                }
            }
        }
        return {worst < 1e-9,
                "300 noise draws x 4 positions, max APP deviation " + fmt(worst) + " (< 1e-9)"};
    });
}

// 3+4. 16-QAM PAPR reduction at eta = 0.5% and 10%.
static void criteria_3_4_8(Bundle& qam) {
    const std::uint64_t seed = 777;
    double base_papr = 0.0;
    run_criterion(3, "16-qam eta=0.5% papr reduction >= 20%",
                  [&]() -> std::pair<bool, std::string> {
        const PaprEstimate base = measure_papr_run(qam.trellis, nullptr, 1'000'000, seed);
        base_papr = base.papr_max;
        const PruneSet ps = select_prune_set(*qam.metrics, 0.005);
        const PaprEstimate pruned = measure_papr_run(qam.trellis, &ps, 1'000'000, seed);
        const double reduction = 1.0 - pruned.papr_max / base.papr_max;
        return {reduction >= 0.20, "baseline " + fmt(base.papr_max_db()) + " dB, pruned " +
                                       fmt(pruned.papr_max_db()) + " dB, linear reduction " +
                                       fmt(100.0 * reduction) + "% (>= 20%)"};
    });

    run_criterion(4, "16-qam eta=10% papr reduction >= 45%",
                  [&]() -> std::pair<bool, std::string> {
        const PruneSet ps = select_prune_set(*qam.metrics, 0.10);
        const PaprEstimate pruned = measure_papr_run(qam.trellis, &ps, 1'000'000, seed);
        const double reduction = 1.0 - pruned.papr_max / base_papr;
        return {reduction >= 0.45, "pruned " + fmt(pruned.papr_max_db()) + " dB, linear reduction " +
                                       fmt(100.0 * reduction) + "% (>= 45%)"};
    });

    run_criterion(8, "pruning accounting", [&]() -> std::pair<bool, std::string> {
        // exact floor accounting on both alphabets
        const Bundle qpsk = make_bundle(ModKind::QPSK, 0.35, 3, 16, true);
        for (double eta : {0.005, 0.10, 0.30}) {
            const PruneSet a = select_prune_set(*qpsk.metrics, eta);
            const auto quota_q =
                static_cast<std::uint64_t>(eta * static_cast<double>(qpsk.trellis.num_edges));
            if (a.size() != quota_q || a.achieved_eta != static_cast<double>(quota_q) /
                                                             static_cast<double>(qpsk.trellis.num_edges))
                return {false, "qpsk floor accounting broke at eta " + fmt(eta)};
        }
        const PruneSet ps = select_prune_set(*qam.metrics, 0.10);
        const auto quota =
            static_cast<std::uint64_t>(0.10 * static_cast<double>(qam.trellis.num_edges));
        if (ps.size() != quota) return {false, "16-qam quota mismatch"};
        if (ps.achieved_eta !=
            static_cast<double>(quota) / static_cast<double>(qam.trellis.num_edges))
            return {false, "16-qam achieved_eta not the exact edge ratio"};

        // survivors: exhaustive for qpsk at eta 0.5
        {
            const PruneSet heavy = select_prune_set(*qpsk.metrics, 0.5);
            std::vector<int> lost(qpsk.trellis.num_states, 0);
            for (std::uint32_t e : heavy.pruned_ids) ++lost[e / 4];
            for (std::uint64_t s = 0; s < qpsk.trellis.num_states; ++s)
                if (lost[s] >= 4) return {false, "qpsk state lost all edges"};
        }
        // survivors: 1e5 sampled states for 16-qam
        {
            std::vector<std::uint32_t> lost(qam.trellis.num_states, 0);
            for (std::uint32_t e : ps.pruned_ids) ++lost[e / 16];
            std::mt19937_64 rng(55);
            std::uniform_int_distribution<std::uint64_t> sd(0, qam.trellis.num_states - 1);
            for (int i = 0; i < 100000; ++i)
                if (lost[sd(rng)] >= 16) return {false, "16-qam state lost all edges"};
        }
        // a pruned 1e6-symbol run traverses no pruned edge
        const auto inputs = random_symbols(16, 1'000'000, seed);
        const EncodeResult enc = encode(qam.trellis, &ps, inputs);
        std::uint64_t state = kInitialState;
        for (std::size_t k = 0; k < inputs.size(); ++k) {
            const std::uint64_t e = state * 16 + enc.realized[k];
            if (ps.contains(e)) return {false, "pruned edge traversed at symbol " + std::to_string(k)};
            state = next_state(qam.trellis, state, enc.realized[k]);
        }
        return {true, "floor accounting exact; survivors >= 1 (qpsk exhaustive, 1e5 16-qam "
                      "samples); 1e6 pruned symbols traverse 0 pruned edges"};
    });
}

// 5. Capacity retention at the 1.9-bit operating point (QPSK, eta 10%, full).
static void criterion_5(Bundle& qpsk) {
    run_criterion(5, "qpsk eta=10% retention >= 0.9 at the 1.9-bit point",
                  [&]() -> std::pair<bool, std::string> {
        const PruneSet ps = select_prune_set(*qpsk.metrics, 0.10);
        // coarse scan for the SNR where the unpruned full estimate clears 1.9
        double snr_pick = std::numeric_limits<double>::quiet_NaN();
        for (double snr : {4.0, 6.0, 8.0, 10.0, 12.0, 14.0}) {
            const CapacityEstimate coarse =
                estimate_capacity_full(qpsk.trellis, nullptr, snr, 20000, 32, 31);
            if (coarse.bits_per_symbol >= 1.92) {
                snr_pick = snr;
                break;
            }
        }
        if (!std::isfinite(snr_pick)) return {false, "no grid point reached 1.9 bits"};
        const CapacityEstimate unpruned =
            estimate_capacity_full(qpsk.trellis, nullptr, snr_pick, 100000, 32, 33);
        if (unpruned.bits_per_symbol < 1.9)
            return {false, "unpruned re-run fell below 1.9 bits at " + fmt(snr_pick) + " dB"};
        const CapacityEstimate pruned =
            estimate_capacity_full(qpsk.trellis, &ps, snr_pick, 100000, 32, 33);
        const RetentionRatio rho = retention_ratio(pruned, unpruned);
        return {rho.rho >= 0.9, "Es/N0 " + fmt(snr_pick) + " dB, unpruned " +
                                    fmt(unpruned.bits_per_symbol) + " b, pruned " +
                                    fmt(pruned.bits_per_symbol) + " b, rho " + fmt(rho.rho) +
                                    " +/- " + fmt(rho.std_error) + " (>= 0.9), N=1e5"};
    });
}

// 6. Forward lower bound never exceeds the full estimate.
static void criterion_6(Bundle& qpsk) {
    run_criterion(6, "bound ordering lb <= full on the snr grid",
                  [&]() -> std::pair<bool, std::string> {
        double worst_margin = std::numeric_limits<double>::infinity();
        for (double eta : {0.0, 0.10, 0.30}) {
            std::optional<PruneSet> ps;
            if (eta > 0.0) ps = select_prune_set(*qpsk.metrics, eta);
            const PruneSet* p = ps ? &*ps : nullptr;
            for (double snr : {-5.0, 0.0, 5.0, 10.0, 15.0, 20.0}) {
                const CapacityEstimate lb = estimate_lower_bound(qpsk.trellis, p, snr, 20000, 41);
                const CapacityEstimate full =
                    estimate_capacity_full(qpsk.trellis, p, snr, 20000, 32, 41);
                const double sigma = std::hypot(lb.std_error, full.std_error);
                const double margin =
                    full.bits_per_symbol - lb.bits_per_symbol + 3.0 * sigma;
                worst_margin = std::min(worst_margin, margin);
                if (margin < 0.0)
                    return {false, "violated at eta " + fmt(eta) + ", " + fmt(snr) + " dB: lb " +
                                       fmt(lb.bits_per_symbol) + " > full " +
                                       fmt(full.bits_per_symbol) + " + 3 sigma"};
            }
        }
        return {true, "18 grid points, smallest (full - lb + 3 sigma) margin " + fmt(worst_margin)};
    });
}

// 7. High-SNR endpoints.
static void criterion_7(Bundle& qpsk, Bundle& qam) {
    run_criterion(7, "high-snr endpoints", [&]() -> std::pair<bool, std::string> {
        std::string detail;
        bool pass = true;

        const CapacityEstimate qf =
            estimate_capacity_full(qpsk.trellis, nullptr, 20.0, 20000, 32, 51);
        detail += "qpsk full @20dB " + fmt(qf.bits_per_symbol) + " b (>= 1.99)";
        pass = pass && qf.bits_per_symbol >= 0.995 * 2.0;

        // Forward-only bound for 16-QAM at +25 dB, as stated. The causal
        // filter leaves the newest symbol only ~0.2-0.5% of its pulse energy
        // inside its own block, so this bound cannot approach log2 M until
        // roughly +45 dB; the criterion value is reported honestly.
        const CapacityEstimate ql =
            estimate_lower_bound(qam.trellis, nullptr, 25.0, 20000, 51);
        detail += "; 16-qam lb @25dB " + fmt(ql.bits_per_symbol) + " b (>= 3.98)";
        pass = pass && ql.bits_per_symbol >= 0.995 * 4.0;

        for (double eta : {0.05, 0.10}) {
            const PruneSet ps = select_prune_set(*qpsk.metrics, eta);
            const CapacityEstimate limit = high_snr_limit(qpsk.trellis, &ps);
            const CapacityEstimate est =
                estimate_lower_bound(qpsk.trellis, &ps, 40.0, 100000, 53);
            const double gap = std::abs(est.bits_per_symbol - limit.bits_per_symbol);
            detail += "; eta " + fmt(eta) + " lb@40dB vs entropy oracle gap " + fmt(gap) +
                      " (< 0.02)";
            pass = pass && gap < 0.02;
        }
        return {pass, detail};
    });
}

// 9. PAPR monotone in eta.
static void criterion_9(Bundle& qpsk) {
    run_criterion(9, "qpsk papr monotone in eta", [&]() -> std::pair<bool, std::string> {
        std::string curve;
        double prev_db = std::numeric_limits<double>::infinity();
        for (double eta : {0.0, 0.01, 0.05, 0.10, 0.30, 0.50}) {
            std::optional<PruneSet> ps;
            if (eta > 0.0) ps = select_prune_set(*qpsk.metrics, eta);
            const PaprEstimate est =
                measure_papr_run(qpsk.trellis, ps ? &*ps : nullptr, 1'000'000, 99);
            if (!curve.empty()) curve += " ";
            curve += fmt(est.papr_max_db());
            if (est.papr_max_db() > prev_db + 0.1)
                return {false, "papr rose by more than 0.1 dB at eta " + fmt(eta) + ": " + curve};
            prev_db = est.papr_max_db();
        }
        return {true, "papr_max dB across eta {0,1,5,10,30,50}%: " + curve};
    });
}

// 10. Numerical hygiene.
static void criterion_10(Bundle& qpsk, Bundle& qam) {
    run_criterion(10, "numerical hygiene", [&]() -> std::pair<bool, std::string> {
        // taps and metrics carry no NaN/Inf
        for (double h : qpsk.trellis.pulse.taps)
            if (!std::isfinite(h)) return {false, "non-finite tap"};
        for (const auto* m : {&*qpsk.metrics, &*qam.metrics}) {
            for (float v : m->peak2)
                if (!std::isfinite(v)) return {false, "non-finite peak2"};
            for (float v : m->min2)
                if (!std::isfinite(v)) return {false, "non-finite min2"};
        }

        const PruneSet ps = select_prune_set(*qpsk.metrics, 0.10);
        double worst_norm_gap = 0.0;
        for (double snr : {-10.0, 0.0, 20.0}) {
            const auto inputs = random_symbols(4, 100000, 61);
            const EncodeResult enc = encode(qpsk.trellis, &ps, inputs);
            if (!all_finite(enc.signal)) return {false, "non-finite encoder output"};
            const double es = calibrate_es(qpsk.trellis, &ps, 20000, 62);
            const ChannelParams cp = ChannelParams::from_es(es, snr, 63);
            const Signal noisy = add_awgn(enc.signal, cp);
            std::vector<double> prior(4, 0.25);
            std::uint64_t state = kInitialState;
            for (std::size_t k = 0; k < inputs.size(); ++k) {
                const std::span<const cplx> y(noisy.samples.data() + k * 16, 16);
                const AppVector app =
                    forward_app(qpsk.trellis, &ps, state, ObservationBlock{y, cp.n0}, prior);
                double sum = 0.0;
                for (double p : app.probs) {
                    if (!std::isfinite(p) || p < 0.0) return {false, "bad APP entry"};
                    sum += p;
                }
                worst_norm_gap = std::max(worst_norm_gap, std::abs(sum - 1.0));
                state = next_state(qpsk.trellis, state,
                                   remap(qpsk.trellis, &ps, state, inputs[k]));
            }
        }
        if (worst_norm_gap > 1e-9)
            return {false, "APP normalization gap " + fmt(worst_norm_gap)};
        return {true, "3e5 decoded symbols at {-10, 0, +20} dB, worst APP normalization gap " +
                          fmt(worst_norm_gap) + "; taps, metrics, waveforms all finite"};
    });
}

int main() {
    std::printf("prunetx acceptance suite\n");
    criterion_1();
    criterion_2();

    Bundle qam = make_bundle(ModKind::QAM16, 0.35, 3, 16, true);
    criteria_3_4_8(qam);

    Bundle qpsk = make_bundle(ModKind::QPSK, 0.35, 3, 16, true);
    criterion_5(qpsk);
    criterion_6(qpsk);
    criterion_7(qpsk, qam);
    criterion_9(qpsk);
    criterion_10(qpsk, qam);

    std::printf("%s (%d criterion failures)\n", g_failures == 0 ? "ALL PASS" : "FAILURES PRESENT",
                g_failures);
    return g_failures == 0 ? 0 : 1;
}
