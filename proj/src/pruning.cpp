#include "prunetx/pruning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "prunetx/errors.hpp"

namespace prunetx {

PruneSet select_prune_set(const EdgeMetrics& metrics, double eta, double split) {
    if (!(eta >= 0.0 && eta <= 1.0)) throw ConfigError("eta must be in [0,1)");
    if (!(split >= 0.0 && split <= 1.0)) throw ConfigError("split must be in [0,1]");
    const std::uint64_t E = metrics.num_edges;
    const std::uint64_t S = metrics.num_states;
    const auto m = static_cast<std::uint64_t>(metrics.M);
    if (E == 0 || E != S * m) throw ConfigError("inconsistent edge metrics");
    if (E > std::numeric_limits<std::uint32_t>::max())
        throw ResourceError("edge count exceeds 32-bit prune-set ids");

    const auto quota = static_cast<std::uint64_t>(eta * static_cast<double>(E));
    const std::uint64_t max_prunable = E - S;  // every state keeps a survivor
    if (quota > max_prunable)
        throw InfeasibleError(
            "requested eta " + std::to_string(eta) + " needs " + std::to_string(quota) +
                " prunes but only " + std::to_string(max_prunable) +
                " edges can go before a state loses its last survivor (max eta " +
                std::to_string(static_cast<double>(max_prunable) / static_cast<double>(E)) + ")",
            static_cast<double>(max_prunable) / static_cast<double>(E));

    PruneSet ps;
    ps.num_edges = E;
    ps.M = metrics.M;
    ps.requested_eta = eta;
    ps.split = split;
    ps.bitmap.assign((E + 63) / 64, 0);
    ps.pruned_ids.reserve(quota);
    if (quota == 0) {
        ps.achieved_eta = 0.0;
        return ps;
    }

    // Rankings over all edges; ties break toward the lower id.
    std::vector<std::uint32_t> by_peak(E), by_min(E);
    std::iota(by_peak.begin(), by_peak.end(), 0u);
    std::iota(by_min.begin(), by_min.end(), 0u);
    const float* peak2 = metrics.peak2.data();
    const float* min2 = metrics.min2.data();
    std::sort(by_peak.begin(), by_peak.end(), [peak2](std::uint32_t a, std::uint32_t b) {
        if (peak2[a] != peak2[b]) return peak2[a] > peak2[b];
        return a < b;
    });
    std::sort(by_min.begin(), by_min.end(), [min2](std::uint32_t a, std::uint32_t b) {
        if (min2[a] != min2[b]) return min2[a] < min2[b];
        return a < b;
    });

    std::vector<std::uint8_t> survivors(S, static_cast<std::uint8_t>(m));
    std::uint64_t taken = 0, taken_peak = 0, ppos = 0, mpos = 0;
    auto accept = [&](std::uint64_t pos_end, std::uint64_t& pos,
                      const std::vector<std::uint32_t>& order) -> bool {
        while (pos < pos_end) {
            const std::uint32_t e = order[pos++];
            const std::uint64_t state = e / m;
            if (ps.contains(e) || survivors[state] == 1) continue;
            ps.bitmap[e >> 6] |= 1ull << (e & 63);
            ps.pruned_ids.push_back(e);
            --survivors[state];
            return true;
        }
        return false;
    };
    while (taken < quota) {
        // Keep the running peak share at floor(split * taken).
        const bool from_peak =
            static_cast<std::uint64_t>(split * static_cast<double>(taken + 1)) > taken_peak;
        const bool ok = from_peak ? accept(E, ppos, by_peak) : accept(E, mpos, by_min);
        if (!ok)
            throw std::logic_error("prune ranking exhausted below the feasibility bound");
        ++taken;
        if (from_peak) ++taken_peak;
    }
    std::sort(ps.pruned_ids.begin(), ps.pruned_ids.end());
    ps.achieved_eta = static_cast<double>(quota) / static_cast<double>(E);
    return ps;
}

int remap(const TrellisModel& t, const PruneSet* prune, std::uint64_t state, int input) {
    if (state >= t.num_states) throw std::out_of_range("state id out of range");
    if (input < 0 || input >= t.M()) throw std::out_of_range("input index out of range");
    if (prune == nullptr) return input;
    const auto m = static_cast<std::uint64_t>(t.M());
    const std::uint64_t e = state * m + static_cast<std::uint64_t>(input);
    if (!prune->contains(e)) return input;

    const int osf = t.osf();
    std::vector<cplx> w0(static_cast<std::size_t>(osf)), wx(static_cast<std::size_t>(osf));
    edge_waveform_into(t, state, input, w0.data());
    int best = -1;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (int x = 0; x < t.M(); ++x) {
        if (prune->contains(state * m + static_cast<std::uint64_t>(x))) continue;
        edge_waveform_into(t, state, x, wx.data());
        double d2 = 0.0;
        for (int q = 0; q < osf; ++q) d2 += std::norm(w0[static_cast<std::size_t>(q)] - wx[static_cast<std::size_t>(q)]);
        if (d2 < best_d2) {
            best_d2 = d2;
            best = x;
        }
    }
    if (best < 0) throw std::logic_error("state has no surviving edge");  // PruneSet invariant
    return best;
}

namespace {

// Realized next state per edge, with remapping applied.
std::vector<std::uint32_t> realized_next_table(const TrellisModel& t, const PruneSet* prune) {
    const auto m = static_cast<std::uint64_t>(t.M());
    std::vector<std::uint32_t> next(static_cast<std::size_t>(t.num_edges));
    for (std::uint64_t s = 0; s < t.num_states; ++s)
        for (int x = 0; x < t.M(); ++x) {
            const int xr = remap(t, prune, s, x);
            next[static_cast<std::size_t>(s * m + static_cast<std::uint64_t>(x))] =
                static_cast<std::uint32_t>(next_state(t, s, xr));
        }
    return next;
}

}  // namespace

StationaryDistribution stationary_distribution(const TrellisModel& t, const PruneSet* prune,
                                               StationaryOptions opts) {
    StationaryDistribution out;
    const std::uint64_t S = t.num_states;
    bool exact = opts.mode != StationaryMode::Empirical;
    if (opts.mode == StationaryMode::Auto) exact = S <= kExactStationaryMaxStates;
    if (opts.mode == StationaryMode::Exact && S > kExactStationaryMaxStates)
        throw ResourceError("exact stationary distribution supports at most 2^20 states");

    out.pi.assign(static_cast<std::size_t>(S), 0.0);
    if (exact) {
        const auto next = realized_next_table(t, prune);
        const auto m = static_cast<std::uint64_t>(t.M());
        const double inv_m = 1.0 / static_cast<double>(t.M());
        std::vector<double> cur(static_cast<std::size_t>(S), 0.0);
        cur[kInitialState] = 1.0;
        std::vector<double> nxt(static_cast<std::size_t>(S));
        std::uint64_t iter = 0;
        for (; iter < opts.max_iterations; ++iter) {
            std::fill(nxt.begin(), nxt.end(), 0.0);
            for (std::uint64_t s = 0; s < S; ++s) {
                const double w = cur[static_cast<std::size_t>(s)];
                if (w == 0.0) continue;
                const double wm = w * inv_m;
                const std::uint32_t* row = next.data() + s * m;
                for (std::uint64_t x = 0; x < m; ++x) nxt[row[x]] += wm;
            }
            double l1 = 0.0;
            for (std::uint64_t s = 0; s < S; ++s)
                l1 += std::abs(nxt[static_cast<std::size_t>(s)] - cur[static_cast<std::size_t>(s)]);
            cur.swap(nxt);
            if (l1 < opts.tol_l1) break;
        }
        if (iter >= opts.max_iterations)
            throw NumericError("stationary power iteration did not converge within " +
                               std::to_string(opts.max_iterations) + " iterations");
        out.pi = std::move(cur);
        out.exact = true;
        out.iterations = iter + 1;
    } else {
        std::mt19937_64 rng(opts.seed);
        std::uniform_int_distribution<int> dist(0, t.M() - 1);
        std::vector<std::uint64_t> counts(static_cast<std::size_t>(S), 0);
        std::uint64_t state = kInitialState;
        for (std::int64_t k = 0; k < opts.walk_symbols; ++k) {
            const int x = remap(t, prune, state, dist(rng));
            state = next_state(t, state, x);
            ++counts[static_cast<std::size_t>(state)];
        }
        const double inv = 1.0 / static_cast<double>(opts.walk_symbols);
        for (std::uint64_t s = 0; s < S; ++s)
            out.pi[static_cast<std::size_t>(s)] = static_cast<double>(counts[static_cast<std::size_t>(s)]) * inv;
        out.exact = false;
    }
    double total = 0.0;
    for (double v : out.pi) {
        if (v > 1e-15) ++out.reachable_states;
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-9) throw NumericError("stationary distribution does not sum to 1");
    return out;
}

}  // namespace prunetx
