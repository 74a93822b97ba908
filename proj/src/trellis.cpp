#include "prunetx/trellis.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "prunetx/errors.hpp"
#include "prunetx/parallel.hpp"

namespace prunetx {

namespace {

void check_ids(const TrellisModel& t, std::uint64_t state, int input) {
    if (state >= t.num_states) throw std::out_of_range("state id out of range");
    if (input < 0 || input >= t.M()) throw std::out_of_range("input index out of range");
}

}  // namespace

int TrellisModel::symbol_at(std::uint64_t state, int depth) const {
    std::uint64_t s = state;
    for (int i = 0; i < depth; ++i) s /= static_cast<std::uint64_t>(M());
    return static_cast<int>(s % static_cast<std::uint64_t>(M()));
}

TrellisModel build_trellis(Constellation constellation, PulseShape pulse,
                           std::uint64_t max_states) {
    if (constellation.M < 2) throw ConfigError("constellation is empty");
    if (pulse.taps.empty()) throw ConfigError("pulse has no taps");

    TrellisModel t;
    t.memory = 2 * pulse.D - 1;
    const auto m = static_cast<std::uint64_t>(constellation.M);
    std::uint64_t states = 1;
    for (int i = 0; i < t.memory; ++i) {
        if (states > max_states / m + 1) {
            states = std::numeric_limits<std::uint64_t>::max();
            break;
        }
        states *= m;
    }
    if (states > max_states)
        throw ResourceError("trellis state count M^(2D-1) = " +
                            (states == std::numeric_limits<std::uint64_t>::max()
                                 ? std::string("overflow")
                                 : std::to_string(states)) +
                            " exceeds the guard of " + std::to_string(max_states) +
                            " states (M=" + std::to_string(constellation.M) +
                            ", D=" + std::to_string(pulse.D) + ")");
    t.num_states = states;
    t.num_edges = states * m;
    t.state_mod = states / m;  // M^(memory-1); memory >= 1 so this is exact
    t.constellation = std::move(constellation);
    t.pulse = std::move(pulse);
    return t;
}

std::uint64_t next_state(const TrellisModel& t, std::uint64_t state, int input) {
    check_ids(t, state, input);
    return (state % t.state_mod) * static_cast<std::uint64_t>(t.M()) +
           static_cast<std::uint64_t>(input);
}

void edge_waveform_into(const TrellisModel& t, std::uint64_t state, int input, cplx* out) {
    check_ids(t, state, input);
    const auto& pts = t.constellation.points;
    const double* h = t.pulse.taps.data();
    const int osf = t.osf();
    const auto m = static_cast<std::uint64_t>(t.M());

    const cplx g0 = pts[static_cast<std::size_t>(input)];
    for (int q = 0; q < osf; ++q) out[q] = g0 * h[q];
    std::uint64_t s = state;
    for (int depth = 1; depth <= t.memory; ++depth) {
        const cplx g = pts[static_cast<std::size_t>(s % m)];
        s /= m;
        const double* hm = h + depth * osf;
        for (int q = 0; q < osf; ++q) out[q] += g * hm[q];
    }
}

std::vector<cplx> edge_waveform(const TrellisModel& t, std::uint64_t state, int input) {
    std::vector<cplx> seg(static_cast<std::size_t>(t.osf()));
    edge_waveform_into(t, state, input, seg.data());
    return seg;
}

std::vector<cplx> edge_metric_segment(const TrellisModel& t, std::uint64_t state, int input) {
    check_ids(t, state, input);
    const int osf = t.osf();
    const int offset = (t.pulse.D - 1) * osf;
    const auto& pts = t.constellation.points;
    const double* h = t.pulse.taps.data();
    std::vector<cplx> seg(static_cast<std::size_t>(osf), cplx(0.0, 0.0));
    for (int q = 0; q < osf; ++q)
        seg[static_cast<std::size_t>(q)] = pts[static_cast<std::size_t>(input)] * h[offset + q];
    for (int depth = 1; depth <= t.pulse.D; ++depth) {
        const cplx g = pts[static_cast<std::size_t>(t.symbol_at(state, depth - 1))];
        const double* hm = h + offset + depth * osf;
        for (int q = 0; q < osf; ++q) seg[static_cast<std::size_t>(q)] += g * hm[q];
    }
    return seg;
}

EdgeMetrics compute_edge_metrics(const TrellisModel& t) {
    EdgeMetrics em;
    em.M = t.M();
    em.num_states = t.num_states;
    em.num_edges = t.num_edges;
    em.peak2.resize(static_cast<std::size_t>(t.num_edges));
    em.min2.resize(static_cast<std::size_t>(t.num_edges));

    const int osf = t.osf();
    const int D = t.pulse.D;
    const auto m = static_cast<std::uint64_t>(t.M());
    const auto& pts = t.constellation.points;
    const double* h = t.pulse.taps.data();

    // The metric segment is the edge's committed contribution to the symbol
    // interval D-1 periods ahead, where the causal filter puts the bulk of
    // the edge's own pulse energy: sample q accumulates symbol depth d via
    // tap h[q + (d + D - 1) * osf] for d = 0..D. Scoring the edge's current
    // interval instead would rank by energy the register has already
    // committed, which remapping the input cannot steer away.
    const int offset = (D - 1) * osf;

    parallel_for_ranges(0, t.num_states, [&](std::uint64_t lo, std::uint64_t hi) {
        std::vector<cplx> base(static_cast<std::size_t>(osf));
        for (std::uint64_t state = lo; state < hi; ++state) {
            // Register contribution at depths 1..D; deeper symbols have left
            // the metric segment entirely.
            for (int q = 0; q < osf; ++q) base[static_cast<std::size_t>(q)] = cplx(0.0, 0.0);
            std::uint64_t s = state;
            for (int depth = 1; depth <= D; ++depth) {
                const cplx g = pts[static_cast<std::size_t>(s % m)];
                s /= m;
                const double* hm = h + offset + depth * osf;
                for (int q = 0; q < osf; ++q) base[static_cast<std::size_t>(q)] += g * hm[q];
            }
            for (int x = 0; x < static_cast<int>(m); ++x) {
                const cplx gx = pts[static_cast<std::size_t>(x)];
                double pk = 0.0;
                double mn = std::numeric_limits<double>::infinity();
                for (int q = 0; q < osf; ++q) {
                    const cplx v = base[static_cast<std::size_t>(q)] + gx * h[offset + q];
                    const double p2 = std::norm(v);
                    if (p2 > pk) pk = p2;
                    if (p2 < mn) mn = p2;
                }
                const std::uint64_t e = state * m + static_cast<std::uint64_t>(x);
                em.peak2[static_cast<std::size_t>(e)] = static_cast<float>(pk);
                em.min2[static_cast<std::size_t>(e)] = static_cast<float>(mn);
            }
        }
    });
    return em;
}

}  // namespace prunetx
