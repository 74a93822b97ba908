#pragma once

#include <cstdint>
#include <vector>

#include "prunetx/constellation.hpp"
#include "prunetx/pulse.hpp"

namespace prunetx {

// The pulse-shaping filter viewed as an M-ary convolutional encoder with
// 2D-1 symbol registers. A state packs the last 2D-1 symbol indices as
// base-M digits, the most recent in the least significant digit; the edge id
// is state*M + input. Everything stays implicit: nothing stored here grows
// with M^(2D).
struct TrellisModel {
    Constellation constellation;
    PulseShape pulse;
    int memory = 0;                // 2D - 1
    std::uint64_t num_states = 0;  // M^memory
    std::uint64_t num_edges = 0;   // num_states * M
    std::uint64_t state_mod = 0;   // M^(memory-1)

    int M() const { return constellation.M; }
    int osf() const { return pulse.osf; }

    // Symbol index stored at register depth (0 = most recent).
    int symbol_at(std::uint64_t state, int depth) const;
};

inline constexpr std::uint64_t kDefaultMaxStates = 1ull << 20;
inline constexpr std::uint64_t kInitialState = 0;

TrellisModel build_trellis(Constellation constellation, PulseShape pulse,
                           std::uint64_t max_states = kDefaultMaxStates);

std::uint64_t next_state(const TrellisModel& t, std::uint64_t state, int input);

// Encoder output over one symbol interval [0, T): out[q] is the sample at
// tau = q/osf, q = 0 .. osf-1. out must hold osf values.
void edge_waveform_into(const TrellisModel& t, std::uint64_t state, int input, cplx* out);
std::vector<cplx> edge_waveform(const TrellisModel& t, std::uint64_t state, int input);

// Per-edge extreme instantaneous powers of the committed metric segment:
// the contribution the edge's 2D known symbols make to the symbol interval
// D-1 periods ahead, where the newest symbol carries its peak pulse energy.
// Indexed by edge id, stored as float: the two arrays are the only
// whole-trellis tables in the project (2 x 64 MiB at the 16-QAM D=3 scale).
struct EdgeMetrics {
    int M = 0;
    std::uint64_t num_states = 0;
    std::uint64_t num_edges = 0;
    std::vector<float> peak2;  // max_q |segment sample|^2
    std::vector<float> min2;   // min_q |segment sample|^2
};

// The metric segment scored by compute_edge_metrics, recomputed for one
// edge: sample q sums symbol depth d (0 = input) times h[q + (d+D-1)*osf]
// over d = 0..D.
std::vector<cplx> edge_metric_segment(const TrellisModel& t, std::uint64_t state, int input);

// Single streaming pass over all edges; partitions the state range across
// workers, each writing disjoint slices.
EdgeMetrics compute_edge_metrics(const TrellisModel& t);

}  // namespace prunetx
