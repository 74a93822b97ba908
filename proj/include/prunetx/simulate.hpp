#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "prunetx/pruning.hpp"
#include "prunetx/trellis.hpp"

namespace prunetx {

struct Signal {
    std::vector<cplx> samples;  // n_symbols * osf
    int osf = 1;
    std::int64_t n_symbols = 0;
    int guard = 0;  // leading/trailing symbols excluded from statistics
};

struct EncodeResult {
    Signal signal;
    std::vector<std::uint8_t> realized;  // post-remap symbol sequence
};

// Walks the trellis from the all-zero-index state: each input is remapped
// (identity without pruning), its edge segment appended, and the state
// advanced with the realized symbol.
EncodeResult encode(const TrellisModel& t, const PruneSet* prune,
                    std::span<const std::uint8_t> inputs);

struct PaprEstimate {
    double papr_max = 0.0;   // max |s|^2 / mean |s|^2, linear ratio
    double papr_ccdf = 0.0;  // ratio exceeded with probability 1e-4
    double mean_power = 0.0;
    std::int64_t n_symbols = 0;

    double papr_max_db() const;
    double papr_ccdf_db() const;
};

// Statistics over the non-guard samples. The CCDF figure is the (k+1)-th
// largest ratio with k = floor(1e-4 * sample count).
PaprEstimate measure_papr(const Signal& signal);

// Streaming variant for long runs: encodes seeded uniform inputs block by
// block without materializing the signal.
PaprEstimate measure_papr_run(const TrellisModel& t, const PruneSet* prune,
                              std::int64_t n_symbols, std::uint64_t seed);

struct ChannelParams {
    double es_n0_db = 0.0;
    double n0 = 0.0;  // per-complex-sample noise variance
    double es = 1.0;  // measured signal energy per symbol period
    std::uint64_t seed = 0;

    static ChannelParams from_es(double es, double es_n0_db, std::uint64_t seed);
};

// Adds circularly-symmetric complex Gaussian noise, variance n0 per sample
// (n0/2 per real dimension). Seeded and reproducible; n0 = 0 is the identity.
Signal add_awgn(const Signal& signal, const ChannelParams& params);

// Mean energy per symbol period over the non-guard symbols of a seeded
// uniform-input run; anchors n0 for a requested Es/N0.
double calibrate_es(const TrellisModel& t, const PruneSet* prune, std::int64_t n_symbols,
                    std::uint64_t seed);

std::vector<std::uint8_t> random_symbols(int M, std::int64_t n, std::uint64_t seed);

// Deterministic per-purpose seed derivation (splitmix64 mixing).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt);

}  // namespace prunetx
