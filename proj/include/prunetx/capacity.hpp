#pragma once

#include <cstdint>

#include "prunetx/decoder.hpp"
#include "prunetx/pruning.hpp"
#include "prunetx/simulate.hpp"
#include "prunetx/trellis.hpp"

namespace prunetx {

enum class CapacityMethod { Full, ForwardLowerBound, HighSnrLimit };

const char* to_string(CapacityMethod m);

struct CapacityEstimate {
    double bits_per_symbol = 0.0;
    double std_error = 0.0;
    std::int64_t n_symbols = 0;
    CapacityMethod method = CapacityMethod::ForwardLowerBound;
    double es_n0_db = 0.0;
};

struct RetentionRatio {
    double rho = 0.0;
    double std_error = 0.0;
    CapacityEstimate numerator;    // pruned
    CapacityEstimate denominator;  // unpruned
};

inline constexpr std::int64_t kChunkSymbols = 25000;

// Monte Carlo achievable rate of the forward-only decision-feedback decoder:
// log2 M - mean[-log2 P(X_k | Y_1..k, X_1..k-1)] over a seeded run with
// genie feedback, AWGN calibrated to the measured per-symbol energy. The
// run splits into fixed 25k-symbol chunks with derived seeds; 2D symbols at
// each chunk end are excluded. Standard error uses an effective-sample-size
// correction from the lag-1..2D autocorrelation of the per-symbol values.
CapacityEstimate estimate_lower_bound(const TrellisModel& t, const PruneSet* prune,
                                      double es_n0_db, std::int64_t n_symbols,
                                      std::uint64_t seed);

// Same Monte Carlo scheme with future conditioning: each symbol's APP uses a
// backward recursion seeded uniform at least `window` symbols ahead (blocked
// batching gives earlier symbols a longer horizon; chunk ends are exact).
// window = 0 reduces to the forward-only path. Small-model guard applies.
CapacityEstimate estimate_capacity_full(const TrellisModel& t, const PruneSet* prune,
                                        double es_n0_db, std::int64_t n_symbols, int window,
                                        std::uint64_t seed);

// Zero-noise limit of the genie-fed mutual information per symbol:
// sum over states of pi(s) * H(realized-edge distribution at s), where an
// edge reached by k of the M inputs carries probability k/M.
CapacityEstimate high_snr_limit(const TrellisModel& t, const PruneSet* prune);

// rho = pruned / unpruned with propagated standard error. Both estimates
// must share method and operating point.
RetentionRatio retention_ratio(const CapacityEstimate& pruned, const CapacityEstimate& unpruned);

}  // namespace prunetx
