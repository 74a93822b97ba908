#pragma once

#include <cstdint>
#include <vector>

#include "prunetx/trellis.hpp"

namespace prunetx {

enum class RemapRule { NearestSurvivingWaveform };

// Immutable pruned-edge set. Stores the sorted id list plus a bitmap for
// O(1) membership in the encode/decode hot paths; both views hold the same
// set.
struct PruneSet {
    std::vector<std::uint32_t> pruned_ids;  // ascending
    std::vector<std::uint64_t> bitmap;      // num_edges bits
    std::uint64_t num_edges = 0;
    int M = 0;
    double requested_eta = 0.0;
    double achieved_eta = 0.0;
    double split = 0.5;
    RemapRule rule = RemapRule::NearestSurvivingWaveform;

    bool contains(std::uint64_t edge_id) const {
        return (bitmap[edge_id >> 6] >> (edge_id & 63)) & 1u;
    }
    std::uint64_t size() const { return pruned_ids.size(); }
};

// Greedy metric-ranked selection: a floor(split*quota) share of the quota by
// descending peak2 and the rest by ascending min2, interleaved so the pruned
// set at a smaller quota is a prefix of the set at a larger one. Candidates
// already pruned or whose source state is down to its last surviving edge
// are skipped; ties break toward the lower edge id.
PruneSet select_prune_set(const EdgeMetrics& metrics, double eta, double split = 0.5);

// Surviving input for (state, input): identity on survivors, otherwise the
// surviving input from the same state with the nearest output waveform in
// squared Euclidean distance (ties toward the lowest input). prune == nullptr
// means no pruning.
int remap(const TrellisModel& t, const PruneSet* prune, std::uint64_t state, int input);

enum class StationaryMode { Auto, Exact, Empirical };

struct StationaryOptions {
    StationaryMode mode = StationaryMode::Auto;
    std::uint64_t max_iterations = 200000;
    double tol_l1 = 1e-12;
    std::int64_t walk_symbols = 10'000'000;
    std::uint64_t seed = 1;
};

struct StationaryDistribution {
    std::vector<double> pi;  // indexed by state id, sums to 1
    bool exact = false;
    std::uint64_t iterations = 0;       // power-iteration count (exact mode)
    std::uint64_t reachable_states = 0; // states carrying mass > 1e-15
};

inline constexpr std::uint64_t kExactStationaryMaxStates = 1ull << 20;

// Stationary distribution of the pruned shift-register chain under i.i.d.
// uniform inputs, restricted to what is reachable from the all-zero state.
// Exact mode: power iteration to an L1 tolerance. Empirical mode: visit
// frequencies of a seeded random walk.
StationaryDistribution stationary_distribution(const TrellisModel& t, const PruneSet* prune,
                                               StationaryOptions opts = {});

}  // namespace prunetx
