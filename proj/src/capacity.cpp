#include "prunetx/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "prunetx/errors.hpp"
#include "prunetx/parallel.hpp"

namespace prunetx {

const char* to_string(CapacityMethod m) {
    switch (m) {
        case CapacityMethod::Full: return "full";
        case CapacityMethod::ForwardLowerBound: return "lower_bound";
        case CapacityMethod::HighSnrLimit: return "high_snr";
    }
    return "?";
}

namespace {

struct ChunkPlan {
    std::vector<std::int64_t> lengths;
};

// Fixed by n_symbols alone so results never depend on the worker count.
ChunkPlan make_chunk_plan(std::int64_t n_symbols) {
    ChunkPlan plan;
    const std::int64_t n_chunks = (n_symbols + kChunkSymbols - 1) / kChunkSymbols;
    const std::int64_t base = n_symbols / n_chunks;
    std::int64_t rem = n_symbols % n_chunks;
    for (std::int64_t c = 0; c < n_chunks; ++c)
        plan.lengths.push_back(base + (c < rem ? 1 : 0));
    return plan;
}

struct SeriesStats {
    double mean = 0.0;
    double se = 0.0;
    std::int64_t n = 0;
};

// Sample mean and standard error with an effective-sample-size correction
// from the lag-1..lag_window autocorrelation (consecutive symbols share
// filter memory).
SeriesStats series_stats(const std::vector<double>& v, int lag_window) {
    SeriesStats st;
    st.n = static_cast<std::int64_t>(v.size());
    if (st.n == 0) throw NumericError("empty Monte Carlo series");
    double sum = 0.0;
    for (double x : v) sum += x;
    st.mean = sum / static_cast<double>(st.n);
    if (st.n == 1) {
        st.se = 1e-15;
        return st;
    }
    double var = 0.0;
    for (double x : v) var += (x - st.mean) * (x - st.mean);
    var /= static_cast<double>(st.n - 1);
    double corr = 0.0;
    if (var > 0.0) {
        for (int l = 1; l <= lag_window && l < st.n; ++l) {
            double acc = 0.0;
            for (std::int64_t i = l; i < st.n; ++i)
                acc += (v[static_cast<std::size_t>(i)] - st.mean) *
                       (v[static_cast<std::size_t>(i - l)] - st.mean);
            acc /= static_cast<double>(st.n - l) * var;
            if (acc > 0.0) corr += acc;
        }
    }
    const double ess = static_cast<double>(st.n) / (1.0 + 2.0 * corr);
    st.se = std::max(std::sqrt(var / ess), 1e-15);
    return st;
}

struct ChunkStream {
    std::vector<std::uint8_t> inputs;
    Signal noisy;
    double n0 = 0.0;
};

ChunkStream make_chunk_stream(const TrellisModel& t, const PruneSet* prune, double es,
                              double es_n0_db, std::int64_t len, std::uint64_t seed,
                              std::int64_t chunk_index) {
    ChunkStream cs;
    cs.inputs = random_symbols(t.M(), len, derive_seed(seed, 2 * static_cast<std::uint64_t>(chunk_index)));
    const EncodeResult enc = encode(t, prune, cs.inputs);
    const ChannelParams params = ChannelParams::from_es(
        es, es_n0_db, derive_seed(seed, 2 * static_cast<std::uint64_t>(chunk_index) + 1));
    cs.noisy = add_awgn(enc.signal, params);
    cs.n0 = params.n0;
    return cs;
}

std::vector<double> forward_chunk_series(const TrellisModel& t, const PruneSet* prune,
                                         const ChunkStream& cs) {
    const int burn = 2 * t.pulse.D;
    const auto len = static_cast<std::int64_t>(cs.inputs.size());
    const DecodeResult dec =
        decode_stream_forward(t, prune, cs.noisy.samples, cs.n0, cs.inputs, FeedbackMode::Genie);
    std::vector<double> series;
    series.reserve(static_cast<std::size_t>(std::max<std::int64_t>(0, len - 2 * burn)));
    for (std::int64_t k = burn; k < len - burn; ++k)
        series.push_back(-dec.true_symbol_logp[static_cast<std::size_t>(k)]);
    return series;
}

double validated_es(const TrellisModel& t, const PruneSet* prune, std::uint64_t seed) {
    return calibrate_es(t, prune, 20000, derive_seed(seed, 0xCA11Bull));
}

CapacityEstimate finish_estimate(std::vector<std::vector<double>>& chunk_series, int lag_window,
                                 const TrellisModel& t, CapacityMethod method, double es_n0_db,
                                 std::int64_t n_symbols) {
    std::vector<double> series;
    for (auto& cseries : chunk_series)
        series.insert(series.end(), cseries.begin(), cseries.end());
    const SeriesStats st = series_stats(series, lag_window);
    CapacityEstimate est;
    est.bits_per_symbol = std::log2(static_cast<double>(t.M())) - st.mean;
    est.std_error = st.se;
    est.n_symbols = n_symbols;
    est.method = method;
    est.es_n0_db = es_n0_db;
    if (!std::isfinite(est.bits_per_symbol)) throw NumericError("capacity estimate is not finite");
    return est;
}

}  // namespace

CapacityEstimate estimate_lower_bound(const TrellisModel& t, const PruneSet* prune,
                                      double es_n0_db, std::int64_t n_symbols,
                                      std::uint64_t seed) {
    if (n_symbols < 1000) throw std::invalid_argument("capacity estimation needs >= 1e3 symbols");
    const double es = validated_es(t, prune, seed);
    const ChunkPlan plan = make_chunk_plan(n_symbols);
    std::vector<std::vector<double>> chunk_series(plan.lengths.size());
    parallel_for_ranges(0, plan.lengths.size(), [&](std::uint64_t lo, std::uint64_t hi) {
        for (std::uint64_t c = lo; c < hi; ++c) {
            const ChunkStream cs = make_chunk_stream(t, prune, es, es_n0_db, plan.lengths[c],
                                                     seed, static_cast<std::int64_t>(c));
            chunk_series[c] = forward_chunk_series(t, prune, cs);
        }
    });
    return finish_estimate(chunk_series, 2 * t.pulse.D, t, CapacityMethod::ForwardLowerBound,
                           es_n0_db, n_symbols);
}

namespace {

// Blocked backward recursion: APPs for a block of symbols reuse one sweep
// whose horizon starts `window` symbols past the block (uniform there), so
// every symbol sees at least `window` future observations; the stream end
// is exact by construction.
std::vector<double> full_chunk_series(const TrellisModel& t, const PruneSet* prune,
                                      const SmallModelBcjr& engine, const ChunkStream& cs,
                                      int window) {
    const int osf = t.osf();
    const int M = t.M();
    const auto m = static_cast<std::uint64_t>(M);
    const auto len = static_cast<std::int64_t>(cs.inputs.size());
    const int burn = 2 * t.pulse.D;
    const std::uint64_t S = t.num_states;
    const double log_prior = -std::log(static_cast<double>(M));
    const std::span<const cplx> obs(cs.noisy.samples);

    // Genie state sequence.
    std::vector<std::uint32_t> states(static_cast<std::size_t>(len) + 1);
    states[0] = static_cast<std::uint32_t>(kInitialState);
    for (std::int64_t k = 0; k < len; ++k) {
        const std::uint64_t e = static_cast<std::uint64_t>(states[static_cast<std::size_t>(k)]) * m +
                                cs.inputs[static_cast<std::size_t>(k)];
        states[static_cast<std::size_t>(k) + 1] = engine.realized_next(e);
    }

    constexpr std::int64_t kBlock = 256;
    std::vector<double> beta_cur(S), beta_prev(S), lls(t.num_edges);
    // Stored rows: beta for positions b0+1 .. b1 (b1 - b0 rows).
    std::vector<double> beta_rows(static_cast<std::size_t>(kBlock) * S);
    std::vector<double> scores(static_cast<std::size_t>(M));
    std::vector<double> series;
    series.reserve(static_cast<std::size_t>(std::max<std::int64_t>(0, len - 2 * burn)));
    std::vector<cplx> w(static_cast<std::size_t>(osf));

    for (std::int64_t b0 = 0; b0 < len; b0 += kBlock) {
        const std::int64_t b1 = std::min(len, b0 + kBlock);
        const std::int64_t horizon = std::min(len, b1 + window);
        std::fill(beta_cur.begin(), beta_cur.end(), 0.0);
        for (std::int64_t j = horizon - 1; j > b0; --j) {
            engine.edge_lls(obs.subspan(static_cast<std::size_t>(j) * static_cast<std::size_t>(osf),
                                        static_cast<std::size_t>(osf)),
                            cs.n0, lls.data());
            beta_prev.swap(beta_cur);
            engine.backward_step(lls.data(), beta_prev.data(), beta_cur.data());
            if (j <= b1)
                std::copy(beta_cur.begin(), beta_cur.end(),
                          beta_rows.begin() + static_cast<std::size_t>(j - (b0 + 1)) * S);
        }
        for (std::int64_t k = b0; k < b1; ++k) {
            const auto s_known = static_cast<std::uint64_t>(states[static_cast<std::size_t>(k)]);
            const double* beta_next =
                (k + 1 == len) ? nullptr
                               : beta_rows.data() + static_cast<std::size_t>(k - b0) * S;
            const std::span<const cplx> y = obs.subspan(
                static_cast<std::size_t>(k) * static_cast<std::size_t>(osf), static_cast<std::size_t>(osf));
            for (int x = 0; x < M; ++x) {
                const std::uint64_t e = s_known * m + static_cast<std::uint64_t>(x);
                const std::uint64_t er = s_known * m + static_cast<std::uint64_t>(engine.remapped(e));
                const cplx* we = engine.waveform(er);
                double d2 = 0.0;
                for (int q = 0; q < osf; ++q) d2 += std::norm(y[static_cast<std::size_t>(q)] - we[q]);
                double sc = log_prior - d2 / cs.n0;
                if (beta_next != nullptr) sc += beta_next[engine.realized_next(e)];
                scores[static_cast<std::size_t>(x)] = sc;
            }
            if (k >= burn && k < len - burn) {
                double mx = -std::numeric_limits<double>::infinity();
                for (double s : scores) mx = std::max(mx, s);
                double sum = 0.0;
                for (double s : scores) sum += std::exp(s - mx);
                const double true_score = scores[cs.inputs[static_cast<std::size_t>(k)]];
                series.push_back(-(true_score - mx - std::log(sum)) / std::numbers::ln2_v<double>);
            }
        }
    }
    return series;
}

}  // namespace

CapacityEstimate estimate_capacity_full(const TrellisModel& t, const PruneSet* prune,
                                        double es_n0_db, std::int64_t n_symbols, int window,
                                        std::uint64_t seed) {
    if (n_symbols < 1000) throw std::invalid_argument("capacity estimation needs >= 1e3 symbols");
    if (window < 0) throw std::invalid_argument("window must be >= 0");
    if (window == 0) {
        // No future conditioning: the forward-only path, reported as Full.
        CapacityEstimate est = estimate_lower_bound(t, prune, es_n0_db, n_symbols, seed);
        est.method = CapacityMethod::Full;
        return est;
    }
    const SmallModelBcjr engine(t, prune);  // enforces the small-model guard
    const double es = validated_es(t, prune, seed);
    const ChunkPlan plan = make_chunk_plan(n_symbols);
    std::vector<std::vector<double>> chunk_series(plan.lengths.size());
    parallel_for_ranges(0, plan.lengths.size(), [&](std::uint64_t lo, std::uint64_t hi) {
        for (std::uint64_t c = lo; c < hi; ++c) {
            const ChunkStream cs = make_chunk_stream(t, prune, es, es_n0_db, plan.lengths[c],
                                                     seed, static_cast<std::int64_t>(c));
            chunk_series[c] = full_chunk_series(t, prune, engine, cs, window);
        }
    });
    return finish_estimate(chunk_series, 2 * t.pulse.D, t, CapacityMethod::Full, es_n0_db,
                           n_symbols);
}

CapacityEstimate high_snr_limit(const TrellisModel& t, const PruneSet* prune) {
    const StationaryDistribution sd = stationary_distribution(t, prune);
    const int M = t.M();
    const auto m = static_cast<std::uint64_t>(M);
    const double inv_m = 1.0 / static_cast<double>(M);
    double bits = 0.0;
    std::vector<int> mult(static_cast<std::size_t>(M));
    for (std::uint64_t s = 0; s < t.num_states; ++s) {
        const double pi_s = sd.pi[static_cast<std::size_t>(s)];
        if (pi_s <= 0.0) continue;
        std::fill(mult.begin(), mult.end(), 0);
        for (int x = 0; x < M; ++x) ++mult[static_cast<std::size_t>(remap(t, prune, s, x))];
        double h = 0.0;
        for (int x = 0; x < M; ++x) {
            const int k = mult[static_cast<std::size_t>(x)];
            if (k == 0) continue;
            const double p = k * inv_m;
            h -= p * std::log2(p);
        }
        bits += pi_s * h;
    }
    CapacityEstimate est;
    est.bits_per_symbol = bits;
    est.std_error = 0.0;
    est.n_symbols = 0;
    est.method = CapacityMethod::HighSnrLimit;
    est.es_n0_db = std::numeric_limits<double>::infinity();
    return est;
}

RetentionRatio retention_ratio(const CapacityEstimate& pruned, const CapacityEstimate& unpruned) {
    if (pruned.method != unpruned.method)
        throw std::invalid_argument("retention ratio needs estimates from the same method");
    if (pruned.es_n0_db != unpruned.es_n0_db)
        throw std::invalid_argument("retention ratio needs estimates at the same Es/N0");
    const double den = unpruned.bits_per_symbol;
    if (!(den > std::max(1e-9, 3.0 * unpruned.std_error)))
        throw NumericError("unpruned capacity indistinguishable from zero; ratio undefined");
    RetentionRatio r;
    r.rho = pruned.bits_per_symbol / den;
    const double rel_n = pruned.std_error / std::max(std::abs(pruned.bits_per_symbol), 1e-300);
    const double rel_d = unpruned.std_error / den;
    r.std_error = std::abs(r.rho) * std::sqrt(rel_n * rel_n + rel_d * rel_d);
    r.numerator = pruned;
    r.denominator = unpruned;
    return r;
}

}  // namespace prunetx
