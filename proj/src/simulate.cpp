#include "prunetx/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "prunetx/errors.hpp"

namespace prunetx {

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt) {
    std::uint64_t z = base + 0x9E3779B97F4A7C15ull * (salt + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::vector<std::uint8_t> random_symbols(int M, std::int64_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> dist(0, M - 1);
    std::vector<std::uint8_t> out(static_cast<std::size_t>(n));
    for (auto& s : out) s = static_cast<std::uint8_t>(dist(rng));
    return out;
}

EncodeResult encode(const TrellisModel& t, const PruneSet* prune,
                    std::span<const std::uint8_t> inputs) {
    const int osf = t.osf();
    EncodeResult res;
    res.signal.osf = osf;
    res.signal.n_symbols = static_cast<std::int64_t>(inputs.size());
    res.signal.guard = 2 * t.pulse.D;
    res.signal.samples.resize(inputs.size() * static_cast<std::size_t>(osf));
    res.realized.resize(inputs.size());

    std::uint64_t state = kInitialState;
    cplx* out = res.signal.samples.data();
    for (std::size_t k = 0; k < inputs.size(); ++k) {
        const int xr = remap(t, prune, state, inputs[k]);
        edge_waveform_into(t, state, xr, out);
        state = next_state(t, state, xr);
        res.realized[k] = static_cast<std::uint8_t>(xr);
        out += osf;
    }
    return res;
}

double PaprEstimate::papr_max_db() const { return 10.0 * std::log10(papr_max); }
double PaprEstimate::papr_ccdf_db() const { return 10.0 * std::log10(papr_ccdf); }

namespace {

PaprEstimate papr_from_powers(std::vector<float>& p2, double sum, double max_p2,
                              std::int64_t n_symbols) {
    const double mean = sum / static_cast<double>(p2.size());
    if (!(mean > 0.0) || !std::isfinite(mean))
        throw NumericError("degenerate signal: zero mean power");
    const auto k = static_cast<std::size_t>(1e-4 * static_cast<double>(p2.size()));
    std::nth_element(p2.begin(), p2.begin() + static_cast<std::ptrdiff_t>(k), p2.end(),
                     std::greater<float>());
    PaprEstimate est;
    est.mean_power = mean;
    est.papr_max = max_p2 / mean;
    // float storage can round the quantile a hair past the double max
    est.papr_ccdf = std::min(static_cast<double>(p2[k]) / mean, est.papr_max);
    est.n_symbols = n_symbols;
    return est;
}

}  // namespace

PaprEstimate measure_papr(const Signal& signal) {
    if (signal.n_symbols <= 2 * signal.guard)
        throw std::invalid_argument("signal shorter than twice the guard interval");
    const auto begin = static_cast<std::size_t>(signal.guard) * static_cast<std::size_t>(signal.osf);
    const auto end = static_cast<std::size_t>(signal.n_symbols - signal.guard) *
                     static_cast<std::size_t>(signal.osf);
    std::vector<float> p2;
    p2.reserve(end - begin);
    double sum = 0.0, max_p2 = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
        const double v = std::norm(signal.samples[i]);
        sum += v;
        if (v > max_p2) max_p2 = v;
        p2.push_back(static_cast<float>(v));
    }
    return papr_from_powers(p2, sum, max_p2, signal.n_symbols);
}

PaprEstimate measure_papr_run(const TrellisModel& t, const PruneSet* prune,
                              std::int64_t n_symbols, std::uint64_t seed) {
    const int guard = 2 * t.pulse.D;
    if (n_symbols <= 2 * guard)
        throw std::invalid_argument("run shorter than twice the guard interval");
    const int osf = t.osf();
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> dist(0, t.M() - 1);

    std::vector<float> p2;
    p2.reserve(static_cast<std::size_t>(n_symbols - 2 * guard) * static_cast<std::size_t>(osf));
    std::vector<cplx> seg(static_cast<std::size_t>(osf));
    double sum = 0.0, max_p2 = 0.0;
    std::uint64_t state = kInitialState;
    for (std::int64_t k = 0; k < n_symbols; ++k) {
        const int xr = remap(t, prune, state, dist(rng));
        edge_waveform_into(t, state, xr, seg.data());
        state = next_state(t, state, xr);
        if (k >= guard && k < n_symbols - guard) {
            for (int q = 0; q < osf; ++q) {
                const double v = std::norm(seg[static_cast<std::size_t>(q)]);
                sum += v;
                if (v > max_p2) max_p2 = v;
                p2.push_back(static_cast<float>(v));
            }
        }
    }
    return papr_from_powers(p2, sum, max_p2, n_symbols);
}

ChannelParams ChannelParams::from_es(double es, double es_n0_db, std::uint64_t seed) {
    if (!(es > 0.0)) throw NumericError("non-positive signal energy");
    ChannelParams p;
    p.es_n0_db = es_n0_db;
    p.es = es;
    p.n0 = es / std::pow(10.0, es_n0_db / 10.0);
    p.seed = seed;
    return p;
}

Signal add_awgn(const Signal& signal, const ChannelParams& params) {
    if (!(params.n0 >= 0.0)) throw NumericError("negative noise variance");
    Signal out = signal;
    if (params.n0 == 0.0) return out;
    std::mt19937_64 rng(params.seed);
    std::normal_distribution<double> gauss(0.0, std::sqrt(params.n0 / 2.0));
    for (cplx& s : out.samples) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        s += cplx(re, im);
    }
    return out;
}

double calibrate_es(const TrellisModel& t, const PruneSet* prune, std::int64_t n_symbols,
                    std::uint64_t seed) {
    if (n_symbols < 10000) throw std::invalid_argument("calibration needs at least 1e4 symbols");
    const int guard = 2 * t.pulse.D;
    const int osf = t.osf();
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> dist(0, t.M() - 1);
    std::vector<cplx> seg(static_cast<std::size_t>(osf));
    double sum = 0.0;
    std::uint64_t state = kInitialState;
    for (std::int64_t k = 0; k < n_symbols; ++k) {
        const int xr = remap(t, prune, state, dist(rng));
        edge_waveform_into(t, state, xr, seg.data());
        state = next_state(t, state, xr);
        if (k >= guard && k < n_symbols - guard)
            for (int q = 0; q < osf; ++q) sum += std::norm(seg[static_cast<std::size_t>(q)]);
    }
    return sum / static_cast<double>(n_symbols - 2 * guard);
}

}  // namespace prunetx
