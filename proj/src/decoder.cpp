#include "prunetx/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "prunetx/errors.hpp"

namespace prunetx {

namespace {

void check_obs(const TrellisModel& t, const ObservationBlock& obs) {
    if (static_cast<int>(obs.y.size()) != t.osf())
        throw std::invalid_argument("observation block length != osf");
    if (!(obs.n0 > 0.0))
        throw NumericError("degenerate likelihood: n0 must be positive");
}

// Normalized probabilities from unnormalized log scores (max-subtracted).
AppVector app_from_scores(std::span<const double> scores, Conditioning cond) {
    AppVector app;
    app.conditioning = cond;
    app.probs.resize(scores.size());
    double mx = -std::numeric_limits<double>::infinity();
    for (double s : scores) mx = std::max(mx, s);
    double sum = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const double v = std::exp(scores[i] - mx);
        app.probs[i] = v;
        sum += v;
    }
    for (double& p : app.probs) p /= sum;
    return app;
}

double residual_ll(std::span<const cplx> y, const cplx* w, int osf, double n0) {
    double d2 = 0.0;
    for (int q = 0; q < osf; ++q) d2 += std::norm(y[static_cast<std::size_t>(q)] - w[q]);
    return -d2 / n0;
}

}  // namespace

double edge_log_likelihood(const TrellisModel& t, const PruneSet* prune, std::uint64_t state,
                           int input, const ObservationBlock& obs) {
    check_obs(t, obs);
    const int xr = remap(t, prune, state, input);
    std::vector<cplx> w(static_cast<std::size_t>(t.osf()));
    edge_waveform_into(t, state, xr, w.data());
    return residual_ll(obs.y, w.data(), t.osf(), obs.n0);
}

AppVector forward_app(const TrellisModel& t, const PruneSet* prune, std::uint64_t known_state,
                      const ObservationBlock& obs, std::span<const double> prior) {
    check_obs(t, obs);
    const int M = t.M();
    if (static_cast<int>(prior.size()) != M) throw std::invalid_argument("prior length != M");
    std::vector<double> scores(static_cast<std::size_t>(M));
    std::vector<cplx> w(static_cast<std::size_t>(t.osf()));
    for (int x = 0; x < M; ++x) {
        const int xr = remap(t, prune, known_state, x);
        edge_waveform_into(t, known_state, xr, w.data());
        scores[static_cast<std::size_t>(x)] =
            std::log(prior[static_cast<std::size_t>(x)]) + residual_ll(obs.y, w.data(), t.osf(), obs.n0);
    }
    return app_from_scores(scores, Conditioning::PastOnly);
}

SmallModelBcjr::SmallModelBcjr(const TrellisModel& t, const PruneSet* prune) : t_(&t) {
    if (t.num_states > kFullBcjrMaxStates)
        throw ResourceError("full DFA-BCJR supports at most 2^12 states (" +
                            std::to_string(t.num_states) +
                            " requested); use the forward-only path instead");
    if (t.M() > 64) throw ResourceError("full DFA-BCJR supports at most 64 inputs per state");
    const auto m = static_cast<std::uint64_t>(t.M());
    const int osf = t.osf();
    wave_.resize(t.num_edges * static_cast<std::uint64_t>(osf));
    next_.resize(t.num_edges);
    mult_.assign(t.num_edges, 0);
    remap_.resize(t.num_edges);
    for (std::uint64_t s = 0; s < t.num_states; ++s)
        for (int x = 0; x < t.M(); ++x) {
            const std::uint64_t e = s * m + static_cast<std::uint64_t>(x);
            const int xr = remap(t, prune, s, x);
            remap_[e] = xr;
            const std::uint64_t er = s * m + static_cast<std::uint64_t>(xr);
            ++mult_[er];
            next_[e] = static_cast<std::uint32_t>(next_state(t, s, xr));
            edge_waveform_into(t, s, x, wave_.data() + e * static_cast<std::uint64_t>(osf));
        }
    log_mult_.resize(t.num_edges);
    for (std::uint64_t e = 0; e < t.num_edges; ++e)
        log_mult_[e] = mult_[e] == 0 ? -std::numeric_limits<double>::infinity()
                                     : std::log(static_cast<double>(mult_[e]) /
                                                static_cast<double>(t.M()));
}

void SmallModelBcjr::edge_lls(std::span<const cplx> y, double n0, double* out) const {
    const int osf = t_->osf();
    for (std::uint64_t e = 0; e < t_->num_edges; ++e) {
        // Pruned edges (multiplicity 0) never enter a recursion; skip them.
        if (mult_[e] == 0) {
            out[e] = -std::numeric_limits<double>::infinity();
            continue;
        }
        out[e] = residual_ll(y, wave_.data() + e * static_cast<std::uint64_t>(osf), osf, n0);
    }
}

void SmallModelBcjr::backward_step(const double* edge_ll, const double* beta_in,
                                   double* beta_out) const {
    const auto m = static_cast<std::uint64_t>(t_->M());
    double mx = -std::numeric_limits<double>::infinity();
    double terms[64];
    for (std::uint64_t s = 0; s < t_->num_states; ++s) {
        // logsumexp over the realized edges leaving s, weighted by the
        // number of inputs collapsed onto each edge.
        double local_max = -std::numeric_limits<double>::infinity();
        int n_terms = 0;
        for (std::uint64_t x = 0; x < m; ++x) {
            const std::uint64_t e = s * m + x;
            if (mult_[e] == 0) continue;
            const double v = log_mult_[e] + edge_ll[e] + beta_in[next_[e]];
            terms[n_terms++] = v;
            local_max = std::max(local_max, v);
        }
        double sum = 0.0;
        for (int i = 0; i < n_terms; ++i) sum += std::exp(terms[i] - local_max);
        const double v = local_max + std::log(sum);
        beta_out[s] = v;
        mx = std::max(mx, v);
    }
    for (std::uint64_t s = 0; s < t_->num_states; ++s) beta_out[s] -= mx;
}

AppVector full_dfa_bcjr(const TrellisModel& t, const PruneSet* prune, std::span<const cplx> obs,
                        double n0, std::span<const std::uint8_t> known_prefix,
                        std::int64_t target, std::span<const double> prior) {
    const int osf = t.osf();
    if (obs.size() % static_cast<std::size_t>(osf) != 0)
        throw std::invalid_argument("observation length not a multiple of osf");
    const auto n = static_cast<std::int64_t>(obs.size() / static_cast<std::size_t>(osf));
    if (target < 0 || target >= n) throw std::out_of_range("target symbol outside the block");
    if (static_cast<std::int64_t>(known_prefix.size()) != target)
        throw std::invalid_argument("known prefix must cover exactly the symbols before target");
    if (!(n0 > 0.0)) throw NumericError("degenerate likelihood: n0 must be positive");

    const int M = t.M();
    std::vector<double> uniform;
    if (prior.empty()) {
        uniform.assign(static_cast<std::size_t>(M), 1.0 / M);
        prior = uniform;
    }
    if (static_cast<int>(prior.size()) != M) throw std::invalid_argument("prior length != M");

    SmallModelBcjr engine(t, prune);

    // State pinned by the fed-back prefix.
    std::uint64_t s_known = kInitialState;
    for (std::uint8_t x : known_prefix) s_known = engine.realized_next(
        s_known * static_cast<std::uint64_t>(M) + static_cast<std::uint64_t>(x));

    // Backward recursion from the end of the block down to target+1.
    const std::uint64_t S = t.num_states;
    std::vector<double> beta(S, 0.0), beta_prev(S), lls(t.num_edges);
    for (std::int64_t j = n - 1; j > target; --j) {
        engine.edge_lls(obs.subspan(static_cast<std::size_t>(j) * static_cast<std::size_t>(osf),
                                    static_cast<std::size_t>(osf)),
                        n0, lls.data());
        beta_prev.swap(beta);
        engine.backward_step(lls.data(), beta_prev.data(), beta.data());
    }

    engine.edge_lls(obs.subspan(static_cast<std::size_t>(target) * static_cast<std::size_t>(osf),
                                static_cast<std::size_t>(osf)),
                    n0, lls.data());
    std::vector<double> scores(static_cast<std::size_t>(M));
    for (int x = 0; x < M; ++x) {
        const std::uint64_t e =
            s_known * static_cast<std::uint64_t>(M) + static_cast<std::uint64_t>(x);
        const std::uint64_t er =
            s_known * static_cast<std::uint64_t>(M) + static_cast<std::uint64_t>(engine.remapped(e));
        scores[static_cast<std::size_t>(x)] =
            std::log(prior[static_cast<std::size_t>(x)]) + lls[er] + beta[engine.realized_next(e)];
    }
    return app_from_scores(scores, Conditioning::PastAndFuture);
}

DecodeResult decode_stream_forward(const TrellisModel& t, const PruneSet* prune,
                                   std::span<const cplx> obs, double n0,
                                   std::span<const std::uint8_t> true_inputs,
                                   FeedbackMode feedback) {
    const int osf = t.osf();
    const auto n = static_cast<std::int64_t>(true_inputs.size());
    if (obs.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(osf))
        throw std::invalid_argument("observation length != n_symbols * osf");
    const int M = t.M();
    std::vector<double> prior(static_cast<std::size_t>(M), 1.0 / M);

    DecodeResult res;
    res.decisions.resize(static_cast<std::size_t>(n));
    res.true_symbol_logp.resize(static_cast<std::size_t>(n));
    std::uint64_t state = kInitialState;
    for (std::int64_t k = 0; k < n; ++k) {
        ObservationBlock blk{obs.subspan(static_cast<std::size_t>(k) * static_cast<std::size_t>(osf),
                                         static_cast<std::size_t>(osf)),
                             n0};
        const AppVector app = forward_app(t, prune, state, blk, prior);
        int best = 0;
        for (int x = 1; x < M; ++x)
            if (app.probs[static_cast<std::size_t>(x)] > app.probs[static_cast<std::size_t>(best)])
                best = x;
        res.decisions[static_cast<std::size_t>(k)] = static_cast<std::uint8_t>(best);
        res.true_symbol_logp[static_cast<std::size_t>(k)] =
            std::log2(app.probs[true_inputs[static_cast<std::size_t>(k)]]);
        const int fed = feedback == FeedbackMode::Genie
                            ? static_cast<int>(true_inputs[static_cast<std::size_t>(k)])
                            : best;
        state = next_state(t, state, remap(t, prune, state, fed));
    }
    return res;
}

}  // namespace prunetx
