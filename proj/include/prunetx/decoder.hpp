#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "prunetx/pruning.hpp"
#include "prunetx/trellis.hpp"

namespace prunetx {

struct ObservationBlock {
    std::span<const cplx> y;  // osf samples for one symbol interval
    double n0 = 0.0;
};

enum class Conditioning { PastOnly, PastAndFuture };

struct AppVector {
    std::vector<double> probs;  // length M, sums to 1
    Conditioning conditioning = Conditioning::PastOnly;
};

// Gaussian branch metric -sum_q |y_q - w_q|^2 / n0 (up to a constant shared
// by all inputs at the same step) for the realized edge of (state, input).
double edge_log_likelihood(const TrellisModel& t, const PruneSet* prune, std::uint64_t state,
                           int input, const ObservationBlock& obs);

// Decision-feedback forward step: the fed-back inputs pin the state, so the
// APP costs O(M * osf * D) per symbol regardless of the state count.
AppVector forward_app(const TrellisModel& t, const PruneSet* prune, std::uint64_t known_state,
                      const ObservationBlock& obs, std::span<const double> prior);

inline constexpr std::uint64_t kFullBcjrMaxStates = 1ull << 12;

// Full decision-feedback BCJR: backward recursion from the end of the
// observation block, forward state pinned by the known prefix. target is the
// 0-based symbol index; known_prefix holds the true inputs before it. Only
// for small models (state count guard); larger models use forward_app.
AppVector full_dfa_bcjr(const TrellisModel& t, const PruneSet* prune, std::span<const cplx> obs,
                        double n0, std::span<const std::uint8_t> known_prefix,
                        std::int64_t target, std::span<const double> prior = {});

// Cached tables for repeated BCJR passes over one small model: per-edge
// waveforms, realized successors, and input multiplicities.
class SmallModelBcjr {
  public:
    SmallModelBcjr(const TrellisModel& t, const PruneSet* prune);

    const TrellisModel& model() const { return *t_; }

    // Log-likelihoods of all edges against one observation block.
    void edge_lls(std::span<const cplx> y, double n0, double* out) const;

    // One backward step: beta_out(s) = logsumexp over inputs x of
    // log(P(x)) + ll(edge) + beta_in(next(edge)), max-normalized.
    void backward_step(const double* edge_ll, const double* beta_in, double* beta_out) const;

    std::uint32_t realized_next(std::uint64_t edge) const { return next_[edge]; }
    const cplx* waveform(std::uint64_t edge) const {
        return wave_.data() + edge * static_cast<std::uint64_t>(t_->osf());
    }
    int multiplicity(std::uint64_t edge) const { return mult_[edge]; }
    int remapped(std::uint64_t edge) const { return remap_[edge]; }

  private:
    const TrellisModel* t_;
    std::vector<cplx> wave_;          // num_edges * osf
    std::vector<std::uint32_t> next_; // realized successor per edge
    std::vector<std::uint8_t> mult_;  // inputs remapping onto each edge
    std::vector<double> log_mult_;    // log(mult/M), -inf for pruned edges
    std::vector<int> remap_;          // remapped input per edge
};

enum class FeedbackMode { Genie, HardDecision };

struct DecodeResult {
    std::vector<std::uint8_t> decisions;     // argmax APP per symbol
    std::vector<double> true_symbol_logp;    // log2 APP of the true input
};

// Forward-only decode of a full stream; feedback selects what drives the
// state: the true inputs (genie) or the running hard decisions.
DecodeResult decode_stream_forward(const TrellisModel& t, const PruneSet* prune,
                                   std::span<const cplx> obs, double n0,
                                   std::span<const std::uint8_t> true_inputs,
                                   FeedbackMode feedback = FeedbackMode::Genie);

}  // namespace prunetx
