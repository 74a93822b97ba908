#pragma once

#include <vector>

namespace prunetx {

// Truncated causal root-raised-cosine pulse sampled at osf points per symbol
// period. Times are in symbol periods: T = 1 and the ideal Nyquist bandwidth
// W = 1/(2T) = 1/2, which leaves the roll-off alpha as the only shape
// parameter. Taps are normalized to unit discrete energy.
struct PulseShape {
    double alpha = 0.0;
    int D = 0;    // group delay in symbols; truncation length is 2*D
    int osf = 0;  // samples per symbol period
    std::vector<double> taps;  // h[0 .. 2*D*osf], h[n] sampled at t = n/osf

    static constexpr double T = 1.0;
    static constexpr double W = 0.5;

    int length() const { return 2 * D * osf + 1; }
    int center() const { return D * osf; }
};

// Continuous-time RRC pulse value. Total on alpha in [0,1], W > 0: the
// removable singularities (t = 0 and |t| = 1/(8*alpha*W)) return their
// analytic limits. Even in t.
double rrc_value(double t, double alpha, double W);

PulseShape build_pulse(double alpha, int D, int osf);

}  // namespace prunetx
