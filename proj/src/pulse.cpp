#include "prunetx/pulse.hpp"

#include <cmath>
#include <numbers>

#include "prunetx/errors.hpp"

namespace prunetx {

namespace {
constexpr double kPi = std::numbers::pi;

// Limit at |t| = 1/(8*alpha*W), where both the bracket and the denominator
// of the RRC formula vanish. One l'Hopital pass with theta = pi/(4*alpha)
// gives a W-independent bracket:
//   p(t*) = sqrt(2W) * [ (1+a)/2 * sin(theta + pi/4)
//                        - (2a/pi) * ((theta - pi/4) cos(theta - pi/4)
//                                     - sin(theta - pi/4)) ]
double rrc_singular_value(double alpha, double W) {
    const double theta = kPi / (4.0 * alpha);
    const double bracket =
        0.5 * (1.0 + alpha) * std::sin(theta + kPi / 4.0) -
        (2.0 * alpha / kPi) *
            ((theta - kPi / 4.0) * std::cos(theta - kPi / 4.0) - std::sin(theta - kPi / 4.0));
    return std::sqrt(2.0 * W) * bracket;
}

}  // namespace

double rrc_value(double t, double alpha, double W) {
    const double root = std::sqrt(2.0 * W);
    const double u = 2.0 * kPi * W * t;
    // t -> 0 limit (covers the alpha = 0 sinc limit as well)
    if (std::abs(u) < 1e-12) return root * (1.0 - alpha + 4.0 * alpha / kPi);
    const double x = 8.0 * alpha * W * t;
    const double den = 1.0 - x * x;
    if (std::abs(den) < 1e-7) return rrc_singular_value(alpha, W);
    const double num = std::sin((1.0 - alpha) * u) / u + (4.0 * alpha / kPi) * std::cos((1.0 + alpha) * u);
    return root * num / den;
}

PulseShape build_pulse(double alpha, int D, int osf) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must be in [0,1]");
    if (D < 1) throw ConfigError("pulse delay D must be a positive integer");
    if (osf < 2) throw ConfigError("oversampling factor must be >= 2");

    PulseShape p;
    p.alpha = alpha;
    p.D = D;
    p.osf = osf;
    p.taps.resize(static_cast<std::size_t>(p.length()));
    double energy = 0.0;
    for (int n = 0; n < p.length(); ++n) {
        const double t = static_cast<double>(n) / osf - D * PulseShape::T;
        const double v = rrc_value(t, alpha, PulseShape::W);
        p.taps[static_cast<std::size_t>(n)] = v;
        energy += v * v;
    }
    if (!(energy > 0.0) || !std::isfinite(energy)) throw NumericError("pulse energy degenerate");
    const double scale = 1.0 / std::sqrt(energy);
    for (double& h : p.taps) h *= scale;
    return p;
}

}  // namespace prunetx
