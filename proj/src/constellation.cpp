#include "prunetx/constellation.hpp"

#include <cmath>
#include <limits>

#include "prunetx/errors.hpp"

namespace prunetx {

const char* to_string(ModKind kind) {
    switch (kind) {
        case ModKind::QPSK: return "qpsk";
        case ModKind::QAM16: return "qam16";
        case ModKind::Custom: return "custom";
    }
    return "?";
}

namespace {

void check_invariants(const Constellation& c) {
    double energy = 0.0;
    for (const cplx& p : c.points) energy += std::norm(p);
    energy /= static_cast<double>(c.M);
    if (std::abs(energy - 1.0) > 1e-12)
        throw ConfigError("constellation average energy " + std::to_string(energy) + " != 1");
    for (int i = 0; i < c.M; ++i)
        for (int j = i + 1; j < c.M; ++j)
            if (c.points[i] == c.points[j])
                throw ConfigError("constellation points not distinct");
}

}  // namespace

Constellation Constellation::make(ModKind kind) {
    Constellation c;
    c.kind = kind;
    if (kind == ModKind::QPSK) {
        const double s = 1.0 / std::sqrt(2.0);
        c.M = 4;
        c.points.resize(4);
        // bit 0 -> I sign, bit 1 -> Q sign
        for (int i = 0; i < 4; ++i) {
            const double re = (i & 1) ? -s : s;
            const double im = (i & 2) ? -s : s;
            c.points[i] = cplx(re, im);
        }
    } else if (kind == ModKind::QAM16) {
        const double s = 1.0 / std::sqrt(10.0);
        // Gray-coded 4-PAM per axis: 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3
        static const double lvl[4] = {-3.0, -1.0, 3.0, 1.0};
        c.M = 16;
        c.points.resize(16);
        for (int i = 0; i < 16; ++i)
            c.points[i] = cplx(lvl[i & 3] * s, lvl[(i >> 2) & 3] * s);
    } else {
        throw ConfigError("unsupported constellation kind");
    }
    check_invariants(c);
    return c;
}

Constellation Constellation::custom(std::vector<cplx> pts) {
    Constellation c;
    c.kind = ModKind::Custom;
    c.M = static_cast<int>(pts.size());
    c.points = std::move(pts);
    if (c.M < 2) throw ConfigError("custom constellation needs at least 2 points");
    check_invariants(c);
    return c;
}

double Constellation::min_distance() const {
    double d2 = std::numeric_limits<double>::infinity();
    for (int i = 0; i < M; ++i)
        for (int j = i + 1; j < M; ++j)
            d2 = std::min(d2, std::norm(points[i] - points[j]));
    return std::sqrt(d2);
}

}  // namespace prunetx
