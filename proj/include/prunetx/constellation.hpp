#pragma once

#include <complex>
#include <vector>

namespace prunetx {

using cplx = std::complex<double>;

enum class ModKind { QPSK, QAM16, Custom };

const char* to_string(ModKind kind);

// Unit-average-energy symbol alphabet. The index -> point map is fixed:
// built-in sets carry a per-axis Gray label so adjacent points differ in one
// bit, and symbol index i always denotes points[i].
struct Constellation {
    ModKind kind = ModKind::Custom;
    std::vector<cplx> points;
    int M = 0;

    static Constellation make(ModKind kind);

    // Arbitrary unit-energy point set, used for small test models (e.g. a
    // binary alphabet) that the built-in kinds do not cover.
    static Constellation custom(std::vector<cplx> pts);

    double min_distance() const;
};

}  // namespace prunetx
