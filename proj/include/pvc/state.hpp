#pragma once

#include "pvc/types.hpp"

namespace pvc {

struct Strengths {
    double a1 = 1.0, a2 = 1.0;
    double total() const { return a1 + a2; }
};

struct VortexState {
    double t = 0.0;
    cplx z1, z2;
    double a1 = 1.0, a2 = 1.0;

    Strengths strengths() const { return {a1, a2}; }
};

/// Center of vorticity B = (a1 z1 + a2 z2)/(a1 + a2) and scaled separation
/// xi = sqrt(a1 a2)/(a1 + a2) (z1 - z2).
struct ReducedState {
    cplx B, xi;
};

/// Requires a1 + a2 != 0 and a1 a2 > 0; throws PreconditionError otherwise.
ReducedState reduce(const VortexState& s);
VortexState lift(const ReducedState& r, Strengths a, double t = 0.0);

}  // namespace pvc
