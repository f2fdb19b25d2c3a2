#include "pvc/state.hpp"

#include <cmath>

#include "pvc/errors.hpp"

namespace pvc {

namespace {

void require_reducible(double a1, double a2) {
    if (a1 + a2 == 0.0) throw PreconditionError("degenerate strengths: a1 + a2 = 0 has no center of vorticity");
    if (!(a1 * a2 > 0.0)) throw PreconditionError("the (B, xi) reduction needs a1 a2 > 0");
}

}  // namespace

ReducedState reduce(const VortexState& s) {
    require_reducible(s.a1, s.a2);
    const double a = s.a1 + s.a2;
    return {(s.a1 * s.z1 + s.a2 * s.z2) / a, (std::sqrt(s.a1 * s.a2) / a) * (s.z1 - s.z2)};
}

VortexState lift(const ReducedState& r, Strengths a, double t) {
    require_reducible(a.a1, a.a2);
    const double root = std::sqrt(a.a1 * a.a2);
    VortexState s;
    s.t = t;
    s.a1 = a.a1;
    s.a2 = a.a2;
    s.z1 = r.B + (a.a2 / root) * r.xi;
    s.z2 = r.B - (a.a1 / root) * r.xi;
    return s;
}

}  // namespace pvc
