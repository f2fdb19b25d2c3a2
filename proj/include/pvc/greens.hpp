#pragma once

// Green's function, Robin function and their gradients for a domain given by
// a conformal map, plus both two-vortex Hamiltonians.
//
// Gradients are encoded as g = d1 f + i d2 f, so the perpendicular gradient
// is i g.

#include "pvc/domain.hpp"
#include "pvc/state.hpp"

namespace pvc {

struct GreenParts {
    double G;        // full Green's function
    double gamma;    // regular part: G - (1/2pi) ln|x - y|
    double robin_x;  // gamma(x, x)
};

/// Throws CoincidenceError when x and y coincide (G is singular there).
GreenParts green_parts(const Domain& d, cplx x, cplx y);
double gamma(const Domain& d, cplx x, cplx y);
double robin(const Domain& d, cplx x);
cplx grad1_gamma(const Domain& d, cplx x, cplx y);
cplx grad_robin(const Domain& d, cplx x);

/// Everything the two-vortex vector field needs from one kernel call.
struct PairGradients {
    cplx grad_robin1, grad_robin2;  // grad of the Robin function at z1, z2
    cplx g12, g21;                  // grad_1 gamma(z1, z2), grad_1 gamma(z2, z1)
    cplx phi1, phi2;
};
PairGradients pair_gradients(const Domain& d, cplx z1, cplx z2);

struct LocalModel {
    cplx c0;    // phi'''(0) / (6 pi phi'(0))
    double c1;  // |phi'(0)|^2 / (2 pi)
};

/// Throws NotStationaryError unless |phi''(0)| <= 1e-10 |phi'(0)|.
LocalModel local_model(const Domain& d);

double hamiltonian(const Domain& d, const VortexState& s);
double reduced_hamiltonian(const Domain& d, const ReducedState& r, Strengths a);

}  // namespace pvc
