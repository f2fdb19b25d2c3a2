#include "pvc/greens.hpp"

#include <cmath>

#include "pvc/errors.hpp"

namespace pvc {

namespace {

constexpr double kInvTwoPi = 1.0 / kTwoPi;

// conj of grad_1 gamma(x, y) without the 1/2pi factor.
cplx conj_grad1(cplx e, cplx q, cplx dfx, cplx fx, cplx fy) {
    const cplx cfy = std::conj(fy);
    return e / q - dfx * cfy / (fx * cfy - 1.0);
}

// conj of grad_1 gamma(x, x) without the 1/2pi factor.
cplx conj_grad1_diag(cplx f, cplx df, cplx d2f) {
    return d2f / (2.0 * df) + df * std::conj(f) / (1.0 - std::norm(f));
}

void require_distinct(cplx x, cplx y) {
    if (std::abs(x - y) < 1e-14 * std::max(1.0, std::abs(x))) throw CoincidenceError("the two points coincide");
}

}  // namespace

double gamma(const Domain& d, cplx x, cplx y) {
    const PairJet p = d.pair(x, y);
    d.require_interior(x, p.fx);
    d.require_interior(y, p.fy);
    return kInvTwoPi * (std::log(std::abs(p.q)) - std::log(std::abs(1.0 - p.fx * std::conj(p.fy))));
}

double robin(const Domain& d, cplx x) {
    const Jet j = d.jet(x);
    d.require_interior(x, j.f);
    return kInvTwoPi * (std::log(std::abs(j.df)) - std::log1p(-std::norm(j.f)));
}

GreenParts green_parts(const Domain& d, cplx x, cplx y) {
    require_distinct(x, y);
    const double g = gamma(d, x, y);
    return {g + kInvTwoPi * std::log(std::abs(x - y)), g, robin(d, x)};
}

cplx grad1_gamma(const Domain& d, cplx x, cplx y) {
    const PairJet p = d.pair(x, y);
    d.require_interior(x, p.fx);
    d.require_interior(y, p.fy);
    return kInvTwoPi * std::conj(conj_grad1(p.exy, p.q, p.dfx, p.fx, p.fy));
}

cplx grad_robin(const Domain& d, cplx x) {
    const Jet j = d.jet(x);
    d.require_interior(x, j.f);
    return 2.0 * kInvTwoPi * std::conj(conj_grad1_diag(j.f, j.df, j.d2f));
}

PairGradients pair_gradients(const Domain& d, cplx z1, cplx z2) {
    const PairJet p = d.pair(z1, z2);
    d.require_interior(z1, p.fx);
    d.require_interior(z2, p.fy);
    PairGradients g;
    g.grad_robin1 = 2.0 * kInvTwoPi * std::conj(conj_grad1_diag(p.fx, p.dfx, p.d2fx));
    g.grad_robin2 = 2.0 * kInvTwoPi * std::conj(conj_grad1_diag(p.fy, p.dfy, p.d2fy));
    g.g12 = kInvTwoPi * std::conj(conj_grad1(p.exy, p.q, p.dfx, p.fx, p.fy));
    g.g21 = kInvTwoPi * std::conj(conj_grad1(p.eyx, p.q, p.dfy, p.fy, p.fx));
    g.phi1 = p.fx;
    g.phi2 = p.fy;
    return g;
}

LocalModel local_model(const Domain& d) {
    const cplx d1 = d.dphi0();
    if (std::abs(d.d2phi0()) > 1e-10 * std::abs(d1)) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "0 is not a stationary point: |phi''(0)| = %.6g", std::abs(d.d2phi0()));
        throw NotStationaryError(buf);
    }
    return {d.d3phi0() / (6.0 * kPi * d1), std::norm(d1) / kTwoPi};
}

namespace {

// Robin values at both points and gamma(z1, z2) from a single kernel call.
struct PairEnergies {
    double r1, r2, g12;
};

PairEnergies pair_energies(const Domain& d, cplx z1, cplx z2) {
    require_distinct(z1, z2);
    const PairJet p = d.pair(z1, z2);
    d.require_interior(z1, p.fx);
    d.require_interior(z2, p.fy);
    return {kInvTwoPi * (std::log(std::abs(p.dfx)) - std::log1p(-std::norm(p.fx))),
            kInvTwoPi * (std::log(std::abs(p.dfy)) - std::log1p(-std::norm(p.fy))),
            kInvTwoPi * (std::log(std::abs(p.q)) - std::log(std::abs(1.0 - p.fx * std::conj(p.fy))))};
}

}  // namespace

double hamiltonian(const Domain& d, const VortexState& s) {
    const PairEnergies e = pair_energies(d, s.z1, s.z2);
    return 0.5 * s.a1 * s.a1 * e.r1 + 0.5 * s.a2 * s.a2 * e.r2 +
           s.a1 * s.a2 * (e.g12 + kInvTwoPi * std::log(std::abs(s.z1 - s.z2)));
}

double reduced_hamiltonian(const Domain& d, const ReducedState& r, Strengths a) {
    const VortexState s = lift(r, a);
    const PairEnergies e = pair_energies(d, s.z1, s.z2);
    const double total = a.total();
    return a.a1 * a.a2 / (kTwoPi * total) * std::log(std::abs(r.xi)) +
           (0.5 * a.a1 * a.a1 * e.r1 + 0.5 * a.a2 * a.a2 * e.r2 + a.a1 * a.a2 * e.g12) / total;
}

}  // namespace pvc
