#pragma once

// Stationary points, linear stability, the normal-form expansion of the
// reduced Hamiltonian and the confinement check built on it.

#include <array>
#include <optional>
#include <string>

#include "pvc/domain.hpp"
#include "pvc/series.hpp"
#include "pvc/state.hpp"

namespace pvc {

/// Newton iteration for a critical point of the Robin function near `guess`.
/// The residual is phi''/(2 phi') + phi' conj(phi) / (1 - |phi|^2), i.e.
/// half of phi_x''/phi_x' for the map re-centred at x; it vanishes exactly
/// where the re-centred map has zero second derivative.
/// Throws NumericalError (no convergence in 50 iterations) or BoundaryError.
cplx find_stationary(const Domain& d, cplx guess);

enum class StabilityClass { Stable, Critical, Unstable };
const char* to_string(StabilityClass c);

struct StabilityReport {
    cplx stationary_point{};
    double margin = 0;    // 2|phi'(0)|^3 - |phi'''(0)|
    double tol_band = 0;  // 1e-9 * 2|phi'(0)|^3
    StabilityClass cls = StabilityClass::Stable;
    cplx c0{};
    double c1 = 0;
    double omega_c = 0;  // NaN when unstable
    double omega = 0;    // a * omega_c
    double a = 2;        // total strength used for omega
};

/// Requires 0 to be stationary (NotStationaryError otherwise).
StabilityReport classify(const Domain& d, Strengths s = {});

struct NormalFrame {
    std::array<std::array<double, 2>, 2> L{};
    cplx l1, l2;  // L b = l1 b + conj(l2) conj(b)

    cplx apply(cplx b) const { return l1 * b + std::conj(l2) * std::conj(b); }
    /// b with L b = B.
    cplx solve(cplx B) const;
};

/// Requires a stable report.
NormalFrame normal_frame(const StabilityReport& r);

struct HamiltonianExpansion {
    Poly4 poly;     // H - lambda ln(|xi|^2 / 2) in (b, conj b, xi, conj xi), total degree <= D
    double lambda;  // a1 a2 / (4 pi a)
    NormalFrame frame;
};

/// Requires a stable class, a1 a2 > 0 and degree >= 6.
HamiltonianExpansion hamiltonian_expansion(const Domain& d, Strengths s, int degree = 8);

ActionPoly action_coefficients(const Poly4& p, double lambda);

struct FrequencyHessian {
    std::array<double, 2> omega_star;  // (dh/dI_xi, dh/dI_b)
    std::array<std::array<double, 2>, 2> hessian;
    double hess_det;
};

/// Requires I_xi > 0.
FrequencyHessian frequency_and_hessian(const ActionPoly& h, double i_xi, double i_b);

struct DiophantineResult {
    bool pass = true;
    std::array<int, 2> witness{};  // worst k when !pass
    double worst_ratio = 0;        // min over k of |omega.k| |k|^nu / C
};

/// Exhaustive over 0 < |k|_inf <= kmax, one k per +/- pair. On failure the
/// witness minimizes |omega.k| |k|^nu (ties: smaller |k|, then lexicographic).
DiophantineResult diophantine_check(std::array<double, 2> omega, double C, double nu, int kmax);

struct VerdictParams {
    double C = 1e-3;
    double nu = 2.0;
    int kmax = 50;
    int degree = 8;
};

struct Verdict {
    double i_xi0 = 0, i_b0 = 0;
    std::array<double, 2> omega_star{};
    double hess_det = 0;
    DiophantineResult diophantine;
    bool confined = false;
    VerdictParams params;
    StabilityReport report;
};

Verdict confinement_verdict(const Domain& d, Strengths s, cplx z1, cplx z2, const VerdictParams& p = {});

std::string to_json(const StabilityReport& r);
std::string to_json(const Verdict& v);
/// Rows "m,n,C" for every averaged term, m and n even.
std::string to_csv(const ActionPoly& h);

}  // namespace pvc
