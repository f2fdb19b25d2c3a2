#include "pvc/stability.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "pvc/errors.hpp"
#include "pvc/format.hpp"
#include "pvc/greens.hpp"

namespace pvc {

namespace {

struct Residual {
    cplx r;      // phi''/(2 phi') + phi' conj(phi) / (1 - |phi|^2)
    cplx dz;     // d r / dz
    double dzb;  // d r / d conj(z), real
};

Residual stationary_residual(const Domain& d, cplx z) {
    const UniSeries t = d.taylor_at(z, 3);
    const cplx p = t[0], d1 = t[1], d2 = 2.0 * t[2], d3 = 6.0 * t[3];
    d.require_interior(z, p);
    const double s = 1.0 - std::norm(p);
    const cplx pc = std::conj(p);
    Residual out;
    out.r = d2 / (2.0 * d1) + d1 * pc / s;
    out.dz = (d3 * d1 - d2 * d2) / (2.0 * d1 * d1) + d2 * pc / s + (d1 * pc) * (d1 * pc) / (s * s);
    out.dzb = std::norm(d1) / (s * s);
    return out;
}

}  // namespace

cplx find_stationary(const Domain& d, cplx guess) {
    cplx z = guess;
    Residual res = stationary_residual(d, z);
    for (int it = 0; it < 50; ++it) {
        if (std::abs(res.r) <= 0.5e-12) return z;
        // solve dz * a + conj(dz) * beta = -r for the real-linear Newton step
        const cplx a = res.dz;
        const double beta = res.dzb;
        const double det = std::norm(a) - beta * beta;
        if (det == 0.0) break;
        cplx step = (-res.r * std::conj(a) + beta * std::conj(res.r)) / det;
        // damped: halve until the residual decreases and the point stays inside
        for (int k = 0; k < 30; ++k) {
            try {
                const Residual trial = stationary_residual(d, z + step);
                if (std::abs(trial.r) < std::abs(res.r) || k == 29) {
                    z += step;
                    res = trial;
                    break;
                }
            } catch (const BoundaryError&) {
                if (k == 29) throw;
            } catch (const DomainError&) {
                if (k == 29) throw;
            }
            step *= 0.5;
        }
    }
    if (std::abs(res.r) <= 0.5e-12) return z;
    throw NumericalError("stationary point search did not converge in 50 iterations");
}

const char* to_string(StabilityClass c) {
    switch (c) {
        case StabilityClass::Stable: return "stable";
        case StabilityClass::Critical: return "critical";
        case StabilityClass::Unstable: return "unstable";
    }
    return "?";
}

StabilityReport classify(const Domain& d, Strengths s) {
    const LocalModel m = local_model(d);
    StabilityReport r;
    const double d1 = std::abs(d.dphi0());
    r.margin = 2.0 * d1 * d1 * d1 - std::abs(d.d3phi0());
    r.tol_band = 1e-9 * 2.0 * d1 * d1 * d1;
    r.cls = r.margin > r.tol_band ? StabilityClass::Stable
                                  : (std::abs(r.margin) <= r.tol_band ? StabilityClass::Critical : StabilityClass::Unstable);
    r.c0 = m.c0;
    r.c1 = m.c1;
    r.a = s.total();
    if (r.cls == StabilityClass::Unstable) {
        r.omega_c = std::numeric_limits<double>::quiet_NaN();
    } else if (r.cls == StabilityClass::Critical) {
        r.omega_c = 0.0;
    } else {
        r.omega_c = std::sqrt(m.c1 * m.c1 - 2.25 * std::norm(m.c0));
    }
    r.omega = r.a * r.omega_c;
    return r;
}

cplx NormalFrame::solve(cplx B) const {
    // L is upper triangular
    const double y = B.imag() / L[1][1];
    const double x = (B.real() - L[0][1] * y) / L[0][0];
    return {x, y};
}

NormalFrame normal_frame(const StabilityReport& r) {
    if (r.cls != StabilityClass::Stable || !(r.omega_c > 0.0))
        throw PreconditionError(std::string("normal frame needs a stable stationary point, class is ") + to_string(r.cls));
    const double kappa = 1.5 * r.c0.real() + r.c1;
    NormalFrame f;
    f.L[0][0] = std::sqrt(r.omega_c / kappa);
    f.L[0][1] = -1.5 * r.c0.imag() / std::sqrt(r.omega_c * kappa);
    f.L[1][0] = 0.0;
    f.L[1][1] = -std::sqrt(kappa / r.omega_c);
    const cplx I{0.0, 1.0};
    f.l1 = 0.5 * (f.L[0][0] + f.L[1][1] - I * f.L[0][1]);
    f.l2 = 0.5 * (f.L[0][0] - f.L[1][1] - I * f.L[0][1]);
    return f;
}

namespace {

// (phi(x) - phi(y)) / (x - y) = sum_k c_k D_k with D_1 = 1, D_k = x D_{k-1} + y^{k-1}.
Poly4 divided_difference(const UniSeries& phi, const Poly4& x, const Poly4& y, int cap) {
    Poly4 Dk = Poly4::constant(1.0, cap);
    Poly4 ypow = Poly4::constant(1.0, cap);
    Poly4 q = phi[1] * Dk;
    for (int k = 2; k <= cap + 1; ++k) {
        ypow = ypow * y;
        Dk = x * Dk + ypow;
        if (phi[k] != cplx{}) q = q + phi[k] * Dk;
    }
    return q;
}

}  // namespace

HamiltonianExpansion hamiltonian_expansion(const Domain& d, Strengths s, int degree) {
    if (degree < 6) throw PreconditionError("expansion degree must be at least 6");
    if (!(s.a1 * s.a2 > 0.0)) throw PreconditionError("the normal-form expansion needs a1 a2 > 0");
    const StabilityReport rep = classify(d, s);
    const NormalFrame f = normal_frame(rep);
    const int cap = degree;
    const double a = s.total();
    const UniSeries phi = d.taylor0().truncated(std::size_t(cap + 1));
    const UniSeries dphi = phi.derivative();

    const Poly4 b = Poly4::b(cap), bb = Poly4::bbar(cap), xi = Poly4::xi(cap);
    const Poly4 center = f.l1 * b + std::conj(f.l2) * bb;
    const Poly4 z1 = center + std::sqrt(s.a2 / s.a1) * xi;
    const Poly4 z2 = center - std::sqrt(s.a1 / s.a2) * xi;

    const Poly4 p1 = compose(phi, z1), p2 = compose(phi, z2);
    const Poly4 p1c = p1.conjugate(), p2c = p2.conjugate();
    const Poly4 one = Poly4::constant(1.0, cap);

    auto robin = [&](const Poly4& z, const Poly4& p, const Poly4& pc) {
        const Poly4 lp = log_unit(compose(dphi, z));
        return (1.0 / kFourPi) * (lp + lp.conjugate()) - (1.0 / kTwoPi) * log_unit(one - p * pc);
    };
    const Poly4 lq = log_unit(divided_difference(phi, z1, z2, cap));
    const Poly4 g12 = (1.0 / kFourPi) * (lq + lq.conjugate()) -
                      (1.0 / kFourPi) * (log_unit(one - p1 * p2c) + log_unit(one - p1c * p2));

    const double lambda = s.a1 * s.a2 / (kFourPi * a);
    Poly4 h = (1.0 / a) * (0.5 * s.a1 * s.a1 * robin(z1, p1, p1c) + 0.5 * s.a2 * s.a2 * robin(z2, p2, p2c) +
                           s.a1 * s.a2 * g12);
    h = h + lambda * std::log(2.0);
    return {h, lambda, f};
}

ActionPoly action_coefficients(const Poly4& p, double lambda) {
    ActionPoly h = angle_average(p);
    h.lambda = lambda;
    return h;
}

FrequencyHessian frequency_and_hessian(const ActionPoly& h, double i_xi, double i_b) {
    if (!(i_xi > 0.0)) throw PreconditionError("I_xi must be positive");
    double gx = h.lambda / i_xi, gb = 0.0;
    double hxx = -h.lambda / (i_xi * i_xi), hxb = 0.0, hbb = 0.0;
    for (const auto& [kl, c] : h.terms) {
        const auto [k, l] = kl;
        auto pw = [](double x, int n) { return n < 0 ? 0.0 : std::pow(x, n); };
        if (k >= 1) gx += c * k * pw(i_xi, k - 1) * pw(i_b, l);
        if (l >= 1) gb += c * l * pw(i_xi, k) * pw(i_b, l - 1);
        if (k >= 2) hxx += c * k * (k - 1) * pw(i_xi, k - 2) * pw(i_b, l);
        if (k >= 1 && l >= 1) hxb += c * k * l * pw(i_xi, k - 1) * pw(i_b, l - 1);
        if (l >= 2) hbb += c * l * (l - 1) * pw(i_xi, k) * pw(i_b, l - 2);
    }
    FrequencyHessian out;
    out.omega_star = {gx, gb};
    out.hessian = {{{hxx, hxb}, {hxb, hbb}}};
    out.hess_det = hxx * hbb - hxb * hxb;
    return out;
}

DiophantineResult diophantine_check(std::array<double, 2> omega, double C, double nu, int kmax) {
    if (!(C > 0.0) || !(nu > 0.0) || kmax < 1) throw PreconditionError("need C > 0, nu > 0, Kmax >= 1");
    DiophantineResult res;
    double best = std::numeric_limits<double>::infinity();
    long best_norm = 0;
    for (int k1 = 0; k1 <= kmax; ++k1) {
        for (int k2 = -kmax; k2 <= kmax; ++k2) {
            if (k1 == 0 && k2 <= 0) continue;  // one representative of each +/- pair
            const long n2 = long(k1) * k1 + long(k2) * k2;
            const double dot = std::abs(omega[0] * k1 + omega[1] * k2);
            const double ratio = dot * std::pow(double(n2), 0.5 * nu) / C;
            if (ratio < best || (ratio == best && n2 < best_norm)) {
                best = ratio;
                best_norm = n2;
                res.witness = {k1, k2};
            }
        }
    }
    res.worst_ratio = best;
    res.pass = best >= 1.0;
    if (res.pass) res.witness = {0, 0};
    return res;
}

Verdict confinement_verdict(const Domain& d, Strengths s, cplx z1, cplx z2, const VerdictParams& p) {
    if (s.total() == 0.0) throw PreconditionError("degenerate strengths a1 + a2 = 0");
    if (!(s.a1 * s.a2 > 0.0)) throw PreconditionError("mixed-sign strengths are not supported by the verdict");
    d.require_interior(z1);
    d.require_interior(z2);
    const ReducedState r = reduce({0.0, z1, z2, s.a1, s.a2});
    if (r.xi == 0.0) throw PreconditionError("coincident initial positions (xi = 0)");

    Verdict v;
    v.params = p;
    v.report = classify(d, s);
    const HamiltonianExpansion ex = hamiltonian_expansion(d, s, p.degree);
    const cplx b = ex.frame.solve(r.B);
    v.i_xi0 = 0.5 * std::norm(r.xi);
    v.i_b0 = 0.5 * std::norm(b);
    const ActionPoly h = action_coefficients(ex.poly, ex.lambda);
    const FrequencyHessian fh = frequency_and_hessian(h, v.i_xi0, v.i_b0);
    v.omega_star = fh.omega_star;
    v.hess_det = fh.hess_det;
    v.diophantine = diophantine_check(fh.omega_star, p.C, p.nu, p.kmax);
    v.confined = v.diophantine.pass && fh.hess_det != 0.0 && std::isfinite(fh.hess_det);
    return v;
}

std::string to_json(const StabilityReport& r) {
    std::ostringstream os;
    os << "{\"stationary_point\":" << fmt17(r.stationary_point) << ",\"margin\":" << fmt17(r.margin)
       << ",\"tol_band\":" << fmt17(r.tol_band) << ",\"class\":\"" << to_string(r.cls) << "\",\"c0\":" << fmt17(r.c0)
       << ",\"c1\":" << fmt17(r.c1) << ",\"omega_c\":" << fmt17(r.omega_c) << ",\"omega\":" << fmt17(r.omega)
       << ",\"a\":" << fmt17(r.a) << "}";
    return os.str();
}

std::string to_json(const Verdict& v) {
    std::ostringstream os;
    os << "{\"I_xi0\":" << fmt17(v.i_xi0) << ",\"I_B0\":" << fmt17(v.i_b0) << ",\"omega_star\":["
       << fmt17(v.omega_star[0]) << "," << fmt17(v.omega_star[1]) << "],\"hessian_det\":" << fmt17(v.hess_det)
       << ",\"diophantine\":";
    if (v.diophantine.pass)
        os << "{\"result\":\"pass\"";
    else
        os << "{\"result\":\"fail\",\"witness\":[" << v.diophantine.witness[0] << "," << v.diophantine.witness[1] << "]";
    os << ",\"worst_ratio\":" << fmt17(v.diophantine.worst_ratio) << "},\"conclusion\":\""
       << (v.confined ? "confined" : "inconclusive") << "\",\"C\":" << fmt17(v.params.C) << ",\"nu\":" << fmt17(v.params.nu)
       << ",\"Kmax\":" << v.params.kmax << ",\"degree\":" << v.params.degree << ",\"report\":" << to_json(v.report) << "}";
    return os.str();
}

std::string to_csv(const ActionPoly& h) {
    std::ostringstream os;
    os << "m,n,C\n";
    for (const auto& [kl, c] : h.terms) os << 2 * kl.first << "," << 2 * kl.second << "," << fmt17(h.C(2 * kl.first, 2 * kl.second)) << "\n";
    return os.str();
}

}  // namespace pvc
