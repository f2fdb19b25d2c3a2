#include "pvc/domain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "pvc/errors.hpp"

namespace pvc {

namespace {

void horner_jet(const std::vector<cplx>& c, cplx z, Jet& j) {
    cplx p = c.back(), d1{}, d2{};
    for (std::size_t k = c.size() - 1; k-- > 0;) {
        d2 = d2 * z + d1;
        d1 = d1 * z + p;
        p = p * z + c[k];
    }
    j = {p, d1, 2.0 * d2};
}

// Degree of an exactly polynomial series, or -1.
int exact_degree(const UniSeries& s) {
    int last = -1;
    for (std::size_t k = 0; k <= s.order(); ++k)
        if (s[k] != cplx{}) last = static_cast<int>(k);
    // A genuine polynomial leaves an all-zero tail well below the order.
    return last >= 0 && last + 8 < static_cast<int>(s.order()) ? last : -1;
}

}  // namespace

Domain Domain::from_expression(const MapExpr& map, double inradius, double eta, std::string name) {
    if (!(eta > 0.0 && eta < 1.0)) throw PreconditionError("boundary margin must lie in (0, 1)");
    Domain d;
    d.map_ = map;
    d.eta_ = eta;
    d.name_ = name.empty() ? map.print() : std::move(name);
    UniSeries t = taylor(map, 0.0, kTaylorOrder);
    if (std::abs(t[0]) > 1e-14) throw PreconditionError("the map must send 0 to 0");
    std::vector<cplx> c(t.coeffs().begin(), t.coeffs().end());
    c[0] = 0.0;
    d.taylor0_ = UniSeries(std::move(c));
    if (d.taylor0_[1] == cplx{}) throw PreconditionError("the map is not conformal at 0 (phi'(0) = 0)");
    d.inradius_ = inradius > 0.0 ? inradius : estimate_inradius(map);
    d.setup_fast_path();
    return d;
}

Domain Domain::from_series(const UniSeries& phi, double inradius, double eta, std::string name) {
    if (!(eta > 0.0 && eta < 1.0)) throw PreconditionError("boundary margin must lie in (0, 1)");
    if (!(inradius > 0.0)) throw PreconditionError("a series domain needs a positive inradius");
    if (phi.order() < 8) throw PreconditionError("series domains need order >= 8");
    if (phi[0] != cplx{}) throw PreconditionError("the map must send 0 to 0");
    if (phi[1] == cplx{}) throw PreconditionError("the map is not conformal at 0 (phi'(0) = 0)");
    Domain d;
    d.taylor0_ = phi;
    d.inradius_ = inradius;
    d.eta_ = eta;
    d.name_ = name.empty() ? "series" : std::move(name);
    d.setup_fast_path();
    return d;
}

void Domain::setup_fast_path() {
    const int deg = exact_degree(taylor0_);
    if (deg >= 1 && map_) {
        fast_coeffs_.assign(taylor0_.coeffs().begin(), taylor0_.coeffs().begin() + deg + 1);
        fast_radius_ = std::numeric_limits<double>::infinity();
        return;
    }
    const std::size_t n = taylor0_.order();
    const double c1 = std::abs(taylor0_[1]);
    for (double r = inradius_ / 4; r > inradius_ / 64; r /= 2) {
        // Cauchy with |phi| <= 1 on |z| < inradius bounds the dropped tail by a
        // geometric series in r / inradius; the suffix sum covers terms we hold.
        const double q = r / inradius_;
        double tail = std::pow(q, double(n + 1)) * double(n + 1) * double(n + 1) / ((1 - q) * (1 - q) * (1 - q));
        std::size_t degree = n;
        while (degree > 1) {
            const double k = double(degree);
            const double term = k * k * std::abs(taylor0_[degree]) * std::pow(r, k - 1);
            if (tail + term > 1e-17 * c1) break;
            tail += term;
            --degree;
        }
        if (tail > 1e-15 * c1) continue;
        std::vector<cplx> coeffs(taylor0_.coeffs().begin(), taylor0_.coeffs().begin() + degree + 1);
        if (map_) {
            // Spot-check the truncated series against the expression.
            bool ok = true;
            for (int j = 0; j < 64 && ok; ++j) {
                const cplx z = std::polar(r, kTwoPi * j / 64);
                cplx p = coeffs.back();
                for (std::size_t k = coeffs.size() - 1; k-- > 0;) p = p * z + coeffs[k];
                ok = std::abs(p - eval(*map_, z)) <= 1e-14 * std::max(1.0, std::abs(p));
            }
            if (!ok) continue;
        }
        fast_coeffs_ = std::move(coeffs);
        fast_radius_ = r;
        // Shorter prefixes of the same polynomial on smaller concentric discs.
        fast_tiers_.clear();
        for (double rt = r / 8; rt < r; rt *= 2) {
            double dropped = 0.0;
            std::size_t dt = fast_coeffs_.size() - 1;
            while (dt > 1) {
                const double k = double(dt);
                const double term = k * k * std::abs(fast_coeffs_[dt]) * std::pow(rt, k - 1);
                if (dropped + term > 1e-17 * c1) break;
                dropped += term;
                --dt;
            }
            if (dt + 1 < fast_coeffs_.size()) fast_tiers_.push_back({rt * rt, dt + 1});
        }
        return;
    }
    // No trustworthy polynomial surrogate: every evaluation goes through the expression.
    fast_coeffs_.assign(taylor0_.coeffs().begin(), taylor0_.coeffs().end());
    fast_radius_ = 0.0;
    if (!map_) throw PreconditionError("series domain: coefficients do not support a validated evaluation disc");
}

cplx Domain::phi(cplx z) const {
    if (in_fast_disc(z)) {
        cplx p = fast_coeffs_.back();
        for (std::size_t k = fast_coeffs_.size() - 1; k-- > 0;) p = p * z + fast_coeffs_[k];
        return p;
    }
    if (!map_) throw DomainError("point outside the validated disc of a series-defined map");
    return eval(*map_, z);
}

Jet Domain::jet(cplx z) const {
    Jet j;
    if (in_fast_disc(z)) {
        horner_jet(fast_coeffs_, z, j);
        return j;
    }
    if (!map_) throw DomainError("point outside the validated disc of a series-defined map");
    const UniSeries t = taylor(*map_, z, 2);
    return {t[0], t[1], 2.0 * t[2]};
}

PairJet Domain::pair(cplx x, cplx y) const {
    PairJet out;
    if (in_fast_disc(x) && in_fast_disc(y)) {
        const double m = std::max(std::norm(x), std::norm(y));
        std::size_t n = fast_coeffs_.size();
        for (const auto& [r2, len] : fast_tiers_)
            if (m <= r2) {
                n = len;
                break;
            }
        pvc::pair_eval(fast_coeffs_.data(), n, x, y, out);
        return out;
    }
    const Jet jx = jet(x), jy = jet(y);
    out.fx = jx.f;
    out.dfx = jx.df;
    out.d2fx = jx.d2f;
    out.fy = jy.f;
    out.dfy = jy.df;
    out.d2fy = jy.d2f;
    const cplx h = y - x;
    if (std::abs(h) < 1e-4 * inradius_) {
        // Removable singularity: expand about x.
        const UniSeries t = taylor_at(x, 12);
        cplx q{}, exy{}, eyx{};
        for (std::size_t k = 12; k >= 1; --k) q = q * h + t[k];
        for (std::size_t k = 12; k >= 2; --k) {
            exy = exy * h + t[k];
            eyx = eyx * h + double(k - 1) * t[k];
        }
        out.q = q;
        out.exy = exy;
        out.eyx = eyx;
    } else {
        out.q = (jx.f - jy.f) / (x - y);
        if (std::abs(h) < 0.05 * inradius_) {
            // exy = int_0^1 (1-s) phi''(x + s h) ds and eyx = int_0^1 s phi''(x + s h) ds;
            // the difference quotient would cancel twice at this separation.
            using Rule = boost::math::quadrature::gauss<double, 16>;
            cplx exy{}, eyx{};
            const auto& nodes = Rule::abscissa();
            const auto& weights = Rule::weights();
            for (std::size_t k = 0; k < nodes.size(); ++k) {
                for (double sgn : {1.0, -1.0}) {
                    if (k == 0 && sgn < 0.0 && nodes[0] == 0.0) continue;
                    const double s = 0.5 * (1.0 + sgn * nodes[k]);
                    const cplx d2 = jet(x + s * h).d2f;
                    exy += 0.5 * weights[k] * (1.0 - s) * d2;
                    eyx += 0.5 * weights[k] * s * d2;
                }
            }
            out.exy = exy;
            out.eyx = eyx;
        } else {
            out.exy = (jx.df - out.q) / (x - y);
            out.eyx = (jy.df - out.q) / (y - x);
        }
    }
    return out;
}

UniSeries Domain::taylor_at(cplx center, std::size_t order) const {
    if (map_) return taylor(*map_, center, order);
    if (!in_fast_disc(center)) throw DomainError("point outside the validated disc of a series-defined map");
    // Re-expand the polynomial about `center` by Horner in series arithmetic.
    const UniSeries shift = UniSeries::variable(order) + center;
    UniSeries acc = UniSeries::constant(fast_coeffs_.back(), order);
    for (std::size_t k = fast_coeffs_.size() - 1; k-- > 0;) acc = acc * shift + fast_coeffs_[k];
    return acc;
}

void Domain::require_interior(cplx z, cplx phi_z) const {
    if (!(std::norm(phi_z) <= (1.0 - eta_) * (1.0 - eta_))) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "point (%.6g, %.6g) is within the boundary margin (|phi| = %.6g)", z.real(),
                      z.imag(), std::abs(phi_z));
        throw BoundaryError(buf);
    }
}

// ------------------------------------------------------------- inradius

namespace {

// First radius along direction theta where |phi| reaches 1.
double boundary_crossing(const MapExpr& map, double theta, double step) {
    const cplx dir = std::polar(1.0, theta);
    const auto outside = [&](double rho) {
        try {
            return std::abs(eval(map, rho * dir)) >= 1.0;
        } catch (const DomainError&) {
            return true;
        }
    };
    double lo = 0.0, hi = step;
    while (!outside(hi)) {
        lo = hi;
        hi += std::max(step, 0.05 * hi);
        if (hi > 1e6) return std::numeric_limits<double>::infinity();  // unbounded direction
    }
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (outside(mid) ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double estimate_inradius(const MapExpr& map, int rays) {
    const cplx d1 = taylor(map, 0.0, 1)[1];
    if (d1 == cplx{}) throw PreconditionError("the map is not conformal at 0");
    const double step = 0.02 / std::abs(d1);
    double best = std::numeric_limits<double>::infinity();
    int best_j = 0;
    for (int j = 0; j < rays; ++j) {
        const double r = boundary_crossing(map, kTwoPi * j / rays, step);
        if (r < best) {
            best = r;
            best_j = j;
        }
    }
    // Golden-section refinement around the best ray.
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = kTwoPi * (best_j - 1) / rays, b = kTwoPi * (best_j + 1) / rays;
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = boundary_crossing(map, x1, step), f2 = boundary_crossing(map, x2, step);
    for (int it = 0; it < 60; ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = boundary_crossing(map, x1, step);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = boundary_crossing(map, x2, step);
        }
    }
    const double r = std::min({best, f1, f2});
    if (!std::isfinite(r)) throw NumericalError("inradius estimate: no boundary found along any ray");
    return r;
}

// ------------------------------------------------------------- built-ins

namespace domains {

Domain disc() { return Domain::from_expression(parse("z"), 1.0, Domain::kDefaultEta, "disc"); }

Domain strip() { return Domain::from_expression(parse(kStrip), 1.0, Domain::kDefaultEta, "strip"); }

Domain tan_family(double a) {
    char name[64];
    std::snprintf(name, sizeof name, "tan-family(a=%.10g)", a);
    return Domain::from_expression(parse(kTanFamily, {{"a", a}}), 0.0, Domain::kDefaultEta, name);
}

namespace {

// (phi^{-1})'(w) with principal branches on factors that stay in the right half-plane.
cplx hexagon_inverse_derivative(double delta, cplx w) {
    const cplx w2 = w * w;
    const cplx omega = std::polar(1.0, kTwoPi / 3);
    return std::pow(1.0 - w2, 2 * delta - 1) * std::pow(1.0 - std::conj(omega) * w2, -delta) *
           std::pow(1.0 - omega * w2, -delta);
}

// |phi^{-1}(e^{i theta})|: integrate the derivative along the radius.
double hexagon_boundary_distance(boost::math::quadrature::tanh_sinh<double>& integrator, double delta,
                                 double theta) {
    const cplx dir = std::polar(1.0, theta);
    const auto part = [&](bool imag) {
        return integrator.integrate(
            [&](double rho) {
                const cplx v = hexagon_inverse_derivative(delta, rho * dir) * dir;
                return imag ? v.imag() : v.real();
            },
            0.0, 1.0);
    };
    return std::abs(cplx(part(false), part(true)));
}

}  // namespace

Domain hexagon(double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw PreconditionError("hexagon parameter delta must lie in (0, 1)");
    const std::size_t n = Domain::kTaylorOrder;
    // Series of (phi^{-1})' from the same factorization, then integrate and revert.
    const UniSeries w2({0.0, 0.0, 1.0});
    const UniSeries sq = w2.truncated(n);
    const UniSeries f1 = compose(binomial_series(2 * delta - 1, n), -sq);
    const UniSeries f2 = compose(binomial_series(-delta, n), sq + sq * sq);
    const UniSeries inverse = (f1 * f2).antiderivative().truncated(n);
    const UniSeries forward = revert(inverse);

    boost::math::quadrature::tanh_sinh<double> integrator;
    double r = std::numeric_limits<double>::infinity();
    for (int j = 0; j <= 90; ++j) r = std::min(r, hexagon_boundary_distance(integrator, delta, kPi / 2 * j / 90));
    char name[64];
    std::snprintf(name, sizeof name, "hexagon(delta=%.10g)", delta);
    return Domain::from_series(forward, r, Domain::kDefaultEta, name);
}

Domain random_polynomial(std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    const auto uniform = [&] { return double(gen() >> 11) * 0x1.0p-53; };
    const cplx rot = std::polar(1.0, kTwoPi * uniform());
    std::vector<cplx> c(7);
    c[1] = rot;
    c[3] = rot * std::polar(0.07 * uniform(), kTwoPi * uniform());
    for (int k = 4; k <= 6; ++k) c[k] = rot * std::polar(0.01 * uniform(), kTwoPi * uniform());
    // Re(conj(rot) phi') > 0 on |z| <= R and |phi| > 1 on |z| = R make phi
    // univalent on the component of {|phi| < 1} that contains 0.
    const double R = 1.25;
    double slope = 0.0, growth = R;
    for (int k = 3; k <= 6; ++k) {
        slope += k * std::abs(c[k]) * std::pow(R, k - 1);
        growth -= std::abs(c[k]) * std::pow(R, k);
    }
    if (!(slope < 1.0 && growth > 1.0)) throw NumericalError("random polynomial failed the univalence bound");
    std::string text;
    char buf[128];
    for (int k = 1; k <= 6; ++k) {
        if (c[k] == cplx{}) continue;
        std::snprintf(buf, sizeof buf, "%s(%.17g+%.17g*i)*z^%d", text.empty() ? "" : " + ", c[k].real(), c[k].imag(), k);
        text += buf;
    }
    std::snprintf(buf, sizeof buf, "random-poly(seed=%llu)", static_cast<unsigned long long>(seed));
    return Domain::from_expression(parse(text), 0.0, Domain::kDefaultEta, buf);
}

}  // namespace domains

}  // namespace pvc
