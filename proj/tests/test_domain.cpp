#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "pvc/domain.hpp"
#include "pvc/errors.hpp"
#include "pvc/mapexpr.hpp"

using namespace pvc;
using namespace std::complex_literals;

namespace {

cplx hexagon_inverse_derivative(double delta, cplx w) {
    const cplx w2 = w * w;
    return std::pow(1.0 - w2, 2 * delta - 1) / std::pow(1.0 + w2 + w2 * w2, delta);
}

// phi^{-1}(w) by 64-point composite Simpson along the segment [0, w].
cplx hexagon_inverse(double delta, cplx w) {
    const int n = 64;
    cplx acc = hexagon_inverse_derivative(delta, 0.0) + hexagon_inverse_derivative(delta, w);
    for (int k = 1; k < n; ++k) acc += (k % 2 ? 4.0 : 2.0) * hexagon_inverse_derivative(delta, w * (double(k) / n));
    return acc * w / (3.0 * n);
}

}  // namespace

TEST_CASE("derivatives at the origin agree with contour integrals of the map") {
    const char* exprs[] = {"z", domains::kStrip, domains::kTanFamily, domains::kTanFamily};
    const double as[] = {0, 0, 0.8, 1.5};
    for (int i = 0; i < 4; ++i) {
        const MapExpr e = parse(exprs[i], {{"a", as[i]}});
        const Domain d = Domain::from_expression(e, -1.0);
        const auto c = testing::contour_coefficients([&](cplx z) { return eval(e, z); }, 0.0, 0.5 * d.inradius(), 3);
        CHECK(std::abs(d.dphi0() - c[1]) <= 1e-13 * std::abs(c[1]));
        CHECK(std::abs(d.d3phi0() - 6.0 * c[3]) <= 1e-11 * std::max(1.0, std::abs(6.0 * c[3])));
    }
}

TEST_CASE("inradius estimates") {
    CHECK(estimate_inradius(parse("z")) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(estimate_inradius(parse(domains::kStrip)) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(domains::disc().inradius() == 1.0);
    CHECK(domains::strip().inradius() == 1.0);
    // unbounded along the real axis below the threshold, so the imaginary axis decides
    for (double a : {0.8, 1.0, 1.5}) {
        const MapExpr e = parse(domains::kTanFamily, {{"a", a}});
        const double r = domains::tan_family(a).inradius();
        double inside = 0, outside = 0;
        for (int k = 0; k < 720; ++k) {
            const cplx u = std::polar(1.0, kTwoPi * k / 720);
            inside = std::max(inside, std::abs(eval(e, 0.999 * r * u)));
            outside = std::max(outside, std::abs(eval(e, 1.001 * r * u)));
        }
        CHECK(inside < 1.0);
        CHECK(outside > 1.0);
    }
}

// The hexagon is known through its series only, validated on |z| <= inradius/4.
TEST_CASE("hexagon map inverts its defining derivative") {
    for (double delta : {0.55, 2.0 / 3.0, 0.8}) {
        const Domain d = domains::hexagon(delta);
        CHECK(std::abs(d.d2phi0()) == 0.0);
        std::mt19937_64 rng(4);
        std::uniform_real_distribution<double> u(0, 1);
        for (int k = 0; k < 20; ++k) {
            const cplx z = std::polar(0.95 * d.fast_radius() * u(rng), kTwoPi * u(rng));
            const Jet j = d.jet(z);
            CHECK(std::abs(j.df * hexagon_inverse_derivative(delta, j.f) - 1.0) <= 1e-12);
            CHECK(std::abs(hexagon_inverse(delta, j.f) - z) <= 1e-9);
        }
        // odd and real on the real axis
        const cplx z = 0.1 + 0.05i;
        CHECK(std::abs(d.phi(-z) + d.phi(z)) <= 1e-15);
        CHECK(std::abs(d.phi(std::conj(z)) - std::conj(d.phi(z))) <= 1e-14);
    }
}

TEST_CASE("random polynomial domains") {
    const Domain a = domains::random_polynomial(5), b = domains::random_polynomial(5), c = domains::random_polynomial(6);
    CHECK(a.taylor0()[3] == b.taylor0()[3]);
    CHECK(a.taylor0()[3] != c.taylor0()[3]);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Domain d = domains::random_polynomial(seed);
        CHECK(d.d2phi0() == 0.0);
        CHECK(d.taylor0()[7] == 0.0);
        CHECK(2 * std::pow(std::abs(d.dphi0()), 3) > std::abs(d.d3phi0()));
        CHECK(std::abs(d.dphi0()) == doctest::Approx(1.0));
        // phi' stays in a half-plane on the inradius disc, so phi is injective there
        const cplx rot = d.dphi0() / std::abs(d.dphi0());
        for (int k = 0; k < 64; ++k) CHECK((d.jet(std::polar(d.inradius(), kTwoPi * k / 64)).df / rot).real() > 0.0);
    }
}

TEST_CASE("domain from a series matches the expression it came from") {
    const Domain e = domains::tan_family(1.0);
    const Domain s = Domain::from_series(e.taylor0(), e.inradius());
    for (cplx z : {0.01 + 0.02i, -0.1 + 0.05i, 0.15i}) {
        CHECK(std::abs(s.phi(z) - e.phi(z)) <= 1e-13);
        CHECK(std::abs(s.jet(z).d2f - e.jet(z).d2f) <= 1e-11);
    }
}

TEST_CASE("jets and re-centred series are consistent") {
    for (const Domain& d : {domains::strip(), domains::tan_family(0.8), domains::hexagon(0.55)}) {
        const cplx x = 0.2 * d.inradius() * std::exp(0.7i);
        const Jet j = d.jet(x);
        const UniSeries t = d.taylor_at(x, 2);
        CHECK(std::abs(t[0] - j.f) <= 1e-14);
        CHECK(std::abs(t[1] - j.df) <= 1e-13 * std::abs(j.df));
        CHECK(std::abs(2.0 * t[2] - j.d2f) <= 1e-12 * std::max(1.0, std::abs(j.d2f)));
        // fast polynomial path against direct evaluation
        if (d.map())
            for (double s : {0.05, 0.5, 0.99})
                CHECK(std::abs(d.phi(s * d.fast_radius() * std::exp(0.3i)) -
                               eval(*d.map(), s * d.fast_radius() * std::exp(0.3i))) <= 1e-14);
    }
}

TEST_CASE("boundary margin") {
    const Domain d = domains::disc();
    CHECK_NOTHROW(d.require_interior(0.998));
    CHECK_THROWS_AS(d.require_interior(0.9995), BoundaryError);
    CHECK_THROWS_AS(d.require_interior(2.0), BoundaryError);
}
