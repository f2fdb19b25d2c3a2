#include <doctest.h>

#include <cmath>
#include <random>

#include "pvc/errors.hpp"
#include "pvc/mapexpr.hpp"
#include "pvc/series.hpp"

using namespace pvc;

namespace {

UniSeries random_series(std::mt19937_64& gen, std::size_t order, bool unit) {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    std::vector<cplx> c(order + 1);
    for (auto& x : c) x = {d(gen), d(gen)};
    if (unit) c[0] = {1.5 + 0.5 * d(gen), d(gen)};
    return UniSeries(std::move(c));
}

// Small-integer coefficients make every product and sum exact in double.
Poly4 random_int_poly(std::mt19937_64& gen, int cap, int nterms) {
    std::uniform_int_distribution<int> coef(-4, 4), ex(0, 3);
    Poly4 p(cap);
    for (int t = 0; t < nterms; ++t)
        p = p + Poly4::monomial({double(coef(gen)), double(coef(gen))}, {ex(gen), ex(gen), ex(gen), ex(gen)}, cap);
    return p;
}

Poly4 random_poly(std::mt19937_64& gen, int cap, int nterms) {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    std::uniform_int_distribution<int> ex(0, 3);
    Poly4 p(cap);
    for (int t = 0; t < nterms; ++t)
        p = p + Poly4::monomial({d(gen), d(gen)}, {ex(gen), ex(gen), ex(gen), ex(gen)}, cap);
    return p;
}

double max_abs_diff(const UniSeries& a, const UniSeries& b) {
    double m = 0.0;
    for (std::size_t k = 0; k <= std::max(a.order(), b.order()); ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

}  // namespace

TEST_CASE("difference of squares") {
    const UniSeries z = UniSeries::variable(4);
    const UniSeries one = UniSeries::constant(1.0, 4);
    const UniSeries prod = (one + z) * (one - z);
    CHECK(prod == UniSeries({1.0, 0.0, -1.0, 0.0, 0.0}));
}

TEST_CASE("unit divided by itself is one") {
    std::mt19937_64 gen(7);
    const UniSeries a = random_series(gen, 10, true);
    const UniSeries q = a / a;
    CHECK(max_abs_diff(q, UniSeries::constant(1.0, 10)) <= 1e-13);
}

TEST_CASE("division by a non-unit is rejected") {
    CHECK_THROWS_AS(UniSeries::variable(3) / UniSeries::variable(3), PreconditionError);
    CHECK_THROWS_AS(Poly4::b() / Poly4::xi(), PreconditionError);
}

TEST_CASE("ring laws hold exactly for integer coefficients") {
    std::mt19937_64 gen(11);
    for (int trial = 0; trial < 20; ++trial) {
        const Poly4 a = random_int_poly(gen, 6, 6), b = random_int_poly(gen, 6, 6), c = random_int_poly(gen, 6, 6);
        CHECK(a + b == b + a);
        CHECK(a * b == b * a);
        CHECK((a + b) + c == a + (b + c));
        CHECK((a * b) * c == a * (b * c));
    }
}

TEST_CASE("truncation consistency") {
    std::mt19937_64 gen(3);
    const Poly4 a = random_int_poly(gen, 8, 10), b = random_int_poly(gen, 8, 10);
    CHECK((a * b).truncated(5) == a.truncated(5) * b.truncated(5));
    const UniSeries x = random_series(gen, 12, true), y = random_series(gen, 12, true);
    CHECK((x * y).truncated(7) == x.truncated(7) * y.truncated(7));
    CHECK((x / y).truncated(7) == x.truncated(7) / y.truncated(7));
}

TEST_CASE("exp of zero is one") {
    const UniSeries e = compose(exp_series(6), UniSeries(6));
    CHECK(e == UniSeries::constant(1.0, 6));
}

TEST_CASE("compose log(1+u) with u = z + z^2 matches direct Taylor") {
    const UniSeries u({0.0, 1.0, 1.0, 0.0, 0.0});
    const UniSeries lhs = compose(mercator_series(4), u);
    const UniSeries rhs = taylor(parse("log(1+z+z^2)"), 0.0, 4);
    CHECK(max_abs_diff(lhs, rhs) <= 1e-15);
    CHECK(lhs[1] == cplx(1.0));
    CHECK(std::abs(lhs[2] - 0.5) < 1e-15);
    CHECK(std::abs(lhs[3] + 2.0 / 3.0) < 1e-15);
}

TEST_CASE("log_unit") {
    const UniSeries l = log_unit(UniSeries::constant(std::exp(1.0), 5));
    CHECK(std::abs(l[0] - 1.0) < 1e-15);
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 10; ++trial) {
        const UniSeries a = random_series(gen, 8, true);
        CHECK(max_abs_diff(exp(log_unit(a)), a) <= 1e-12);
    }
    CHECK_THROWS_AS(log_unit(UniSeries::variable(4)), PreconditionError);
}

TEST_CASE("revert") {
    CHECK(revert(UniSeries::variable(6)) == UniSeries::variable(6));
    const UniSeries r = revert(UniSeries({0.0, 1.0, 0.0, 1.0, 0.0, 0.0}));
    CHECK(max_abs_diff(r, UniSeries({0.0, 1.0, 0.0, -1.0, 0.0, 3.0})) <= 1e-15);

    std::mt19937_64 gen(9);
    for (int trial = 0; trial < 10; ++trial) {
        // Analytic on a disc of radius 2 with a well-conditioned linear term.
        std::uniform_real_distribution<double> d(-1.0, 1.0);
        std::vector<cplx> c(13);
        c[1] = {1.0 + 0.3 * d(gen), 0.3 * d(gen)};
        for (std::size_t k = 2; k <= 12; ++k) c[k] = std::ldexp(1.0, -int(k)) * cplx(d(gen), d(gen));
        const UniSeries a(c);
        const UniSeries b = revert(a);
        CHECK(max_abs_diff(compose(a, b), UniSeries::variable(12)) <= 1e-12);
        CHECK(max_abs_diff(compose(b, a), UniSeries::variable(12)) <= 1e-12);
    }
    CHECK_THROWS_AS(revert(UniSeries({1.0, 1.0})), PreconditionError);
    CHECK_THROWS_AS(revert(UniSeries({0.0, 0.0, 1.0})), PreconditionError);
}

TEST_CASE("antiderivative") {
    CHECK(UniSeries::constant(1.0, 0).antiderivative() == UniSeries({0.0, 1.0}));
    CHECK(UniSeries({0.0, 2.0}).antiderivative() == UniSeries({0.0, 0.0, 1.0}));
    std::mt19937_64 gen(1);
    // Coefficients k/(k+1)*(k+1) may round; use dyadic values so the pair is exact.
    std::vector<cplx> c(9);
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = {double(k % 3) - 1.0, 0.25 * double(k)};
    const UniSeries s(c);
    CHECK(max_abs_diff(s.antiderivative().derivative(), s) == 0.0);
}

TEST_CASE("Poly4 canonical form drops exact zeros only") {
    const Poly4 b = Poly4::b();
    const Poly4 z = b - b;
    CHECK(z.size() == 0);
    const Poly4 tiny = Poly4::constant(1e-200);
    CHECK(tiny.size() == 1);
    CHECK(Poly4::constant(0.0).size() == 0);
}

TEST_CASE("Poly4 conjugate evaluates to the conjugate") {
    std::mt19937_64 gen(21);
    const Poly4 p = random_poly(gen, 6, 12);
    const cplx b(0.3, -0.2), xi(-0.1, 0.4);
    CHECK(std::abs(p.conjugate().evaluate(b, xi) - std::conj(p.evaluate(b, xi))) < 1e-15);
}

TEST_CASE("angle average fixtures") {
    const ActionPoly h = angle_average(Poly4::b() * Poly4::bbar());
    CHECK(h.coefficient(0, 1) == 2.0);
    CHECK(h.terms.size() == 1);
    const ActionPoly zero = angle_average(Poly4::b() * Poly4::b() * Poly4::xibar());
    CHECK(zero.terms.empty());
}

TEST_CASE("angle average of a conjugate-symmetric sum is real") {
    std::mt19937_64 gen(33);
    const Poly4 p = random_poly(gen, 8, 15), q = random_poly(gen, 8, 15);
    const Poly4 s = p * q.conjugate() + q * p.conjugate();
    const ActionPoly h = angle_average(s);
    CHECK(h.imag_residual <= 1e-15);
}
