#pragma once

// Independent reference computations shared by unit and acceptance tests.

#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <vector>

#include "pvc/series.hpp"
#include "pvc/types.hpp"

namespace pvc::testing {

// Taylor coefficients from the Cauchy integral on |z - c| = r, trapezoid rule
// with n nodes (spectrally accurate for analytic f).
inline std::vector<cplx> contour_coefficients(const std::function<cplx(cplx)>& f, cplx c, double r,
                                              std::size_t order, int n = 256) {
    std::vector<cplx> values(n);
    for (int j = 0; j < n; ++j) values[j] = f(c + std::polar(r, kTwoPi * j / n));
    std::vector<cplx> out(order + 1);
    for (std::size_t k = 0; k <= order; ++k) {
        cplx acc{};
        for (int j = 0; j < n; ++j) acc += values[j] * std::polar(1.0, -kTwoPi * double(j * k) / n);
        out[k] = acc / (double(n) * std::pow(r, double(k)));
    }
    return out;
}

// Solves the Vandermonde system sum_j a_j t_i^j = y_i (small n, Gaussian elimination).
inline std::vector<double> vandermonde_solve(const std::vector<double>& t, std::vector<double> y) {
    const std::size_t n = t.size();
    std::vector<std::vector<double>> m(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m[i][j] = std::pow(t[i], double(j));
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t i = col + 1; i < n; ++i)
            if (std::abs(m[i][col]) > std::abs(m[piv][col])) piv = i;
        std::swap(m[col], m[piv]);
        std::swap(y[col], y[piv]);
        for (std::size_t i = col + 1; i < n; ++i) {
            const double f = m[i][col] / m[col][col];
            for (std::size_t j = col; j < n; ++j) m[i][j] -= f * m[col][j];
            y[i] -= f * y[col];
        }
    }
    std::vector<double> a(n);
    for (std::size_t i = n; i-- > 0;) {
        double acc = y[i];
        for (std::size_t j = i + 1; j < n; ++j) acc -= m[i][j] * a[j];
        a[i] = acc / m[i][i];
    }
    return a;
}

// Brute-force angle average: 2-D trapezoid over (theta_b, theta_xi) on a grid x grid
// mesh at tensor radii, then Vandermonde solves in t = r^2. Returns the coefficient of
// I_xi^k I_b^l (same convention as ActionPoly::terms) for k + l <= cap / 2.
inline std::map<std::pair<int, int>, double> quadrature_average(const std::function<cplx(cplx, cplx)>& f,
                                                               int cap, double rb_max, double rx_max,
                                                               int grid = 64) {
    const int n = cap / 2 + 1;
    std::vector<double> tb(n), tx(n);
    for (int i = 0; i < n; ++i) {
        const double s = 0.5 + 0.5 * std::cos(kPi * (i + 0.5) / n);  // Chebyshev in (0, 1)
        tb[i] = std::pow(rb_max * (0.3 + 0.7 * s), 2);
        tx[i] = std::pow(rx_max * (0.3 + 0.7 * s), 2);
    }
    // mean[i][j] at r_b^2 = tb[i], r_xi^2 = tx[j]
    std::vector<std::vector<double>> mean(n, std::vector<double>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            cplx acc{};
            for (int p = 0; p < grid; ++p)
                for (int q = 0; q < grid; ++q)
                    acc += f(std::polar(std::sqrt(tb[i]), kTwoPi * p / grid),
                             std::polar(std::sqrt(tx[j]), kTwoPi * q / grid));
            mean[i][j] = (acc / double(grid * grid)).real();
        }
    // Solve along xi first, then along b.
    std::vector<std::vector<double>> stage(n, std::vector<double>(n));
    for (int i = 0; i < n; ++i) stage[i] = vandermonde_solve(tx, mean[i]);
    std::map<std::pair<int, int>, double> out;
    for (int k = 0; k < n; ++k) {
        std::vector<double> column(n);
        for (int i = 0; i < n; ++i) column[i] = stage[i][k];
        const std::vector<double> a = vandermonde_solve(tb, column);
        for (int l = 0; l < n; ++l)
            if (k + l <= cap / 2) out[{k, l}] = a[l] * std::ldexp(1.0, k + l);  // r^2 = 2I
    }
    return out;
}

}  // namespace pvc::testing

namespace pvc::testing {

struct LineFit {
    double slope, intercept, r2;
};

inline LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = double(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
        syy += y[i] * y[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / n;
    const double r = (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
    return {slope, intercept, r * r};
}

// Tan family a (tan(iz) + tan(iz/2)) and its derivative in extended precision.
struct TanFamilyRef {
    long double a;
    using lc = std::complex<long double>;
    lc phi(lc z) const {
        const lc I(0.0L, 1.0L);
        return a * (std::tan(I * z) + std::tan(I * z / 2.0L));
    }
    lc dphi(lc z) const {
        const lc I(0.0L, 1.0L);
        const lc c1 = std::cos(I * z), c2 = std::cos(I * z / 2.0L);
        return a * (I / (c1 * c1) + (I / 2.0L) / (c2 * c2));
    }
    // Two-logarithm formula for the regular part of the Green's function.
    long double gamma(lc x, lc y) const {
        const long double inv = 1.0L / (2.0L * 3.14159265358979323846264338327950288L);
        const lc fx = phi(x), fy = phi(y);
        const lc q = (x == y) ? dphi(x) : (fx - fy) / (x - y);
        return inv * (std::log(std::abs(q)) - std::log(std::abs(1.0L - fx * std::conj(fy))));
    }
    // grad_1 gamma(x, y), x != y, from the defining three-term formula.
    lc grad1(lc x, lc y) const {
        const long double inv = 1.0L / (2.0L * 3.14159265358979323846264338327950288L);
        const lc fx = phi(x), fy = phi(y), d = dphi(x);
        const lc cg = d / (fx - fy) - 1.0L / (x - y) - d * std::conj(fy) / (fx * std::conj(fy) - 1.0L);
        return std::conj(inv * cg);
    }
};

}  // namespace pvc::testing
