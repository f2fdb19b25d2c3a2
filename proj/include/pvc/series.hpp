#pragma once

// Truncated power-series algebra.
//
// UniSeries is a univariate series c_0 + c_1 z + ... + c_N z^N over complex
// coefficients. Poly4 is a sparse polynomial in the four formally independent
// variables (b, conj b, xi, conj xi), truncated at a total degree cap. Both are
// value types; every operation returns a new value.

#include <cstdint>
#include <map>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pvc/types.hpp"

namespace pvc {

class UniSeries {
public:
    UniSeries() : coeffs_(1, cplx{}) {}
    explicit UniSeries(std::size_t order) : coeffs_(order + 1, cplx{}) {}
    explicit UniSeries(std::vector<cplx> coeffs);

    static UniSeries constant(cplx value, std::size_t order);
    /// The identity series z.
    static UniSeries variable(std::size_t order);

    std::size_t order() const noexcept { return coeffs_.size() - 1; }
    cplx operator[](std::size_t k) const { return k < coeffs_.size() ? coeffs_[k] : cplx{}; }
    std::span<const cplx> coeffs() const noexcept { return coeffs_; }

    UniSeries truncated(std::size_t order) const;
    cplx evaluate(cplx z) const;
    UniSeries derivative() const;
    UniSeries antiderivative() const;
    UniSeries conj_coeffs() const;

    friend UniSeries operator+(const UniSeries& a, const UniSeries& b);
    friend UniSeries operator-(const UniSeries& a, const UniSeries& b);
    friend UniSeries operator*(const UniSeries& a, const UniSeries& b);
    /// Division by a unit (nonzero constant term). Throws PreconditionError otherwise.
    friend UniSeries operator/(const UniSeries& a, const UniSeries& b);
    friend UniSeries operator-(const UniSeries& a);
    friend UniSeries operator*(cplx s, const UniSeries& a);
    friend UniSeries operator+(const UniSeries& a, cplx s);

    bool operator==(const UniSeries&) const = default;

private:
    std::vector<cplx> coeffs_;
};

/// Sparse polynomial in b, conj(b), xi, conj(xi). The monomial (p,q,r,s) stands
/// for b^p conj(b)^q xi^r conj(xi)^s.
class Poly4 {
public:
    static constexpr int kDefaultCap = 8;

    struct Monomial {
        int p, q, r, s;
        int degree() const { return p + q + r + s; }
    };

    explicit Poly4(int degree_cap = kDefaultCap);

    static Poly4 constant(cplx value, int degree_cap = kDefaultCap);
    static Poly4 monomial(cplx coeff, Monomial m, int degree_cap = kDefaultCap);
    static Poly4 b(int degree_cap = kDefaultCap) { return monomial(1.0, {1, 0, 0, 0}, degree_cap); }
    static Poly4 bbar(int degree_cap = kDefaultCap) { return monomial(1.0, {0, 1, 0, 0}, degree_cap); }
    static Poly4 xi(int degree_cap = kDefaultCap) { return monomial(1.0, {0, 0, 1, 0}, degree_cap); }
    static Poly4 xibar(int degree_cap = kDefaultCap) { return monomial(1.0, {0, 0, 0, 1}, degree_cap); }

    int degree_cap() const noexcept { return cap_; }
    std::size_t size() const noexcept { return terms_.size(); }
    cplx coeff(Monomial m) const;
    cplx constant_term() const { return coeff({0, 0, 0, 0}); }

    /// Visits every stored term as (Monomial, coefficient), in unspecified order.
    template <class F>
    void for_each(F&& f) const {
        for (const auto& [key, c] : terms_) f(unpack(key), c);
    }
    /// Terms sorted by (degree, p, q, r, s); handy for printing and tests.
    std::vector<std::pair<Monomial, cplx>> sorted_terms() const;

    /// Evaluates at (b, conj b, xi, conj xi).
    cplx evaluate(cplx b, cplx xi) const;
    cplx evaluate(cplx b, cplx bbar, cplx xi, cplx xibar) const;

    Poly4 truncated(int degree_cap) const;
    /// The polynomial whose value at (b, xi) is the conjugate of this one.
    Poly4 conjugate() const;

    friend Poly4 operator+(const Poly4& a, const Poly4& b);
    friend Poly4 operator-(const Poly4& a, const Poly4& b);
    friend Poly4 operator*(const Poly4& a, const Poly4& b);
    friend Poly4 operator/(const Poly4& a, const Poly4& b);
    friend Poly4 operator-(const Poly4& a);
    friend Poly4 operator*(cplx s, const Poly4& a);
    friend Poly4 operator+(const Poly4& a, cplx s);

    bool operator==(const Poly4& o) const { return cap_ == o.cap_ && terms_ == o.terms_; }

private:
    static std::uint32_t pack(Monomial m) {
        return static_cast<std::uint32_t>(m.p) | (static_cast<std::uint32_t>(m.q) << 8) |
               (static_cast<std::uint32_t>(m.r) << 16) | (static_cast<std::uint32_t>(m.s) << 24);
    }
    static Monomial unpack(std::uint32_t k) {
        return {static_cast<int>(k & 0xff), static_cast<int>((k >> 8) & 0xff),
                static_cast<int>((k >> 16) & 0xff), static_cast<int>((k >> 24) & 0xff)};
    }
    void accumulate(std::uint32_t key, cplx c);
    void canonicalize();

    int cap_;
    std::unordered_map<std::uint32_t, cplx> terms_;
};

/// Angle-averaged Hamiltonian h(I) = lambda * ln(I_xi) + sum_{k,l} c_{kl} I_xi^k I_b^l.
struct ActionPoly {
    std::map<std::pair<int, int>, double> terms;  // (k, l) -> coefficient of I_xi^k I_b^l
    double lambda = 0.0;
    /// Largest |Im c| / max(|c|, tiny) seen while averaging.
    double imag_residual = 0.0;

    double coefficient(int k, int l) const;
    /// Coefficient of r_xi^m r_b^n (m, n even) in the averaged expansion.
    double C(int m, int n) const;
    double value(double i_xi, double i_b) const;
};

// Compose outer(inner). `inner` must have a zero constant term.
UniSeries compose(const UniSeries& outer, const UniSeries& inner);
Poly4 compose(const UniSeries& outer, const Poly4& inner);

/// log(A) = log(a0) + log(1 + (A - a0)/a0), principal branch for log(a0).
UniSeries log_unit(const UniSeries& a);
Poly4 log_unit(const Poly4& a);

UniSeries exp(const UniSeries& a);

/// Compositional inverse of a series with a0 = 0, a1 != 0.
UniSeries revert(const UniSeries& a);

/// Mean over both angles: keeps monomials with p = q and r = s.
ActionPoly angle_average(const Poly4& p);

// Elementary Maclaurin series.
UniSeries exp_series(std::size_t order);
UniSeries mercator_series(std::size_t order);  // log(1 + u)
UniSeries binomial_series(cplx alpha, std::size_t order);  // (1 + u)^alpha
UniSeries sin_series(std::size_t order);
UniSeries cos_series(std::size_t order);

}  // namespace pvc
