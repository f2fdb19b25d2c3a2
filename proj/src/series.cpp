#include "pvc/series.hpp"

#include <algorithm>
#include <cmath>

#include "pvc/errors.hpp"

namespace pvc {

namespace {

// True zeros only; small coefficients are kept.
constexpr double kZeroThreshold = 1e-300;

bool is_zero(cplx c) { return std::abs(c) < kZeroThreshold; }

}  // namespace

// ---------------------------------------------------------------- UniSeries

UniSeries::UniSeries(std::vector<cplx> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) coeffs_.push_back(cplx{});
}

UniSeries UniSeries::constant(cplx value, std::size_t order) {
    UniSeries s(order);
    s.coeffs_[0] = value;
    return s;
}

UniSeries UniSeries::variable(std::size_t order) {
    UniSeries s(order);
    if (order >= 1) s.coeffs_[1] = 1.0;
    return s;
}

UniSeries UniSeries::truncated(std::size_t order) const {
    std::vector<cplx> c(order + 1, cplx{});
    std::copy_n(coeffs_.begin(), std::min(order + 1, coeffs_.size()), c.begin());
    return UniSeries(std::move(c));
}

cplx UniSeries::evaluate(cplx z) const {
    cplx acc{};
    for (std::size_t k = coeffs_.size(); k-- > 0;) acc = acc * z + coeffs_[k];
    return acc;
}

UniSeries UniSeries::derivative() const {
    if (order() == 0) return UniSeries(0);
    std::vector<cplx> c(order());
    for (std::size_t k = 1; k <= order(); ++k) c[k - 1] = static_cast<double>(k) * coeffs_[k];
    return UniSeries(std::move(c));
}

UniSeries UniSeries::antiderivative() const {
    std::vector<cplx> c(order() + 2, cplx{});
    for (std::size_t k = 0; k <= order(); ++k) c[k + 1] = coeffs_[k] / static_cast<double>(k + 1);
    return UniSeries(std::move(c));
}

UniSeries UniSeries::conj_coeffs() const {
    std::vector<cplx> c(coeffs_);
    for (auto& x : c) x = std::conj(x);
    return UniSeries(std::move(c));
}

UniSeries operator+(const UniSeries& a, const UniSeries& b) {
    const std::size_t n = std::min(a.order(), b.order());
    std::vector<cplx> c(n + 1);
    for (std::size_t k = 0; k <= n; ++k) c[k] = a.coeffs_[k] + b.coeffs_[k];
    return UniSeries(std::move(c));
}

UniSeries operator-(const UniSeries& a, const UniSeries& b) {
    const std::size_t n = std::min(a.order(), b.order());
    std::vector<cplx> c(n + 1);
    for (std::size_t k = 0; k <= n; ++k) c[k] = a.coeffs_[k] - b.coeffs_[k];
    return UniSeries(std::move(c));
}

UniSeries operator-(const UniSeries& a) {
    std::vector<cplx> c(a.coeffs_);
    for (auto& x : c) x = -x;
    return UniSeries(std::move(c));
}

UniSeries operator*(const UniSeries& a, const UniSeries& b) {
    const std::size_t n = std::min(a.order(), b.order());
    std::vector<cplx> c(n + 1, cplx{});
    for (std::size_t i = 0; i <= n; ++i) {
        if (a.coeffs_[i] == cplx{}) continue;
        for (std::size_t j = 0; i + j <= n; ++j) c[i + j] += a.coeffs_[i] * b.coeffs_[j];
    }
    return UniSeries(std::move(c));
}

UniSeries operator/(const UniSeries& a, const UniSeries& b) {
    const cplx b0 = b.coeffs_[0];
    if (is_zero(b0)) throw PreconditionError("series division by a series with zero constant term");
    const std::size_t n = std::min(a.order(), b.order());
    std::vector<cplx> q(n + 1, cplx{});
    for (std::size_t k = 0; k <= n; ++k) {
        cplx acc = a.coeffs_[k];
        for (std::size_t j = 1; j <= k; ++j) acc -= b.coeffs_[j] * q[k - j];
        q[k] = acc / b0;
    }
    return UniSeries(std::move(q));
}

UniSeries operator*(cplx s, const UniSeries& a) {
    std::vector<cplx> c(a.coeffs_);
    for (auto& x : c) x *= s;
    return UniSeries(std::move(c));
}

UniSeries operator+(const UniSeries& a, cplx s) {
    std::vector<cplx> c(a.coeffs_);
    c[0] += s;
    return UniSeries(std::move(c));
}

// -------------------------------------------------------------------- Poly4

Poly4::Poly4(int degree_cap) : cap_(degree_cap) {
    if (degree_cap < 0 || degree_cap > 60) throw PreconditionError("Poly4 degree cap out of range");
}

Poly4 Poly4::constant(cplx value, int degree_cap) {
    Poly4 p(degree_cap);
    if (!is_zero(value)) p.accumulate(pack({0, 0, 0, 0}), value);
    return p;
}

Poly4 Poly4::monomial(cplx coeff, Monomial m, int degree_cap) {
    Poly4 p(degree_cap);
    if (m.degree() <= degree_cap && !is_zero(coeff)) p.accumulate(pack(m), coeff);
    return p;
}

cplx Poly4::coeff(Monomial m) const {
    auto it = terms_.find(pack(m));
    return it == terms_.end() ? cplx{} : it->second;
}

std::vector<std::pair<Poly4::Monomial, cplx>> Poly4::sorted_terms() const {
    std::vector<std::pair<Monomial, cplx>> out;
    out.reserve(terms_.size());
    for (const auto& [key, c] : terms_) out.emplace_back(unpack(key), c);
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
        const auto& a = x.first;
        const auto& b = y.first;
        if (a.degree() != b.degree()) return a.degree() < b.degree();
        return std::tie(a.p, a.q, a.r, a.s) < std::tie(b.p, b.q, b.r, b.s);
    });
    return out;
}

cplx Poly4::evaluate(cplx b, cplx xi) const { return evaluate(b, std::conj(b), xi, std::conj(xi)); }

cplx Poly4::evaluate(cplx b, cplx bbar, cplx xi, cplx xibar) const {
    // Power tables up to the cap keep this O(terms).
    std::vector<cplx> pb(cap_ + 1), pbb(cap_ + 1), px(cap_ + 1), pxb(cap_ + 1);
    pb[0] = pbb[0] = px[0] = pxb[0] = 1.0;
    for (int k = 1; k <= cap_; ++k) {
        pb[k] = pb[k - 1] * b;
        pbb[k] = pbb[k - 1] * bbar;
        px[k] = px[k - 1] * xi;
        pxb[k] = pxb[k - 1] * xibar;
    }
    // Sum in a fixed order so the value does not depend on hash layout.
    cplx acc{};
    for (const auto& [m, c] : sorted_terms()) acc += c * pb[m.p] * pbb[m.q] * px[m.r] * pxb[m.s];
    return acc;
}

Poly4 Poly4::truncated(int degree_cap) const {
    Poly4 out(degree_cap);
    for (const auto& [key, c] : terms_)
        if (unpack(key).degree() <= degree_cap) out.terms_.emplace(key, c);
    return out;
}

Poly4 Poly4::conjugate() const {
    Poly4 out(cap_);
    for (const auto& [key, c] : terms_) {
        const Monomial m = unpack(key);
        out.terms_.emplace(pack({m.q, m.p, m.s, m.r}), std::conj(c));
    }
    return out;
}

void Poly4::accumulate(std::uint32_t key, cplx c) {
    auto [it, inserted] = terms_.try_emplace(key, c);
    if (!inserted) it->second += c;
}

void Poly4::canonicalize() {
    std::erase_if(terms_, [](const auto& kv) { return is_zero(kv.second); });
}

Poly4 operator+(const Poly4& a, const Poly4& b) {
    Poly4 out(std::min(a.cap_, b.cap_));
    for (const auto& [k, c] : a.terms_)
        if (Poly4::unpack(k).degree() <= out.cap_) out.accumulate(k, c);
    for (const auto& [k, c] : b.terms_)
        if (Poly4::unpack(k).degree() <= out.cap_) out.accumulate(k, c);
    out.canonicalize();
    return out;
}

Poly4 operator-(const Poly4& a) {
    Poly4 out(a.cap_);
    for (const auto& [k, c] : a.terms_) out.terms_.emplace(k, -c);
    return out;
}

Poly4 operator-(const Poly4& a, const Poly4& b) { return a + (-b); }

Poly4 operator*(const Poly4& a, const Poly4& b) {
    Poly4 out(std::min(a.cap_, b.cap_));
    std::vector<std::pair<Poly4::Monomial, cplx>> ta, tb;
    ta.reserve(a.terms_.size());
    tb.reserve(b.terms_.size());
    for (const auto& [k, c] : a.terms_) ta.emplace_back(Poly4::unpack(k), c);
    for (const auto& [k, c] : b.terms_) tb.emplace_back(Poly4::unpack(k), c);
    for (const auto& [ma, ca] : ta) {
        const int da = ma.degree();
        if (da > out.cap_) continue;
        for (const auto& [mb, cb] : tb) {
            if (da + mb.degree() > out.cap_) continue;
            out.accumulate(Poly4::pack({ma.p + mb.p, ma.q + mb.q, ma.r + mb.r, ma.s + mb.s}), ca * cb);
        }
    }
    out.canonicalize();
    return out;
}

Poly4 operator/(const Poly4& a, const Poly4& b) {
    const cplx b0 = b.constant_term();
    if (is_zero(b0)) throw PreconditionError("Poly4 division by a polynomial with zero constant term");
    // a / b = (a / b0) * 1 / (1 + u), u = (b - b0) / b0.
    const int cap = std::min(a.cap_, b.cap_);
    const Poly4 u = (1.0 / b0) * (b + (-b0));
    UniSeries geometric(static_cast<std::size_t>(cap));
    std::vector<cplx> g(cap + 1);
    for (int k = 0; k <= cap; ++k) g[k] = (k % 2 == 0) ? 1.0 : -1.0;
    return (1.0 / b0) * a * compose(UniSeries(std::move(g)), u.truncated(cap));
}

Poly4 operator*(cplx s, const Poly4& a) {
    Poly4 out(a.cap_);
    for (const auto& [k, c] : a.terms_) out.terms_.emplace(k, s * c);
    out.canonicalize();
    return out;
}

Poly4 operator+(const Poly4& a, cplx s) { return a + Poly4::constant(s, a.cap_); }

// ---------------------------------------------------------------- ActionPoly

double ActionPoly::coefficient(int k, int l) const {
    auto it = terms.find({k, l});
    return it == terms.end() ? 0.0 : it->second;
}

double ActionPoly::C(int m, int n) const {
    if (m % 2 != 0 || n % 2 != 0) return 0.0;
    // r_xi^m r_b^n = (2 I_xi)^{m/2} (2 I_b)^{n/2}
    return coefficient(m / 2, n / 2) / std::ldexp(1.0, (m + n) / 2);
}

double ActionPoly::value(double i_xi, double i_b) const {
    double v = lambda != 0.0 ? lambda * std::log(i_xi) : 0.0;
    for (const auto& [kl, c] : terms) v += c * std::pow(i_xi, kl.first) * std::pow(i_b, kl.second);
    return v;
}

// ----------------------------------------------------------- free functions

UniSeries compose(const UniSeries& outer, const UniSeries& inner) {
    if (inner[0] != cplx{}) throw PreconditionError("compose: inner series must have zero constant term");
    const std::size_t n = std::min(outer.order(), inner.order());
    const UniSeries in = inner.truncated(n);
    UniSeries acc = UniSeries::constant(outer[n], n);
    for (std::size_t k = n; k-- > 0;) acc = acc * in + outer[k];
    return acc;
}

Poly4 compose(const UniSeries& outer, const Poly4& inner) {
    if (inner.constant_term() != cplx{})
        throw PreconditionError("compose: inner polynomial must have zero constant term");
    const int cap = std::min(inner.degree_cap(), static_cast<int>(outer.order()));
    const Poly4 in = inner.truncated(cap);
    Poly4 acc = Poly4::constant(outer[cap], cap);
    for (int k = cap; k-- > 0;) acc = acc * in + outer[k];
    return acc;
}

UniSeries exp_series(std::size_t order) {
    std::vector<cplx> c(order + 1);
    double f = 1.0;
    for (std::size_t k = 0; k <= order; ++k) {
        if (k > 0) f /= static_cast<double>(k);
        c[k] = f;
    }
    return UniSeries(std::move(c));
}

UniSeries mercator_series(std::size_t order) {
    std::vector<cplx> c(order + 1, cplx{});
    for (std::size_t k = 1; k <= order; ++k) c[k] = ((k % 2 == 1) ? 1.0 : -1.0) / static_cast<double>(k);
    return UniSeries(std::move(c));
}

UniSeries binomial_series(cplx alpha, std::size_t order) {
    std::vector<cplx> c(order + 1);
    c[0] = 1.0;
    for (std::size_t k = 1; k <= order; ++k)
        c[k] = c[k - 1] * (alpha - static_cast<double>(k - 1)) / static_cast<double>(k);
    return UniSeries(std::move(c));
}

UniSeries sin_series(std::size_t order) {
    std::vector<cplx> c(order + 1, cplx{});
    double f = 1.0;
    for (std::size_t k = 1; k <= order; ++k) {
        f /= static_cast<double>(k);
        if (k % 2 == 1) c[k] = ((k / 2) % 2 == 0) ? f : -f;
    }
    return UniSeries(std::move(c));
}

UniSeries cos_series(std::size_t order) {
    std::vector<cplx> c(order + 1, cplx{});
    double f = 1.0;
    c[0] = 1.0;
    for (std::size_t k = 1; k <= order; ++k) {
        f /= static_cast<double>(k);
        if (k % 2 == 0) c[k] = ((k / 2) % 2 == 0) ? f : -f;
    }
    return UniSeries(std::move(c));
}

UniSeries log_unit(const UniSeries& a) {
    const cplx a0 = a[0];
    if (is_zero(a0)) throw PreconditionError("log of a series with zero constant term");
    const UniSeries u = (1.0 / a0) * (a + (-a0));
    return compose(mercator_series(a.order()), u) + std::log(a0);
}

Poly4 log_unit(const Poly4& a) {
    const cplx a0 = a.constant_term();
    if (is_zero(a0)) throw PreconditionError("log of a polynomial with zero constant term");
    const Poly4 u = (1.0 / a0) * (a + (-a0));
    return compose(mercator_series(static_cast<std::size_t>(a.degree_cap())), u) + std::log(a0);
}

UniSeries exp(const UniSeries& a) {
    const cplx a0 = a[0];
    const UniSeries u = a + (-a0);
    return std::exp(a0) * compose(exp_series(a.order()), u);
}

UniSeries revert(const UniSeries& a) {
    const std::size_t n = a.order();
    if (a[0] != cplx{}) throw PreconditionError("revert: constant term must be zero");
    if (n < 1 || is_zero(a[1])) throw PreconditionError("revert: linear coefficient must be nonzero");
    const UniSeries z = UniSeries::variable(n);
    const UniSeries da = a.derivative();
    // Newton on F(B) = A(B) - z; each pass doubles the number of correct terms.
    UniSeries b = (1.0 / a[1]) * z;
    std::size_t correct = 1;
    while (correct < n) {
        correct = std::min(n, 2 * correct + 1);
        const UniSeries residual = compose(a, b) - z;
        const UniSeries slope = compose(da.truncated(n), b);
        b = b - residual / slope;
    }
    // One polishing pass to absorb rounding in the last doubling.
    const UniSeries residual = compose(a, b) - z;
    b = b - residual / compose(da.truncated(n), b);
    return b;
}

ActionPoly angle_average(const Poly4& poly) {
    ActionPoly out;
    double largest = 0.0, worst_imag = 0.0;
    for (const auto& [m, c] : poly.sorted_terms()) {
        if (m.p != m.q || m.r != m.s) continue;
        // b^p conj(b)^p xi^r conj(xi)^r = r_b^{2p} r_xi^{2r} = (2 I_b)^p (2 I_xi)^r
        const double scale = std::ldexp(1.0, m.p + m.r);
        out.terms[{m.r, m.p}] += scale * c.real();
        largest = std::max(largest, std::abs(c));
        worst_imag = std::max(worst_imag, std::abs(c.imag()));
    }
    out.imag_residual = largest > 0.0 ? worst_imag / largest : 0.0;
    return out;
}

}  // namespace pvc
