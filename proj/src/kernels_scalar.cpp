#include "pvc/kernels.hpp"

namespace pvc::kernels::scalar {

namespace {

// p = phi(z), d1 = phi'(z), d2 = phi''(z) / 2
void horner3(const cplx* c, std::size_t n, cplx z, cplx& p, cplx& d1, cplx& d2) {
    p = c[n - 1];
    d1 = d2 = cplx{};
    for (std::size_t k = n - 1; k-- > 0;) {
        d2 = d2 * z + d1;
        d1 = d1 * z + p;
        p = p * z + c[k];
    }
}

}  // namespace

void pair_eval(const cplx* c, std::size_t n, cplx x, cplx y, PairJet& out) {
    cplx h2x, h2y;
    horner3(c, n, x, out.fx, out.dfx, h2x);
    horner3(c, n, y, out.fy, out.dfy, h2y);
    out.d2fx = 2.0 * h2x;
    out.d2fy = 2.0 * h2y;

    // D_k = sum_{j<k} x^j y^{k-1-j},  E_k = x E_{k-1} + D_{k-1}
    cplx q{}, exy{}, eyx{};
    if (n >= 2) {
        cplx d = 1.0, ypow = y, ex{}, ey{};
        q = c[1];
        for (std::size_t k = 2; k < n; ++k) {
            ex = x * ex + d;
            ey = y * ey + d;
            d = x * d + ypow;
            ypow *= y;
            q += c[k] * d;
            exy += c[k] * ex;
            eyx += c[k] * ey;
        }
    }
    out.q = q;
    out.exy = exy;
    out.eyx = eyx;
}

void poly_eval_batch(const cplx* c, std::size_t n, const cplx* z, cplx* out, std::size_t count) {
    for (std::size_t j = 0; j < count; ++j) {
        cplx p = c[n - 1];
        for (std::size_t k = n - 1; k-- > 0;) p = p * z[j] + c[k];
        out[j] = p;
    }
}

}  // namespace pvc::kernels::scalar
