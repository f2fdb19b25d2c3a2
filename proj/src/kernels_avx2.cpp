// Compiled with -mavx2 -mfma; only reached when CPUID reports both.

#include <immintrin.h>

#include "pvc/kernels.hpp"

namespace pvc::kernels::avx2 {

namespace {

// Two complex numbers per register: [re0, im0, re1, im1].
inline __m256d cmul(__m256d a, __m256d b) {
    const __m256d br = _mm256_movedup_pd(b);
    const __m256d bi = _mm256_permute_pd(b, 0xF);
    const __m256d as = _mm256_permute_pd(a, 0x5);
    return _mm256_fmaddsub_pd(a, br, _mm256_mul_pd(as, bi));
}

inline __m256d load2(cplx a, cplx b) { return _mm256_setr_pd(a.real(), a.imag(), b.real(), b.imag()); }

inline __m256d bcast(const cplx& c) { return _mm256_broadcast_pd(reinterpret_cast<const __m128d*>(&c)); }

inline cplx lo(__m256d v) {
    alignas(32) double t[4];
    _mm256_store_pd(t, v);
    return {t[0], t[1]};
}

inline cplx hi(__m256d v) {
    alignas(32) double t[4];
    _mm256_store_pd(t, v);
    return {t[2], t[3]};
}

}  // namespace

void pair_eval(const cplx* c, std::size_t n, cplx x, cplx y, PairJet& out) {
    const __m256d z = load2(x, y);

    // Horner with derivatives at x and y simultaneously.
    __m256d p = bcast(c[n - 1]);
    __m256d d1 = _mm256_setzero_pd(), d2 = _mm256_setzero_pd();
    for (std::size_t k = n - 1; k-- > 0;) {
        d2 = _mm256_add_pd(cmul(d2, z), d1);
        d1 = _mm256_add_pd(cmul(d1, z), p);
        p = _mm256_add_pd(cmul(p, z), bcast(c[k]));
    }
    out.fx = lo(p);
    out.fy = hi(p);
    out.dfx = lo(d1);
    out.dfy = hi(d1);
    out.d2fx = 2.0 * lo(d2);
    out.d2fy = 2.0 * hi(d2);

    // Divided differences. dv = [D_k | y^k], e = [E^xy_k | E^yx_k].
    if (n < 2) {
        out.q = out.exy = out.eyx = cplx{};
        return;
    }
    const __m256d zero = _mm256_setzero_pd();
    __m256d dv = load2(1.0, y);
    __m256d e = zero;
    __m256d qacc = bcast(c[1]);  // lower lane is q; upper lane is unused
    __m256d eacc = zero;
    const __m256d zx = load2(x, y);
    for (std::size_t k = 2; k < n; ++k) {
        const __m256d dd = _mm256_permute2f128_pd(dv, dv, 0x00);  // [D | D]
        e = _mm256_add_pd(cmul(e, zx), dd);
        // [x D + y^{k-1} | y^k]
        dv = _mm256_add_pd(cmul(dv, zx), _mm256_permute2f128_pd(dv, zero, 0x21));
        const __m256d ck = bcast(c[k]);
        qacc = _mm256_add_pd(qacc, cmul(ck, dv));
        eacc = _mm256_add_pd(eacc, cmul(ck, e));
    }
    out.q = lo(qacc);
    out.exy = lo(eacc);
    out.eyx = hi(eacc);
}

void poly_eval_batch(const cplx* c, std::size_t n, const cplx* z, cplx* out, std::size_t count) {
    std::size_t j = 0;
    for (; j + 2 <= count; j += 2) {
        const __m256d zz = load2(z[j], z[j + 1]);
        __m256d p = bcast(c[n - 1]);
        for (std::size_t k = n - 1; k-- > 0;) p = _mm256_add_pd(cmul(p, zz), bcast(c[k]));
        out[j] = lo(p);
        out[j + 1] = hi(p);
    }
    if (j < count) scalar::poly_eval_batch(c, n, z + j, out + j, count - j);
}

}  // namespace pvc::kernels::avx2
