#include "pvc/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

#include "pvc/errors.hpp"

namespace pvc {

namespace kernels {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

}  // namespace kernels

namespace {

Isa detect() {
    const char* env = std::getenv("PVC_FORCE_SCALAR");
    if (env && std::strcmp(env, "0") != 0 && *env) return Isa::Scalar;
    return kernels::cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<Isa>& current() {
    static std::atomic<Isa> isa{detect()};
    return isa;
}

}  // namespace

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void set_isa(Isa isa) {
    if (isa == Isa::Avx2 && !kernels::cpu_has_avx2()) throw PreconditionError("AVX2/FMA not available on this CPU");
    current().store(isa, std::memory_order_relaxed);
}

void pair_eval(const cplx* coeffs, std::size_t n, cplx x, cplx y, PairJet& out) {
    if (n == 0) throw PreconditionError("pair_eval: empty coefficient array");
    if (active_isa() == Isa::Avx2)
        kernels::avx2::pair_eval(coeffs, n, x, y, out);
    else
        kernels::scalar::pair_eval(coeffs, n, x, y, out);
}

void poly_eval_batch(const cplx* coeffs, std::size_t n, const cplx* z, cplx* out, std::size_t count) {
    if (n == 0) throw PreconditionError("poly_eval_batch: empty coefficient array");
    if (active_isa() == Isa::Avx2)
        kernels::avx2::poly_eval_batch(coeffs, n, z, out, count);
    else
        kernels::scalar::poly_eval_batch(coeffs, n, z, out, count);
}

}  // namespace pvc
