#pragma once

// Hot polynomial kernels. Each has a scalar reference implementation and an
// AVX2/FMA variant; the dispatcher picks one at first use from CPUID.

#include <cstddef>

#include "pvc/types.hpp"

namespace pvc {

/// Values of a polynomial phi at two points plus the divided differences the
/// Green's function needs:
///   q   = (phi(x) - phi(y)) / (x - y)
///   exy = (phi'(x) - q) / (x - y)
///   eyx = (phi'(y) - q) / (y - x)
/// All three are computed without cancellation and stay valid at x == y.
struct PairJet {
    cplx fx, dfx, d2fx;
    cplx fy, dfy, d2fy;
    cplx q, exy, eyx;
};

enum class Isa { Scalar, Avx2 };

namespace kernels {

using PairEvalFn = void (*)(const cplx* coeffs, std::size_t n, cplx x, cplx y, PairJet& out);
using PolyBatchFn = void (*)(const cplx* coeffs, std::size_t n, const cplx* z, cplx* out, std::size_t count);

namespace scalar {
void pair_eval(const cplx* coeffs, std::size_t n, cplx x, cplx y, PairJet& out);
void poly_eval_batch(const cplx* coeffs, std::size_t n, const cplx* z, cplx* out, std::size_t count);
}  // namespace scalar

namespace avx2 {
void pair_eval(const cplx* coeffs, std::size_t n, cplx x, cplx y, PairJet& out);
void poly_eval_batch(const cplx* coeffs, std::size_t n, const cplx* z, cplx* out, std::size_t count);
}  // namespace avx2

bool cpu_has_avx2();

}  // namespace kernels

/// The instruction set in use. Honors PVC_FORCE_SCALAR=1 in the environment.
Isa active_isa();
/// Overrides the choice (tests use this to compare both paths). Requesting
/// Avx2 on a CPU without it throws PreconditionError.
void set_isa(Isa isa);

/// `coeffs` holds c_0..c_{n-1} of phi(z) = sum c_k z^k.
void pair_eval(const cplx* coeffs, std::size_t n, cplx x, cplx y, PairJet& out);
void poly_eval_batch(const cplx* coeffs, std::size_t n, const cplx* z, cplx* out, std::size_t count);

}  // namespace pvc
