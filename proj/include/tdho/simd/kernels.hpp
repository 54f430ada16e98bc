#pragma once

// Data-parallel inner loops with a scalar reference and vector variants.
//
// Two families:
//  * compose_batch folds kLanes independent step ladders in lockstep
//    (lanes are unrelated trajectories, e.g. the members of a sweep);
//  * hamiltonian_deriv / axpy / rk4_combine drive the Fock-basis oracle.
//
// Every variant performs the same floating-point operations in the same
// order as the scalar reference, so results agree bit for bit.

#include <complex>
#include <cstddef>

namespace tdho::simd {

using Complex = std::complex<double>;

inline constexpr std::size_t kLanes = 4;

/// Accumulator coefficients for kLanes trajectories, structure-of-arrays.
struct BatchState {
    alignas(32) double a_re[kLanes] = {0, 0, 0, 0};
    alignas(32) double a_im[kLanes] = {0, 0, 0, 0};
    alignas(32) double b_re[kLanes] = {1, 1, 1, 1};
    alignas(32) double b_im[kLanes] = {0, 0, 0, 0};
    alignas(32) double g_re[kLanes] = {0, 0, 0, 0};
    alignas(32) double g_im[kLanes] = {0, 0, 0, 0};
    alignas(32) double s_re[kLanes] = {1, 1, 1, 1};  // sqrt(beta), continuous branch
    alignas(32) double s_im[kLanes] = {0, 0, 0, 0};
};

/// Step coefficients for n steps, lane-interleaved: element [j * kLanes + lane].
/// Lambda_- is taken equal to Lambda_+, which holds for every constructed step.
struct BatchSteps {
    const double* plus_re;
    const double* plus_im;
    const double* c_re;
    const double* c_im;
    const double* root_re;  // continuous square root of Lambda_c
    const double* root_im;
    std::size_t n;
};

/// Returns false if any lane met |1 - alpha*L-|^2 below the singular threshold;
/// the state is still advanced, so callers must discard it in that case.
using ComposeBatchFn = bool (*)(BatchState& state, const BatchSteps& steps);

/// out = -i H x, with H[n][n] = diag[n] and H[n][n+2] = H[n+2][n] = off[n].
using HamiltonianDerivFn = void (*)(const double* diag, const double* off, const Complex* x, Complex* out,
                                    std::size_t dim);

/// out = x + a * k
using AxpyFn = void (*)(Complex* out, const Complex* x, double a, const Complex* k, std::size_t dim);

/// x += (h/6) (k1 + 2 k2 + 2 k3 + k4)
using Rk4CombineFn = void (*)(Complex* x, const Complex* k1, const Complex* k2, const Complex* k3,
                              const Complex* k4, double h, std::size_t dim);

struct Kernels {
    const char* name;
    ComposeBatchFn compose_batch;
    HamiltonianDerivFn hamiltonian_deriv;
    AxpyFn axpy;
    Rk4CombineFn rk4_combine;
};

const Kernels& scalar_kernels();

/// nullptr when the AVX2 variant was not compiled in or the CPU lacks AVX2.
const Kernels* avx2_kernels();

/// Best available variant. TDHO_SIMD=scalar in the environment forces the
/// reference path.
const Kernels& active_kernels();

}  // namespace tdho::simd
