// Compiled with -mavx2 only; reached through avx2_kernels() after a CPU check.

#include <immintrin.h>

#include "kernel_common.hpp"

namespace tdho::simd {

namespace {

using detail::as_doubles;

inline __m256d neg(__m256d v) { return _mm256_xor_pd(v, _mm256_set1_pd(-0.0)); }

bool compose_batch_avx2(BatchState& s, const BatchSteps& steps) {
    __m256d ar = _mm256_load_pd(s.a_re), ai = _mm256_load_pd(s.a_im);
    __m256d br = _mm256_load_pd(s.b_re), bi = _mm256_load_pd(s.b_im);
    __m256d gr = _mm256_load_pd(s.g_re), gi = _mm256_load_pd(s.g_im);
    __m256d sr = _mm256_load_pd(s.s_re), si = _mm256_load_pd(s.s_im);
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d two = _mm256_set1_pd(2.0);
    const __m256d thresh = _mm256_set1_pd(detail::kSingularNorm);
    __m256d bad = _mm256_setzero_pd();

    for (std::size_t j = 0; j < steps.n; ++j) {
        const std::size_t base = j * kLanes;
        const __m256d lr = _mm256_loadu_pd(steps.plus_re + base);
        const __m256d li = _mm256_loadu_pd(steps.plus_im + base);
        const __m256d cr = _mm256_loadu_pd(steps.c_re + base);
        const __m256d ci = _mm256_loadu_pd(steps.c_im + base);
        const __m256d kr = _mm256_loadu_pd(steps.root_re + base);
        const __m256d ki = _mm256_loadu_pd(steps.root_im + base);

        const __m256d dr = _mm256_sub_pd(one, _mm256_sub_pd(_mm256_mul_pd(ar, lr), _mm256_mul_pd(ai, li)));
        const __m256d di = neg(_mm256_add_pd(_mm256_mul_pd(ar, li), _mm256_mul_pd(ai, lr)));
        const __m256d m = _mm256_add_pd(_mm256_mul_pd(dr, dr), _mm256_mul_pd(di, di));
        bad = _mm256_or_pd(bad, _mm256_cmp_pd(m, thresh, _CMP_NGE_UQ));
        const __m256d qr = _mm256_div_pd(dr, m);
        const __m256d qi = neg(_mm256_div_pd(di, m));

        const __m256d tr = _mm256_sub_pd(_mm256_mul_pd(ar, cr), _mm256_mul_pd(ai, ci));
        const __m256d ti = _mm256_add_pd(_mm256_mul_pd(ar, ci), _mm256_mul_pd(ai, cr));
        const __m256d q2r = _mm256_sub_pd(_mm256_mul_pd(qr, qr), _mm256_mul_pd(qi, qi));
        const __m256d q2i = _mm256_mul_pd(two, _mm256_mul_pd(qr, qi));
        const __m256d ur = _mm256_sub_pd(_mm256_mul_pd(br, cr), _mm256_mul_pd(bi, ci));
        const __m256d ui = _mm256_add_pd(_mm256_mul_pd(br, ci), _mm256_mul_pd(bi, cr));
        const __m256d vr = _mm256_sub_pd(_mm256_mul_pd(lr, br), _mm256_mul_pd(li, bi));
        const __m256d vi = _mm256_add_pd(_mm256_mul_pd(lr, bi), _mm256_mul_pd(li, br));
        const __m256d wr = _mm256_sub_pd(_mm256_mul_pd(sr, kr), _mm256_mul_pd(si, ki));
        const __m256d wi = _mm256_add_pd(_mm256_mul_pd(sr, ki), _mm256_mul_pd(si, kr));

        ar = _mm256_add_pd(lr, _mm256_sub_pd(_mm256_mul_pd(tr, qr), _mm256_mul_pd(ti, qi)));
        ai = _mm256_add_pd(li, _mm256_add_pd(_mm256_mul_pd(tr, qi), _mm256_mul_pd(ti, qr)));
        br = _mm256_sub_pd(_mm256_mul_pd(ur, q2r), _mm256_mul_pd(ui, q2i));
        bi = _mm256_add_pd(_mm256_mul_pd(ur, q2i), _mm256_mul_pd(ui, q2r));
        gr = _mm256_add_pd(gr, _mm256_sub_pd(_mm256_mul_pd(vr, qr), _mm256_mul_pd(vi, qi)));
        gi = _mm256_add_pd(gi, _mm256_add_pd(_mm256_mul_pd(vr, qi), _mm256_mul_pd(vi, qr)));
        sr = _mm256_sub_pd(_mm256_mul_pd(wr, qr), _mm256_mul_pd(wi, qi));
        si = _mm256_add_pd(_mm256_mul_pd(wr, qi), _mm256_mul_pd(wi, qr));
    }

    _mm256_store_pd(s.a_re, ar);
    _mm256_store_pd(s.a_im, ai);
    _mm256_store_pd(s.b_re, br);
    _mm256_store_pd(s.b_im, bi);
    _mm256_store_pd(s.g_re, gr);
    _mm256_store_pd(s.g_im, gi);
    _mm256_store_pd(s.s_re, sr);
    _mm256_store_pd(s.s_im, si);
    return _mm256_movemask_pd(bad) == 0;
}

// [c[n], c[n], c[n+1], c[n+1]] to scale two interleaved complex values.
inline __m256d widen_pair(const double* c) {
    return _mm256_permute4x64_pd(_mm256_castpd128_pd256(_mm_loadu_pd(c)), _MM_SHUFFLE(1, 1, 0, 0));
}

void hamiltonian_deriv_avx2(const double* diag, const double* off, const Complex* x, Complex* out,
                            std::size_t dim) {
    const double* xd = as_doubles(x);
    double* od = as_doubles(out);
    const __m256d imag_sign = _mm256_set_pd(-0.0, 0.0, -0.0, 0.0);

    std::size_t n = 0;
    for (; n < dim && n < 2; ++n) detail::deriv_element(diag, off, xd, od, n, dim);
    // Pairs (n, n+1) with both neighbours n-2 and n+3 inside the basis.
    for (; n + 3 < dim; n += 2) {
        __m256d y = _mm256_mul_pd(widen_pair(diag + n), _mm256_loadu_pd(xd + 2 * n));
        y = _mm256_add_pd(y, _mm256_mul_pd(widen_pair(off + n), _mm256_loadu_pd(xd + 2 * (n + 2))));
        y = _mm256_add_pd(y, _mm256_mul_pd(widen_pair(off + n - 2), _mm256_loadu_pd(xd + 2 * (n - 2))));
        // -i (yr + i yi) = yi - i yr
        _mm256_storeu_pd(od + 2 * n, _mm256_xor_pd(_mm256_permute_pd(y, 0b0101), imag_sign));
    }
    for (; n < dim; ++n) detail::deriv_element(diag, off, xd, od, n, dim);
}

void axpy_avx2(Complex* out, const Complex* x, double a, const Complex* k, std::size_t dim) {
    const double* xd = as_doubles(x);
    const double* kd = as_doubles(k);
    double* od = as_doubles(out);
    const std::size_t len = 2 * dim;
    const __m256d av = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= len; i += 4) {
        _mm256_storeu_pd(od + i, _mm256_add_pd(_mm256_loadu_pd(xd + i), _mm256_mul_pd(av, _mm256_loadu_pd(kd + i))));
    }
    for (; i < len; ++i) od[i] = xd[i] + a * kd[i];
}

void rk4_combine_avx2(Complex* x, const Complex* k1, const Complex* k2, const Complex* k3, const Complex* k4,
                      double h, std::size_t dim) {
    const double c = h / 6.0;
    double* xd = as_doubles(x);
    const double* d1 = as_doubles(k1);
    const double* d2 = as_doubles(k2);
    const double* d3 = as_doubles(k3);
    const double* d4 = as_doubles(k4);
    const std::size_t len = 2 * dim;
    const __m256d two = _mm256_set1_pd(2.0);
    const __m256d cv = _mm256_set1_pd(c);
    std::size_t i = 0;
    for (; i + 4 <= len; i += 4) {
        __m256d s = _mm256_add_pd(_mm256_loadu_pd(d1 + i), _mm256_mul_pd(two, _mm256_loadu_pd(d2 + i)));
        s = _mm256_add_pd(s, _mm256_mul_pd(two, _mm256_loadu_pd(d3 + i)));
        s = _mm256_add_pd(s, _mm256_loadu_pd(d4 + i));
        _mm256_storeu_pd(xd + i, _mm256_add_pd(_mm256_loadu_pd(xd + i), _mm256_mul_pd(cv, s)));
    }
    for (; i < len; ++i) {
        double s = d1[i] + 2.0 * d2[i];
        s = s + 2.0 * d3[i];
        s = s + d4[i];
        xd[i] = xd[i] + c * s;
    }
}

}  // namespace

namespace detail {
const Kernels& avx2_table() {
    static const Kernels k{"avx2", compose_batch_avx2, hamiltonian_deriv_avx2, axpy_avx2, rk4_combine_avx2};
    return k;
}
}  // namespace detail

}  // namespace tdho::simd
