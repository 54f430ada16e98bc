#include "kernel_common.hpp"

namespace tdho::simd {

namespace {

using detail::as_doubles;

bool compose_batch_scalar(BatchState& s, const BatchSteps& steps) {
    bool ok = true;
    for (std::size_t j = 0; j < steps.n; ++j) {
        const std::size_t base = j * kLanes;
        for (std::size_t lane = 0; lane < kLanes; ++lane) {
            ok &= detail::compose_lane(s.a_re[lane], s.a_im[lane], s.b_re[lane], s.b_im[lane], s.g_re[lane],
                                       s.g_im[lane], s.s_re[lane], s.s_im[lane], steps.plus_re[base + lane],
                                       steps.plus_im[base + lane], steps.c_re[base + lane], steps.c_im[base + lane],
                                       steps.root_re[base + lane], steps.root_im[base + lane]);
        }
    }
    return ok;
}

void hamiltonian_deriv_scalar(const double* diag, const double* off, const Complex* x, Complex* out,
                              std::size_t dim) {
    const double* xd = as_doubles(x);
    double* od = as_doubles(out);
    for (std::size_t n = 0; n < dim; ++n) detail::deriv_element(diag, off, xd, od, n, dim);
}

void axpy_scalar(Complex* out, const Complex* x, double a, const Complex* k, std::size_t dim) {
    const double* xd = as_doubles(x);
    const double* kd = as_doubles(k);
    double* od = as_doubles(out);
    for (std::size_t i = 0; i < 2 * dim; ++i) od[i] = xd[i] + a * kd[i];
}

void rk4_combine_scalar(Complex* x, const Complex* k1, const Complex* k2, const Complex* k3, const Complex* k4,
                        double h, std::size_t dim) {
    const double c = h / 6.0;
    double* xd = as_doubles(x);
    const double* d1 = as_doubles(k1);
    const double* d2 = as_doubles(k2);
    const double* d3 = as_doubles(k3);
    const double* d4 = as_doubles(k4);
    for (std::size_t i = 0; i < 2 * dim; ++i) {
        double s = d1[i] + 2.0 * d2[i];
        s = s + 2.0 * d3[i];
        s = s + d4[i];
        xd[i] = xd[i] + c * s;
    }
}

}  // namespace

const Kernels& scalar_kernels() {
    static const Kernels k{"scalar", compose_batch_scalar, hamiltonian_deriv_scalar, axpy_scalar, rk4_combine_scalar};
    return k;
}

}  // namespace tdho::simd
