#pragma once

// Scalar element operations shared by every kernel variant. Vector variants
// call these for their remainder elements and mirror the operation order in
// their main loops.

#include "tdho/simd/kernels.hpp"

namespace tdho::simd::detail {

// 1e-14^2: squared-modulus form of the singular-composition threshold.
inline constexpr double kSingularNorm = 1e-28;

inline bool compose_lane(double& ar, double& ai, double& br, double& bi, double& gr, double& gi, double& sr,
                         double& si, double lr, double li, double cr, double ci, double kr, double ki) {
    const double dr = 1.0 - (ar * lr - ai * li);
    const double di = -(ar * li + ai * lr);
    const double m = dr * dr + di * di;
    const double qr = dr / m;
    const double qi = -(di / m);

    const double tr = ar * cr - ai * ci;
    const double ti = ar * ci + ai * cr;
    const double q2r = qr * qr - qi * qi;
    const double q2i = 2.0 * (qr * qi);
    const double ur = br * cr - bi * ci;
    const double ui = br * ci + bi * cr;
    const double vr = lr * br - li * bi;
    const double vi = lr * bi + li * br;
    const double wr = sr * kr - si * ki;
    const double wi = sr * ki + si * kr;

    ar = lr + (tr * qr - ti * qi);
    ai = li + (tr * qi + ti * qr);
    br = ur * q2r - ui * q2i;
    bi = ur * q2i + ui * q2r;
    gr = gr + (vr * qr - vi * qi);
    gi = gi + (vr * qi + vi * qr);
    sr = wr * qr - wi * qi;
    si = wr * qi + wi * qr;
    return m >= kSingularNorm;
}

inline void deriv_element(const double* diag, const double* off, const double* x, double* out, std::size_t n,
                          std::size_t dim) {
    double yr = diag[n] * x[2 * n];
    double yi = diag[n] * x[2 * n + 1];
    if (n + 2 < dim) {
        yr = yr + off[n] * x[2 * (n + 2)];
        yi = yi + off[n] * x[2 * (n + 2) + 1];
    }
    if (n >= 2) {
        yr = yr + off[n - 2] * x[2 * (n - 2)];
        yi = yi + off[n - 2] * x[2 * (n - 2) + 1];
    }
    out[2 * n] = yi;
    out[2 * n + 1] = -yr;
}

inline const double* as_doubles(const Complex* z) { return reinterpret_cast<const double*>(z); }
inline double* as_doubles(Complex* z) { return reinterpret_cast<double*>(z); }

}  // namespace tdho::simd::detail
