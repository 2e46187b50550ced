#ifndef LAB_KERNELS_HPP
#define LAB_KERNELS_HPP

#include <cstddef>
#include <string>
#include <utility>

// Hot inner loops of the field solvers. Every kernel has a scalar reference
// implementation and, on x86-64 with AVX2, a vectorized variant selected at
// runtime. The two are equivalence-tested; the environment variable
// LAB_KERNELS=scalar|avx2 overrides the automatic choice.
namespace lab::kernels {

enum class Backend { scalar, avx2 };

Backend active();
void force_backend(Backend b); // testing hook; throws if unsupported on this CPU
bool avx2_supported();
std::string backend_name();

// closed-form wave-speed families the solvers can evaluate array-wise
enum class SpeedForm {
    affine,    // c(u) = 1 + k*u
    quadratic, // c(u) = 1 + k*u^2
    generic    // caller evaluates through function objects
};

struct KernelTable {
    // y[i] = a[i] + s*b[i]
    void (*axpy)(double s, const double* a, const double* b, double* y, std::size_t n);
    // Heun merge: out[i] = 0.5*(y0[i] + y1[i] + dt*k2[i])
    void (*heun_merge)(const double* y0, const double* y1, const double* k2, double dt,
                       double* out, std::size_t n);
    // c[i] = c(u[i]), cp[i] = c'(u[i]) for the closed forms above
    void (*speed_eval)(SpeedForm form, double k, const double* u, double* c, double* cp,
                       std::size_t n);
    // minmod slopes: s[i] = minmod(f[i+1]-f[i], f[i]-f[i-1]); valid for i in [0,n)
    void (*minmod_slopes)(const double* f, double* s, std::size_t n);
    // centered (Fromm) slopes: s[i] = 0.5*(f[i+1]-f[i-1])
    void (*fromm_slopes)(const double* f, double* s, std::size_t n);
    // upwind-reconstructed derivatives of the locally diagonalized pair.
    //   rm = p - c q  (wind +c), rp = p + c q (wind -c), with slope arrays sm, sp.
    //   dp[i] = d/dr p, dq[i] = d/dr q  (the c-variation term is removed via cp*q^2/c)
    // Arrays p,q,c,cp,rm,rp,sm,sp must be valid on [-1, n+1) relative to the passed
    // pointers (caller pads).
    void (*upwind_derivs)(const double* rm, const double* rp, const double* sm,
                          const double* sp, const double* c, const double* cp,
                          const double* q, double inv_dr, double* dp, double* dq,
                          std::size_t n);
    // characteristic pair assembly: rm[i] = p[i] - c[i]*q[i], rp[i] = p[i] + c[i]*q[i]
    void (*char_pair)(const double* p, const double* q, const double* c, double* rm,
                      double* rp, std::size_t n);
    // radial wave RHS:
    //   ku = p, kp = c^2 (dq + q/r) + kappa*c*cp*q^2, kq = dp,  r_i = r0 + i*dr
    // The i with r_i == 0 (only possible at i=0) uses dq in place of q/r.
    void (*wave_rhs)(const double* p, const double* q, const double* c, const double* cp,
                     const double* dp, const double* dq, double r0, double dr, double kappa,
                     double* ku, double* kp, double* kq, std::size_t n);
    // reductions
    double (*max_abs)(const double* x, std::size_t n);
    // max over i>=i0 of |w1|,|w2| with w1 = sqrt(r)p - c(sqrt(r)q + u/(2 sqrt(r))),
    // w2 the + branch; returns {max|w1|, max|w2|}
    void (*max_w12)(const double* u, const double* p, const double* q, const double* c,
                    double r0, double dr, std::size_t i0, std::size_t n, double* max_w1,
                    double* max_w2);
    // 0.5 * sum (p^2 + c^2 q^2) * 2*pi*r * dr   (fixed-order reduction)
    double (*energy)(const double* p, const double* q, const double* c, double r0,
                     double dr, std::size_t n);
    // transport-with-quadratic-decay RHS: k[i] = -lam[i]*dW[i] - mu[i]*W[i]^2
    void (*transport_decay_rhs)(const double* W, const double* dW, const double* lam,
                                const double* mu, double* k, std::size_t n);
    // signed upwind derivative: dW[i] from slopes s, wind lam[i] (sign decides bias).
    // W and s valid on [-1, n+1).
    void (*upwind_deriv_signed)(const double* W, const double* s, const double* lam,
                                double inv_dr, double* dW, std::size_t n);
};

const KernelTable& table();

} // namespace lab::kernels

#endif
