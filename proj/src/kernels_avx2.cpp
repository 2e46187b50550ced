// AVX2 variants of the inner-loop kernels. This translation unit is compiled
// with -mavx2; it is only reached through the runtime dispatch when the CPU
// reports AVX2 support.
#if defined(__x86_64__) || defined(_M_X64)

#include "lab/kernels.hpp"

#include <cmath>
#include <immintrin.h>
#include <stdexcept>

namespace lab::kernels {

namespace avx2 {

static inline __m256d abs_pd(__m256d x) {
    const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    return _mm256_and_pd(x, mask);
}

static void axpy(double s, const double* a, const double* b, double* y, std::size_t n) {
    const __m256d vs = _mm256_set1_pd(s);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d va = _mm256_loadu_pd(a + i);
        const __m256d vb = _mm256_loadu_pd(b + i);
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(vs, vb, va));
    }
    for (; i < n; ++i) y[i] = std::fma(s, b[i], a[i]);
}

static void heun_merge(const double* y0, const double* y1, const double* k2, double dt,
                       double* out, std::size_t n) {
    const __m256d vdt = _mm256_set1_pd(dt);
    const __m256d half = _mm256_set1_pd(0.5);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d a = _mm256_loadu_pd(y0 + i);
        const __m256d b = _mm256_loadu_pd(y1 + i);
        const __m256d k = _mm256_loadu_pd(k2 + i);
        _mm256_storeu_pd(out + i, _mm256_mul_pd(half, _mm256_add_pd(a, _mm256_fmadd_pd(vdt, k, b))));
    }
    for (; i < n; ++i) out[i] = 0.5 * (y0[i] + (std::fma(dt, k2[i], y1[i])));
}

static void speed_eval(SpeedForm form, double k, const double* u, double* c, double* cp,
                       std::size_t n) {
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d vk = _mm256_set1_pd(k);
    std::size_t i = 0;
    switch (form) {
        case SpeedForm::affine:
            for (; i + 4 <= n; i += 4) {
                const __m256d vu = _mm256_loadu_pd(u + i);
                _mm256_storeu_pd(c + i, _mm256_fmadd_pd(vk, vu, one));
                _mm256_storeu_pd(cp + i, vk);
            }
            for (; i < n; ++i) {
                c[i] = std::fma(k, u[i], 1.0);
                cp[i] = k;
            }
            break;
        case SpeedForm::quadratic: {
            const __m256d two_k = _mm256_set1_pd(2.0 * k);
            for (; i + 4 <= n; i += 4) {
                const __m256d vu = _mm256_loadu_pd(u + i);
                _mm256_storeu_pd(c + i, _mm256_fmadd_pd(_mm256_mul_pd(vk, vu), vu, one));
                _mm256_storeu_pd(cp + i, _mm256_mul_pd(two_k, vu));
            }
            for (; i < n; ++i) {
                c[i] = std::fma(k * u[i], u[i], 1.0);
                cp[i] = 2.0 * k * u[i];
            }
            break;
        }
        case SpeedForm::generic:
            throw std::logic_error("speed_eval: generic form is evaluated by the caller");
    }
}

static inline __m256d minmod_pd(__m256d a, __m256d b) {
    const __m256d zero = _mm256_setzero_pd();
    const __m256d prod = _mm256_mul_pd(a, b);
    const __m256d same_sign = _mm256_cmp_pd(prod, zero, _CMP_GT_OQ);
    const __m256d mag = _mm256_min_pd(abs_pd(a), abs_pd(b));
    const __m256d signbit = _mm256_castsi256_pd(_mm256_set1_epi64x(0x8000000000000000LL));
    const __m256d signed_mag = _mm256_or_pd(mag, _mm256_and_pd(a, signbit));
    return _mm256_and_pd(signed_mag, same_sign);
}

static void minmod_slopes(const double* f, double* s, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d fm = _mm256_loadu_pd(f + i - 1);
        const __m256d f0 = _mm256_loadu_pd(f + i);
        const __m256d fp = _mm256_loadu_pd(f + i + 1);
        _mm256_storeu_pd(s + i, minmod_pd(_mm256_sub_pd(fp, f0), _mm256_sub_pd(f0, fm)));
    }
    for (; i < n; ++i) {
        const double a = f[i + 1] - f[i], b = f[i] - f[i - 1];
        s[i] = (a * b <= 0.0) ? 0.0 : (std::abs(a) < std::abs(b) ? a : b);
    }
}

static void fromm_slopes(const double* f, double* s, std::size_t n) {
    const __m256d half = _mm256_set1_pd(0.5);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d fm = _mm256_loadu_pd(f + i - 1);
        const __m256d fp = _mm256_loadu_pd(f + i + 1);
        _mm256_storeu_pd(s + i, _mm256_mul_pd(half, _mm256_sub_pd(fp, fm)));
    }
    for (; i < n; ++i) s[i] = 0.5 * (f[i + 1] - f[i - 1]);
}

static void upwind_derivs(const double* rm, const double* rp, const double* sm,
                          const double* sp, const double* c, const double* cp,
                          const double* q, double inv_dr, double* dp, double* dq,
                          std::size_t n) {
    const __m256d vinv = _mm256_set1_pd(inv_dr);
    const __m256d half = _mm256_set1_pd(0.5);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d rm0 = _mm256_loadu_pd(rm + i);
        const __m256d rmm = _mm256_loadu_pd(rm + i - 1);
        const __m256d sm0 = _mm256_loadu_pd(sm + i);
        const __m256d smm = _mm256_loadu_pd(sm + i - 1);
        const __m256d rp0 = _mm256_loadu_pd(rp + i);
        const __m256d rpp = _mm256_loadu_pd(rp + i + 1);
        const __m256d sp0 = _mm256_loadu_pd(sp + i);
        const __m256d spp = _mm256_loadu_pd(sp + i + 1);
        const __m256d drm = _mm256_mul_pd(
            vinv, _mm256_add_pd(_mm256_sub_pd(rm0, rmm),
                                _mm256_mul_pd(half, _mm256_sub_pd(sm0, smm))));
        const __m256d drp = _mm256_mul_pd(
            vinv, _mm256_sub_pd(_mm256_sub_pd(rpp, rp0),
                                _mm256_mul_pd(half, _mm256_sub_pd(spp, sp0))));
        _mm256_storeu_pd(dp + i, _mm256_mul_pd(half, _mm256_add_pd(drp, drm)));
        const __m256d vc = _mm256_loadu_pd(c + i);
        const __m256d vcp = _mm256_loadu_pd(cp + i);
        const __m256d vq = _mm256_loadu_pd(q + i);
        const __m256d diff = _mm256_sub_pd(drp, drm);
        const __m256d q2 = _mm256_mul_pd(vq, vq);
        const __m256d corr = _mm256_div_pd(_mm256_mul_pd(vcp, q2), vc);
        const __m256d two_c = _mm256_add_pd(vc, vc);
        _mm256_storeu_pd(dq + i, _mm256_sub_pd(_mm256_div_pd(diff, two_c), corr));
    }
    for (; i < n; ++i) {
        const double drm = (rm[i] - rm[i - 1] + 0.5 * (sm[i] - sm[i - 1])) * inv_dr;
        const double drp = (rp[i + 1] - rp[i] - 0.5 * (sp[i + 1] - sp[i])) * inv_dr;
        dp[i] = 0.5 * (drp + drm);
        dq[i] = (drp - drm) / (2.0 * c[i]) - cp[i] * q[i] * q[i] / c[i];
    }
}

static void char_pair(const double* p, const double* q, const double* c, double* rm,
                      double* rp, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vp = _mm256_loadu_pd(p + i);
        const __m256d cq = _mm256_mul_pd(_mm256_loadu_pd(c + i), _mm256_loadu_pd(q + i));
        _mm256_storeu_pd(rm + i, _mm256_sub_pd(vp, cq));
        _mm256_storeu_pd(rp + i, _mm256_add_pd(vp, cq));
    }
    for (; i < n; ++i) {
        const double cq = c[i] * q[i];
        rm[i] = p[i] - cq;
        rp[i] = p[i] + cq;
    }
}

static void wave_rhs(const double* p, const double* q, const double* c, const double* cp,
                     const double* dp, const double* dq, double r0, double dr, double kappa,
                     double* ku, double* kp, double* kq, std::size_t n) {
    std::size_t start = 0;
    if (r0 < 0.5 * dr && n > 0) {
        ku[0] = p[0];
        kp[0] = c[0] * c[0] * (dq[0] + dq[0]) + kappa * c[0] * cp[0] * q[0] * q[0];
        kq[0] = dp[0];
        start = 1;
    }
    const __m256d vkappa = _mm256_set1_pd(kappa);
    const __m256d vdr = _mm256_set1_pd(dr);
    const __m256d vr0 = _mm256_set1_pd(r0);
    const __m256d idx_step = _mm256_set_pd(3.0, 2.0, 1.0, 0.0);
    std::size_t i = start;
    for (; i + 4 <= n; i += 4) {
        const __m256d vi = _mm256_add_pd(_mm256_set1_pd(double(i)), idx_step);
        const __m256d r = _mm256_fmadd_pd(vi, vdr, vr0);
        const __m256d vq = _mm256_loadu_pd(q + i);
        const __m256d vc = _mm256_loadu_pd(c + i);
        const __m256d vcp = _mm256_loadu_pd(cp + i);
        const __m256d vdq = _mm256_loadu_pd(dq + i);
        _mm256_storeu_pd(ku + i, _mm256_loadu_pd(p + i));
        const __m256d c2 = _mm256_mul_pd(vc, vc);
        const __m256d geom = _mm256_add_pd(vdq, _mm256_div_pd(vq, r));
        const __m256d nl = _mm256_mul_pd(_mm256_mul_pd(vkappa, _mm256_mul_pd(vc, vcp)),
                                         _mm256_mul_pd(vq, vq));
        _mm256_storeu_pd(kp + i, _mm256_fmadd_pd(c2, geom, nl));
        _mm256_storeu_pd(kq + i, _mm256_loadu_pd(dp + i));
    }
    for (; i < n; ++i) {
        const double r = r0 + double(i) * dr;
        ku[i] = p[i];
        kp[i] = c[i] * c[i] * (dq[i] + q[i] / r) + kappa * c[i] * cp[i] * q[i] * q[i];
        kq[i] = dp[i];
    }
}

static double max_abs(const double* x, std::size_t n) {
    __m256d vm = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) vm = _mm256_max_pd(vm, abs_pd(_mm256_loadu_pd(x + i)));
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, vm);
    double m = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
    for (; i < n; ++i) m = std::max(m, std::abs(x[i]));
    return m;
}

static void max_w12(const double* u, const double* p, const double* q, const double* c,
                    double r0, double dr, std::size_t i0, std::size_t n, double* max_w1,
                    double* max_w2) {
    const __m256d vdr = _mm256_set1_pd(dr);
    const __m256d vr0 = _mm256_set1_pd(r0);
    const __m256d idx_step = _mm256_set_pd(3.0, 2.0, 1.0, 0.0);
    const __m256d half = _mm256_set1_pd(0.5);
    __m256d m1 = _mm256_setzero_pd(), m2 = _mm256_setzero_pd();
    std::size_t i = i0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vi = _mm256_add_pd(_mm256_set1_pd(double(i)), idx_step);
        const __m256d r = _mm256_fmadd_pd(vi, vdr, vr0);
        const __m256d sr = _mm256_sqrt_pd(r);
        const __m256d a = _mm256_mul_pd(sr, _mm256_loadu_pd(p + i));
        const __m256d uo2sr = _mm256_div_pd(_mm256_mul_pd(half, _mm256_loadu_pd(u + i)), sr);
        const __m256d b = _mm256_mul_pd(
            _mm256_loadu_pd(c + i),
            _mm256_fmadd_pd(sr, _mm256_loadu_pd(q + i), uo2sr));
        m1 = _mm256_max_pd(m1, abs_pd(_mm256_sub_pd(a, b)));
        m2 = _mm256_max_pd(m2, abs_pd(_mm256_add_pd(a, b)));
    }
    alignas(32) double l1[4], l2[4];
    _mm256_store_pd(l1, m1);
    _mm256_store_pd(l2, m2);
    double w1 = std::max(std::max(l1[0], l1[1]), std::max(l1[2], l1[3]));
    double w2 = std::max(std::max(l2[0], l2[1]), std::max(l2[2], l2[3]));
    for (; i < n; ++i) {
        const double r = r0 + double(i) * dr;
        const double sr = std::sqrt(r);
        const double a = sr * p[i];
        const double b = c[i] * (sr * q[i] + u[i] / (2.0 * sr));
        w1 = std::max(w1, std::abs(a - b));
        w2 = std::max(w2, std::abs(a + b));
    }
    *max_w1 = w1;
    *max_w2 = w2;
}

static double energy(const double* p, const double* q, const double* c, double r0,
                     double dr, std::size_t n) {
    const __m256d vdr = _mm256_set1_pd(dr);
    const __m256d vr0 = _mm256_set1_pd(r0);
    const __m256d idx_step = _mm256_set_pd(3.0, 2.0, 1.0, 0.0);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vi = _mm256_add_pd(_mm256_set1_pd(double(i)), idx_step);
        const __m256d r = _mm256_fmadd_pd(vi, vdr, vr0);
        const __m256d vp = _mm256_loadu_pd(p + i);
        const __m256d cq = _mm256_mul_pd(_mm256_loadu_pd(c + i), _mm256_loadu_pd(q + i));
        const __m256d e = _mm256_fmadd_pd(vp, vp, _mm256_mul_pd(cq, cq));
        acc = _mm256_fmadd_pd(e, r, acc);
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double s = ((lanes[0] + lanes[1]) + lanes[2]) + lanes[3];
    for (; i < n; ++i) {
        const double r = r0 + double(i) * dr;
        s += (p[i] * p[i] + c[i] * c[i] * q[i] * q[i]) * r;
    }
    return M_PI * dr * s;
}

static void transport_decay_rhs(const double* W, const double* dW, const double* lam,
                                const double* mu, double* k, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d w = _mm256_loadu_pd(W + i);
        const __m256d adv = _mm256_mul_pd(_mm256_loadu_pd(lam + i), _mm256_loadu_pd(dW + i));
        const __m256d src = _mm256_mul_pd(_mm256_loadu_pd(mu + i), _mm256_mul_pd(w, w));
        _mm256_storeu_pd(k + i, _mm256_sub_pd(_mm256_setzero_pd(), _mm256_add_pd(adv, src)));
    }
    for (; i < n; ++i) k[i] = -lam[i] * dW[i] - mu[i] * W[i] * W[i];
}

static void upwind_deriv_signed(const double* W, const double* s, const double* lam,
                                double inv_dr, double* dW, std::size_t n) {
    const __m256d vinv = _mm256_set1_pd(inv_dr);
    const __m256d half = _mm256_set1_pd(0.5);
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d w0 = _mm256_loadu_pd(W + i);
        const __m256d wm = _mm256_loadu_pd(W + i - 1);
        const __m256d wp = _mm256_loadu_pd(W + i + 1);
        const __m256d s0 = _mm256_loadu_pd(s + i);
        const __m256d sm = _mm256_loadu_pd(s + i - 1);
        const __m256d sp = _mm256_loadu_pd(s + i + 1);
        const __m256d left = _mm256_mul_pd(
            vinv, _mm256_add_pd(_mm256_sub_pd(w0, wm), _mm256_mul_pd(half, _mm256_sub_pd(s0, sm))));
        const __m256d right = _mm256_mul_pd(
            vinv, _mm256_sub_pd(_mm256_sub_pd(wp, w0), _mm256_mul_pd(half, _mm256_sub_pd(sp, s0))));
        const __m256d neg = _mm256_cmp_pd(_mm256_loadu_pd(lam + i), zero, _CMP_LT_OQ);
        _mm256_storeu_pd(dW + i, _mm256_blendv_pd(left, right, neg));
    }
    for (; i < n; ++i) {
        const double left = (W[i] - W[i - 1] + 0.5 * (s[i] - s[i - 1])) * inv_dr;
        const double right = (W[i + 1] - W[i] - 0.5 * (s[i + 1] - s[i])) * inv_dr;
        dW[i] = lam[i] >= 0.0 ? left : right;
    }
}

} // namespace avx2

KernelTable avx2_table() {
    KernelTable t;
    t.axpy = avx2::axpy;
    t.heun_merge = avx2::heun_merge;
    t.speed_eval = avx2::speed_eval;
    t.minmod_slopes = avx2::minmod_slopes;
    t.fromm_slopes = avx2::fromm_slopes;
    t.upwind_derivs = avx2::upwind_derivs;
    t.char_pair = avx2::char_pair;
    t.wave_rhs = avx2::wave_rhs;
    t.max_abs = avx2::max_abs;
    t.max_w12 = avx2::max_w12;
    t.energy = avx2::energy;
    t.transport_decay_rhs = avx2::transport_decay_rhs;
    t.upwind_deriv_signed = avx2::upwind_deriv_signed;
    return t;
}

} // namespace lab::kernels

#endif
