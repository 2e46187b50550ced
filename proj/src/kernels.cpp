#include "lab/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace lab::kernels {

namespace scalar {

static void axpy(double s, const double* a, const double* b, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = a[i] + s * b[i];
}

static void heun_merge(const double* y0, const double* y1, const double* k2, double dt,
                       double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = 0.5 * (y0[i] + y1[i] + dt * k2[i]);
}

static void speed_eval(SpeedForm form, double k, const double* u, double* c, double* cp,
                       std::size_t n) {
    switch (form) {
        case SpeedForm::affine:
            for (std::size_t i = 0; i < n; ++i) {
                c[i] = 1.0 + k * u[i];
                cp[i] = k;
            }
            break;
        case SpeedForm::quadratic:
            for (std::size_t i = 0; i < n; ++i) {
                c[i] = 1.0 + k * u[i] * u[i];
                cp[i] = 2.0 * k * u[i];
            }
            break;
        case SpeedForm::generic:
            throw std::logic_error("speed_eval: generic form is evaluated by the caller");
    }
}

static inline double minmod(double a, double b) {
    if (a * b <= 0.0) return 0.0;
    return std::abs(a) < std::abs(b) ? a : b;
}

static void minmod_slopes(const double* f, double* s, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) s[i] = minmod(f[i + 1] - f[i], f[i] - f[i - 1]);
}

static void fromm_slopes(const double* f, double* s, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) s[i] = 0.5 * (f[i + 1] - f[i - 1]);
}

static void upwind_derivs(const double* rm, const double* rp, const double* sm,
                          const double* sp, const double* c, const double* cp,
                          const double* q, double inv_dr, double* dp, double* dq,
                          std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double drm = (rm[i] - rm[i - 1] + 0.5 * (sm[i] - sm[i - 1])) * inv_dr;
        const double drp = (rp[i + 1] - rp[i] - 0.5 * (sp[i + 1] - sp[i])) * inv_dr;
        dp[i] = 0.5 * (drp + drm);
        dq[i] = (drp - drm) / (2.0 * c[i]) - cp[i] * q[i] * q[i] / c[i];
    }
}

static void char_pair(const double* p, const double* q, const double* c, double* rm,
                      double* rp, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
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
        // axis node: q/r -> dq (removable limit, q(0)=0)
        ku[0] = p[0];
        kp[0] = c[0] * c[0] * (dq[0] + dq[0]) + kappa * c[0] * cp[0] * q[0] * q[0];
        kq[0] = dp[0];
        start = 1;
    }
    for (std::size_t i = start; i < n; ++i) {
        const double r = r0 + double(i) * dr;
        ku[i] = p[i];
        kp[i] = c[i] * c[i] * (dq[i] + q[i] / r) + kappa * c[i] * cp[i] * q[i] * q[i];
        kq[i] = dp[i];
    }
}

static double max_abs(const double* x, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(x[i]));
    return m;
}

static void max_w12(const double* u, const double* p, const double* q, const double* c,
                    double r0, double dr, std::size_t i0, std::size_t n, double* max_w1,
                    double* max_w2) {
    double m1 = 0.0, m2 = 0.0;
    for (std::size_t i = i0; i < n; ++i) {
        const double r = r0 + double(i) * dr;
        const double sr = std::sqrt(r);
        const double a = sr * p[i];
        const double b = c[i] * (sr * q[i] + u[i] / (2.0 * sr));
        m1 = std::max(m1, std::abs(a - b));
        m2 = std::max(m2, std::abs(a + b));
    }
    *max_w1 = m1;
    *max_w2 = m2;
}

static double energy(const double* p, const double* q, const double* c, double r0,
                     double dr, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = r0 + double(i) * dr;
        acc += (p[i] * p[i] + c[i] * c[i] * q[i] * q[i]) * r;
    }
    return M_PI * dr * acc;
}

static void transport_decay_rhs(const double* W, const double* dW, const double* lam,
                                const double* mu, double* k, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) k[i] = -lam[i] * dW[i] - mu[i] * W[i] * W[i];
}

static void upwind_deriv_signed(const double* W, const double* s, const double* lam,
                                double inv_dr, double* dW, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double left = (W[i] - W[i - 1] + 0.5 * (s[i] - s[i - 1])) * inv_dr;
        const double right = (W[i + 1] - W[i] - 0.5 * (s[i + 1] - s[i])) * inv_dr;
        dW[i] = lam[i] >= 0.0 ? left : right;
    }
}

} // namespace scalar

static KernelTable scalar_table() {
    KernelTable t;
    t.axpy = scalar::axpy;
    t.heun_merge = scalar::heun_merge;
    t.speed_eval = scalar::speed_eval;
    t.minmod_slopes = scalar::minmod_slopes;
    t.fromm_slopes = scalar::fromm_slopes;
    t.upwind_derivs = scalar::upwind_derivs;
    t.char_pair = scalar::char_pair;
    t.wave_rhs = scalar::wave_rhs;
    t.max_abs = scalar::max_abs;
    t.max_w12 = scalar::max_w12;
    t.energy = scalar::energy;
    t.transport_decay_rhs = scalar::transport_decay_rhs;
    t.upwind_deriv_signed = scalar::upwind_deriv_signed;
    return t;
}

#if defined(__x86_64__) || defined(_M_X64)
KernelTable avx2_table(); // defined in kernels_avx2.cpp, compiled with -mavx2
bool avx2_supported() { return __builtin_cpu_supports("avx2"); }
#else
KernelTable avx2_table() { throw std::logic_error("avx2 backend unavailable on this target"); }
bool avx2_supported() { return false; }
#endif

namespace {

struct Dispatch {
    KernelTable table;
    Backend backend;
    Dispatch() {
        backend = avx2_supported() ? Backend::avx2 : Backend::scalar;
        if (const char* env = std::getenv("LAB_KERNELS")) {
            const std::string s = env;
            if (s == "scalar") backend = Backend::scalar;
            else if (s == "avx2" && avx2_supported()) backend = Backend::avx2;
        }
        table = backend == Backend::avx2 ? avx2_table() : scalar_table();
    }
};

Dispatch& dispatch() {
    static Dispatch d;
    return d;
}

} // namespace

Backend active() { return dispatch().backend; }

void force_backend(Backend b) {
    if (b == Backend::avx2 && !avx2_supported())
        throw std::runtime_error("force_backend: avx2 not supported on this CPU");
    dispatch().backend = b;
    dispatch().table = b == Backend::avx2 ? avx2_table() : scalar_table();
}

std::string backend_name() { return active() == Backend::avx2 ? "avx2" : "scalar"; }

const KernelTable& table() { return dispatch().table; }

} // namespace lab::kernels
