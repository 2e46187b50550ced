#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "lab/kernels.hpp"

using namespace lab;

namespace {

std::vector<double> random_vec(std::mt19937& rng, std::size_t n, double lo = -1.0,
                               double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> v(n);
    for (double& x : v) x = dist(rng);
    return v;
}

bool close(double a, double b, double tol = 1e-13) {
    return std::abs(a - b) <= tol * (1.0 + std::max(std::abs(a), std::abs(b)));
}

} // namespace

TEST_CASE("scalar and avx2 backends agree on every kernel") {
    if (!kernels::avx2_supported()) {
        MESSAGE("avx2 not available; equivalence suite skipped");
        return;
    }
    std::mt19937 rng(12345);
    const std::size_t n = 1037; // odd size exercises the vector tails

    const auto p = random_vec(rng, n + 8);
    const auto q = random_vec(rng, n + 8);
    const auto u = random_vec(rng, n + 8, -0.3, 0.3);

    kernels::force_backend(kernels::Backend::scalar);
    const auto S = kernels::table();
    kernels::force_backend(kernels::Backend::avx2);
    const auto V = kernels::table();
    kernels::force_backend(kernels::Backend::scalar);

    SUBCASE("axpy / heun_merge") {
        std::vector<double> y1(n), y2(n);
        S.axpy(0.37, p.data(), q.data(), y1.data(), n);
        V.axpy(0.37, p.data(), q.data(), y2.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(close(y1[i], y2[i]));
        S.heun_merge(p.data(), q.data(), u.data(), 0.11, y1.data(), n);
        V.heun_merge(p.data(), q.data(), u.data(), 0.11, y2.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(close(y1[i], y2[i]));
    }

    SUBCASE("speed_eval") {
        std::vector<double> c1(n), cp1(n), c2(n), cp2(n);
        for (auto form : {kernels::SpeedForm::affine, kernels::SpeedForm::quadratic}) {
            S.speed_eval(form, 1.7, u.data(), c1.data(), cp1.data(), n);
            V.speed_eval(form, 1.7, u.data(), c2.data(), cp2.data(), n);
            for (std::size_t i = 0; i < n; ++i) {
                CHECK(close(c1[i], c2[i]));
                CHECK(close(cp1[i], cp2[i]));
            }
        }
    }

    SUBCASE("slopes") {
        std::vector<double> s1(n + 8, 0.0), s2(n + 8, 0.0);
        S.minmod_slopes(p.data() + 2, s1.data() + 2, n);
        V.minmod_slopes(p.data() + 2, s2.data() + 2, n);
        for (std::size_t i = 0; i < n; ++i) CHECK(s1[i + 2] == s2[i + 2]);
        S.fromm_slopes(p.data() + 2, s1.data() + 2, n);
        V.fromm_slopes(p.data() + 2, s2.data() + 2, n);
        for (std::size_t i = 0; i < n; ++i) CHECK(close(s1[i + 2], s2[i + 2]));
    }

    SUBCASE("upwind_derivs + wave_rhs") {
        const std::size_t m = n;
        std::vector<double> c(n + 8), cp(n + 8), rm(n + 8), rp(n + 8), sm(n + 8), sp(n + 8);
        S.speed_eval(kernels::SpeedForm::affine, 1.0, u.data(), c.data(), cp.data(), n + 8);
        S.char_pair(p.data(), q.data(), c.data(), rm.data(), rp.data(), n + 8);
        S.minmod_slopes(rm.data() + 1, sm.data() + 1, n + 6);
        S.minmod_slopes(rp.data() + 1, sp.data() + 1, n + 6);

        std::vector<double> dp1(m), dq1(m), dp2(m), dq2(m);
        S.upwind_derivs(rm.data() + 2, rp.data() + 2, sm.data() + 2, sp.data() + 2,
                        c.data() + 2, cp.data() + 2, q.data() + 2, 50.0, dp1.data(),
                        dq1.data(), m);
        V.upwind_derivs(rm.data() + 2, rp.data() + 2, sm.data() + 2, sp.data() + 2,
                        c.data() + 2, cp.data() + 2, q.data() + 2, 50.0, dp2.data(),
                        dq2.data(), m);
        for (std::size_t i = 0; i < m; ++i) {
            CHECK(close(dp1[i], dp2[i], 1e-12));
            CHECK(close(dq1[i], dq2[i], 1e-12));
        }

        std::vector<double> ku1(m), kp1(m), kq1(m), ku2(m), kp2(m), kq2(m);
        S.wave_rhs(p.data() + 2, q.data() + 2, c.data() + 2, cp.data() + 2, dp1.data(),
                   dq1.data(), 0.0, 0.02, 2.0, ku1.data(), kp1.data(), kq1.data(), m);
        V.wave_rhs(p.data() + 2, q.data() + 2, c.data() + 2, cp.data() + 2, dp1.data(),
                   dq1.data(), 0.0, 0.02, 2.0, ku2.data(), kp2.data(), kq2.data(), m);
        for (std::size_t i = 0; i < m; ++i) {
            CHECK(close(ku1[i], ku2[i]));
            CHECK(close(kp1[i], kp2[i], 1e-12));
            CHECK(close(kq1[i], kq2[i], 1e-12));
        }
    }

    SUBCASE("reductions") {
        CHECK(S.max_abs(p.data(), n) == V.max_abs(p.data(), n));
        double a1, b1, a2, b2;
        S.max_w12(u.data(), p.data(), q.data(), p.data(), 0.5, 0.02, 3, n, &a1, &b1);
        V.max_w12(u.data(), p.data(), q.data(), p.data(), 0.5, 0.02, 3, n, &a2, &b2);
        CHECK(close(a1, a2));
        CHECK(close(b1, b2));
        const double e1 = S.energy(p.data(), q.data(), u.data(), 0.0, 0.02, n);
        const double e2 = V.energy(p.data(), q.data(), u.data(), 0.0, 0.02, n);
        CHECK(close(e1, e2, 1e-12));
    }

    SUBCASE("transport kernels") {
        std::vector<double> lam = random_vec(rng, n + 8), mu = random_vec(rng, n + 8);
        std::vector<double> s(n + 8, 0.0), d1(n), d2(n), k1(n), k2(n);
        S.upwind_deriv_signed(p.data() + 2, s.data() + 2, lam.data() + 2, 50.0, d1.data(), n);
        V.upwind_deriv_signed(p.data() + 2, s.data() + 2, lam.data() + 2, 50.0, d2.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(close(d1[i], d2[i], 1e-12));
        S.transport_decay_rhs(p.data() + 2, d1.data(), lam.data() + 2, mu.data() + 2,
                              k1.data(), n);
        V.transport_decay_rhs(p.data() + 2, d1.data(), lam.data() + 2, mu.data() + 2,
                              k2.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(close(k1[i], k2[i], 1e-12));
    }
}

TEST_CASE("minmod limiter behaviour") {
    const auto& K = kernels::table();
    // monotone data keeps the smaller one-sided difference, extrema are clipped
    std::vector<double> f = {0.0, 1.0, 3.0, 4.0, 3.0, 1.0};
    std::vector<double> s(f.size(), 0.0);
    K.minmod_slopes(f.data() + 1, s.data() + 1, f.size() - 2);
    CHECK(s[1] == doctest::Approx(1.0)); // min(2,1)
    CHECK(s[2] == doctest::Approx(1.0)); // min(1,2)
    CHECK(s[3] == 0.0);                  // extremum
    CHECK(s[4] == doctest::Approx(-1.0)); // minmod(-2,-1)
}

TEST_CASE("upwind derivative is exact on linear data") {
    const auto& K = kernels::table();
    const std::size_t n = 64;
    std::vector<double> W(n + 4), S(n + 4, 0.0), lam(n), dW(n);
    for (std::size_t i = 0; i < n + 4; ++i) W[i] = 3.0 + 0.5 * double(i);
    for (std::size_t i = 0; i < n; ++i) lam[i] = (i % 2) ? 1.0 : -1.0;
    K.minmod_slopes(W.data() + 1, S.data() + 1, n + 2);
    K.upwind_deriv_signed(W.data() + 2, S.data() + 2, lam.data(), 1.0, dW.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(dW[i] == doctest::Approx(0.5).epsilon(1e-12));
}
