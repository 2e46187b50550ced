#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "lab/riccati.hpp"
#include "lab/util.hpp"

using namespace lab;

namespace {

CoefficientTrack sampled(double t0, double t1, int n, auto&& f0, auto&& f1, auto&& f2) {
    CoefficientTrack tr;
    for (int i = 0; i < n; ++i) {
        const double t = t0 + (t1 - t0) * double(i) / double(n - 1);
        tr.t.push_back(t);
        tr.a0.push_back(f0(t));
        tr.a1.push_back(f1(t));
        tr.a2.push_back(f2(t));
    }
    return tr;
}

// smooth random coefficient: low-order trigonometric polynomial
struct SmoothRandom {
    double c0, c1, c2, w1, w2, p1, p2;
    static SmoothRandom draw(std::mt19937& rng, double amp) {
        std::uniform_real_distribution<double> a(-amp, amp), w(0.3, 2.5), ph(0.0, 6.28);
        return {a(rng), a(rng), a(rng), w(rng), w(rng), ph(rng), ph(rng)};
    }
    double operator()(double t) const {
        return c0 + c1 * std::sin(w1 * t + p1) + c2 * std::cos(w2 * t + p2);
    }
};

} // namespace

TEST_CASE("hormander bound on the pure square nonlinearity") {
    auto zero = [](double) { return 0.0; };
    auto one = [](double) { return 1.0; };
    auto tr = sampled(0.0, 2.0, 2001, one, zero, zero);

    auto b1 = hormander_bound(tr, 1.0);
    CHECK(b1.K == 0.0);
    REQUIRE(b1.upper_bound_T.has_value());
    CHECK(*b1.upper_bound_T == doctest::Approx(1.0).epsilon(1e-12));

    auto b2 = hormander_bound(tr, 2.0);
    REQUIRE(b2.upper_bound_T.has_value());
    CHECK(*b2.upper_bound_T == doctest::Approx(0.5).epsilon(1e-12));

    auto b3 = hormander_bound(tr, -1.0);
    CHECK(!b3.upper_bound_T.has_value());

    CoefficientTrack bad = tr;
    bad.a0[5] = -1.0;
    CHECK_THROWS_AS(hormander_bound(bad, 1.0), std::invalid_argument);
}

TEST_CASE("riccati oracle on closed forms") {
    auto zero = [](double) { return 0.0; };
    auto one = [](double) { return 1.0; };
    // w' = w^2, w(0)=1: blowup at t=1
    auto r = integrate_riccati(one, zero, zero, 1.0, 0.0, 2.0);
    REQUIRE(r.blowup_time.has_value());
    CHECK(*r.blowup_time == doctest::Approx(1.0).epsilon(1e-6));

    // w(0)=0, a2=0: w stays 0
    auto rz = integrate_riccati(one, one, zero, 0.0, 0.0, 3.0);
    CHECK(!rz.blowup_time.has_value());
    for (double w : rz.w) CHECK(w == 0.0);

    // linear ODE (a0 = 0) against the closed form
    auto a1 = [](double t) { return 0.3 * std::cos(t); };
    auto a2 = [](double t) { return 0.2 * std::sin(0.7 * t); };
    auto rl = integrate_riccati(zero, a1, a2, 0.4, 0.0, 5.0);
    CHECK(!rl.blowup_time.has_value());
    // closed form w(t) = e^{A(t)}(w0 + int_0^t e^{-A} a2), A = int a1
    auto A = [](double t) { return 0.3 * std::sin(t); };
    for (std::size_t i = 0; i < rl.t.size(); i += 9) {
        const double t = rl.t[i];
        double integral = 0.0;
        const int n = 4000;
        for (int k = 0; k < n; ++k) {
            const double ta = t * double(k) / n, tb = t * double(k + 1) / n;
            integral += 0.5 * (std::exp(-A(ta)) * a2(ta) + std::exp(-A(tb)) * a2(tb)) * (tb - ta);
        }
        const double exact = std::exp(A(t)) * (0.4 + integral);
        CHECK(rl.w[i] == doctest::Approx(exact).epsilon(1e-8));
    }
}

TEST_CASE("lemma A.4 soundness: 500 random tracks") {
    std::mt19937 rng(20240817);
    std::uniform_real_distribution<double> wdist(0.0, 3.0);
    int checked = 0;
    for (int trial = 0; trial < 500; ++trial) {
        auto f0 = SmoothRandom::draw(rng, 0.8);
        auto f1 = SmoothRandom::draw(rng, 0.4);
        auto f2 = SmoothRandom::draw(rng, 0.4);
        auto a0 = [&](double t) { return std::abs(f0(t)); };
        auto a1f = [&](double t) { return f1(t); };
        auto a2f = [&](double t) { return f2(t); };
        const double T = 3.0;
        auto tr = sampled(0.0, T, 1501, a0, a1f, a2f);
        auto bound = hormander_bound(tr, 0.0); // just for K
        const double w0 = bound.K + wdist(rng) + 1e-3;

        auto sol = integrate_riccati(a0, a1f, a2f, w0, 0.0, T);
        const double T_exist = sol.blowup_time ? *sol.blowup_time * (1.0 - 1e-9) : T;

        // the A.4 inequality must hold at every sample where the solution exists
        double I0 = 0.0, I1 = 0.0;
        for (std::size_t i = 1; i < tr.t.size(); ++i) {
            if (tr.t[i] > T_exist) break;
            const double dt = tr.t[i] - tr.t[i - 1];
            I0 += 0.5 * (tr.a0[i] + tr.a0[i - 1]) * dt;
            I1 += 0.5 * (std::abs(tr.a1[i]) + std::abs(tr.a1[i - 1])) * dt;
            const double lhs = I0 * std::exp(-I1);
            const double rhs = 1.0 / (w0 - bound.K);
            CHECK(lhs < rhs + 1e-9);
        }
        ++checked;
    }
    CHECK(checked == 500);
}

TEST_CASE("gronwall bound dominates the ODE solution") {
    std::mt19937 rng(42);
    for (int trial = 0; trial < 50; ++trial) {
        auto graw = SmoothRandom::draw(rng, 0.5);
        auto hraw = SmoothRandom::draw(rng, 0.5);
        auto g = [&](double t) { return std::abs(graw(t)); };
        auto hh = [&](double t) { return std::abs(hraw(t)); };
        const double f0 = 0.3 + 0.5 * std::uniform_real_distribution<double>(0, 1)(rng);

        // integrate f' = (g + h f)/2 (the equality case of df^2/dt = f g + h f^2)
        const int n = 4001;
        const double T = 2.0;
        std::vector<double> t(n), gv(n), hv(n);
        double f = f0;
        for (int i = 0; i < n; ++i) {
            t[i] = T * double(i) / (n - 1);
            gv[i] = g(t[i]);
            hv[i] = hh(t[i]);
        }
        const double dt = t[1] - t[0];
        for (int i = 1; i < n; ++i) {
            const double k1 = 0.5 * (g(t[i - 1]) + hh(t[i - 1]) * f);
            const double fmid = f + 0.5 * dt * k1;
            const double tm = t[i - 1] + 0.5 * dt;
            const double k2 = 0.5 * (g(tm) + hh(tm) * fmid);
            f += dt * k2;
            if (i % 500 == 0) {
                const double bound = gronwall_bound(f0, t, gv, hv, t[i]);
                CHECK(f <= bound * (1.0 + 1e-6));
            }
        }
    }
    std::vector<double> t = {0.0, 0.5, 1.0};
    std::vector<double> z = {0.0, 0.0, 0.0};
    std::vector<double> two = {2.0, 2.0, 2.0};
    CHECK(gronwall_bound(3.0, t, z, z, 1.0) == doctest::Approx(3.0));
    CHECK(gronwall_bound(3.0, t, z, two, 1.0) == doctest::Approx(3.0 * std::exp(1.0)));
    std::vector<double> neg = {0.0, -1.0, 0.0};
    CHECK_THROWS_AS(gronwall_bound(1.0, t, neg, z, 1.0), std::invalid_argument);
}

TEST_CASE("predicted upper lifespan recovers the closed form") {
    // a0 = c0/sqrt(t) from t0 = 1/eps with a1 = a2 = 0:
    // the bound solves 2 c0 (sqrt(T) - sqrt(t0)) = 1/w0
    const double c0 = 0.5, t0 = 10.0, w0 = 0.04;
    auto a0 = [&](double t) { return c0 / std::sqrt(t); };
    auto zero = [](double) { return 0.0; };
    const double T_exact = sqr(1.0 / (2.0 * c0 * w0) + std::sqrt(t0));

    // crossing inside the track
    auto tr_long = sampled(t0, 2.0 * T_exact, 400001, a0, zero, zero);
    auto up1 = predicted_upper_lifespan(CaseTag::case_I, tr_long, w0);
    REQUIRE(up1.T_upper.has_value());
    CHECK(*up1.T_upper == doctest::Approx(T_exact).epsilon(1e-6));

    // crossing past the track end: tail extrapolation against sqrt(t)
    auto tr_short = sampled(t0, 0.3 * T_exact, 200001, a0, zero, zero);
    auto up2 = predicted_upper_lifespan(CaseTag::case_I, tr_short, w0);
    REQUIRE(up2.T_upper.has_value());
    CHECK(*up2.T_upper == doctest::Approx(T_exact).epsilon(1e-6));

    // w_start below K -> none
    auto tr_k = sampled(t0, 20.0, 2001, a0, zero, [](double) { return 1.0; });
    auto up3 = predicted_upper_lifespan(CaseTag::case_I, tr_k, 1e-9);
    CHECK(!up3.T_upper.has_value());
}

TEST_CASE("case II sign flip is applied when a0 < 0") {
    const double t0 = 10.0, w0 = -0.05; // w1 < 0, a0 < 0: the -w1 transform applies
    auto a0 = [&](double t) { return -0.2 / t; };
    auto zero = [](double) { return 0.0; };
    auto tr = sampled(t0, 1e6, 300001, a0, zero, zero);
    auto up = predicted_upper_lifespan(CaseTag::case_II, tr, w0);
    CHECK(up.sign_flipped);
    REQUIRE(up.T_upper.has_value());
    // flipped problem: a0 = 0.2/t, w0 = 0.05 -> 0.2 (ln T - ln t0) = 1/0.05
    // (uniform sampling of the 1/t tail keeps only ~1% quadrature accuracy here)
    const double T_exact = t0 * std::exp(1.0 / (0.05 * 0.2));
    CHECK(*up.T_upper == doctest::Approx(T_exact).epsilon(1e-2));
}
