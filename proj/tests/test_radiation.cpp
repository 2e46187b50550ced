#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "lab/radiation.hpp"

using namespace lab;

namespace {
// golden values from a >=10^6-point adaptive-quadrature oracle (30-digit
// arithmetic) for u0 = 0, u1 = poly_bump(M=1, power=3)
constexpr double kF0_at_0 = 0.13080830880871023;
constexpr double kF0_at_m05 = 0.14391247737496614;
constexpr double kF0_at_p05 = 0.025793016101614489;
constexpr double kF0p_at_0 = -0.17701828962080143;
constexpr double kRho0 = 0.22185213963102814;
constexpr double kMinF0p = -0.23424772164672902;
constexpr double kTau0 = 2.1344924786677509;
constexpr double kMinF0F0p = -0.024259646798936529;
constexpr double kNu0 = 20.610357774125488;

const RadiationField& acceptance_field() {
    static RadiationField rf = [] {
        RadiationGridSpec spec;
        spec.sigma_min = -60.0;
        return radiation_field(RadialFunction::zero(1.0), RadialFunction::poly_bump(1.0, 3),
                               spec);
    }();
    return rf;
}
} // namespace

TEST_CASE("radon transform of the poly bump") {
    auto f = RadialFunction::poly_bump(1.0, 3);
    CHECK(radon_transform(f, 0.0) == doctest::Approx(32.0 / 35.0).epsilon(1e-12));
    CHECK(radon_transform(f, 1.0) == 0.0);
    CHECK(radon_transform(f, -1.5) == 0.0);
    CHECK(radon_transform(RadialFunction::zero(), 0.3) == 0.0);
    // closed form: R(s) = (32/35)(1-s^2)^{7/2}
    for (double s : {-0.8, -0.3, 0.2, 0.6, 0.95}) {
        const double exact = 32.0 / 35.0 * std::pow(1.0 - s * s, 3.5);
        CHECK(radon_transform(f, s) == doctest::Approx(exact).epsilon(1e-12));
        CHECK(radon_transform(f, -s) == doctest::Approx(radon_transform(f, s)).epsilon(1e-14));
    }
}

TEST_CASE("radon transform derivative consistency") {
    auto f = RadialFunction::poly_bump(1.0, 3);
    const double h = 1e-5;
    for (double s : {-0.7, -0.2, 0.3, 0.8}) {
        const double fd = (radon_transform(f, s + h) - radon_transform(f, s - h)) / (2 * h);
        CHECK(radon_transform_ds(f, s) == doctest::Approx(fd).epsilon(1e-7));
        const double fd2 = (radon_transform_ds(f, s + h) - radon_transform_ds(f, s - h)) / (2 * h);
        CHECK(radon_transform_ds2(f, s) == doctest::Approx(fd2).epsilon(1e-6));
    }
    auto b = RadialFunction::bump(1.0, 1.0);
    for (double s : {-0.5, 0.4}) {
        const double fd = (radon_transform(b, s + h) - radon_transform(b, s - h)) / (2 * h);
        CHECK(radon_transform_ds(b, s) == doctest::Approx(fd).epsilon(1e-7));
    }
}

TEST_CASE("radiation field golden values") {
    const RadiationField& rf = acceptance_field();
    CHECK(rf.f0_at(0.0) == doctest::Approx(kF0_at_0).epsilon(2e-8));
    CHECK(rf.f0_at(-0.5) == doctest::Approx(kF0_at_m05).epsilon(2e-8));
    CHECK(rf.f0_at(0.5) == doctest::Approx(kF0_at_p05).epsilon(2e-8));
    CHECK(rf.f0_prime_at(0.0) == doctest::Approx(kF0p_at_0).epsilon(2e-8));
    CHECK(rf.rho0 == doctest::Approx(kRho0).epsilon(1e-6));
    CHECK(rf.min_f0_prime == doctest::Approx(kMinF0p).epsilon(1e-8));
    CHECK(rf.tau0 == doctest::Approx(kTau0).epsilon(1e-8));
    CHECK(rf.min_f0f0_prime == doctest::Approx(kMinF0F0p).epsilon(1e-8));
    CHECK(rf.nu0 == doctest::Approx(kNu0).epsilon(1e-8));
    auto [tau0, nu0] = lifespan_constants(rf);
    CHECK(tau0 == rf.tau0);
    CHECK(nu0 == rf.nu0);
}

TEST_CASE("support and trivial field") {
    const RadiationField& rf = acceptance_field();
    CHECK(rf.f0.back() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(rf.f0_at(1.0) == 0.0);
    CHECK(rf.f0_at(3.7) == 0.0);

    auto trivial = radiation_field(RadialFunction::zero(), RadialFunction::zero());
    CHECK(trivial.trivial);
    CHECK(trivial.tau0 == kInf);
    CHECK(trivial.nu0 == kInf);
    auto [t0, n0] = lifespan_constants(trivial);
    CHECK(t0 == kInf);
    CHECK(n0 == kInf);
}

TEST_CASE("mismatched supports are rejected") {
    CHECK_THROWS_AS(radiation_field(RadialFunction::bump(1.0, 1.0),
                                    RadialFunction::poly_bump(2.0, 3)),
                    std::invalid_argument);
}

TEST_CASE("linearity in the data") {
    RadiationGridSpec spec;
    spec.sigma_min = -20.0;
    auto u1a = RadialFunction::poly_bump(1.0, 3);
    auto u1b = RadialFunction::bump(1.0, 0.5);
    auto ra = radiation_field(RadialFunction::zero(1.0), u1a, spec);
    auto rb = radiation_field(RadialFunction::zero(1.0), u1b, spec);
    // u1a + u1b via tabulation
    std::vector<double> r, v;
    for (int i = 0; i <= 1024; ++i) {
        r.push_back(double(i) / 1024.0);
        v.push_back(u1a.value(r.back()) + u1b.value(r.back()));
    }
    auto rc = radiation_field(RadialFunction::zero(1.0), RadialFunction::from_samples(r, v), spec);
    for (double s : {-10.0, -3.0, -0.5, 0.0, 0.4, 0.9})
        CHECK(rc.f0_at(s) == doctest::Approx(ra.f0_at(s) + rb.f0_at(s)).epsilon(1e-8));
}

TEST_CASE("grid refinement stability") {
    RadiationGridSpec coarse;
    coarse.sigma_min = -55.0;
    auto r1 = radiation_field(RadialFunction::zero(1.0), RadialFunction::poly_bump(1.0, 3), coarse);
    RadiationGridSpec fine = coarse;
    fine.refine_factor = 0.5; // halves both spacings and doubles the quadrature order
    auto r2 = radiation_field(RadialFunction::zero(1.0), RadialFunction::poly_bump(1.0, 3), fine);
    double sup = 0.0;
    for (std::size_t i = 0; i < r1.sigma.size(); ++i) {
        const double s = r1.sigma[i];
        if (s < -50.0) continue;
        sup = std::max(sup, std::abs(r1.f0[i] - r2.f0_spline(s)));
    }
    CHECK(sup < 1e-6);
}

TEST_CASE("spline derivative of F0 matches the differentiated-integrand quadrature") {
    const RadiationField& rf = acceptance_field();
    CubicSpline f0s(rf.sigma, rf.f0);
    double sup = 0.0;
    for (double s = -50.0; s < rf.M - 0.1; s += 0.37)
        sup = std::max(sup, std::abs(f0s.deriv(s) - rf.f0_prime_at(s)));
    CHECK(sup < 1e-5);
}

TEST_CASE("decay estimate suprema are finite and window-stable") {
    RadiationGridSpec wide;
    wide.sigma_min = -220.0;
    auto rf = radiation_field(RadialFunction::zero(1.0), RadialFunction::poly_bump(1.0, 3), wide);
    for (int k = 0; k <= 2; ++k) {
        const double s100 = verify_decay(rf, k, -100.0);
        const double s200 = verify_decay(rf, k, -200.0);
        CHECK(s100 > 0.0);
        CHECK(std::isfinite(s200));
        CHECK(std::abs(s200 - s100) <= 0.05 * s100);
    }
    auto trivial = radiation_field(RadialFunction::zero(), RadialFunction::zero());
    CHECK(verify_decay(trivial, 0) == 0.0);
}
