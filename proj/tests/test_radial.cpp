#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "lab/radial.hpp"

using namespace lab;

TEST_CASE("bump profile closed form") {
    auto f = RadialFunction::bump(1.0, 1.0);
    CHECK(f.value(0.0) == doctest::Approx(1.0));
    CHECK(f.value(1.0) == 0.0);
    CHECK(f.value(1.5) == 0.0);
    auto g = RadialFunction::bump(2.0, 0.5);
    CHECK(g.value(1.0) == doctest::Approx(0.5 * std::exp(1.0 - 4.0 / 3.0)).epsilon(1e-12));
    CHECK_THROWS_AS(RadialFunction::bump(-1.0, 1.0), std::invalid_argument);
}

TEST_CASE("poly bump closed form") {
    auto f = RadialFunction::poly_bump(1.0, 3);
    CHECK(f.value(0.0) == doctest::Approx(1.0));
    CHECK(f.value(0.5) == doctest::Approx(0.421875));
    CHECK(f.value(2.0) == 0.0);
    CHECK_THROWS_AS(RadialFunction::poly_bump(1.0, 1), std::invalid_argument);
}

TEST_CASE("derivatives match finite differences") {
    const double h = 1e-5;
    for (const auto& f : {RadialFunction::bump(1.3, 0.7), RadialFunction::poly_bump(2.0, 4)}) {
        for (double r : {0.2, 0.5, 0.9, 1.1}) {
            if (r >= f.support_radius() - 2 * h) continue;
            const double fd1 = (f.value(r + h) - f.value(r - h)) / (2 * h);
            const double fd2 = (f.value(r + h) - 2 * f.value(r) + f.value(r - h)) / (h * h);
            CHECK(f.deriv(r) == doctest::Approx(fd1).epsilon(1e-6));
            CHECK(f.deriv2(r) == doctest::Approx(fd2).epsilon(1e-4));
        }
    }
}

TEST_CASE("bump is flat at the support boundary") {
    auto f = RadialFunction::bump(1.0, 1.0);
    const double h = 1e-3;
    // one-sided finite differences of orders 1..4 at r = M stay tiny
    double d = 0.0;
    for (int order = 1; order <= 4; ++order) {
        d = 0.0;
        for (int k = 0; k <= order; ++k) {
            const double sign = (order - k) % 2 == 0 ? 1.0 : -1.0;
            double binom = 1.0;
            for (int j = 0; j < k; ++j) binom = binom * double(order - j) / double(j + 1);
            d += sign * binom * f.value(1.0 - double(order - k) * h);
        }
        d /= std::pow(h, order);
        CHECK(std::abs(d) < 1e-8);
    }
}

TEST_CASE("tabulated profile from samples and csv") {
    auto base = RadialFunction::poly_bump(1.0, 3);
    std::vector<double> r, v;
    for (int i = 0; i <= 512; ++i) {
        r.push_back(double(i) / 512.0);
        v.push_back(base.value(r.back()));
    }
    auto tab = RadialFunction::from_samples(r, v);
    CHECK(tab.value(0.3) == doctest::Approx(base.value(0.3)).epsilon(1e-8));
    CHECK(tab.value(2.0) == 0.0);

    const char* path = "lab_test_profile.csv";
    {
        std::ofstream out(path);
        out << "r,value\n";
        out.precision(17);
        for (std::size_t i = 0; i < r.size(); ++i) out << r[i] << ',' << v[i] << '\n';
    }
    auto csv = RadialFunction::from_csv(path);
    CHECK(csv.value(0.3) == doctest::Approx(base.value(0.3)).epsilon(1e-8));
    std::remove(path);
}

TEST_CASE("wave speed classification") {
    CHECK(classify_wavespeed(WaveSpeed::exp_half()) == CaseTag::case_I);
    CHECK(classify_wavespeed(WaveSpeed::liquid_crystal(1.0, 2.0)) == CaseTag::case_II);
    CHECK(classify_wavespeed(WaveSpeed::cubic(1.0)) == CaseTag::global_existence);
    for (double k : {1e-6, 0.1, 1.0, -2.0}) {
        CHECK(classify_wavespeed(WaveSpeed::affine(k)) == CaseTag::case_I);
        CHECK(classify_wavespeed(WaveSpeed::quadratic(k)) == CaseTag::case_II);
    }
}

TEST_CASE("canonical wave speeds") {
    auto speeds = canonical_wavespeeds(1.0, 2.0);
    REQUIRE(speeds.size() == 4);
    CHECK(speeds[2].prime(0.0) == doctest::Approx(0.5));
    CHECK(speeds[1].prime(0.0) == 0.0);
    CHECK(speeds[1].second(0.0) == doctest::Approx(2.0));
    // liquid crystal: c(0) = alpha, c''(0) = 2(beta - alpha)
    CHECK(speeds[3](0.0) == doctest::Approx(1.0));
    CHECK(speeds[3].second(0.0) == doctest::Approx(2.0));
    CHECK_THROWS_AS(WaveSpeed::liquid_crystal(1.0, 1.0), std::invalid_argument);

    // derivative consistency with finite differences on |u| <= 0.5
    const double h = 1e-5;
    for (const auto& c : speeds) {
        for (double u = -0.5; u <= 0.5; u += 0.1) {
            const double fd1 = (c(u + h) - c(u - h)) / (2 * h);
            const double fd2 = (c(u + h) - 2 * c(u) + c(u - h)) / (h * h);
            CHECK(c.prime(u) == doctest::Approx(fd1).epsilon(1e-6));
            CHECK(c.second(u) == doctest::Approx(fd2).epsilon(1e-4));
        }
    }
}
