#include "lab/radial.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "lab/util.hpp"

namespace lab {

RadialFunction RadialFunction::bump(double M, double amplitude) {
    if (!(M > 0)) throw std::invalid_argument("bump: support radius must be positive");
    RadialFunction f;
    f.M_ = M;
    f.tag_ = SmoothnessTag::c_infinity_bump;
    f.zero_ = (amplitude == 0.0);
    f.amplitude_ = amplitude;
    f.label_ = "bump(M=" + std::to_string(M) + ",amp=" + std::to_string(amplitude) + ")";
    return f;
}

RadialFunction RadialFunction::poly_bump(double M, int power) {
    if (!(M > 0)) throw std::invalid_argument("poly_bump: support radius must be positive");
    if (power < 2) throw std::invalid_argument("poly_bump: power must be >= 2");
    RadialFunction f;
    f.M_ = M;
    f.tag_ = SmoothnessTag::polynomial_bump;
    f.zero_ = false;
    f.amplitude_ = 1.0;
    f.power_ = power;
    f.label_ = "poly_bump(M=" + std::to_string(M) + ",power=" + std::to_string(power) + ")";
    return f;
}

RadialFunction RadialFunction::zero(double M) {
    RadialFunction f;
    f.M_ = M;
    f.tag_ = SmoothnessTag::c_infinity_bump;
    f.zero_ = true;
    f.amplitude_ = 0.0;
    f.label_ = "zero";
    return f;
}

RadialFunction RadialFunction::scaled(const RadialFunction& src, double factor) {
    RadialFunction f = src;
    f.amplitude_ *= factor;
    if (factor == 0.0) f.zero_ = true;
    if (f.spline_ && factor != 0.0) {
        std::vector<double> v = f.spline_->values();
        for (double& y : v) y *= factor;
        f.spline_ = std::make_shared<CubicSpline>(f.spline_->nodes(), std::move(v));
    }
    f.label_ = std::to_string(factor) + "*" + src.label_;
    return f;
}

RadialFunction RadialFunction::from_samples(std::vector<double> r, std::vector<double> v) {
    if (r.size() < 4) throw std::invalid_argument("from_samples: need at least 4 samples");
    if (r.front() != 0.0) throw std::invalid_argument("from_samples: samples must start at r = 0");
    RadialFunction f;
    f.M_ = r.back();
    f.tag_ = SmoothnessTag::tabulated;
    f.zero_ = true;
    for (double y : v)
        if (y != 0.0) { f.zero_ = false; break; }
    f.spline_ = std::make_shared<CubicSpline>(std::move(r), std::move(v));
    f.label_ = "tabulated";
    return f;
}

RadialFunction RadialFunction::from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("from_csv: cannot open " + path);
    std::vector<double> r, v;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        double a, b;
        if (ss >> a >> b) {
            r.push_back(a);
            v.push_back(b);
        } // non-numeric rows (headers) are skipped
    }
    auto f = from_samples(std::move(r), std::move(v));
    f.label_ = "csv:" + path;
    return f;
}

double RadialFunction::value(double r) const {
    r = std::abs(r);
    if (zero_ || r >= M_) return 0.0;
    switch (tag_) {
        case SmoothnessTag::c_infinity_bump: {
            const double x = r / M_;
            return amplitude_ * std::exp(1.0 - 1.0 / (1.0 - x * x));
        }
        case SmoothnessTag::polynomial_bump: {
            const double x = r / M_;
            return amplitude_ * std::pow(1.0 - x * x, power_);
        }
        case SmoothnessTag::tabulated:
            return (*spline_)(r);
    }
    return 0.0;
}

double RadialFunction::deriv(double r) const {
    const double sign = r < 0 ? -1.0 : 1.0;
    r = std::abs(r);
    if (zero_ || r >= M_) return 0.0;
    switch (tag_) {
        case SmoothnessTag::c_infinity_bump: {
            const double x = r / M_;
            const double g = 1.0 - x * x;
            // d/dx of (1 - 1/g) is -2x/g^2
            return sign * value(r) * (-2.0 * x / (g * g)) / M_;
        }
        case SmoothnessTag::polynomial_bump: {
            const double x = r / M_;
            return sign * amplitude_ * power_ * std::pow(1.0 - x * x, power_ - 1) * (-2.0 * x) / M_;
        }
        case SmoothnessTag::tabulated:
            return sign * spline_->deriv(r);
    }
    return 0.0;
}

double RadialFunction::deriv2(double r) const {
    r = std::abs(r);
    if (zero_ || r >= M_) return 0.0;
    switch (tag_) {
        case SmoothnessTag::c_infinity_bump: {
            const double x = r / M_;
            const double g = 1.0 - x * x;
            const double gp = -2.0 * x / (g * g);
            const double gpp = -2.0 / (g * g) - 8.0 * x * x / (g * g * g);
            return value(r) * (gp * gp + gpp) / (M_ * M_);
        }
        case SmoothnessTag::polynomial_bump: {
            const double x = r / M_;
            const double base = 1.0 - x * x;
            double d2 = power_ * (power_ - 1) * std::pow(base, power_ - 2) * 4.0 * x * x -
                        power_ * std::pow(base, power_ - 1) * 2.0;
            return amplitude_ * d2 / (M_ * M_);
        }
        case SmoothnessTag::tabulated:
            return spline_->deriv2(r);
    }
    return 0.0;
}

std::vector<double> RadialFunction::sample_grid() const {
    return linspace(0.0, M_, 513);
}

std::string to_string(CaseTag tag) {
    switch (tag) {
        case CaseTag::case_I: return "case_I";
        case CaseTag::case_II: return "case_II";
        case CaseTag::global_existence: return "global";
    }
    return "?";
}

WaveSpeed::WaveSpeed()
    : kind_(SpeedKind::affine), k_(1.0), c_([](double u) { return 1.0 + u; }),
      cp_([](double) { return 1.0; }), cpp_([](double) { return 0.0; }), label_("1+u") {}

WaveSpeed WaveSpeed::affine(double k) {
    WaveSpeed w;
    w.kind_ = SpeedKind::affine;
    w.k_ = k;
    w.c_ = [k](double u) { return 1.0 + k * u; };
    w.cp_ = [k](double) { return k; };
    w.cpp_ = [](double) { return 0.0; };
    w.label_ = "1+" + std::to_string(k) + "u";
    return w;
}

WaveSpeed WaveSpeed::quadratic(double k) {
    WaveSpeed w;
    w.kind_ = SpeedKind::quadratic;
    w.k_ = k;
    w.c_ = [k](double u) { return 1.0 + k * u * u; };
    w.cp_ = [k](double u) { return 2.0 * k * u; };
    w.cpp_ = [k](double) { return 2.0 * k; };
    w.label_ = "1+" + std::to_string(k) + "u^2";
    return w;
}

WaveSpeed WaveSpeed::cubic(double k) {
    WaveSpeed w;
    w.kind_ = SpeedKind::cubic;
    w.k_ = k;
    w.c_ = [k](double u) { return 1.0 + k * u * u * u; };
    w.cp_ = [k](double u) { return 3.0 * k * u * u; };
    w.cpp_ = [k](double u) { return 6.0 * k * u; };
    w.label_ = "1+" + std::to_string(k) + "u^3";
    return w;
}

WaveSpeed WaveSpeed::exp_half() {
    WaveSpeed w;
    w.kind_ = SpeedKind::exp_half;
    w.c_ = [](double u) { return std::exp(0.5 * u); };
    w.cp_ = [](double u) { return 0.5 * std::exp(0.5 * u); };
    w.cpp_ = [](double u) { return 0.25 * std::exp(0.5 * u); };
    w.label_ = "exp(u/2)";
    return w;
}

WaveSpeed WaveSpeed::liquid_crystal(double alpha, double beta) {
    if (alpha == beta)
        throw std::invalid_argument("liquid_crystal: requires alpha != beta");
    if (!(alpha > 0) || !(beta > 0))
        throw std::invalid_argument("liquid_crystal: alpha, beta must be positive");
    WaveSpeed w;
    w.kind_ = SpeedKind::liquid_crystal;
    const double d = beta - alpha;
    w.c_ = [alpha, d](double u) { const double s = std::sin(u); return alpha + d * s * s; };
    w.cp_ = [d](double u) { return d * std::sin(2.0 * u); };
    w.cpp_ = [d](double u) { return 2.0 * d * std::cos(2.0 * u); };
    w.label_ = "lc(alpha=" + std::to_string(alpha) + ",beta=" + std::to_string(beta) + ")";
    return w;
}

WaveSpeed WaveSpeed::unit() {
    WaveSpeed w = affine(0.0);
    w.label_ = "1";
    return w;
}

WaveSpeed WaveSpeed::custom(std::string label, std::function<double(double)> c,
                            std::function<double(double)> cp,
                            std::function<double(double)> cpp) {
    WaveSpeed w;
    w.kind_ = SpeedKind::custom;
    w.c_ = std::move(c);
    w.cp_ = std::move(cp);
    w.cpp_ = std::move(cpp);
    w.label_ = std::move(label);
    if (w.c_(0.0) == 0.0) throw std::invalid_argument("WaveSpeed: c(0) must be nonzero");
    return w;
}

CaseTag classify_wavespeed(const WaveSpeed& c, double tol) {
    if (std::abs(c.prime(0.0)) > tol) return CaseTag::case_I;
    if (std::abs(c.second(0.0)) > tol) return CaseTag::case_II;
    return CaseTag::global_existence;
}

std::vector<WaveSpeed> canonical_wavespeeds(double alpha, double beta) {
    return {WaveSpeed::affine(1.0), WaveSpeed::quadratic(1.0), WaveSpeed::exp_half(),
            WaveSpeed::liquid_crystal(alpha, beta)};
}

} // namespace lab
