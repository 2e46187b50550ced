#ifndef LAB_RADIAL_HPP
#define LAB_RADIAL_HPP

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "lab/spline.hpp"

namespace lab {

enum class SmoothnessTag { c_infinity_bump, polynomial_bump, tabulated };

// Compactly supported radial profile on [0, inf): value and two derivatives,
// identically zero for r >= support radius. Immutable after construction.
class RadialFunction {
  public:
    RadialFunction() = default;

    // amplitude * exp(1 - 1/(1-(r/M)^2)) inside r < M
    static RadialFunction bump(double M, double amplitude);
    // (1 - (r/M)^2)^power inside r <= M, power >= 2
    static RadialFunction poly_bump(double M, int power);
    static RadialFunction zero(double M = 1.0);
    static RadialFunction scaled(const RadialFunction& f, double factor);
    // tabulated profile, natural cubic spline through the samples
    static RadialFunction from_samples(std::vector<double> r, std::vector<double> v);
    // two-column CSV (r,value); header row optional
    static RadialFunction from_csv(const std::string& path);

    double value(double r) const;
    double deriv(double r) const;
    double deriv2(double r) const;

    double support_radius() const { return M_; }
    SmoothnessTag tag() const { return tag_; }
    bool is_zero() const { return zero_; }
    const std::string& label() const { return label_; }

    // uniform samples on [0, M], spacing M/512 by default
    std::vector<double> sample_grid() const;

  private:
    double M_ = 1.0;
    SmoothnessTag tag_ = SmoothnessTag::tabulated;
    bool zero_ = true;
    double amplitude_ = 0.0; // bump amplitude or poly scale
    int power_ = 0;          // poly power
    std::shared_ptr<const CubicSpline> spline_;
    std::string label_ = "zero";
};

enum class CaseTag { case_I, case_II, global_existence };

std::string to_string(CaseTag tag);

enum class SpeedKind { affine, quadratic, cubic, exp_half, liquid_crystal, custom };

// Smooth wave speed c(u) with exact first and second derivatives. The closed
// -form kinds let the solver inner loops vectorize the evaluation.
class WaveSpeed {
  public:
    WaveSpeed(); // defaults to 1 + u

    static WaveSpeed affine(double k = 1.0);           // 1 + k u
    static WaveSpeed quadratic(double k = 1.0);        // 1 + k u^2
    static WaveSpeed cubic(double k = 1.0);            // 1 + k u^3
    static WaveSpeed exp_half();                       // e^{u/2}
    static WaveSpeed liquid_crystal(double alpha, double beta); // a cos^2 u + b sin^2 u
    static WaveSpeed unit();                           // c == 1
    static WaveSpeed custom(std::string label, std::function<double(double)> c,
                            std::function<double(double)> cp,
                            std::function<double(double)> cpp);

    double operator()(double u) const { return c_(u); }
    double prime(double u) const { return cp_(u); }
    double second(double u) const { return cpp_(u); }

    SpeedKind kind() const { return kind_; }
    double param() const { return k_; } // k for affine/quadratic/cubic
    const std::string& label() const { return label_; }

  private:
    SpeedKind kind_ = SpeedKind::affine;
    double k_ = 1.0;
    std::function<double(double)> c_, cp_, cpp_;
    std::string label_;
};

// case_I iff |c'(0)| > tol, else case_II iff |c''(0)| > tol, else global
CaseTag classify_wavespeed(const WaveSpeed& c, double tol = 1e-10);

// {1+u, 1+u^2, e^{u/2}, liquid crystal(alpha,beta)}; throws for alpha == beta
std::vector<WaveSpeed> canonical_wavespeeds(double alpha = 1.0, double beta = 2.0);

} // namespace lab

#endif
