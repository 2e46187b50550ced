#ifndef LAB_RADIATION_HPP
#define LAB_RADIATION_HPP

#include <functional>
#include <memory>
#include <vector>

#include "lab/radial.hpp"
#include "lab/spline.hpp"
#include "lab/util.hpp"

namespace lab {

// R(s; f) = int f(sqrt(s^2+y^2)) dy = 2 int_0^{sqrt(M^2-s^2)} f(sqrt(s^2+y^2)) dy,
// even in s, zero for |s| >= M.
double radon_transform(const RadialFunction& f, double s, int gl_nodes = 256);
// d/ds R(s; f), computed from the differentiated integrand (odd in s)
double radon_transform_ds(const RadialFunction& f, double s, int gl_nodes = 256);
// d^2/ds^2 R(s; f)
double radon_transform_ds2(const RadialFunction& f, double s, int gl_nodes = 256);

struct RadiationGridSpec {
    double sigma_min = -200.0;
    double fine_lo = kInf;        // auto: -(M + 3)
    double fine_spacing = 1e-3;   // near the minimizer search window
    double coarse_spacing = 1e-2; // elsewhere
    int gl_nodes = 256;
    double refine_factor = 1.0;   // < 1 refines both spacings and quadrature (tests)
};

// Friedlander radiation field of (u0, u1) in 2-D,
//   F0(sigma) = 1/(2 pi sqrt 2) int_sigma^M (R(s;u1) - R'_s(s;u0)) / sqrt(s - sigma) ds,
// tabulated with derivatives, minimizers and the lifespan constants.
class RadiationField {
  public:
    std::vector<double> sigma;    // ascending, ends at M
    std::vector<double> f0;
    std::vector<double> f0_prime;
    std::vector<double> f0_double_prime;

    double M = 1.0;
    bool trivial = false;         // F0 == 0

    double rho0 = 0.0;            // argmin F0'
    double min_f0_prime = 0.0;
    double rho0_tilde = 0.0;      // argmin F0*F0'
    double min_f0f0_prime = 0.0;
    double tau0 = kInf;           // -1/(2 min F0')
    double nu0 = kInf;            // -1/(2 min F0 F0')

    // direct quadrature evaluators, independent of the tabulated arrays
    double f0_at(double sigma) const;
    double f0_prime_at(double sigma) const;

    // spline evaluators over the tabulated arrays
    double f0_spline(double sigma) const;
    double f0_prime_spline(double sigma) const;
    double f0_double_prime_spline(double sigma) const;

    const RadialFunction& u0() const { return *u0_; }
    const RadialFunction& u1() const { return *u1_; }
    int gl_nodes() const { return gl_nodes_; }

  private:
    friend RadiationField radiation_field(const RadialFunction&, const RadialFunction&,
                                          const RadiationGridSpec&);
    std::shared_ptr<const RadialFunction> u0_, u1_;
    std::shared_ptr<const CubicSpline> f0_s_, f0p_s_, f0pp_s_;
    std::function<double(double)> f0_eval_, f0p_eval_; // direct Abel quadrature
    int gl_nodes_ = 256;
};

RadiationField radiation_field(const RadialFunction& u0, const RadialFunction& u1,
                               const RadiationGridSpec& spec = {});

// (tau0, nu0) recomputed from the field by grid scan + golden-section refinement
std::pair<double, double> lifespan_constants(const RadiationField& rf);

// sup over tabulated sigma >= sigma_window_min of |F0^(k)| (1+|sigma|)^{1/2+k}
double verify_decay(const RadiationField& rf, int k, double sigma_window_min = -kInf);

} // namespace lab

#endif
