#ifndef LAB_APPROX_HPP
#define LAB_APPROX_HPP

#include <memory>

#include "lab/profile.hpp"
#include "lab/radiation.hpp"
#include "lab/solver.hpp"

namespace lab {

// C^inf cutoff: 1 for s <= 1, 0 for s >= 2, monotone between (normalized bump
// integral); exact first and second derivatives.
class Cutoff {
  public:
    Cutoff();
    double operator()(double s) const;
    double prime(double s) const;
    double second(double s) const;

  private:
    static double phi(double x);
    static double phi_prime(double x);
    CubicSpline cdf_;
    double norm_ = 1.0;
};

// Linear wave solve (c == 1) with unit-amplitude data at 4x the requested
// resolution; value/derivative access through the stored record.
class LinearWave {
  public:
    double value(double t, double r) const { return rec_.u_at(t, r); }
    double dt(double t, double r) const { return rec_.p_at(t, r); }
    double dr(double t, double r) const { return rec_.q_at(t, r); }
    double t_end() const { return rec_.snaps.back().t; }
    const SimRecord& record() const { return rec_; }

  private:
    friend LinearWave linear_wave(const RadialFunction&, const RadialFunction&, double,
                                  double, double);
    SimRecord rec_;
};

// throws NumericError("resource-limit ...") when the refined grid exceeds the
// step x cell budget
LinearWave linear_wave(const RadialFunction& u0, const RadialFunction& u1, double t_end,
                       double dr_request, double record_dt = 0.25);

// weighted far-field deviation sup_{r >= t/2} |w0 - r^{-1/2} F0(r-t)|
// * (1+t)^{3/2} (1+|sigma|)^{-1/2}
double far_field_deviation(const LinearWave& w0, const RadiationField& rf, double t);

// u_a(t,r) = eps * ( chi(eps t) w0 + r^{-1/2} (1 - chi(eps t)) chi(-3 eps sigma)
//                    V(tau, sigma) ),  sigma = r - t, tau the slow time
class ApproxSolution {
  public:
    ApproxSolution(CaseTag case_tag, double eps, double b,
                   std::shared_ptr<const RadiationField> rf,
                   std::shared_ptr<const ProfileSolution> profile,
                   std::shared_ptr<const LinearWave> w0);

    double value(double t, double r) const;
    double dt(double t, double r) const;
    double dr(double t, double r) const;

    double tau(double t) const;
    double tau_deriv(double t) const;
    double horizon_b() const { return b_; }
    double epsilon() const { return eps_; }
    CaseTag case_tag() const { return case_; }
    double M() const { return rf_->M; }
    const Cutoff& chi() const { return chi_; }

  private:
    void check_horizon(double t) const;
    CaseTag case_;
    double eps_;
    double b_;
    std::shared_ptr<const RadiationField> rf_;
    std::shared_ptr<const ProfileSolution> prof_;
    std::shared_ptr<const LinearWave> w0_;
    Cutoff chi_;
};

ApproxSolution build_ua(CaseTag case_tag, double eps, double b, const RadiationField& rf,
                        EquationForm form = EquationForm::divergence,
                        double dr_linear = 0.02);

// || J_a(t, .) ||_{L^2(2 pi r dr)} with J_a = d2u/dt2 - c^2 Lap u - kappa c c' (du/dr)^2
// evaluated by 4th-order centered differences of u_a (step h) on a local grid
double residual_norm(const ApproxSolution& ua, const WaveSpeed& speed, EquationForm form,
                     double t, double h = 0.02, double dr_eval = 0.01);

// int_0^{t_end} ||J_a|| dt on a sqrt(1+t)-graded sample grid
double residual_time_integral(const ApproxSolution& ua, const WaveSpeed& speed,
                              EquationForm form, double t_end, int samples = 48);

// sup over snapshots with tau(t) <= b of |d(u - u_a)| (1+t)^{1/2} (1+|t-r|)^{1/2}
// / eps^{3/2}; case II divides additionally by |ln eps|
double compare_to_exact(const SimRecord& rec, const ApproxSolution& ua);

enum class ZKind { dr, dt, scaling, hyperbolic }; // S = t dt + r dr, H = r dt + t dr

// applies a Klainerman field to the recorded u by finite differences; returns
// values on the nodes of snapshot k (interior in time)
std::vector<double> z_field(const SimRecord& rec, std::size_t k, ZKind which);

} // namespace lab

#endif
