#include "lab/approx.hpp"

#include <algorithm>
#include <cmath>

#include "lab/quadrature.hpp"

namespace lab {

double Cutoff::phi(double x) {
    if (x <= 1.0 || x >= 2.0) return 0.0;
    return std::exp(-1.0 / ((x - 1.0) * (2.0 - x)));
}

double Cutoff::phi_prime(double x) {
    if (x <= 1.0 || x >= 2.0) return 0.0;
    const double g = (x - 1.0) * (2.0 - x);
    const double gp = 3.0 - 2.0 * x;
    return phi(x) * gp / (g * g);
}

Cutoff::Cutoff() {
    const int n = 2049;
    std::vector<double> x = linspace(1.0, 2.0, n);
    std::vector<double> cdf(n, 0.0);
    for (int i = 1; i < n; ++i)
        cdf[i] = cdf[i - 1] + gl_integrate([](double s) { return phi(s); }, x[i - 1], x[i], 16);
    norm_ = cdf.back();
    cdf_ = CubicSpline(std::move(x), std::move(cdf));
}

double Cutoff::operator()(double s) const {
    if (s <= 1.0) return 1.0;
    if (s >= 2.0) return 0.0;
    return 1.0 - cdf_(s) / norm_;
}

double Cutoff::prime(double s) const {
    if (s <= 1.0 || s >= 2.0) return 0.0;
    return -phi(s) / norm_;
}

double Cutoff::second(double s) const {
    if (s <= 1.0 || s >= 2.0) return 0.0;
    return -phi_prime(s) / norm_;
}

LinearWave linear_wave(const RadialFunction& u0, const RadialFunction& u1, double t_end,
                       double dr_request, double record_dt) {
    const double dr = dr_request / 4.0;
    const double M = u1.is_zero() ? u0.support_radius() : u1.support_radius();
    const double r_max = t_end + M + 1.0;
    const double cells = r_max / dr;
    const double steps = t_end / (0.4 * dr);
    if (cells * steps > 4e10)
        throw NumericError("resource-limit: linear wave solve exceeds the step*cell budget");

    SimConfig cfg;
    cfg.epsilon = 1.0;
    cfg.speed = WaveSpeed::unit();
    cfg.form = EquationForm::divergence;
    cfg.u0 = u0;
    cfg.u1 = u1;
    cfg.dr = dr;
    cfg.cfl = 0.4;
    cfg.domain.kind = DomainPolicy::Kind::fixed;
    cfg.domain.r_max = r_max;
    cfg.t_max = t_end;
    cfg.blowup_threshold_scale = 0.0; // linear run, no blowup detection
    cfg.limiter = false;              // smooth fields, keep the scheme dispersion-limited
    cfg.record_dt = record_dt;
    cfg.diag_every = 1000;

    LinearWave w;
    RadialWaveSolver solver(cfg);
    solver.run(&w.rec_);
    return w;
}

double far_field_deviation(const LinearWave& w0, const RadiationField& rf, double t) {
    const Snapshot& s = w0.record().at_time(t);
    double sup = 0.0;
    for (std::size_t i = 0; i < s.u.size(); ++i) {
        const double r = s.r_at(i);
        if (r < 0.5 * s.t || r < 1e-6) continue;
        const double sigma = r - s.t;
        const double pred = rf.f0_spline(sigma) / std::sqrt(r);
        const double w = std::pow(1.0 + s.t, 1.5) / std::sqrt(1.0 + std::abs(sigma));
        sup = std::max(sup, std::abs(s.u[i] - pred) * w);
    }
    return sup;
}

ApproxSolution::ApproxSolution(CaseTag case_tag, double eps, double b,
                               std::shared_ptr<const RadiationField> rf,
                               std::shared_ptr<const ProfileSolution> profile,
                               std::shared_ptr<const LinearWave> w0)
    : case_(case_tag), eps_(eps), b_(b), rf_(std::move(rf)), prof_(std::move(profile)),
      w0_(std::move(w0)) {
    if (case_ == CaseTag::global_existence)
        throw std::invalid_argument("ApproxSolution: case must be I or II");
    const double limit = case_ == CaseTag::case_I ? rf_->tau0 : rf_->nu0;
    if (!(b_ > 0) || !(b_ < limit))
        throw std::invalid_argument("ApproxSolution: horizon b must lie in (0, tau0/nu0)");
    if (eps_ < 0) throw std::invalid_argument("ApproxSolution: eps must be >= 0");
}

double ApproxSolution::tau(double t) const {
    return case_ == CaseTag::case_I ? eps_ * std::sqrt(1.0 + t)
                                    : eps_ * eps_ * std::log1p(t);
}

double ApproxSolution::tau_deriv(double t) const {
    return case_ == CaseTag::case_I ? 0.5 * eps_ / std::sqrt(1.0 + t)
                                    : eps_ * eps_ / (1.0 + t);
}

void ApproxSolution::check_horizon(double t) const {
    if (eps_ == 0.0) return;
    // small slack past b so finite-difference stencils at the horizon stay legal
    const double limit = case_ == CaseTag::case_I ? rf_->tau0 : rf_->nu0;
    const double slack = b_ + 0.05 * (limit - b_);
    if (tau(t) > slack)
        throw std::invalid_argument("ApproxSolution: evaluation past the horizon b");
}

double ApproxSolution::value(double t, double r) const {
    check_horizon(t);
    if (eps_ == 0.0) return 0.0;
    const double cw = chi_(eps_ * t);
    double acc = 0.0;
    if (cw > 0.0) acc += cw * w0_->value(t, r);
    if (cw < 1.0 && r > 0.0) {
        const double sigma = r - t;
        const double cs = chi_(-3.0 * eps_ * sigma);
        if (cs > 0.0)
            acc += (1.0 - cw) * cs * prof_->V(tau(t), sigma) / std::sqrt(r);
    }
    return eps_ * acc;
}

double ApproxSolution::dt(double t, double r) const {
    check_horizon(t);
    if (eps_ == 0.0) return 0.0;
    const double cw = chi_(eps_ * t);
    const double cwp = chi_.prime(eps_ * t);
    double acc = 0.0;
    if (cw > 0.0 || cwp != 0.0)
        acc += eps_ * cwp * w0_->value(t, r) + cw * w0_->dt(t, r);
    if (cw < 1.0 && r > 0.0) {
        const double sigma = r - t;
        const double cs = chi_(-3.0 * eps_ * sigma);
        if (cs > 0.0 || (cwp != 0.0)) {
            const double csp = chi_.prime(-3.0 * eps_ * sigma);
            const double tt = tau(t);
            const double irs = 1.0 / std::sqrt(r);
            double term = 0.0;
            if (cs > 0.0) {
                const double V = prof_->V(tt, sigma);
                const double W = prof_->W(tt, sigma);
                const double Vt = prof_->V_tau(tt, sigma);
                term += cs * (Vt * tau_deriv(t) - W);
                term += 3.0 * eps_ * csp * V; // d/dt chi(-3 eps sigma) = +3 eps chi'
                term *= (1.0 - cw);
                if (cwp != 0.0) term += -eps_ * cwp * cs * V;
            } else if (cwp != 0.0) {
                term = 0.0; // cutoff kills the profile part here
            }
            acc += term * irs;
        }
    }
    return eps_ * acc;
}

double ApproxSolution::dr(double t, double r) const {
    check_horizon(t);
    if (eps_ == 0.0) return 0.0;
    const double cw = chi_(eps_ * t);
    double acc = 0.0;
    if (cw > 0.0) acc += cw * w0_->dr(t, r);
    if (cw < 1.0 && r > 0.0) {
        const double sigma = r - t;
        const double cs = chi_(-3.0 * eps_ * sigma);
        if (cs > 0.0) {
            const double csp = chi_.prime(-3.0 * eps_ * sigma);
            const double tt = tau(t);
            const double V = prof_->V(tt, sigma);
            const double W = prof_->W(tt, sigma);
            const double irs = 1.0 / std::sqrt(r);
            double term = cs * W - 3.0 * eps_ * csp * V; // d/dr chi(-3 eps sigma) = -3 eps chi'
            term *= irs;
            term += -0.5 * cs * V * irs / r;
            acc += (1.0 - cw) * term;
        }
    }
    return eps_ * acc;
}

ApproxSolution build_ua(CaseTag case_tag, double eps, double b, const RadiationField& rf,
                        EquationForm form, double dr_linear) {
    if (form != EquationForm::divergence)
        throw std::invalid_argument("build_ua: the approximate solution is built for the "
                                    "divergence-form profiles");
    const ModelVariant v = case_tag == CaseTag::case_I ? ModelVariant::div_I
                                                       : ModelVariant::div_II;
    auto rf_ptr = std::make_shared<RadiationField>(rf);
    auto prof = std::make_shared<ProfileSolution>(solve_characteristic(rf, v));
    // w0 is only used while chi(eps t) > 0, i.e. t <= 2/eps
    const double t_need = eps > 0 ? 2.0 / eps + 1.0 : 2.0;
    auto w0 = std::make_shared<LinearWave>(linear_wave(rf.u0(), rf.u1(), t_need, dr_linear, 0.1));
    return ApproxSolution(case_tag, eps, b, rf_ptr, prof, w0);
}

double residual_norm(const ApproxSolution& ua, const WaveSpeed& speed, EquationForm form,
                     double t, double h, double dr_eval) {
    if (ua.epsilon() == 0.0) return 0.0;
    const double eps = ua.epsilon();
    const double kappa = form == EquationForm::divergence ? 2.0 : 1.0;

    // the integrand is supported where either cutoff is active
    const double M = ua.M();
    double r_lo = std::max(2.0 * h, 1e-3);
    if (ua.chi()(eps * t) <= 0.0)
        r_lo = std::max(r_lo, t - 2.0 / (3.0 * eps) - 2.0 * h - 1.0);
    const double r_hi = t + M + 2.0 * h + 1.0;
    if (r_hi <= r_lo) return 0.0;

    const std::size_t n = std::size_t((r_hi - r_lo) / dr_eval) + 1;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = r_lo + double(i) * dr_eval;
        const double um2 = ua.value(t - 2.0 * h, r);
        const double um1 = ua.value(t - h, r);
        const double u00 = ua.value(t, r);
        const double up1 = ua.value(t + h, r);
        const double up2 = ua.value(t + 2.0 * h, r);
        const double utt = (-um2 + 16.0 * um1 - 30.0 * u00 + 16.0 * up1 - up2) / (12.0 * h * h);

        const double vm2 = ua.value(t, r - 2.0 * h);
        const double vm1 = ua.value(t, r - h);
        const double vp1 = ua.value(t, r + h);
        const double vp2 = ua.value(t, r + 2.0 * h);
        const double urr = (-vm2 + 16.0 * vm1 - 30.0 * u00 + 16.0 * vp1 - vp2) / (12.0 * h * h);
        const double ur = (vm2 - 8.0 * vm1 + 8.0 * vp1 - vp2) / (12.0 * h);

        const double c = speed(u00);
        const double cp = speed.prime(u00);
        const double J = utt - c * c * (urr + ur / r) - kappa * c * cp * ur * ur;
        acc += J * J * r;
    }
    return std::sqrt(2.0 * M_PI * acc * dr_eval);
}

double residual_time_integral(const ApproxSolution& ua, const WaveSpeed& speed,
                              EquationForm form, double t_end, int samples) {
    const double h = 0.02;
    const double x0 = std::sqrt(1.0 + 2.0 * h);
    const double x1 = std::sqrt(1.0 + t_end);
    double acc = 0.0;
    double prev_f = 0.0, prev_t = 0.0;
    bool first = true;
    for (int k = 0; k < samples; ++k) {
        const double x = x0 + (x1 - x0) * double(k) / double(samples - 1);
        const double t = x * x - 1.0;
        const double f = residual_norm(ua, speed, form, t, h);
        if (first) {
            acc += f * t; // left sliver [0, t0]
            first = false;
        } else {
            acc += 0.5 * (f + prev_f) * (t - prev_t);
        }
        prev_f = f;
        prev_t = t;
    }
    return acc;
}

double compare_to_exact(const SimRecord& rec, const ApproxSolution& ua) {
    if (rec.epsilon != ua.epsilon())
        throw std::invalid_argument("compare_to_exact: record and approx solution disagree on eps");
    const double eps = ua.epsilon();
    if (eps == 0.0) return 0.0;
    const double scale =
        std::pow(eps, 1.5) * (ua.case_tag() == CaseTag::case_II ? std::abs(std::log(eps)) : 1.0);

    double sup = 0.0;
    for (const Snapshot& s : rec.snaps) {
        if (ua.tau(s.t) > ua.horizon_b()) break;
        for (std::size_t i = 0; i < s.u.size(); ++i) {
            const double r = s.r_at(i);
            if (r < 2.0 * s.dr) continue;
            const double w = std::sqrt(1.0 + s.t) * std::sqrt(1.0 + std::abs(s.t - r));
            const double dt_diff = s.p[i] - ua.dt(s.t, r);
            const double dr_diff = s.q[i] - ua.dr(s.t, r);
            sup = std::max(sup, w * std::max(std::abs(dt_diff), std::abs(dr_diff)));
        }
    }
    return sup / scale;
}

std::vector<double> z_field(const SimRecord& rec, std::size_t k, ZKind which) {
    if (k == 0 || k + 1 >= rec.snaps.size())
        throw std::invalid_argument("z_field: need interior snapshot index");
    const Snapshot& s = rec.snaps[k];
    const double dt = rec.snaps[k + 1].t - rec.snaps[k - 1].t;
    std::vector<double> out(s.u.size(), 0.0);
    for (std::size_t i = 1; i + 1 < s.u.size(); ++i) {
        const double r = s.r_at(i);
        const double ut = (rec.u_at(rec.snaps[k + 1].t, r) - rec.u_at(rec.snaps[k - 1].t, r)) / dt;
        const double ur = (s.u[i + 1] - s.u[i - 1]) / (2.0 * s.dr);
        switch (which) {
            case ZKind::dr: out[i] = ur; break;
            case ZKind::dt: out[i] = ut; break;
            case ZKind::scaling: out[i] = s.t * ut + r * ur; break;
            case ZKind::hyperbolic: out[i] = r * ut + s.t * ur; break;
        }
    }
    return out;
}

} // namespace lab
