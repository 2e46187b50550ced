#include "lab/radiation.hpp"

#include <algorithm>
#include <cmath>

#include "lab/quadrature.hpp"

namespace lab {

namespace {
constexpr double kAbelScale = 0.11253953951963830492; // 1/(2 pi sqrt 2)
constexpr double kAxisExclusion = 1e-12;              // removable r=0 point in R'_s
} // namespace

double radon_transform(const RadialFunction& f, double s, int gl_nodes) {
    const double M = f.support_radius();
    s = std::abs(s);
    if (s >= M || f.is_zero()) return 0.0;
    const double Y = std::sqrt(M * M - s * s);
    return 2.0 * gl_integrate(
                     [&](double y) { return f.value(std::sqrt(s * s + y * y)); }, 0.0, Y,
                     gl_nodes);
}

double radon_transform_ds(const RadialFunction& f, double s, int gl_nodes) {
    const double M = f.support_radius();
    const double sign = s < 0 ? -1.0 : 1.0;
    s = std::abs(s);
    if (s >= M || f.is_zero()) return 0.0;
    const double Y = std::sqrt(M * M - s * s);
    const double val = 2.0 * gl_integrate(
                                 [&](double y) {
                                     const double rho = std::sqrt(s * s + y * y);
                                     if (rho < kAxisExclusion) return 0.0;
                                     return f.deriv(rho) * s / rho;
                                 },
                                 0.0, Y, gl_nodes);
    return sign * val;
}

double radon_transform_ds2(const RadialFunction& f, double s, int gl_nodes) {
    const double M = f.support_radius();
    s = std::abs(s);
    if (s >= M || f.is_zero()) return 0.0;
    const double Y = std::sqrt(M * M - s * s);
    double val = 2.0 * gl_integrate(
                           [&](double y) {
                               const double rho2 = s * s + y * y;
                               const double rho = std::sqrt(rho2);
                               if (rho < kAxisExclusion) return f.deriv2(0.0);
                               return f.deriv2(rho) * s * s / rho2 +
                                      f.deriv(rho) * y * y / (rho2 * rho);
                           },
                           0.0, Y, gl_nodes);
    // boundary term from the moving endpoint; vanishes when f'(M) = 0
    const double fpM = f.deriv(M);
    if (fpM != 0.0 && Y > 0.0) val += 2.0 * fpM * (s / M) * (-s / Y);
    return val;
}

namespace {

// H(s) = R(s;u1) - R'_s(s;u0) and its s-derivative, tabulated once on [-M, M]
// and reused by every Abel evaluation.
struct AbelSource {
    double M;
    CubicSpline H;   // R(s;u1) - R'(s;u0)
    CubicSpline Hp;  // R'(s;u1) - R''(s;u0)
    double h_at(double s) const { return std::abs(s) >= M ? 0.0 : H(s); }
    double hp_at(double s) const { return std::abs(s) >= M ? 0.0 : Hp(s); }
};

AbelSource build_source(const RadialFunction& u0, const RadialFunction& u1, int gl_nodes,
                        int s_samples) {
    AbelSource src;
    src.M = u1.is_zero() ? u0.support_radius() : u1.support_radius();
    std::vector<double> s = linspace(-src.M, src.M, s_samples);
    std::vector<double> h(s.size()), hp(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        h[i] = radon_transform(u1, s[i], gl_nodes) - radon_transform_ds(u0, s[i], gl_nodes);
        hp[i] = radon_transform_ds(u1, s[i], gl_nodes) - radon_transform_ds2(u0, s[i], gl_nodes);
    }
    src.H = CubicSpline(s, std::move(h));
    src.Hp = CubicSpline(std::move(s), std::move(hp));
    return src;
}

// Abel integral with the s = sigma + z^2 substitution restricted to the band
// where the integrand is supported.
template <class G>
double abel_eval(const AbelSource& src, double sigma, int gl_nodes, G&& g) {
    if (sigma >= src.M) return 0.0;
    const double z_lo = std::sqrt(std::max(0.0, -src.M - sigma));
    const double z_hi = std::sqrt(src.M - sigma);
    const double val = 2.0 * kAbelScale *
                       gl_integrate([&](double z) { return g(sigma + z * z); }, z_lo, z_hi,
                                    gl_nodes);
    if (!std::isfinite(val))
        throw NumericError("radiation_field: Abel quadrature non-finite at sigma=" +
                           std::to_string(sigma));
    return val;
}

} // namespace

double RadiationField::f0_at(double s) const {
    if (trivial) return 0.0;
    return f0_eval_(s);
}

RadiationField radiation_field(const RadialFunction& u0, const RadialFunction& u1,
                               const RadiationGridSpec& spec) {
    RadiationField rf;
    rf.u0_ = std::make_shared<RadialFunction>(u0);
    rf.u1_ = std::make_shared<RadialFunction>(u1);

    if (!u0.is_zero() && !u1.is_zero() &&
        u0.support_radius() != u1.support_radius())
        throw std::invalid_argument("radiation_field: u0 and u1 must share a support radius");

    rf.M = u1.is_zero() ? u0.support_radius() : u1.support_radius();
    rf.trivial = u0.is_zero() && u1.is_zero();

    const double refine = spec.refine_factor;
    const int gl = std::max(32, int(spec.gl_nodes / refine));
    rf.gl_nodes_ = gl;

    // sigma grid: coarse on [sigma_min, fine_lo), fine on [fine_lo, M]
    const double fine_lo =
        std::max(spec.sigma_min,
                 std::isfinite(spec.fine_lo) ? spec.fine_lo : -(rf.M + 3.0));
    const double ds_fine = spec.fine_spacing * refine;
    const double ds_coarse = spec.coarse_spacing * refine;
    std::vector<double> grid;
    for (double s = spec.sigma_min; s < fine_lo; s += ds_coarse) grid.push_back(s);
    for (double s = fine_lo; s < rf.M; s += ds_fine) grid.push_back(s);
    grid.push_back(rf.M);
    rf.sigma = std::move(grid);

    const std::size_t n = rf.sigma.size();
    rf.f0.assign(n, 0.0);
    rf.f0_prime.assign(n, 0.0);
    rf.f0_double_prime.assign(n, 0.0);

    if (rf.trivial) {
        rf.tau0 = kInf;
        rf.nu0 = kInf;
        rf.rho0 = 0.0;
        rf.rho0_tilde = 0.0;
        rf.f0_eval_ = [](double) { return 0.0; };
        rf.f0p_eval_ = [](double) { return 0.0; };
        return rf;
    }

    auto src = std::make_shared<AbelSource>(build_source(u0, u1, gl, 4097));
    rf.f0_eval_ = [src, gl](double s) {
        return abel_eval(*src, s, gl, [&](double t) { return src->h_at(t); });
    };
    rf.f0p_eval_ = [src, gl](double s) {
        return abel_eval(*src, s, gl, [&](double t) { return src->hp_at(t); });
    };

    for (std::size_t i = 0; i < n; ++i) {
        rf.f0[i] = rf.f0_eval_(rf.sigma[i]);
        rf.f0_prime[i] = rf.f0p_eval_(rf.sigma[i]);
    }

    rf.f0_s_ = std::make_shared<CubicSpline>(rf.sigma, rf.f0);
    rf.f0p_s_ = std::make_shared<CubicSpline>(rf.sigma, rf.f0_prime);
    for (std::size_t i = 0; i < n; ++i)
        rf.f0_double_prime[i] = rf.f0p_s_->deriv(rf.sigma[i]);
    rf.f0pp_s_ = std::make_shared<CubicSpline>(rf.sigma, rf.f0_double_prime);

    // minimizers: coarse scan (first minimum wins ties) + golden-section refinement
    auto refine_min = [&](auto&& f, std::size_t i_best) {
        const std::size_t lo = i_best >= 2 ? i_best - 2 : 0;
        const std::size_t hi = std::min(i_best + 2, n - 1);
        return golden_section_min(f, rf.sigma[lo], rf.sigma[hi], 1e-10);
    };

    std::size_t i_p = 0, i_q = 0;
    double best_p = kInf, best_q = kInf;
    for (std::size_t i = 0; i < n; ++i) {
        if (rf.f0_prime[i] < best_p) { best_p = rf.f0_prime[i]; i_p = i; }
        const double prod = rf.f0[i] * rf.f0_prime[i];
        if (prod < best_q) { best_q = prod; i_q = i; }
    }
    rf.rho0 = refine_min([&](double s) { return rf.f0p_eval_(s); }, i_p);
    rf.min_f0_prime = rf.f0p_eval_(rf.rho0);
    rf.rho0_tilde = refine_min([&](double s) { return rf.f0_eval_(s) * rf.f0p_eval_(s); }, i_q);
    rf.min_f0f0_prime = rf.f0_eval_(rf.rho0_tilde) * rf.f0p_eval_(rf.rho0_tilde);

    rf.tau0 = rf.min_f0_prime < 0.0 ? -1.0 / (2.0 * rf.min_f0_prime) : kInf;
    rf.nu0 = rf.min_f0f0_prime < 0.0 ? -1.0 / (2.0 * rf.min_f0f0_prime) : kInf;
    return rf;
}

double RadiationField::f0_prime_at(double s) const {
    if (trivial) return 0.0;
    return f0p_eval_(s);
}

double RadiationField::f0_spline(double s) const {
    if (trivial || s >= M || s < sigma.front()) return 0.0; // truncate past the grid
    return (*f0_s_)(s);
}

double RadiationField::f0_prime_spline(double s) const {
    if (trivial || s >= M || s < sigma.front()) return 0.0;
    return (*f0p_s_)(s);
}

double RadiationField::f0_double_prime_spline(double s) const {
    if (trivial || s >= M || s < sigma.front()) return 0.0;
    return (*f0pp_s_)(s);
}

std::pair<double, double> lifespan_constants(const RadiationField& rf) {
    return {rf.tau0, rf.nu0};
}

double verify_decay(const RadiationField& rf, int k, double sigma_window_min) {
    if (k < 0 || k > 2) throw std::invalid_argument("verify_decay: k must be 0, 1 or 2");
    const std::vector<double>* arr = k == 0 ? &rf.f0 : (k == 1 ? &rf.f0_prime : &rf.f0_double_prime);
    double sup = 0.0;
    for (std::size_t i = 0; i < rf.sigma.size(); ++i) {
        const double s = rf.sigma[i];
        if (s < sigma_window_min) continue;
        const double w = std::pow(1.0 + std::abs(s), 0.5 + k);
        sup = std::max(sup, std::abs((*arr)[i]) * w);
    }
    return sup;
}

} // namespace lab
