#include "lab/profile.hpp"

#include <algorithm>
#include <cmath>

#include "lab/kernels.hpp"
#include "lab/quadrature.hpp"

namespace lab {

std::string to_string(ModelVariant v) {
    switch (v) {
        case ModelVariant::div_I: return "div_I";
        case ModelVariant::div_II: return "div_II";
        case ModelVariant::var_I: return "var_I";
        case ModelVariant::var_II: return "var_II";
    }
    return "?";
}

double CharacteristicFan::f0(double s) const {
    if (s >= M || s < s_grid.front()) return 0.0;
    return f0_s_(s);
}

double CharacteristicFan::f0_prime(double s) const {
    if (s >= M || s < s_grid.front()) return 0.0;
    return f0p_s_(s);
}

double CharacteristicFan::sigma_of(double tau, double s) const {
    const double F = f0(s);
    return variant == ModelVariant::div_I ? s + 2.0 * F * tau : s + F * F * tau;
}

double CharacteristicFan::ds_sigma(double tau, double s) const {
    return variant == ModelVariant::div_I
               ? 1.0 + 2.0 * f0_prime(s) * tau
               : 1.0 + 2.0 * f0(s) * f0_prime(s) * tau;
}

double CharacteristicFan::invert(double tau, double sigma) const {
    if (tau >= tau_star * (1.0 - blowup_margin)) throw BlowupReached(tau, tau_star);
    if (sigma >= M) return sigma; // trivial branch outside the support
    double lo = s_grid.front();
    if (sigma <= sigma_of(tau, lo)) return sigma; // profile truncated to zero below the grid
    double hi = M;
    // monotone since ds_sigma > 0 for tau < tau_star
    for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
        const double mid = 0.5 * (lo + hi);
        (sigma_of(tau, mid) < sigma ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double CharacteristicFan::gradient_on(double tau, double s) const {
    const double fp = f0_prime(s);
    const double den = variant == ModelVariant::div_I ? 1.0 + 2.0 * fp * tau
                                                      : 1.0 + 2.0 * f0(s) * fp * tau;
    if (den <= 0.0) throw BlowupReached(tau, tau_star);
    return fp / den;
}

CharacteristicFan make_fan(const RadiationField& rf, ModelVariant v, double sigma_min) {
    if (v != ModelVariant::div_I && v != ModelVariant::div_II)
        throw std::invalid_argument("make_fan: characteristic solution exists only for the "
                                    "divergence-form models");
    CharacteristicFan fan;
    fan.variant = v;
    fan.M = rf.M;
    fan.rho = v == ModelVariant::div_I ? rf.rho0 : rf.rho0_tilde;
    fan.tau_star = v == ModelVariant::div_I ? rf.tau0 : rf.nu0;

    // 4096 nodes, half inside |s - rho| <= 1; never leave the tabulated field
    const int n_total = 4096;
    const double lo = std::max(sigma_min, rf.trivial ? sigma_min : rf.sigma.front());
    const double hi = rf.M;
    const double win_lo = std::max(lo, fan.rho - 1.0);
    const double win_hi = std::min(hi, fan.rho + 1.0);
    std::vector<double> nodes;
    nodes.reserve(n_total + 8);
    const int n_win = n_total / 2;
    const double left_len = std::max(0.0, win_lo - lo);
    const double right_len = std::max(0.0, hi - win_hi);
    const double outside = left_len + right_len;
    const int n_left = outside > 0 ? int(std::round((n_total - n_win) * left_len / outside)) : 0;
    const int n_right = (n_total - n_win) - n_left;
    if (n_left > 0)
        for (double s : linspace(lo, win_lo, n_left + 1)) nodes.push_back(s);
    for (double s : linspace(win_lo, win_hi, n_win)) nodes.push_back(s);
    if (n_right > 0)
        for (double s : linspace(win_hi, hi, n_right + 1)) nodes.push_back(s);
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end(),
                            [](double a, double b) { return b - a < 1e-13; }),
                nodes.end());

    fan.s_grid = nodes;
    fan.f0_of_s.resize(nodes.size());
    fan.f0_prime_of_s.resize(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        fan.f0_of_s[i] = rf.f0_spline(nodes[i]);
        fan.f0_prime_of_s[i] = rf.f0_prime_spline(nodes[i]);
    }
    fan.f0_s_ = CubicSpline(fan.s_grid, fan.f0_of_s);
    fan.f0p_s_ = CubicSpline(fan.s_grid, fan.f0_prime_of_s);
    return fan;
}

ProfileSolution solve_characteristic(const RadiationField& rf, ModelVariant v,
                                     double sigma_min) {
    ProfileSolution sol;
    sol.variant = v;
    sol.backend = ProfileSolution::Backend::characteristic;
    sol.M = rf.M;
    sol.fan_ = std::make_shared<CharacteristicFan>(make_fan(rf, v, sigma_min));
    if (std::isfinite(sol.fan_->tau_star)) {
        ProfileBlowup b;
        b.tau_star = sol.fan_->tau_star;
        b.sigma_star = sol.fan_->sigma_of(b.tau_star, sol.fan_->rho);
        sol.blowup = b;
    }
    return sol;
}

const CharacteristicFan& ProfileSolution::fan() const {
    if (!fan_) throw std::logic_error("ProfileSolution: no characteristic fan attached");
    return *fan_;
}

double ProfileSolution::V(double tau, double sigma) const {
    if (backend == Backend::characteristic)
        return fan_->f0(fan_->invert(tau, sigma));
    // fd backend: linear in tau, linear in sigma over the stored slices
    if (slice_tau_.empty()) throw std::logic_error("ProfileSolution: no stored slices");
    const auto it = std::lower_bound(slice_tau_.begin(), slice_tau_.end(), tau);
    const std::size_t k = std::min<std::size_t>(
        std::max<std::ptrdiff_t>(1, it - slice_tau_.begin()), slice_tau_.size() - 1);
    const double t0 = slice_tau_[k - 1], t1 = slice_tau_[k];
    const double a = t1 > t0 ? (tau - t0) / (t1 - t0) : 0.0;
    auto interp = [&](const std::vector<double>& f) {
        const auto& x = slice_sigma_;
        if (sigma <= x.front()) return f.front();
        if (sigma >= x.back()) return f.back();
        const std::size_t j = std::size_t(std::upper_bound(x.begin(), x.end(), sigma) -
                                          x.begin()) - 1;
        const double w = (sigma - x[j]) / (x[j + 1] - x[j]);
        return (1.0 - w) * f[j] + w * f[j + 1];
    };
    return (1.0 - a) * interp(slice_V_[k - 1]) + a * interp(slice_V_[k]);
}

double ProfileSolution::W(double tau, double sigma) const {
    if (backend == Backend::characteristic)
        return fan_->gradient_on(tau, fan_->invert(tau, sigma));
    if (slice_tau_.empty()) throw std::logic_error("ProfileSolution: no stored slices");
    const auto it = std::lower_bound(slice_tau_.begin(), slice_tau_.end(), tau);
    const std::size_t k = std::min<std::size_t>(
        std::max<std::ptrdiff_t>(1, it - slice_tau_.begin()), slice_tau_.size() - 1);
    const double t0 = slice_tau_[k - 1], t1 = slice_tau_[k];
    const double a = t1 > t0 ? (tau - t0) / (t1 - t0) : 0.0;
    auto interp = [&](const std::vector<double>& f) {
        const auto& x = slice_sigma_;
        if (sigma <= x.front()) return f.front();
        if (sigma >= x.back()) return f.back();
        const std::size_t j = std::size_t(std::upper_bound(x.begin(), x.end(), sigma) -
                                          x.begin()) - 1;
        const double w = (sigma - x[j]) / (x[j + 1] - x[j]);
        return (1.0 - w) * f[j] + w * f[j + 1];
    };
    return (1.0 - a) * interp(slice_W_[k - 1]) + a * interp(slice_W_[k]);
}

double ProfileSolution::V_tau(double tau, double sigma) const {
    if (backend != Backend::characteristic)
        throw std::logic_error("V_tau: analytic form available on the characteristic backend only");
    const double s = fan_->invert(tau, sigma);
    const double val = fan_->f0(s);
    const double grad = fan_->gradient_on(tau, s);
    // dV/dtau + (transport speed) dV/dsigma = 0
    return variant == ModelVariant::div_I ? -2.0 * val * grad : -val * val * grad;
}

namespace {

struct VariantCoeffs {
    // lam = a*V + b*V^2 pattern is not general enough; store switches instead
    ModelVariant v;
    void fill(const double* V, double* lam, double* mu, std::size_t n) const {
        switch (v) {
            case ModelVariant::div_I:
                for (std::size_t i = 0; i < n; ++i) { lam[i] = 2.0 * V[i]; mu[i] = 2.0; }
                break;
            case ModelVariant::div_II:
                for (std::size_t i = 0; i < n; ++i) { lam[i] = V[i] * V[i]; mu[i] = 2.0 * V[i]; }
                break;
            case ModelVariant::var_I:
                for (std::size_t i = 0; i < n; ++i) { lam[i] = 2.0 * V[i]; mu[i] = 1.0; }
                break;
            case ModelVariant::var_II:
                for (std::size_t i = 0; i < n; ++i) { lam[i] = V[i] * V[i]; mu[i] = V[i]; }
                break;
        }
    }
};

// V(sigma) = -int_sigma^M W, accumulated right to left (V = 0 at the right edge)
void integrate_V(const double* W, double* V, std::size_t n, double ds) {
    V[n - 1] = 0.0;
    for (std::size_t i = n - 1; i > 0; --i)
        V[i - 1] = V[i] - 0.5 * (W[i - 1] + W[i]) * ds;
}

} // namespace

ProfileSolution solve_asymptotic_pde(const RadiationField& rf, ModelVariant v,
                                     double tau_end, const FdProfileGrid& grid,
                                     const std::vector<double>* tracer_l,
                                     std::vector<std::vector<double>>* tracer_V,
                                     std::vector<std::vector<double>>* tracer_W) {
    if (!(tau_end > 0)) throw std::invalid_argument("solve_asymptotic_pde: tau_end must be > 0");
    ProfileSolution sol;
    sol.variant = v;
    sol.backend = ProfileSolution::Backend::finite_difference;
    sol.M = rf.M;

    const double sig_lo = grid.sigma_min;
    const double ds = grid.dsigma > 0
                          ? grid.dsigma
                          : 1e-3 * (rf.M - sig_lo) / (rf.M + 200.0);
    const std::size_t n = std::size_t(std::round((rf.M - sig_lo) / ds)) + 1;
    const double dsig = (rf.M - sig_lo) / double(n - 1);
    const double inv_ds = 1.0 / dsig;
    const double w_threshold = 1.0 / grid.grid_tol;

    // padded storage: two ghost cells each side
    std::vector<double> Wbuf(n + 4, 0.0), W1buf(n + 4, 0.0), Sbuf(n + 4, 0.0);
    std::vector<double> V(n), V1(n), lam(n), mu(n), dW(n), k1(n), k2(n);
    double* W = Wbuf.data() + 2;
    double* W1 = W1buf.data() + 2;
    double* S = Sbuf.data() + 2; // slopes: zero (first-order upwinding)

    auto sigma_at = [&](std::size_t i) { return sig_lo + double(i) * dsig; };
    for (std::size_t i = 0; i < n; ++i) W[i] = rf.f0_prime_spline(sigma_at(i));
    // inflow ghosts frozen at the initial data; outflow ghosts zero
    const double ghost_l1 = rf.f0_prime_spline(sig_lo - dsig);
    const double ghost_l2 = rf.f0_prime_spline(sig_lo - 2.0 * dsig);
    auto set_ghosts = [&](double* F) {
        F[-1] = ghost_l1;
        F[-2] = ghost_l2;
        F[n] = 0.0;
        F[n + 1] = 0.0;
    };
    set_ghosts(W);
    set_ghosts(W1);

    const VariantCoeffs coeffs{v};
    const auto& K = kernels::table();

    // tracers follow d sigma/d tau = lam(V)
    std::vector<double> tr_pos;
    if (tracer_l) tr_pos = *tracer_l;
    auto interp_node = [&](const double* F, double s) {
        const double x = (s - sig_lo) * inv_ds;
        const std::ptrdiff_t j = std::clamp<std::ptrdiff_t>(std::ptrdiff_t(x), 0,
                                                            std::ptrdiff_t(n) - 2);
        const double w = x - double(j);
        return (1.0 - w) * F[j] + w * F[j + 1];
    };

    const double cp_dtau = grid.checkpoint_dtau > 0 ? grid.checkpoint_dtau : tau_end / 400.0;
    double next_cp = 0.0;
    std::vector<double> pending_slices = grid.slice_taus;
    std::sort(pending_slices.begin(), pending_slices.end());

    sol.slice_sigma_.clear();
    for (std::size_t i = 0; i < n; i += std::size_t(grid.slice_stride))
        sol.slice_sigma_.push_back(sigma_at(i));

    auto checkpoint = [&](double tau) {
        integrate_V(W, V.data(), n, dsig);
        sol.cp_tau_.push_back(tau);
        sol.cp_maxw_.push_back(K.max_abs(W, n));
        double e = 0.0;
        for (std::size_t i = 0; i < n; ++i) e += W[i] * W[i];
        e -= 0.5 * (W[0] * W[0] + W[n - 1] * W[n - 1]);
        sol.cp_energy_.push_back(e * dsig);
        std::vector<double> sv, sw;
        for (std::size_t i = 0; i < n; i += std::size_t(grid.slice_stride)) {
            sv.push_back(V[i]);
            sw.push_back(W[i]);
        }
        sol.slice_tau_.push_back(tau);
        sol.slice_V_.push_back(std::move(sv));
        sol.slice_W_.push_back(std::move(sw));
        if (tracer_l) {
            std::vector<double> tv(tr_pos.size()), tw(tr_pos.size());
            for (std::size_t j = 0; j < tr_pos.size(); ++j) {
                tv[j] = interp_node(V.data(), tr_pos[j]);
                tw[j] = interp_node(W, tr_pos[j]);
            }
            if (tracer_V) tracer_V->push_back(std::move(tv));
            if (tracer_W) tracer_W->push_back(std::move(tw));
        }
    };

    double tau = 0.0;
    checkpoint(tau);
    next_cp = cp_dtau;

    while (tau < tau_end) {
        integrate_V(W, V.data(), n, dsig);
        coeffs.fill(V.data(), lam.data(), mu.data(), n);
        double lam_max = K.max_abs(lam.data(), n);
        if (lam_max < 1e-12) lam_max = 1e-12;
        double dtau = grid.cfl * dsig / lam_max;
        dtau = std::min(dtau, tau_end - tau);
        dtau = std::min(dtau, cp_dtau);
        if (!(dtau > 0)) throw NumericError("solve_asymptotic_pde: step size collapsed");

        K.upwind_deriv_signed(W, S, lam.data(), inv_ds, dW.data(), n);
        K.transport_decay_rhs(W, dW.data(), lam.data(), mu.data(), k1.data(), n);
        K.axpy(dtau, W, k1.data(), W1, n);
        set_ghosts(W1);

        integrate_V(W1, V1.data(), n, dsig);
        coeffs.fill(V1.data(), lam.data(), mu.data(), n);
        K.upwind_deriv_signed(W1, S, lam.data(), inv_ds, dW.data(), n);
        K.transport_decay_rhs(W1, dW.data(), lam.data(), mu.data(), k2.data(), n);

        // tracer advance with the trapezoid of stage speeds
        if (tracer_l) {
            const bool linear_speed = v == ModelVariant::div_I || v == ModelVariant::var_I;
            for (double& s : tr_pos) {
                const double Vold = interp_node(V.data(), s);
                const double v0 = linear_speed ? 2.0 * Vold : Vold * Vold;
                const double sp = std::min(s + dtau * v0, rf.M);
                const double Vnew = interp_node(V1.data(), sp);
                const double v1 = linear_speed ? 2.0 * Vnew : Vnew * Vnew;
                s = std::min(s + 0.5 * dtau * (v0 + v1), rf.M);
            }
        }

        K.heun_merge(W, W1, k2.data(), dtau, W, n);
        set_ghosts(W);
        tau += dtau;

        const double max_w = K.max_abs(W, n);
        if (!std::isfinite(max_w))
            throw NumericError("solve_asymptotic_pde: non-finite field at tau=" +
                               std::to_string(tau));

        if (!pending_slices.empty() && tau >= pending_slices.front()) {
            integrate_V(W, V.data(), n, dsig);
            FullSlice fs;
            fs.tau = tau;
            fs.sigma.assign(n, 0.0);
            for (std::size_t i = 0; i < n; ++i) fs.sigma[i] = sigma_at(i);
            fs.V.assign(V.begin(), V.end());
            fs.W.assign(W, W + n);
            sol.full_slices_.push_back(std::move(fs));
            pending_slices.erase(pending_slices.begin());
        }

        if (tau >= next_cp || max_w > w_threshold || tau >= tau_end) {
            checkpoint(tau);
            next_cp = tau + cp_dtau;
        }

        if (max_w > w_threshold) {
            ProfileBlowup b;
            b.tau_star = tau;
            std::size_t arg = 0;
            double best = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                if (std::abs(W[i]) > best) { best = std::abs(W[i]); arg = i; }
            b.sigma_star = sigma_at(arg);
            sol.blowup = b;
            break;
        }
    }
    return sol;
}

double profile_blowup_time(const RadiationField& rf, ModelVariant v, double* error_bar,
                           const FdProfileGrid& grid) {
    if (error_bar) *error_bar = 0.0;
    if (rf.trivial) return kInf;
    switch (v) {
        case ModelVariant::div_I: return rf.tau0;
        case ModelVariant::div_II: return rf.nu0;
        case ModelVariant::var_I:
            return rf.min_f0_prime < 0 ? -1.0 / rf.min_f0_prime : kInf;
        case ModelVariant::var_II: {
            const double horizon = std::isfinite(rf.nu0) ? 6.0 * rf.nu0 : 100.0;
            ProfileSolution sol = solve_asymptotic_pde(rf, v, horizon, grid);
            const double t1 = sol.blowup ? sol.blowup->tau_star : kInf;
            if (error_bar && std::isfinite(t1)) {
                FdProfileGrid half = grid;
                half.dsigma = (grid.dsigma > 0 ? grid.dsigma
                                               : 1e-3 * (rf.M - grid.sigma_min) / (rf.M + 200.0)) /
                              2.0;
                ProfileSolution s2 = solve_asymptotic_pde(rf, v, horizon, half);
                const double t2 = s2.blowup ? s2.blowup->tau_star : kInf;
                *error_bar = std::abs(t2 - t1);
            }
            return t1;
        }
    }
    return kInf;
}

LemmaA5Report lemma_a5_evidence(const RadiationField& rf, const FdProfileGrid& grid,
                                const std::optional<std::array<double, 3>>& ls) {
    if (rf.trivial)
        throw std::invalid_argument("lemma_a5_evidence: field is identically zero");

    std::array<double, 3> l{};
    if (ls) {
        l = *ls;
    } else {
        // longest run with F0' < 0 and F0'' > 0 strictly inside the stored grid
        double best_lo = 0, cur_lo = 0;
        bool in_run = false;
        double best_len = 0;
        for (std::size_t i = 0; i < rf.sigma.size(); ++i) {
            const bool ok = rf.f0_prime[i] < -1e-8 && rf.f0_double_prime[i] > 1e-8 &&
                            rf.sigma[i] > grid.sigma_min + 1.0 && rf.sigma[i] < rf.M;
            if (ok && !in_run) { in_run = true; cur_lo = rf.sigma[i]; }
            if ((!ok || i + 1 == rf.sigma.size()) && in_run) {
                in_run = false;
                const double hi = rf.sigma[i];
                if (hi - cur_lo > best_len) { best_len = hi - cur_lo; best_lo = cur_lo; }
            }
        }
        if (best_len <= 0)
            throw std::invalid_argument("lemma_a5_evidence: no interval with F0' < 0, F0'' > 0");
        l = {best_lo + 0.25 * best_len, best_lo + 0.5 * best_len, best_lo + 0.75 * best_len};
    }
    if (!(l[0] < l[1] && l[1] < l[2]))
        throw std::invalid_argument("lemma_a5_evidence: need l0 < l1 < l2");

    std::vector<double> tracer_l(l.begin(), l.end());
    std::vector<std::vector<double>> tv, tw;
    const double horizon = std::isfinite(rf.nu0) ? 6.0 * rf.nu0 : 100.0;
    ProfileSolution sol = solve_asymptotic_pde(rf, ModelVariant::var_II, horizon, grid,
                                               &tracer_l, &tv, &tw);

    LemmaA5Report rep;
    rep.l = l;
    rep.tau = sol.checkpoint_taus();
    rep.energy = sol.checkpoint_energy();
    rep.tau_blowup = sol.blowup ? sol.blowup->tau_star : kInf;
    for (std::size_t k = 0; k < tv.size(); ++k)
        for (int j = 0; j < 3; ++j) {
            rep.G_along[j].push_back(tv[k][j]);
            rep.Q_along[j].push_back(tw[k][j]);
        }

    const double e0 = rep.energy.front();
    double drift = 0.0;
    for (std::size_t k = 0; k < rep.tau.size(); ++k) {
        if (std::isfinite(rep.tau_blowup) && rep.tau[k] > 0.8 * rep.tau_blowup) break;
        drift = std::max(drift, std::abs(rep.energy[k] - e0) / std::abs(e0));
    }
    rep.energy_drift = drift;

    const auto& mw = sol.checkpoint_max_w();
    rep.q_growth_factor = mw.back() / mw.front();

    // max over tracers of |Q| on the last 10 checkpoints
    const std::size_t m = rep.tau.size();
    rep.q_monotone_last10 = m >= 11;
    for (std::size_t k = m >= 10 ? m - 10 : 1; k < m && rep.q_monotone_last10; ++k) {
        auto maxq = [&](std::size_t kk) {
            double q = 0;
            for (int j = 0; j < 3; ++j) q = std::max(q, std::abs(rep.Q_along[j][kk]));
            return q;
        };
        if (!(maxq(k) > maxq(k - 1))) rep.q_monotone_last10 = false;
    }
    return rep;
}

} // namespace lab
