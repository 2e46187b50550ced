#include "lab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "lab/kernels.hpp"

namespace lab {

std::string to_string(EquationForm f) {
    return f == EquationForm::divergence ? "divergence" : "variational";
}

double SimConfig::support_radius() const {
    if (!u0.is_zero() && !u1.is_zero()) return std::max(u0.support_radius(), u1.support_radius());
    if (!u0.is_zero()) return u0.support_radius();
    if (!u1.is_zero()) return u1.support_radius();
    return 1.0;
}

double SimConfig::slow_time(double t) const {
    return case_tag() == CaseTag::case_II ? epsilon * epsilon * std::log1p(t)
                                          : epsilon * std::sqrt(1.0 + t);
}

void SimConfig::validate() const {
    if (!(epsilon >= 0)) throw std::invalid_argument("SimConfig: epsilon must be >= 0");
    if (!(dr > 0)) throw std::invalid_argument("SimConfig: dr must be positive");
    if (!(cfl > 0 && cfl < 1)) throw std::invalid_argument("SimConfig: cfl must lie in (0,1)");
    if (!(t_max > 0)) throw std::invalid_argument("SimConfig: t_max must be positive");
    if (!u0.is_zero() && !u1.is_zero() &&
        u0.support_radius() != u1.support_radius())
        throw std::invalid_argument("SimConfig: u0 and u1 must share a support radius");
    if (support_radius() / dr < 32.0)
        throw std::invalid_argument("SimConfig: dr must resolve the data (>= 32 cells across M)");
    if (speed(0.0) == 0.0) throw std::invalid_argument("SimConfig: c(0) must be nonzero");
}

namespace {
constexpr std::size_t PAD = 2;

double lagrange4(const double* f, double frac) {
    // cubic through nodes -1,0,1,2 evaluated at frac in [0,1] relative to node 0
    const double x = frac;
    const double wm1 = -x * (x - 1.0) * (x - 2.0) / 6.0;
    const double w0 = (x + 1.0) * (x - 1.0) * (x - 2.0) / 2.0;
    const double w1 = -(x + 1.0) * x * (x - 2.0) / 2.0;
    const double w2 = (x + 1.0) * x * (x - 1.0) / 6.0;
    return wm1 * f[-1] + w0 * f[0] + w1 * f[1] + w2 * f[2];
}

double interp_r(const std::vector<double>& f, double r0, double dr, double r) {
    const std::ptrdiff_t n = std::ptrdiff_t(f.size());
    const double x = (r - r0) / dr;
    std::ptrdiff_t j = std::ptrdiff_t(std::floor(x));
    j = std::clamp<std::ptrdiff_t>(j, 1, n - 3);
    return lagrange4(f.data() + j, x - double(j));
}
} // namespace

RadialWaveSolver::RadialWaveSolver(SimConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    const double M = cfg_.support_radius();
    kappa_ = cfg_.form == EquationForm::divergence ? 2.0 : 1.0;

    double span;
    if (cfg_.domain.kind == DomainPolicy::Kind::fixed) {
        span = cfg_.domain.r_max > 0 ? cfg_.domain.r_max : cfg_.t_max + M + 1.0;
    } else {
        span = cfg_.domain.width > 0 ? cfg_.domain.width : 4.0 * (M + 4.0);
        if (span < M + 2.0) throw std::invalid_argument("SimConfig: window too narrow for the data");
    }
    n_ = std::size_t(std::ceil(span / cfg_.dr)) + 1;
    i0_ = 0;

    const std::size_t nb = n_ + 2 * PAD;
    for (auto* v : {&ub_, &pb_, &qb_, &u1b_, &p1b_, &q1b_, &cb_, &cpb_, &rmb_, &rpb_, &smb_, &spb_})
        v->assign(nb, 0.0);
    for (auto* v : {&dp_, &dq_, &ku_, &kp_, &kq_, &ku2_, &kp2_, &kq2_}) v->assign(n_, 0.0);

    double* u = ub_.data() + PAD;
    double* p = pb_.data() + PAD;
    double* q = qb_.data() + PAD;
    for (std::size_t i = 0; i < n_; ++i) {
        const double r = double(i) * cfg_.dr;
        u[i] = cfg_.epsilon * cfg_.u0.value(r);
        p[i] = cfg_.epsilon * cfg_.u1.value(r);
        q[i] = cfg_.epsilon * cfg_.u0.deriv(r);
    }
    q[0] = 0.0;

    state_.t = 0.0;
    state_.r0 = 0.0;
    state_.dr = cfg_.dr;
    state_.u.assign(u, u + n_);
    state_.p.assign(p, p + n_);
    state_.q.assign(q, q + n_);
    refresh_diag();
}

void RadialWaveSolver::compute_speed(const double* u, double* c, double* cp,
                                     std::size_t count) const {
    using kernels::SpeedForm;
    const auto& K = kernels::table();
    switch (cfg_.speed.kind()) {
        case SpeedKind::affine:
            K.speed_eval(SpeedForm::affine, cfg_.speed.param(), u, c, cp, count);
            return;
        case SpeedKind::quadratic:
            K.speed_eval(SpeedForm::quadratic, cfg_.speed.param(), u, c, cp, count);
            return;
        default:
            for (std::size_t i = 0; i < count; ++i) {
                c[i] = cfg_.speed(u[i]);
                cp[i] = cfg_.speed.prime(u[i]);
            }
    }
}

void RadialWaveSolver::fill_ghosts(double* u, double* p, double* q) const {
    if (i0_ == 0) {
        // axis symmetry: u, p even; q odd
        q[0] = 0.0;
        u[-1] = u[1];
        u[-2] = u[2];
        p[-1] = p[1];
        p[-2] = p[2];
        q[-1] = -q[1];
        q[-2] = -q[2];
    } else {
        // interior inner boundary of the moving window
        u[-1] = u[0];
        u[-2] = u[0];
        p[-1] = p[0];
        p[-2] = p[0];
        q[-1] = q[0];
        q[-2] = q[0];
    }
    for (std::size_t k = 0; k < PAD; ++k) {
        u[n_ + k] = 0.0;
        p[n_ + k] = 0.0;
        q[n_ + k] = 0.0;
    }
}

void RadialWaveSolver::rhs(const double* u, const double* p, const double* q, double* ku,
                           double* kp, double* kq) {
    const auto& K = kernels::table();
    double* c = cb_.data() + PAD;
    double* cp = cpb_.data() + PAD;
    double* rm = rmb_.data() + PAD;
    double* rp = rpb_.data() + PAD;
    double* sm = smb_.data() + PAD;
    double* sp = spb_.data() + PAD;

    compute_speed(u - PAD, c - PAD, cp - PAD, n_ + 2 * PAD);
    K.char_pair(p - PAD, q - PAD, c - PAD, rm - PAD, rp - PAD, n_ + 2 * PAD);
    if (cfg_.limiter) {
        K.minmod_slopes(rm - 1, sm - 1, n_ + 2);
        K.minmod_slopes(rp - 1, sp - 1, n_ + 2);
    } else {
        K.fromm_slopes(rm - 1, sm - 1, n_ + 2);
        K.fromm_slopes(rp - 1, sp - 1, n_ + 2);
    }
    K.upwind_derivs(rm, rp, sm, sp, c, cp, q, 1.0 / cfg_.dr, dp_.data(), dq_.data(), n_);
    K.wave_rhs(p, q, c, cp, dp_.data(), dq_.data(), state_.r0, cfg_.dr, kappa_, ku, kp, kq, n_);
}

void RadialWaveSolver::step() {
    const auto& K = kernels::table();
    double* u = ub_.data() + PAD;
    double* p = pb_.data() + PAD;
    double* q = qb_.data() + PAD;
    double* u1 = u1b_.data() + PAD;
    double* p1 = p1b_.data() + PAD;
    double* q1 = q1b_.data() + PAD;

    fill_ghosts(u, p, q);
    rhs(u, p, q, ku_.data(), kp_.data(), kq_.data());

    double cmax = 0.0;
    {
        const double* c = cb_.data() + PAD;
        cmax = K.max_abs(c, n_);
    }
    if (!(cmax > 0)) throw NumericError("step: wave speed collapsed to zero");
    double dt = cfg_.cfl * cfg_.dr / cmax;
    dt_last_ = dt;

    K.axpy(dt, u, ku_.data(), u1, n_);
    K.axpy(dt, p, kp_.data(), p1, n_);
    K.axpy(dt, q, kq_.data(), q1, n_);
    fill_ghosts(u1, p1, q1);
    rhs(u1, p1, q1, ku2_.data(), kp2_.data(), kq2_.data());

    K.heun_merge(u, u1, ku2_.data(), dt, u, n_);
    K.heun_merge(p, p1, kp2_.data(), dt, p, n_);
    K.heun_merge(q, q1, kq2_.data(), dt, q, n_);
    if (i0_ == 0) q[0] = 0.0;

    state_.t += dt;
    ++step_count_;
    shift_window();

    state_.r0 = double(i0_) * cfg_.dr;
    state_.u.assign(u, u + n_);
    state_.p.assign(p, p + n_);
    state_.q.assign(q, q + n_);
}

void RadialWaveSolver::shift_window() {
    if (cfg_.domain.kind != DomainPolicy::Kind::moving_window) return;
    const double M = cfg_.support_radius();
    const double r_right = double(i0_ + std::int64_t(n_) - 1) * cfg_.dr;
    const double needed = state_.t + M + 1.0 + 2.0 * cfg_.dr;
    if (r_right >= needed) return;
    const std::size_t k = std::size_t(std::ceil((needed - r_right) / cfg_.dr));
    const std::size_t nb = n_ + 2 * PAD;
    for (auto* v : {&ub_, &pb_, &qb_}) {
        double* d = v->data();
        std::memmove(d, d + k, (nb - k) * sizeof(double));
        std::fill(d + nb - k, d + nb, 0.0);
    }
    i0_ += std::int64_t(k);
}

void RadialWaveSolver::refresh_diag() {
    const auto& K = kernels::table();
    const double* u = ub_.data() + PAD;
    const double* p = pb_.data() + PAD;
    const double* q = qb_.data() + PAD;
    double* c = cb_.data() + PAD;
    double* cp = cpb_.data() + PAD;
    compute_speed(u, c, cp, n_);

    diag_.t = state_.t;
    diag_.dt = dt_last_;
    diag_.max_p = K.max_abs(p, n_);
    diag_.max_q = K.max_abs(q, n_);
    diag_.energy = K.energy(p, q, c, state_.r0, cfg_.dr, n_);

    const double r_min = std::max(4.0 * cfg_.dr, 0.5 * state_.t);
    std::size_t i_start = 0;
    if (r_min > state_.r0)
        i_start = std::min(n_, std::size_t(std::ceil((r_min - state_.r0) / cfg_.dr)));
    K.max_w12(u, p, q, c, state_.r0, cfg_.dr, i_start, n_, &diag_.max_w1, &diag_.max_w2);
}

BlowupReport RadialWaveSolver::run(SimRecord* record) {
    BlowupReport rep;
    const double threshold = cfg_.blowup_threshold_scale * cfg_.epsilon;
    const double M = cfg_.support_radius();

    auto snapshot = [&]() {
        if (!record) return;
        Snapshot s;
        s.t = state_.t;
        s.r0 = state_.r0;
        s.dr = cfg_.dr;
        s.u = state_.u;
        s.p = state_.p;
        s.q = state_.q;
        record->snaps.push_back(std::move(s));
    };
    if (record) {
        record->dr = cfg_.dr;
        record->epsilon = cfg_.epsilon;
        record->M = M;
        snapshot();
    }
    refresh_diag();
    rep.series.push_back(diag_);

    double next_record = cfg_.record_dt;
    double next_diag = cfg_.diag_dt;
    bool crossed = false;
    std::string stop_note;

    while (true) {
        if (state_.t >= cfg_.t_max) {
            stop_note = "t_max reached";
            break;
        }
        if (cfg_.slow_time(state_.t) > cfg_.slow_time_cap) {
            stop_note = "slow-time cap reached";
            break;
        }
        step();
        const bool want_diag = cfg_.diag_dt > 0 ? state_.t >= next_diag
                                                : step_count_ % cfg_.diag_every == 0;
        if (want_diag) {
            refresh_diag();
            rep.series.push_back(diag_);
            if (cfg_.diag_dt > 0) next_diag += cfg_.diag_dt;
        }
        if (record && cfg_.record_dt > 0 && state_.t >= next_record - 1e-12) {
            snapshot();
            next_record += cfg_.record_dt;
        }
        if (threshold > 0 && diag_.max_w1 >= threshold) {
            crossed = true;
            rep.t_threshold = state_.t;
            snapshot();
            break;
        }
        if (dt_last_ < 1e-12) {
            crossed = true; // near-blowup signal: the CFL step collapsed
            rep.t_threshold = state_.t;
            stop_note = "dt collapse";
            snapshot();
            break;
        }
    }
    rep.t_reached = state_.t;
    if (record) record->diags = rep.series;

    if (!crossed) {
        rep.outcome = BlowupReport::Outcome::censored;
        rep.censor_reason = stop_note;
        return rep;
    }

    // extrapolate 1/max|w1| to zero against the case-appropriate clock; the fit
    // window is the last stretch of the clock before the threshold crossing
    const bool case2 = cfg_.case_tag() == CaseTag::case_II;
    rep.clock = case2 ? "ln(1+t)" : "sqrt(1+t)";
    auto clock_of = [case2](double t) { return case2 ? std::log1p(t) : std::sqrt(1.0 + t); };
    const double x_cross = clock_of(rep.t_threshold);
    std::vector<double> xs, ys;
    const std::size_t m = rep.series.size();
    for (std::size_t i = 0; i < m; ++i) {
        const auto& d = rep.series[i];
        if (d.max_w1 <= 0) continue;
        const double x = clock_of(d.t);
        if (x < 0.85 * x_cross) continue;
        xs.push_back(x);
        ys.push_back(1.0 / d.max_w1);
    }
    if (xs.size() < 10) {
        // thin sampling near the crossing: fall back to the last 50 samples
        xs.clear();
        ys.clear();
        for (std::size_t i = m > 50 ? m - 50 : 0; i < m; ++i) {
            const auto& d = rep.series[i];
            if (d.max_w1 <= 0) continue;
            xs.push_back(clock_of(d.t));
            ys.push_back(1.0 / d.max_w1);
        }
    }
    if (xs.size() < 10) {
        rep.outcome = BlowupReport::Outcome::censored;
        rep.censor_reason = "threshold crossed but too few samples for extrapolation";
        return rep;
    }
    const LineFit fit = fit_line(xs, ys);
    rep.fit_r2 = fit.r2;
    rep.fit_slope = fit.slope;
    rep.fit_intercept = fit.intercept;
    if (!(fit.slope < 0) || fit.r2 < 0.99) {
        rep.outcome = BlowupReport::Outcome::censored;
        rep.censor_reason = "extrapolation fit rejected (R^2 <= 0.99 or wrong slope)";
        return rep;
    }
    const double x_star = -fit.intercept / fit.slope;
    rep.T_eps = case2 ? std::expm1(x_star) : x_star * x_star - 1.0;
    rep.outcome = BlowupReport::Outcome::blowup;

    // blowup location from the final state
    const double* u = ub_.data() + PAD;
    const double* p = pb_.data() + PAD;
    const double* q = qb_.data() + PAD;
    double best = -1.0;
    for (std::size_t i = 1; i < n_; ++i) {
        const double r = state_.r_at(i);
        if (r < std::max(4.0 * cfg_.dr, 0.5 * state_.t)) continue;
        const double sr = std::sqrt(r);
        const double cv = cfg_.speed(u[i]);
        const double w1 = sr * p[i] - cv * (sr * q[i] + u[i] / (2.0 * sr));
        if (std::abs(w1) > best) {
            best = std::abs(w1);
            rep.r_star = r;
        }
    }
    rep.sigma_star = rep.r_star - rep.T_eps;
    return rep;
}

const Snapshot& SimRecord::at_time(double t) const {
    if (snaps.empty()) throw std::logic_error("SimRecord: no snapshots");
    std::size_t best = 0;
    double dist = kInf;
    for (std::size_t i = 0; i < snaps.size(); ++i) {
        const double d = std::abs(snaps[i].t - t);
        if (d < dist) { dist = d; best = i; }
    }
    return snaps[best];
}

namespace {
std::pair<std::size_t, std::size_t> bracket_time(const std::vector<Snapshot>& snaps, double t) {
    std::size_t lo = 0, hi = snaps.size() - 1;
    if (t <= snaps.front().t) return {0, 0};
    if (t >= snaps.back().t) return {hi, hi};
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        (snaps[mid].t <= t ? lo : hi) = mid;
    }
    return {lo, hi};
}
} // namespace

double SimRecord::u_at(double t, double r) const {
    const auto [k0, k1] = bracket_time(snaps, t);
    const auto& a = snaps[k0];
    if (k0 == k1) return interp_r(a.u, a.r0, dr, r);
    const auto& b = snaps[k1];
    const double fa = interp_r(a.u, a.r0, dr, r);
    const double fb = interp_r(b.u, b.r0, dr, r);
    const double da = interp_r(a.p, a.r0, dr, r); // du/dt = p
    const double db = interp_r(b.p, b.r0, dr, r);
    return hermite(t, a.t, b.t, fa, fb, da, db);
}

double SimRecord::p_at(double t, double r) const {
    const auto [k0, k1] = bracket_time(snaps, t);
    const auto& a = snaps[k0];
    if (k0 == k1) return interp_r(a.p, a.r0, dr, r);
    const auto& b = snaps[k1];
    const double fa = interp_r(a.p, a.r0, dr, r);
    const double fb = interp_r(b.p, b.r0, dr, r);
    const double w = (t - a.t) / (b.t - a.t);
    return (1.0 - w) * fa + w * fb;
}

double SimRecord::q_at(double t, double r) const {
    const auto [k0, k1] = bracket_time(snaps, t);
    const auto& a = snaps[k0];
    if (k0 == k1) return interp_r(a.q, a.r0, dr, r);
    const auto& b = snaps[k1];
    const double fa = interp_r(a.q, a.r0, dr, r);
    const double fb = interp_r(b.q, b.r0, dr, r);
    const double w = (t - a.t) / (b.t - a.t);
    return (1.0 - w) * fa + w * fb;
}

WFields w_variables(const Snapshot& snap, const WaveSpeed& speed, double r_min) {
    if (!(r_min > 0))
        throw std::invalid_argument("w_variables: excluded region, requires r_min > 0");
    WFields out;
    for (std::size_t i = 0; i < snap.u.size(); ++i) {
        const double r = snap.r_at(i);
        if (r < r_min) continue;
        const double sr = std::sqrt(r);
        const double cv = speed(snap.u[i]);
        const double a = sr * snap.p[i];
        const double b = cv * (sr * snap.q[i] + snap.u[i] / (2.0 * sr));
        out.r.push_back(r);
        out.w1.push_back(a - b);
        out.w2.push_back(a + b);
    }
    return out;
}

CharPath extract_characteristic(const SimRecord& rec, const WaveSpeed& speed, double lambda,
                                int sign) {
    if (rec.snaps.size() < 2)
        throw std::invalid_argument("extract_characteristic: record needs >= 2 snapshots");
    CharPath path;
    path.lambda = lambda;
    path.sign = sign;

    double r = lambda;
    auto inside = [&](const Snapshot& s, double rr) {
        const double r_lo = s.r0 + 2.0 * rec.dr;
        const double r_hi = s.r0 + double(s.u.size() - 3) * rec.dr;
        return rr >= r_lo && rr <= r_hi;
    };

    auto push = [&](double t, double rr) {
        const double u = rec.u_at(t, rr);
        const double p = rec.p_at(t, rr);
        const double q = rec.q_at(t, rr);
        const double sr = std::sqrt(std::max(rr, 1e-300));
        const double cv = speed(u);
        path.t.push_back(t);
        path.r.push_back(rr);
        path.u.push_back(u);
        path.w1.push_back(sr * p - cv * (sr * q + u / (2.0 * sr)));
        path.w2.push_back(sr * p + cv * (sr * q + u / (2.0 * sr)));
    };
    push(rec.snaps.front().t, r);

    auto drdt = [&](double t, double rr) { return double(sign) * speed(rec.u_at(t, rr)); };

    for (std::size_t k = 0; k + 1 < rec.snaps.size(); ++k) {
        const double t0 = rec.snaps[k].t, t1 = rec.snaps[k + 1].t;
        const int sub = 2;
        const double h = (t1 - t0) / sub;
        double t = t0;
        for (int s = 0; s < sub; ++s) {
            const double k1 = drdt(t, r);
            const double k2 = drdt(t + 0.5 * h, r + 0.5 * h * k1);
            const double k3 = drdt(t + 0.5 * h, r + 0.5 * h * k2);
            const double k4 = drdt(t + h, r + h * k3);
            r += h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
            t += h;
        }
        if (!inside(rec.snaps[k + 1], r)) {
            path.truncated = true;
            break;
        }
        push(t1, r);
    }
    return path;
}

BootstrapSeries bootstrap_functionals(const SimRecord& rec, const WaveSpeed& speed,
                                      double rho0) {
    BootstrapSeries out;
    if (rec.snaps.empty()) return out;
    const CharPath inner = extract_characteristic(rec, speed, rho0 - 1.0, +1);
    const double t_start = rec.epsilon > 0 ? 1.0 / rec.epsilon : 0.0;

    double supA = 0.0, supB = 0.0, supC = 0.0;
    for (std::size_t k = 0; k < rec.snaps.size() && k < inner.t.size(); ++k) {
        const Snapshot& s = rec.snaps[k];
        if (s.t < t_start) continue;
        const double r_in = inner.r[k];
        const double r_out = s.t + rec.M;
        double A = 0.0, Bv = 0.0, Cv = 0.0;
        double prev_w1 = kInf;
        for (std::size_t i = 0; i < s.u.size(); ++i) {
            const double r = s.r0 + double(i) * rec.dr;
            if (r < r_in || r > r_out) continue;
            const double sr = std::sqrt(r);
            const double cv = speed(s.u[i]);
            const double w1 = std::abs(sr * s.p[i] - cv * (sr * s.q[i] + s.u[i] / (2.0 * sr)));
            const double w2 = std::abs(sr * s.p[i] + cv * (sr * s.q[i] + s.u[i] / (2.0 * sr)));
            if (std::isfinite(prev_w1)) A += 0.5 * (w1 + prev_w1) * rec.dr;
            prev_w1 = w1;
            Bv = std::max(Bv, std::sqrt(s.t) * std::abs(s.u[i]));
            Cv = std::max(Cv, s.t * w2);
        }
        supA = std::max(supA, A);
        supB = std::max(supB, Bv);
        supC = std::max(supC, Cv);
        out.t.push_back(s.t);
        out.A.push_back(supA);
        out.B.push_back(supB);
        out.C.push_back(supC);
    }
    return out;
}

double discrete_energy(const Snapshot& snap, const WaveSpeed& speed) {
    double acc = 0.0;
    for (std::size_t i = 0; i < snap.u.size(); ++i) {
        const double r = snap.r_at(i);
        const double cv = speed(snap.u[i]);
        acc += (snap.p[i] * snap.p[i] + cv * cv * snap.q[i] * snap.q[i]) * r;
    }
    return M_PI * snap.dr * acc;
}

void write_field_record(const SimRecord& rec, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_field_record: cannot open " + path);
    const char magic[8] = {'L', 'A', 'B', 'F', 'L', 'D', '0', '1'};
    out.write(magic, 8);
    const std::uint32_t version = 1, nfields = 3;
    out.write(reinterpret_cast<const char*>(&version), 4);
    out.write(reinterpret_cast<const char*>(&nfields), 4);
    const std::uint64_t nsnap = rec.snaps.size();
    out.write(reinterpret_cast<const char*>(&nsnap), 8);
    out.write(reinterpret_cast<const char*>(&rec.dr), 8);
    out.write(reinterpret_cast<const char*>(&rec.epsilon), 8);
    out.write(reinterpret_cast<const char*>(&rec.M), 8);
    for (const Snapshot& s : rec.snaps) {
        out.write(reinterpret_cast<const char*>(&s.t), 8);
        out.write(reinterpret_cast<const char*>(&s.r0), 8);
        const std::uint64_t n = s.u.size();
        out.write(reinterpret_cast<const char*>(&n), 8);
        out.write(reinterpret_cast<const char*>(s.u.data()), std::streamsize(8 * n));
        out.write(reinterpret_cast<const char*>(s.p.data()), std::streamsize(8 * n));
        out.write(reinterpret_cast<const char*>(s.q.data()), std::streamsize(8 * n));
    }
    if (!out) throw std::runtime_error("write_field_record: write failed for " + path);
}

SimRecord read_field_record(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_field_record: cannot open " + path);
    char magic[8];
    in.read(magic, 8);
    if (std::string(magic, 8) != "LABFLD01")
        throw std::runtime_error("read_field_record: bad magic in " + path);
    std::uint32_t version = 0, nfields = 0;
    in.read(reinterpret_cast<char*>(&version), 4);
    in.read(reinterpret_cast<char*>(&nfields), 4);
    if (version != 1 || nfields != 3)
        throw std::runtime_error("read_field_record: unsupported layout in " + path);
    std::uint64_t nsnap = 0;
    SimRecord rec;
    in.read(reinterpret_cast<char*>(&nsnap), 8);
    in.read(reinterpret_cast<char*>(&rec.dr), 8);
    in.read(reinterpret_cast<char*>(&rec.epsilon), 8);
    in.read(reinterpret_cast<char*>(&rec.M), 8);
    rec.snaps.resize(nsnap);
    for (Snapshot& s : rec.snaps) {
        s.dr = rec.dr;
        std::uint64_t n = 0;
        in.read(reinterpret_cast<char*>(&s.t), 8);
        in.read(reinterpret_cast<char*>(&s.r0), 8);
        in.read(reinterpret_cast<char*>(&n), 8);
        s.u.resize(n);
        s.p.resize(n);
        s.q.resize(n);
        in.read(reinterpret_cast<char*>(s.u.data()), std::streamsize(8 * n));
        in.read(reinterpret_cast<char*>(s.p.data()), std::streamsize(8 * n));
        in.read(reinterpret_cast<char*>(s.q.data()), std::streamsize(8 * n));
    }
    if (!in) throw std::runtime_error("read_field_record: truncated file " + path);
    return rec;
}

} // namespace lab
