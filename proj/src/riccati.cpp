#include "lab/riccati.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "lab/solver.hpp"
#include "lab/spline.hpp"

namespace lab {

void CoefficientTrack::validate() const {
    const std::size_t n = t.size();
    if (n < 2) throw std::invalid_argument("CoefficientTrack: need >= 2 samples");
    if (a0.size() != n || a1.size() != n || a2.size() != n)
        throw std::invalid_argument("CoefficientTrack: ragged arrays");
    for (std::size_t i = 1; i < n; ++i)
        if (!(t[i] > t[i - 1]))
            throw std::invalid_argument("CoefficientTrack: t must be strictly ascending");
}

CoefficientTrack CoefficientTrack::from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("CoefficientTrack: cannot open " + path);
    CoefficientTrack tr;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        double tt, x0, x1, x2;
        if (ss >> tt >> x0 >> x1 >> x2) {
            tr.t.push_back(tt);
            tr.a0.push_back(x0);
            tr.a1.push_back(x1);
            tr.a2.push_back(x2);
        }
    }
    tr.provenance = "csv:" + path;
    tr.validate();
    return tr;
}

void CoefficientTrack::to_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("CoefficientTrack: cannot write " + path);
    out << "t,a0,a1,a2\n";
    out.precision(17);
    for (std::size_t i = 0; i < t.size(); ++i)
        out << t[i] << ',' << a0[i] << ',' << a1[i] << ',' << a2[i] << '\n';
}

CoefficientTrack coefficients_along(const CharPath& path, const WaveSpeed& c) {
    CoefficientTrack tr;
    const std::size_t n = path.t.size();
    tr.t.reserve(n);
    tr.a0.reserve(n);
    tr.a1.reserve(n);
    tr.a2.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = path.r[i];
        if (!(r > 0)) throw std::invalid_argument("coefficients_along: path reaches r <= 0");
        const double u = path.u[i];
        const double w2 = path.w2[i];
        const double cv = c(u);
        const double cp = c.prime(u);
        const double sr = std::sqrt(r);
        tr.t.push_back(path.t[i]);
        tr.a0.push_back(cp / (2.0 * sr * cv));
        tr.a1.push_back(cp / (4.0 * sr * cv) * (3.0 * cv * u / sr - 2.0 * w2));
        tr.a2.push_back(cv * cv * u / (4.0 * r * sr) + cv * cp * u * u / (2.0 * r * sr) -
                        3.0 * cp * u * w2 / (4.0 * r));
    }
    tr.provenance = "extracted(lambda=" + std::to_string(path.lambda) + ")";
    return tr;
}

namespace {

std::vector<double> cumulative_trapezoid(const std::vector<double>& t,
                                         const std::vector<double>& f, bool absval) {
    std::vector<double> out(t.size(), 0.0);
    for (std::size_t i = 1; i < t.size(); ++i) {
        const double fa = absval ? std::abs(f[i - 1]) : f[i - 1];
        const double fb = absval ? std::abs(f[i]) : f[i];
        out[i] = out[i - 1] + 0.5 * (fa + fb) * (t[i] - t[i - 1]);
    }
    return out;
}

} // namespace

BlowupBound hormander_bound(const CoefficientTrack& track, double w_start) {
    track.validate();
    for (double v : track.a0)
        if (v < -1e-14)
            throw std::invalid_argument("hormander_bound: requires a0 >= 0 on the track");

    const auto I0 = cumulative_trapezoid(track.t, track.a0, false);
    const auto I1 = cumulative_trapezoid(track.t, track.a1, true);
    const auto I2 = cumulative_trapezoid(track.t, track.a2, true);

    BlowupBound out;
    out.w_start = w_start;
    out.K = I2.back() * std::exp(I1.back());
    if (!(w_start > out.K)) return out;

    const double target = 1.0 / (w_start - out.K);
    double prev = I0.front() * std::exp(-I1.front());
    for (std::size_t i = 1; i < track.t.size(); ++i) {
        const double cur = I0[i] * std::exp(-I1[i]);
        if (cur >= target) {
            const double a = (target - prev) / (cur - prev);
            out.upper_bound_T = track.t[i - 1] + a * (track.t[i] - track.t[i - 1]);
            return out;
        }
        prev = cur;
    }
    return out; // never reached inside the track
}

namespace {

// Dormand-Prince 5(4) step; returns the fifth-order solution and error estimate.
template <class F>
void dp45_step(F&& f, double t, double w, double h, double& w5, double& err) {
    const double k1 = f(t, w);
    const double k2 = f(t + h / 5.0, w + h * (k1 / 5.0));
    const double k3 = f(t + 3.0 * h / 10.0, w + h * (3.0 * k1 / 40.0 + 9.0 * k2 / 40.0));
    const double k4 = f(t + 4.0 * h / 5.0,
                        w + h * (44.0 * k1 / 45.0 - 56.0 * k2 / 15.0 + 32.0 * k3 / 9.0));
    const double k5 =
        f(t + 8.0 * h / 9.0, w + h * (19372.0 * k1 / 6561.0 - 25360.0 * k2 / 2187.0 +
                                      64448.0 * k3 / 6561.0 - 212.0 * k4 / 729.0));
    const double k6 = f(t + h, w + h * (9017.0 * k1 / 3168.0 - 355.0 * k2 / 33.0 +
                                        46732.0 * k3 / 5247.0 + 49.0 * k4 / 176.0 -
                                        5103.0 * k5 / 18656.0));
    w5 = w + h * (35.0 * k1 / 384.0 + 500.0 * k3 / 1113.0 + 125.0 * k4 / 192.0 -
                  2187.0 * k5 / 6784.0 + 11.0 * k6 / 84.0);
    const double k7 = f(t + h, w5);
    const double w4 = w + h * (5179.0 * k1 / 57600.0 + 7571.0 * k3 / 16695.0 +
                               393.0 * k4 / 640.0 - 92097.0 * k5 / 339200.0 +
                               187.0 * k6 / 2100.0 + k7 / 40.0);
    err = std::abs(w5 - w4);
}

template <class F>
RiccatiResult integrate_generic(F&& rhs, double w_start, double t0, double t_end) {
    constexpr double escape = 1e12;
    constexpr double rtol = 1e-10, atol = 1e-12;
    RiccatiResult res;
    double t = t0, w = w_start;
    res.t.push_back(t);
    res.w.push_back(w);
    double h = (t_end - t0) / 1024.0;
    const double h_min = 1e-15 * std::max(1.0, std::abs(t_end));
    int sample_gate = 0;
    while (t < t_end) {
        h = std::min(h, t_end - t);
        double w5, err;
        dp45_step(rhs, t, w, h, w5, err);
        const double tol = atol + rtol * std::max(std::abs(w), std::abs(w5));
        if ((std::isfinite(w5) && err <= tol) || h <= h_min) {
            if (!std::isfinite(w5) || std::abs(w5) > escape) {
                // bracket the escape time by step bisection
                double hh = h;
                while (hh > 1e-9) {
                    hh *= 0.5;
                    double wmid, emid;
                    dp45_step(rhs, t, w, hh, wmid, emid);
                    if (std::isfinite(wmid) && std::abs(wmid) <= escape) {
                        t += hh;
                        w = wmid;
                    }
                }
                res.blowup_time = t;
                res.t.push_back(t);
                res.w.push_back(w);
                return res;
            }
            t += h;
            w = w5;
            if (++sample_gate % 4 == 0 || t >= t_end) {
                res.t.push_back(t);
                res.w.push_back(w);
            }
            if (err > 0) h *= std::min(4.0, 0.9 * std::pow(tol / err, 0.2));
            else h *= 4.0;
        } else {
            h *= std::max(0.1, 0.9 * std::pow(tol / err, 0.2));
            if (!std::isfinite(h) || h <= 0) h = h_min;
        }
    }
    return res;
}

} // namespace

RiccatiResult integrate_riccati(const CoefficientTrack& track, double w_start, double t_end) {
    track.validate();
    CubicSpline s0(track.t, track.a0), s1(track.t, track.a1), s2(track.t, track.a2);
    const double tlo = track.t.front(), thi = track.t.back();
    auto clampv = [tlo, thi](double t) { return std::min(std::max(t, tlo), thi); };
    auto rhs = [&](double t, double w) {
        const double tc = clampv(t);
        return s0(tc) * w * w + s1(tc) * w + s2(tc);
    };
    return integrate_generic(rhs, w_start, tlo, t_end);
}

RiccatiResult integrate_riccati(const std::function<double(double)>& a0,
                                const std::function<double(double)>& a1,
                                const std::function<double(double)>& a2, double w_start,
                                double t0, double t_end) {
    auto rhs = [&](double t, double w) { return a0(t) * w * w + a1(t) * w + a2(t); };
    return integrate_generic(rhs, w_start, t0, t_end);
}

double gronwall_bound(double f0, const std::vector<double>& t, const std::vector<double>& g,
                      const std::vector<double>& h, double t_eval) {
    if (t.size() < 2 || g.size() != t.size() || h.size() != t.size())
        throw std::invalid_argument("gronwall_bound: ragged arrays");
    for (std::size_t i = 0; i < t.size(); ++i)
        if (g[i] < 0 || h[i] < 0)
            throw std::invalid_argument("gronwall_bound: g and h must be non-negative");
    double ig = 0.0, ih = 0.0;
    for (std::size_t i = 1; i < t.size() && t[i - 1] < t_eval; ++i) {
        const double dt = std::min(t[i], t_eval) - t[i - 1];
        const double frac = dt / (t[i] - t[i - 1]);
        const double gb = g[i - 1] + frac * (g[i] - g[i - 1]);
        const double hb = h[i - 1] + frac * (h[i] - h[i - 1]);
        ig += 0.5 * (g[i - 1] + gb) * dt;
        ih += 0.5 * (h[i - 1] + hb) * dt;
    }
    return (f0 + 0.5 * ig) * std::exp(0.5 * ih);
}

UpperLifespan predicted_upper_lifespan(CaseTag case_tag, const CoefficientTrack& track,
                                       double w_start) {
    track.validate();
    UpperLifespan out;

    // case II sign convention: when a0 < 0 along the track, bound -w1 instead
    double mean_a0 = 0.0;
    for (double v : track.a0) mean_a0 += v;
    mean_a0 /= double(track.a0.size());
    CoefficientTrack tr = track;
    double w_eff = w_start;
    if (mean_a0 < 0.0) {
        for (double& v : tr.a0) v = -v;
        for (double& v : tr.a2) v = -v;
        w_eff = -w_start;
        out.sign_flipped = true;
    }
    out.w_start = w_eff;

    const auto I0 = cumulative_trapezoid(tr.t, tr.a0, false);
    const auto I1 = cumulative_trapezoid(tr.t, tr.a1, true);
    const auto I2 = cumulative_trapezoid(tr.t, tr.a2, true);
    out.K = I2.back() * std::exp(I1.back());
    if (!(w_eff > out.K)) {
        out.note = "w(1/eps) on the wrong side of K";
        return out;
    }

    // conservative: use the full-track exp(-int |a1|) damping
    const double damp = std::exp(-I1.back());
    const double I0_need = 1.0 / ((w_eff - out.K) * damp);

    for (std::size_t i = 1; i < tr.t.size(); ++i) {
        if (I0[i] >= I0_need) {
            const double a = (I0_need - I0[i - 1]) / (I0[i] - I0[i - 1]);
            out.T_upper = tr.t[i - 1] + a * (tr.t[i] - tr.t[i - 1]);
            return out;
        }
    }

    // crossing beyond the track: extend the cumulative integral by its fitted
    // tail against the case-appropriate clock
    const std::size_t n = tr.t.size();
    const std::size_t half = n / 2;
    std::vector<double> x(n - half), y(n - half);
    for (std::size_t i = half; i < n; ++i) {
        x[i - half] = case_tag == CaseTag::case_I ? std::sqrt(tr.t[i]) : std::log(tr.t[i]);
        y[i - half] = I0[i];
    }
    const LineFit fit = fit_line(x, y);
    if (!(fit.slope > 0)) {
        out.note = "a0 tail fit has non-positive slope; no finite bound";
        return out;
    }
    const double x_star = (I0_need - fit.intercept) / fit.slope;
    out.T_upper = case_tag == CaseTag::case_I ? x_star * x_star : std::exp(x_star);
    out.note = "crossing extrapolated past the track end";
    return out;
}

} // namespace lab
