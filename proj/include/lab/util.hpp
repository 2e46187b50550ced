#ifndef LAB_UTIL_HPP
#define LAB_UTIL_HPP

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace lab {

// Thrown when an algorithm fails to converge or produces non-finite output.
// Carries enough context to diagnose the offending configuration.
class NumericError : public std::runtime_error {
  public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a requested evaluation time lies at or past a profile blowup.
class BlowupReached : public NumericError {
  public:
    BlowupReached(double tau, double tau_star)
        : NumericError("evaluation at tau=" + std::to_string(tau) +
                       " at or past blowup tau*=" + std::to_string(tau_star)),
          tau_requested(tau), tau_star(tau_star) {}
    double tau_requested;
    double tau_star;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> x(n);
    if (n == 1) { x[0] = a; return x; }
    const double h = (b - a) / double(n - 1);
    for (std::size_t i = 0; i < n; ++i) x[i] = a + h * double(i);
    x.back() = b;
    return x;
}

inline double sqr(double x) { return x * x; }

// Minimize a continuous function on [a,b] by golden-section search.
// Deterministic; returns the midpoint of the final bracket.
template <class F>
double golden_section_min(F&& f, double a, double b, double xtol) {
    const double g = 0.6180339887498948482;
    double c = b - g * (b - a);
    double d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > xtol) {
        if (fc < fd) {
            b = d; d = c; fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

// Least-squares straight line y ~= intercept + slope*x. Returns R^2 as well.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) throw std::invalid_argument("fit_line: need >= 2 paired samples");
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) { sx += x[i]; sy += y[i]; }
    const double mx = sx / double(n), my = sy / double(n);
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    LineFit out;
    if (sxx == 0) throw std::invalid_argument("fit_line: degenerate abscissae");
    out.slope = sxy / sxx;
    out.intercept = my - out.slope * mx;
    out.r2 = (syy == 0) ? 1.0 : (sxy * sxy) / (sxx * syy);
    return out;
}

} // namespace lab

#endif
